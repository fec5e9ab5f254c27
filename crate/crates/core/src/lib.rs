//! Wiener amalgam norms on lattice-aligned grids, closed-form kernels,
//! Fourier-spectral heat/Oseen operators, Picard mild-solution solvers
//! and the explicit constructions used to probe them.

pub mod amalgam;
pub mod constructions;
pub mod error;
pub mod kernels;
pub mod solver;
pub mod spectral;

pub use amalgam::{
    amalgam_norm, holder_gap, lebesgue_norm, local_energy_norm, spacetime_norm, Exponent,
    FieldSeries, GridField, GridSpec, NormSpec,
};
pub use error::{Error, Result};
