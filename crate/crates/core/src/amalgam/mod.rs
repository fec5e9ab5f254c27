//! Grid data model and the spatial, spacetime and local-energy norms.

mod exponent;
mod field;
mod grid;
pub mod io;
mod norms;

pub use exponent::Exponent;
pub use field::{trapezoid_weights, FieldSeries, GridField};
pub use grid::GridSpec;
pub use norms::{
    amalgam_norm, cube_norm_rows, cube_norms, cube_norms_of_magnitude, espq_from_rows, holder_gap,
    lebesgue_norm, local_energy_norm, ls_epq_from_rows, norm_of_field, sequence_norm,
    spacetime_norm, time_lebesgue, NormSpec,
};
