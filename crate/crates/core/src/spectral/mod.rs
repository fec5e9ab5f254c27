//! Fourier-spectral heat, Leray and Oseen operators on the periodic box of a
//! grid, and the Duhamel integral.

mod duhamel;
mod ops;
mod workspace;

pub use duhamel::{bilinear_b, bilinear_series, duhamel, duhamel_series, DuhamelStepper};
pub use ops::{heat_evolve, leray_project, oseen_apply};
pub use workspace::{SpectralWorkspace, Spectrum};
