//! Verification harness for `amalgam-core`: scenario runners, log-log
//! exponent fits and CSV/JSON/SVG report emission.

pub mod catalog;
pub mod emit;
pub mod fit;
pub mod params;
pub mod report;
pub mod scenarios;

pub use fit::{dyadic_nodes, fit_exponent, ScalingFit};
pub use report::{Verdict, VerifyReport};
