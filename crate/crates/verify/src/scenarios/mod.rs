//! Scenario runners. Each returns a [`VerifyReport`](crate::report::VerifyReport)
//! with its parameters, measurements, predictions and verdict.

pub mod bubble;
pub mod continuity;
pub mod decay;
pub mod giga;
pub mod identities;
pub mod kernels;
pub mod regularized;
pub mod spacetime;
pub mod switch;
pub mod theorem;

use amalgam_core::GridSpec;

/// `max / min` of positive values; infinite if any value is not positive.
pub fn flatness(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    if values.is_empty() || !(lo > 0.0) || !hi.is_finite() {
        return f64::INFINITY;
    }
    hi / lo
}

/// The lattice point closest to the middle of the box.
pub fn central_lattice_point(grid: &GridSpec) -> Vec<f64> {
    grid.center()
        .iter()
        .take(grid.d())
        .map(|c| c.round())
        .collect()
}

/// Smallest odd integer `≥ x`, at least 1.
pub fn odd_at_least(x: f64) -> usize {
    let n = x.ceil().max(1.0) as usize;
    if n % 2 == 1 {
        n
    } else {
        n + 1
    }
}
