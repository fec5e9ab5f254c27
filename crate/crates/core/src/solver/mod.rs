//! Picard iteration for mild Navier–Stokes solutions, the mollified and
//! localized scheme with its local-energy accounting, and the a priori
//! lattice quantities.

mod apriori;
mod picard;
mod regularized;
mod weighted;

use serde::{Deserialize, Serialize};

use crate::amalgam::{Exponent, NormSpec};
use crate::error::{domain, Result};

pub use apriori::{apriori_quantities, AprioriQuantities};
pub use picard::{mild_residual, picard_solve, PicardTrace};
pub use regularized::{
    cutoff_profile, mollifier_field, regularized_solve, RegularizedConfig, RegularizedOutcome,
};
pub use weighted::{weighted_norms, WeightedNorms};

/// Constant in the subcritical time-scale condition.
pub const TIMESCALE_CONSTANT: f64 = 8.0;
/// `c` in the regularized window `T < min(1, c ε³ B⁻²)`.
pub const REGULARIZED_WINDOW: f64 = 1.0 / 64.0;
/// `λ₀` in `λ_R = min(λ₀, λ₀R², λ₀R²/A²)`.
pub const LAMBDA0: f64 = 1.0 / 64.0;

/// Data regime, fixing the norm in which iterates must contract.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    /// `u₀ ∈ E^r_q`, `r > 3`; iterates measured in `sup_t E^r_q`.
    Subcritical { r: Exponent, q: Exponent },
    /// Small `u₀ ∈ E³_q`; iterates measured in `sup_t t^{1/4} E⁶_q`.
    CriticalSmall { q: Exponent },
    /// `u₀ ∈ E³_q`, `q ≤ 3`; iterates measured in `sup_t t^{1/4} E⁶_{q₁}`,
    /// `1/q₁ = 1/q − 1/6`.
    CriticalDecay { q: Exponent },
}

impl Regime {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Regime::Subcritical { r, .. } if r.value() <= 3.0 => {
                domain("subcritical data need r > 3")
            }
            Regime::CriticalDecay { q } if q.value() > 3.0 => {
                domain("the decay regime needs q <= 3")
            }
            _ => Ok(()),
        }
    }

    /// Spatial exponents `(p, q)` and time weight `a` of the iteration norm.
    pub fn iteration_norm(&self) -> (Exponent, Exponent, f64) {
        match *self {
            Regime::Subcritical { r, q } => (r, q, 0.0),
            Regime::CriticalSmall { q } => (Exponent::of(6.0), q, 0.25),
            Regime::CriticalDecay { q } => (Exponent::of(6.0), sixth_shift(q), 0.25),
        }
    }

    /// Spatial norm the data are measured in.
    pub fn data_norm(&self) -> NormSpec {
        match *self {
            Regime::Subcritical { r, q } => NormSpec::Epq { p: r, q },
            Regime::CriticalSmall { q } | Regime::CriticalDecay { q } => NormSpec::Epq {
                p: Exponent::of(3.0),
                q,
            },
        }
    }

    pub fn q(&self) -> Exponent {
        match *self {
            Regime::Subcritical { q, .. }
            | Regime::CriticalSmall { q }
            | Regime::CriticalDecay { q } => q,
        }
    }
}

/// `q₁` with `1/q₁ = 1/q − 1/6`.
pub(crate) fn sixth_shift(q: Exponent) -> Exponent {
    Exponent::from_recip((q.recip() - 1.0 / 6.0).max(0.0)).expect("reciprocal in [0, 1]")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub t_final: f64,
    /// Dyadic levels between `T·2^{−levels}` and `T`.
    pub levels: u32,
    /// Uniform substeps per dyadic level (and on `[0, T·2^{−levels}]`).
    pub substeps: u32,
    pub picard_cap: u32,
    pub contraction_tol: f64,
    pub regime: Regime,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return domain("final time must be positive");
        }
        if self.picard_cap < 1 || self.substeps < 1 {
            return domain("picard_cap and substeps must be at least 1");
        }
        if !(self.contraction_tol > 0.0) {
            return domain("contraction tolerance must be positive");
        }
        self.regime.validate()
    }

    pub fn times(&self) -> Vec<f64> {
        time_grid(self.t_final, self.levels, self.substeps)
    }
}

/// `0`, then `substeps` uniform nodes on `[0, T2^{−L}]` and on each dyadic
/// interval `[T2^{−j}, T2^{−j+1}]`, ending at `T`.
pub fn time_grid(t_final: f64, levels: u32, substeps: u32) -> Vec<f64> {
    let sub = substeps.max(1) as usize;
    let mut out = vec![0.0];
    let first = t_final * 2f64.powi(-(levels as i32));
    for i in 1..=sub {
        out.push(first * i as f64 / sub as f64);
    }
    for j in (1..=levels as i32).rev() {
        let a = t_final * 2f64.powi(-j);
        let b = 2.0 * a;
        for i in 1..=sub {
            out.push(a + (b - a) * i as f64 / sub as f64);
        }
    }
    *out.last_mut().expect("nonempty") = t_final;
    out
}

/// Largest dyadic `T ≤ 2^{20}` with `T^{1/2−3/(2r)} + T^{1/2} ≤ 1/(8N)`.
pub fn subcritical_timescale(u0_norm: f64, r: Exponent) -> Result<f64> {
    if r.value() <= 3.0 {
        return domain("subcritical time scale needs r > 3");
    }
    if u0_norm <= 0.0 {
        return Ok(2f64.powi(20));
    }
    let target = 1.0 / (TIMESCALE_CONSTANT * u0_norm);
    let a = 0.5 - 1.5 * r.recip();
    for j in (-1074..=20).rev() {
        let t = 2f64.powi(j);
        if t == 0.0 {
            break;
        }
        if t.powf(a) + t.sqrt() <= target {
            return Ok(t);
        }
    }
    Ok(f64::MIN_POSITIVE)
}
