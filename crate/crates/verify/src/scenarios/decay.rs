use std::str::FromStr;

use amalgam_core::error::{Error, Result};
use amalgam_core::kernels::heat_kernel;
use amalgam_core::spectral::SpectralWorkspace;
use amalgam_core::{amalgam_norm, Exponent, GridField, GridSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::central_lattice_point;
use crate::fit::{dyadic_nodes, fit_exponent};
use crate::params::Params;
use crate::report::{Verdict, VerifyReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    /// `∇^h e^{tΔ}`.
    Heat,
    /// `e^{tΔ}ℙ∇·` on a tensor with a single `(1,2)` entry.
    Oseen,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TimeRegime {
    SmallT,
    LargeT,
}

impl FromStr for TimeRegime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SMALL_T" | "SMALL" => Ok(TimeRegime::SmallT),
            "LARGE_T" | "LARGE" => Ok(TimeRegime::LargeT),
            _ => Err(Error::Domain(format!("unknown time regime {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayParams {
    pub operator: Operator,
    pub regime: TimeRegime,
    pub d: usize,
    /// Source exponents `p̃, q̃`.
    pub pt: Exponent,
    pub qt: Exponent,
    /// Target exponents `p, q`.
    pub p: Exponent,
    pub q: Exponent,
    pub h: u8,
    /// Unit cubes per side and cells per unit.
    pub side: usize,
    pub n: usize,
    /// Fit window `[2^lo, 2^hi]`.
    pub window: (i32, i32),
    pub per_octave: u32,
    pub tolerance: f64,
}

impl DecayParams {
    /// Small-time heat setup with Lebesgue exponents on both sides.
    pub fn heat_small_t(d: usize, pt: Exponent, p: Exponent, h: u8) -> Self {
        DecayParams {
            operator: Operator::Heat,
            regime: TimeRegime::SmallT,
            d,
            pt,
            qt: pt,
            p,
            q: p,
            h,
            side: 3,
            n: 256,
            window: (-13, -7),
            per_octave: 4,
            tolerance: if d == 1 { 0.1 } else { 0.15 },
        }
    }

    /// Large-time heat setup on unit-cube data.
    pub fn heat_large_t(d: usize, p: Exponent, q: Exponent, h: u8) -> Self {
        DecayParams {
            operator: Operator::Heat,
            regime: TimeRegime::LargeT,
            d,
            pt: Exponent::ONE,
            qt: Exponent::ONE,
            p,
            q,
            h,
            side: 183,
            n: 2,
            window: (3, 7),
            per_octave: 4,
            tolerance: if d == 1 { 0.1 } else { 0.15 },
        }
    }

    /// The Oseen setup at `64³`.
    pub fn oseen_small_t() -> Self {
        DecayParams {
            operator: Operator::Oseen,
            regime: TimeRegime::SmallT,
            d: 3,
            pt: Exponent::of(1.5),
            qt: Exponent::of(1.5),
            p: Exponent::of(3.0),
            q: Exponent::of(3.0),
            h: 0,
            side: 2,
            n: 32,
            window: (-10, -5),
            per_octave: 4,
            tolerance: 0.15,
        }
    }

    pub fn from_params(ps: &mut Params) -> Result<Self> {
        let operator = match ps.string("operator", "heat")?.as_str() {
            "heat" => Operator::Heat,
            "oseen" => Operator::Oseen,
            o => return Err(Error::Domain(format!("unknown operator {o:?}"))),
        };
        let regime: TimeRegime = ps.string("regime", "SMALL_T")?.parse()?;
        let d = ps.usize("d", if operator == Operator::Oseen { 3 } else { 1 })?;
        let base = match (operator, regime) {
            (Operator::Oseen, _) => DecayParams::oseen_small_t(),
            (Operator::Heat, TimeRegime::SmallT) => {
                DecayParams::heat_small_t(d, Exponent::ONE, Exponent::INF, 0)
            }
            (Operator::Heat, TimeRegime::LargeT) => {
                DecayParams::heat_large_t(d, Exponent::INF, Exponent::INF, 0)
            }
        };
        let pt = ps.exponent("pt", base.pt)?;
        let p = ps.exponent("p", base.p)?;
        let default_qt = if regime == TimeRegime::SmallT {
            pt
        } else {
            base.qt
        };
        let default_q = if regime == TimeRegime::SmallT {
            p
        } else {
            base.q
        };
        Ok(DecayParams {
            operator,
            regime,
            d,
            pt,
            qt: ps.exponent("qt", default_qt)?,
            p,
            q: ps.exponent("q", default_q)?,
            h: ps.usize("h", base.h as usize)? as u8,
            side: ps.usize("side", base.side)?,
            n: ps.usize("n", base.n)?,
            window: (
                ps.f64("window_lo", base.window.0 as f64)? as i32,
                ps.f64("window_hi", base.window.1 as f64)? as i32,
            ),
            per_octave: ps.usize("per_octave", base.per_octave as usize)? as u32,
            tolerance: ps.f64(
                "tolerance",
                if d == 1 && operator == Operator::Heat {
                    0.1
                } else {
                    0.15
                },
            )?,
        })
    }

    /// Predicted slope, or `None` when the regime does not determine one.
    pub fn predicted(&self) -> Option<f64> {
        let d = self.d as f64;
        let extra = match self.operator {
            Operator::Heat => self.h as f64 / 2.0,
            Operator::Oseen => 0.5,
        };
        let local = (d / 2.0) * (self.pt.recip() - self.p.recip());
        let global = (d / 2.0) * (self.qt.recip() - self.q.recip());
        match self.regime {
            TimeRegime::SmallT => Some(-local - extra),
            TimeRegime::LargeT if global <= local => Some(-global - extra),
            TimeRegime::LargeT => None,
        }
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::centered(self.d, self.side, self.n)
    }

    fn record(&self, r: &mut VerifyReport) {
        r.param("operator", format!("{:?}", self.operator))
            .param("regime", format!("{:?}", self.regime))
            .param("d", self.d)
            .param("pt", self.pt)
            .param("qt", self.qt)
            .param("p", self.p)
            .param("q", self.q)
            .param("h", self.h)
            .param("side", self.side)
            .param("n", self.n)
            .param(
                "window",
                format!("[2^{}, 2^{}]", self.window.0, self.window.1),
            );
    }
}

/// Ratio `‖T_t f_t‖_{E^p_q} / ‖f_t‖_{E^{p̃}_{q̃}}` at each node.
///
/// Small times use the probe `f_t = Γ(· − x₀, t)` at the central lattice
/// point, which saturates the local term. Large times use the indicator of
/// the central unit cube, which saturates the global term when `q̃ = 1`.
pub fn decay_samples(prm: &DecayParams, grid: &GridSpec, times: &[f64]) -> Result<Vec<(f64, f64)>> {
    let d = grid.d();
    if prm.operator == Operator::Oseen && d < 2 {
        return Err(Error::Domain("the Oseen operator needs d >= 2".into()));
    }
    let ws = SpectralWorkspace::new(grid);
    let x0 = central_lattice_point(grid);
    let cube = GridField::scalar(grid.clone(), |x| {
        if x.iter().zip(&x0).all(|(a, c)| (a - c).abs() < 0.5) {
            1.0
        } else {
            0.0
        }
    });
    let cube_spectra = ws.spectra(&cube);
    times
        .par_iter()
        .map(|&t| {
            let probe = match prm.regime {
                TimeRegime::SmallT => {
                    let mut y = vec![0.0; d];
                    GridField::scalar(grid.clone(), |x| {
                        for a in 0..d {
                            y[a] = x[a] - x0[a];
                        }
                        heat_kernel(&y, t)
                    })
                }
                TimeRegime::LargeT => cube.clone(),
            };
            let out = match prm.operator {
                Operator::Heat => match prm.regime {
                    TimeRegime::LargeT => ws.heat_from_spectra(&cube_spectra, t, prm.h)?,
                    TimeRegime::SmallT => ws.heat_evolve(&probe, t, prm.h)?,
                },
                Operator::Oseen => {
                    let mut comps = vec![vec![0.0; grid.len()]; d * d];
                    comps[1] = probe.component(0).to_vec();
                    let f = GridField::from_components(grid.clone(), comps)?;
                    ws.oseen_apply(&f, t)?
                }
            };
            let num = amalgam_norm(&out, prm.p, prm.q);
            let den = amalgam_norm(&probe, prm.pt, prm.qt);
            Ok((t, num / den))
        })
        .collect()
}

fn check_order(prm: &DecayParams) -> Result<()> {
    if prm.pt.value() > prm.p.value() || prm.qt.value() > prm.q.value() {
        return Err(Error::Domain(
            "decay estimates need p̃ <= p and q̃ <= q".into(),
        ));
    }
    if prm.h > 1 {
        return Err(Error::Domain("h must be 0 or 1".into()));
    }
    Ok(())
}

/// Runs one decay fit on `grid`; shared by the plain and box-doubling scenarios.
pub fn decay_fit_on(
    prm: &DecayParams,
    grid: &GridSpec,
) -> Result<(Vec<(f64, f64)>, crate::fit::ScalingFit)> {
    let times = dyadic_nodes(prm.window.0, prm.window.1, prm.per_octave);
    let samples = decay_samples(prm, grid, &times)?;
    let fit = fit_exponent(&samples, (2f64.powi(prm.window.0), 2f64.powi(prm.window.1)))?;
    Ok((samples, fit))
}

/// Fits the decay exponent of the operator and compares it with the
/// amalgam decay estimate.
pub fn scenario_decay(prm: &DecayParams) -> Result<VerifyReport> {
    check_order(prm)?;
    let id = match prm.operator {
        Operator::Heat => "decay_heat",
        Operator::Oseen => "decay_oseen",
    };
    let mut r = VerifyReport::new(id, "heat semigroup decay between amalgam spaces");
    prm.record(&mut r);
    r.tolerance = prm.tolerance;
    let Some(pred) = prm.predicted() else {
        r.verdict = Verdict::NotApplicable;
        r.note("large-time term does not dominate: (1/q̃ - 1/q) > (1/p̃ - 1/p)");
        return Ok(r);
    };
    if prm.regime == TimeRegime::LargeT && prm.qt != Exponent::ONE {
        r.verdict = Verdict::NotApplicable;
        r.note("unit-cube data saturate the large-time term only for q̃ = 1");
        return Ok(r);
    }
    let (samples, fit) = decay_fit_on(prm, &prm.grid()?)?;
    for (t, v) in &samples {
        r.sample("ratio", *t, *v);
    }
    r.predict("slope", pred);
    r.measure("slope", fit.slope)
        .measure("max_rel_residual", fit.max_rel_residual);
    r.fits.insert("ratio".into(), fit.clone());
    r.fold(Verdict::from_bool(
        (fit.slope - pred).abs() <= prm.tolerance,
    ));
    Ok(r)
}

/// Repeats a decay fit on the box with twice the side and reports the slope shift.
pub fn scenario_truncation(prm: &DecayParams, max_shift: f64) -> Result<VerifyReport> {
    check_order(prm)?;
    let mut r = VerifyReport::new(
        "truncation",
        "fitted slopes are insensitive to the box size",
    );
    prm.record(&mut r);
    r.tolerance = max_shift;
    let grid = prm.grid()?;
    let (_, a) = decay_fit_on(prm, &grid)?;
    let (samples, b) = decay_fit_on(prm, &grid.enlarged(2)?)?;
    for (t, v) in samples {
        r.sample("ratio_doubled", t, v);
    }
    r.measure("slope", a.slope)
        .measure("slope_doubled", b.slope)
        .measure("shift", (a.slope - b.slope).abs());
    let shift = (a.slope - b.slope).abs();
    r.fits.insert("ratio_doubled".into(), b);
    r.fold(Verdict::from_bool(shift < max_shift));
    Ok(r)
}
