use std::str::FromStr;

use amalgam_core::constructions::{bubble_blowup, BubbleTrainSpec};
use amalgam_core::error::{Error, Result};
use amalgam_core::spectral::SpectralWorkspace;
use amalgam_core::{amalgam_norm, Exponent, GridField, GridSpec};
use serde::{Deserialize, Serialize};

use super::{central_lattice_point, flatness};
use crate::params::Params;
use crate::report::{Verdict, VerifyReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataFamily {
    /// Smooth bump of radius 2 at the central lattice point.
    Smooth,
    Zero,
    /// Unit-coefficient bubble train in `L^r_uloc`, where the weighted
    /// quantity does not vanish.
    Bubble,
}

impl FromStr for DataFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smooth" => Ok(DataFamily::Smooth),
            "zero" => Ok(DataFamily::Zero),
            "bubble" => Ok(DataFamily::Bubble),
            _ => Err(Error::Domain(format!("unknown data family {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityParams {
    pub family: DataFamily,
    pub d: usize,
    pub p: Exponent,
    pub q: Exponent,
    /// Source exponent of the weighted limit, `p̃ < p`.
    pub pt: Exponent,
    pub side: usize,
    pub n: usize,
    /// Dyadic levels `j = 0..levels` for `τ = 2^{−j}` and `t = 2^{−j}`.
    pub levels: u32,
    pub t1: f64,
}

impl Default for ContinuityParams {
    fn default() -> Self {
        ContinuityParams {
            family: DataFamily::Smooth,
            d: 2,
            p: Exponent::TWO,
            q: Exponent::ONE,
            pt: Exponent::ONE,
            side: 9,
            n: 16,
            levels: 10,
            t1: 1.0,
        }
    }
}

impl ContinuityParams {
    pub fn from_params(ps: &mut Params) -> Result<Self> {
        let def = ContinuityParams::default();
        Ok(ContinuityParams {
            family: ps.string("family", "smooth")?.parse()?,
            d: ps.usize("d", def.d)?,
            p: ps.exponent("p", def.p)?,
            q: ps.exponent("q", def.q)?,
            pt: ps.exponent("pt", def.pt)?,
            side: ps.usize("side", def.side)?,
            n: ps.usize("n", def.n)?,
            levels: ps.usize("levels", def.levels as usize)? as u32,
            t1: ps.f64("t1", def.t1)?,
        })
    }
}

/// Non-increasing along the sequence, up to a relative round-off slack.
fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-300)
}

fn smooth_bump(grid: &GridSpec) -> GridField {
    let c = central_lattice_point(grid);
    GridField::scalar(grid.clone(), |x| {
        let r2: f64 = x
            .iter()
            .zip(&c)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            / 4.0;
        if r2 < 1.0 {
            (1.0 - 1.0 / (1.0 - r2)).exp() * (1.0 + 0.5 * (x[0] - c[0]))
        } else {
            0.0
        }
    })
}

/// Translation continuity, strong continuity of the heat semigroup at 0 and
/// at `t₁`, and the weighted vanishing of `t^σ‖e^{tΔ}f‖_{E^p_q}`.
pub fn scenario_continuity(prm: &ContinuityParams) -> Result<VerifyReport> {
    let mut r = VerifyReport::new(
        "continuity",
        "continuity and vanishing of the heat flow in E^p_q",
    );
    r.param("family", format!("{:?}", prm.family))
        .param("d", prm.d)
        .param("p", prm.p)
        .param("q", prm.q);
    r.param("pt", prm.pt)
        .param("side", prm.side)
        .param("n", prm.n)
        .param("levels", prm.levels)
        .param("t1", prm.t1);
    if prm.family == DataFamily::Bubble {
        return bubble_nonvanishing(r);
    }
    if prm.p.is_infinite() || prm.q.is_infinite() {
        r.note("translation and strong continuity need p, q < inf");
        r.fold(Verdict::NotApplicable);
        return Ok(r);
    }
    if prm.pt.value() >= prm.p.value() {
        return Err(Error::Domain("weighted vanishing needs pt < p".into()));
    }
    let grid = GridSpec::centered(prm.d, prm.side, prm.n)?;
    let f = match prm.family {
        DataFamily::Smooth => smooth_bump(&grid),
        _ => GridField::zeros(grid.clone(), 1),
    };
    let ws = SpectralWorkspace::new(&grid);
    let (p, q) = (prm.p, prm.q);
    let sigma = prm.d as f64 / 2.0 * (prm.pt.recip() - p.recip());
    let at_t1 = ws.heat_evolve(&f, prm.t1, 0)?;
    let mut series = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for j in 0..=prm.levels {
        let s = 2f64.powi(-(j as i32));
        let mut tau = vec![0.0; prm.d];
        tau[0] = s;
        let shifted = ws.translate(&f, &tau)?;
        let heat = ws.heat_evolve(&f, s, 0)?;
        let later = ws.heat_evolve(&f, prm.t1 + s, 0)?;
        let vals = [
            amalgam_norm(&shifted.sub(&f)?, p, q),
            amalgam_norm(&heat.sub(&f)?, p, q),
            amalgam_norm(&later.sub(&at_t1)?, p, q),
            s.powf(sigma) * amalgam_norm(&heat, p, q),
        ];
        for (k, v) in vals.into_iter().enumerate() {
            series[k].push(v);
        }
    }
    let names = ["translation", "heat_at_zero", "heat_at_t1", "weighted"];
    for (name, vals) in names.iter().zip(&series) {
        for (j, v) in vals.iter().enumerate() {
            r.sample(name, 2f64.powi(-(j as i32)), *v);
        }
        r.measure(&format!("{name}_first"), vals[0])
            .measure(&format!("{name}_last"), *vals.last().unwrap_or(&0.0));
        r.fold(Verdict::from_bool(decreasing(vals)));
    }
    r.measure("sigma", sigma);
    Ok(r)
}

/// Bubble-train data in `L^r_uloc`: `t^{(d/2)(1/r−1/p)}‖e^{tΔ}a‖_{L^p_uloc}`
/// stays bounded below across bands instead of vanishing.
fn bubble_nonvanishing(mut r: VerifyReport) -> Result<VerifyReport> {
    let spec = BubbleTrainSpec::uniform(1, Exponent::ONE, 6);
    let grid = GridSpec::cube(1, 23, 128, -4)?;
    let (s, p) = (Exponent::of(4.0), Exponent::TWO);
    let b = bubble_blowup(&spec, &grid, s, p, 8)?;
    for (k, v) in b.band_ratios.iter().enumerate() {
        r.sample("band_ratio", 2f64.powi(-(k as i32 + 1)), *v);
    }
    let lo = b.band_ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let fl = flatness(&b.band_ratios);
    r.measure("band_ratio_min", lo)
        .measure("band_ratio_flatness", fl);
    r.tolerance = 3.0;
    r.note("weighted quantity for bubble-train data in L^1_uloc, p = 2, bands 2^-k");
    r.fold(Verdict::from_bool(lo > 0.0 && fl <= 3.0));
    Ok(r)
}
