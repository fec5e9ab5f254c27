use amalgam_core::constructions::{bubble_blowup, BubbleBlowup, BubbleTrainSpec};
use amalgam_core::error::Result;
use amalgam_core::{Exponent, GridSpec};
use serde::{Deserialize, Serialize};

use super::flatness;
use crate::params::Params;
use crate::report::{Verdict, VerifyReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BubbleParams {
    pub d: usize,
    pub r: Exponent,
    pub p: Exponent,
    pub s: Exponent,
    pub bubbles: usize,
    pub side: usize,
    pub n: usize,
    pub origin: i64,
    pub nodes_per_band: usize,
    /// Allowed relative deviation of `I_k` from its least-squares line.
    pub linear_tol: f64,
    /// Geometric ratio of the summable contrast family `c_k = ρ^k`.
    pub contrast_ratio: f64,
    /// The contrast family counts as bounded when its last two increments
    /// shrink at least by this ratio.
    pub tail_ratio: f64,
}

impl Default for BubbleParams {
    fn default() -> Self {
        BubbleParams {
            d: 1,
            r: Exponent::ONE,
            p: Exponent::TWO,
            s: Exponent::of(4.0),
            bubbles: 6,
            side: 23,
            n: 128,
            origin: -4,
            nodes_per_band: 8,
            linear_tol: 0.2,
            contrast_ratio: 0.5,
            tail_ratio: 0.75,
        }
    }
}

impl BubbleParams {
    pub fn from_params(ps: &mut Params) -> Result<Self> {
        let def = BubbleParams::default();
        Ok(BubbleParams {
            d: ps.usize("d", def.d)?,
            r: ps.exponent("r", def.r)?,
            p: ps.exponent("p", def.p)?,
            s: ps.exponent("s", def.s)?,
            bubbles: ps.usize("bubbles", def.bubbles)?,
            side: ps.usize("side", def.side)?,
            n: ps.usize("n", def.n)?,
            origin: ps.f64("origin", def.origin as f64)? as i64,
            nodes_per_band: ps.usize("nodes_per_band", def.nodes_per_band)?,
            linear_tol: ps.f64("linear_tol", def.linear_tol)?,
            contrast_ratio: ps.f64("contrast_ratio", def.contrast_ratio)?,
            tail_ratio: ps.f64("tail_ratio", def.tail_ratio)?,
        })
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::cube(self.d, self.side, self.n, self.origin)
    }
}

/// Least-squares slope of `I_k` against `k`.
pub fn linear_slope(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mx = (n + 1.0) / 2.0;
    let my = values.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, v) in values.iter().enumerate() {
        let x = (i + 1) as f64 - mx;
        sxy += x * (v - my);
        sxx += x * x;
    }
    sxy / sxx
}

fn increments(partials: &[f64]) -> Vec<f64> {
    let mut prev = 0.0;
    partials
        .iter()
        .map(|&v| {
            let d = v - prev;
            prev = v;
            d
        })
        .collect()
}

/// `max_k |I_k − (a + bk)| / I_k` for the least-squares line `a + bk`.
pub fn linear_deviation(values: &[f64]) -> f64 {
    let b = linear_slope(values);
    let n = values.len() as f64;
    let a = values.iter().sum::<f64>() / n - b * (n + 1.0) / 2.0;
    values
        .iter()
        .enumerate()
        .map(|(i, v)| (v - a - b * (i + 1) as f64).abs() / v.abs())
        .fold(0.0, f64::max)
}

/// `ΔI_K / ΔI_{K−1}`.
pub fn tail_ratio(partials: &[f64]) -> f64 {
    let inc = increments(partials);
    match inc.len() {
        0 | 1 => f64::NAN,
        n => inc[n - 1] / inc[n - 2],
    }
}

fn record(r: &mut VerifyReport, tag: &str, b: &BubbleBlowup) {
    for (k, v) in b.partial_integrals.iter().enumerate() {
        r.sample(&format!("{tag}_partial_integral"), (k + 1) as f64, *v);
    }
    for (k, v) in b.band_ratios.iter().enumerate() {
        r.sample(&format!("{tag}_band_ratio"), (k + 1) as f64, *v);
    }
}

/// Divergence of the time integral of `‖e^{tΔ}a‖^s_{L^p_uloc}` for the
/// unit-coefficient bubble train, against a summable contrast family.
pub fn scenario_bubble(prm: &BubbleParams) -> Result<VerifyReport> {
    let mut r = VerifyReport::new(
        "bubble_blowup",
        "bubble train breaks the L^s L^p_uloc estimate band by band",
    );
    r.param("d", prm.d)
        .param("r", prm.r)
        .param("p", prm.p)
        .param("s", prm.s)
        .param("bubbles", prm.bubbles);
    r.param("side", prm.side)
        .param("n", prm.n)
        .param("origin", prm.origin)
        .param("nodes_per_band", prm.nodes_per_band);
    r.param("contrast", format!("c_k = {}^k", prm.contrast_ratio));
    r.tolerance = prm.linear_tol;
    let grid = prm.grid()?;

    let uniform = BubbleTrainSpec::uniform(prm.d, prm.r, prm.bubbles);
    let b = bubble_blowup(&uniform, &grid, prm.s, prm.p, prm.nodes_per_band)?;
    for &(t, v) in &b.samples {
        r.sample("uloc_norm", t, v);
    }
    record(&mut r, "uniform", &b);
    let slope = linear_slope(&b.partial_integrals);
    let dev = linear_deviation(&b.partial_integrals);
    r.measure("slope", slope)
        .measure("linear_deviation", dev)
        .measure("uniform_tail_ratio", tail_ratio(&b.partial_integrals));
    r.measure(
        "band_ratio_min",
        b.band_ratios.iter().copied().fold(f64::INFINITY, f64::min),
    );
    r.measure("band_ratio_flatness", flatness(&b.band_ratios));

    let coeffs = (1..=prm.bubbles)
        .map(|k| prm.contrast_ratio.powi(k as i32))
        .collect();
    let contrast = BubbleTrainSpec {
        d: prm.d,
        r: prm.r,
        coeffs,
    };
    let c = bubble_blowup(&contrast, &grid, prm.s, prm.p, prm.nodes_per_band)?;
    record(&mut r, "contrast", &c);
    let total = *c.partial_integrals.last().unwrap_or(&0.0);
    let rho = tail_ratio(&c.partial_integrals);
    let last = *increments(&c.partial_integrals).last().unwrap_or(&0.0);
    // Geometric extrapolation of the tail.
    let limit = if rho < 1.0 {
        total + last * rho / (1.0 - rho)
    } else {
        f64::INFINITY
    };
    r.measure("contrast_total", total)
        .measure("contrast_tail_ratio", rho)
        .measure("contrast_limit", limit);

    r.fold(Verdict::from_bool(slope > 0.0 && dev <= prm.linear_tol));
    r.fold(Verdict::from_bool(rho <= prm.tail_ratio));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_helpers() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert!((linear_slope(&v) - 1.0).abs() < 1e-14);
        assert!(linear_deviation(&v) < 1e-14);
        assert!((linear_deviation(&[1.0, 1.0, 4.0]) - 1.0).abs() < 1e-14);
        assert!((tail_ratio(&[1.0, 1.5, 1.75]) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn short_train_runs() {
        let prm = BubbleParams {
            bubbles: 4,
            n: 32,
            side: 13,
            ..Default::default()
        };
        let r = scenario_bubble(&prm).unwrap();
        assert!(r.measured["slope"] > 0.0);
        assert!(
            r.measured["contrast_tail_ratio"] < r.measured["uniform_tail_ratio"],
            "{:?}",
            r.measured
        );
    }
}
