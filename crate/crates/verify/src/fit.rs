use amalgam_core::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Least-squares line through `(log t, log value)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    /// Natural log of the prefactor.
    pub intercept: f64,
    /// `max |value / fitted − 1|` over the window.
    pub max_rel_residual: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub nodes: usize,
}

impl ScalingFit {
    pub fn predict(&self, t: f64) -> f64 {
        (self.intercept + self.slope * t.ln()).exp()
    }
}

fn is_dyadic(t: f64) -> bool {
    t > 0.0 && t.is_finite() && t.log2().fract() == 0.0
}

/// Fits `value ≈ C t^slope` on the samples with `t` in the closed window.
///
/// The window ends must be powers of two and contain at least six nodes.
pub fn fit_exponent(samples: &[(f64, f64)], window: (f64, f64)) -> Result<ScalingFit> {
    let (lo, hi) = window;
    if !(is_dyadic(lo) && is_dyadic(hi) && lo < hi) {
        return Err(Error::Domain(format!(
            "fit window [{lo}, {hi}] is not dyadic"
        )));
    }
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|(t, _)| *t >= lo && *t <= hi)
        .collect();
    if pts.len() < 6 {
        return Err(Error::Domain(format!(
            "{} nodes in fit window, need 6",
            pts.len()
        )));
    }
    if let Some((t, v)) = pts.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Domain(format!(
            "value {v} at t = {t} is not positive"
        )));
    }
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, v)| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_rel_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).exp_m1().abs())
        .fold(0.0, f64::max);
    Ok(ScalingFit {
        slope,
        intercept,
        max_rel_residual,
        t_min: lo,
        t_max: hi,
        nodes: pts.len(),
    })
}

/// `2^{j/per_octave}` for `j` from `lo·per_octave` to `hi·per_octave`.
pub fn dyadic_nodes(lo: i32, hi: i32, per_octave: u32) -> Vec<f64> {
    let k = per_octave.max(1) as i32;
    (lo * k..=hi * k)
        .map(|j| 2f64.powf(j as f64 / k as f64))
        .collect()
}
