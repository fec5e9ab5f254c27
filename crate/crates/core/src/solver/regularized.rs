use serde::{Deserialize, Serialize};

use crate::amalgam::{
    amalgam_norm, cube_norms, espq_from_rows, trapezoid_weights, Exponent, FieldSeries, GridField,
    GridSpec,
};
use crate::error::{domain, Result};
use crate::solver::{time_grid, PicardTrace, REGULARIZED_WINDOW};
use crate::spectral::{DuhamelStepper, SpectralWorkspace, Spectrum};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularizedConfig {
    /// Mollification and cutoff scale, `0 < ε < 1`.
    pub eps: f64,
    pub t_final: f64,
    pub levels: u32,
    pub substeps: u32,
    pub picard_cap: u32,
    pub contraction_tol: f64,
    pub q: Exponent,
}

#[derive(Clone, Debug)]
pub struct RegularizedOutcome {
    pub series: FieldSeries,
    pub gradient: FieldSeries,
    pub trace: PicardTrace,
    /// `‖u₀‖_{E²_q}`.
    pub data_norm: f64,
    /// `‖u^ε‖_{LE_q(0,T)}`.
    pub le_norm: f64,
    /// `C₀ = ‖e^{tΔ}u₀‖_{LE_q(0,T)} / ‖u₀‖_{E²_q}`.
    pub c0: f64,
    /// `min(1, c ε³ ‖u₀‖⁻²_{E²_q})`.
    pub window: f64,
    pub admissible: bool,
}

fn bump(r2: f64) -> f64 {
    if r2 < 1.0 {
        (-1.0 / (1.0 - r2)).exp()
    } else {
        0.0
    }
}

/// Radially decreasing cutoff: `1` on `|x| ≤ 1`, `0` beyond `3/2`, smooth between.
pub fn cutoff_profile(r: f64) -> f64 {
    let s = ((r - 1.0) * 2.0).clamp(0.0, 1.0);
    let f = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let (a, b) = (f(1.0 - s), f(s));
    a / (a + b)
}

/// `η_ε` sampled on the periodic displacement lattice of `spec` and
/// normalized to unit discrete sum.
pub fn mollifier_field(spec: &GridSpec, eps: f64) -> Vec<f64> {
    let h = spec.h();
    let n = spec.cells3();
    let wrap = |j: usize, len: usize| {
        let j = j as i64;
        let len = len as i64;
        (if j <= len / 2 { j } else { j - len }) as f64
    };
    let mut k = vec![0.0; spec.len()];
    for (idx, v) in k.iter_mut().enumerate() {
        let j = spec.unravel(idx);
        let r2: f64 = (0..spec.d())
            .map(|a| (wrap(j[a], n[a]) * h / eps).powi(2))
            .sum();
        *v = bump(r2);
    }
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

struct Regularizer {
    kernel: Spectrum,
    cutoff: Vec<f64>,
}

impl Regularizer {
    fn new(ws: &SpectralWorkspace, eps: f64) -> Self {
        let spec = ws.spec();
        let kernel = ws.forward(&mollifier_field(spec, eps));
        let cutoff = (0..spec.len())
            .map(|idx| {
                let x = spec.point(idx);
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                cutoff_profile(eps * r)
            })
            .collect();
        Regularizer { kernel, cutoff }
    }

    fn mollify(&self, ws: &SpectralWorkspace, u: &GridField) -> Result<GridField> {
        let spectra: Vec<Option<Spectrum>> = ws
            .spectra(u)
            .into_iter()
            .map(|s| s.map(|s| s.iter().zip(&self.kernel).map(|(a, b)| a * b).collect()))
            .collect();
        ws.to_field(&spectra)
    }

    /// Spectrum of `∇·(J_ε(u) ⊗ uΦ_ε)`.
    fn forcing(&self, ws: &SpectralWorkspace, u: &GridField) -> Result<Vec<Spectrum>> {
        let j = self.mollify(ws, u)?;
        let g = u.times_scalar(&self.cutoff)?;
        ws.product_divergence_spectra(&j, &g)
    }
}

/// Per-node cube rows for `u` and `∇u`, the ingredients of `LE_q`.
#[derive(Default)]
struct LeRows {
    u: Vec<Vec<f64>>,
    grad: Vec<Vec<f64>>,
}

impl LeRows {
    fn push(&mut self, ws: &SpectralWorkspace, f: &GridField) -> Result<()> {
        self.u.push(cube_norms(f, Exponent::TWO));
        self.grad.push(cube_norms(&ws.gradient(f)?, Exponent::TWO));
        Ok(())
    }

    fn norm(&self, weights: &[f64], q: Exponent) -> f64 {
        espq_from_rows(&self.u, weights, Exponent::INF, q)
            + espq_from_rows(&self.grad, weights, Exponent::TWO, q)
    }
}

/// Picard iteration for `u = e^{tΔ}u₀ − ∫₀ᵗ e^{(t−τ)Δ}ℙ∇·(J_ε(u) ⊗ uΦ_ε) dτ`
/// in the `LE_q(0,T)` norm.
pub fn regularized_solve(u0: &GridField, cfg: &RegularizedConfig) -> Result<RegularizedOutcome> {
    if !(cfg.eps > 0.0 && cfg.eps < 1.0) {
        return domain("ε must lie in (0, 1)");
    }
    if !(cfg.t_final > 0.0) || cfg.picard_cap < 1 {
        return domain("need T > 0 and at least one iteration");
    }
    let spec = u0.spec();
    let d = spec.d();
    if d < 2 || u0.components() != d {
        return domain("regularized scheme needs d >= 2 and d components");
    }
    let ws = SpectralWorkspace::new(spec);
    let reg = Regularizer::new(&ws, cfg.eps);
    let times = time_grid(cfg.t_final, cfg.levels, cfg.substeps);
    let weights = trapezoid_weights(&times)?;
    let data_norm = amalgam_norm(u0, Exponent::TWO, cfg.q);
    let window = if data_norm > 0.0 {
        (REGULARIZED_WINDOW * cfg.eps.powi(3) / (data_norm * data_norm)).min(1.0)
    } else {
        1.0
    };

    let spectra = ws.spectra(u0);
    let lin: Vec<GridField> = times
        .iter()
        .map(|&t| ws.heat_from_spectra(&spectra, t, 0))
        .collect::<Result<_>>()?;
    let mut rows = LeRows::default();
    for f in &lin {
        rows.push(&ws, f)?;
    }
    let free = rows.norm(&weights, cfg.q);
    let mut trace = PicardTrace {
        norms: vec![free],
        ..Default::default()
    };
    let mut current = lin.clone();
    if data_norm > 0.0 {
        for _ in 0..cfg.picard_cap {
            let mut stepper = DuhamelStepper::new(&ws);
            let mut next = Vec::with_capacity(times.len());
            let mut new_rows = LeRows::default();
            let mut diff_rows = LeRows::default();
            for (j, &t) in times.iter().enumerate() {
                stepper.push(&ws, t, reg.forcing(&ws, &current[j])?)?;
                let u = lin[j].sub(&stepper.field(&ws)?)?;
                new_rows.push(&ws, &u)?;
                diff_rows.push(&ws, &u.sub(&current[j])?)?;
                trace.max_divergence = trace.max_divergence.max(ws.relative_divergence(&u)?);
                next.push(u);
            }
            current = next;
            let (n, dn) = (
                new_rows.norm(&weights, cfg.q),
                diff_rows.norm(&weights, cfg.q),
            );
            trace.norms.push(n);
            trace.diffs.push(dn);
            rows = new_rows;
            trace.final_residual = if n > 0.0 { dn / n } else { 0.0 };
            if !trace.final_residual.is_finite() || trace.final_residual > 1e6 {
                break;
            }
            if trace.final_residual <= cfg.contraction_tol {
                trace.converged = true;
                break;
            }
        }
    } else {
        trace.converged = true;
    }
    let le_norm = rows.norm(&weights, cfg.q);
    let gradient = current
        .iter()
        .map(|f| ws.gradient(f))
        .collect::<Result<Vec<_>>>()?;
    Ok(RegularizedOutcome {
        series: FieldSeries::with_weights(times.clone(), weights.clone(), current)?,
        gradient: FieldSeries::with_weights(times, weights, gradient)?,
        trace,
        data_norm,
        le_norm,
        c0: if data_norm > 0.0 {
            free / data_norm
        } else {
            0.0
        },
        window,
        admissible: cfg.t_final < window,
    })
}
