//! Heat kernel, its gradient, the majorant `Φ(x,t) = (|x|+√t)^{−d−1}`, the
//! Oseen tensor, and the envelopes bounding their amalgam norms.

use std::f64::consts::PI;

use libm::lgamma as ln_gamma;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amalgam::{Exponent, GridField, GridSpec};
use crate::error::{domain, Result};
use crate::spectral::{SpectralWorkspace, Spectrum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Heat,
    GradHeat,
    Phi,
    Oseen,
}

impl std::str::FromStr for KernelKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "heat" => Ok(KernelKind::Heat),
            "grad_heat" | "gradheat" => Ok(KernelKind::GradHeat),
            "phi" => Ok(KernelKind::Phi),
            "oseen" => Ok(KernelKind::Oseen),
            _ => domain(format!("unknown kernel {s:?}")),
        }
    }
}

pub fn heat_kernel(x: &[f64], t: f64) -> f64 {
    let d = x.len() as f64;
    let r2: f64 = x.iter().map(|v| v * v).sum();
    (4.0 * PI * t).powf(-d / 2.0) * (-r2 / (4.0 * t)).exp()
}

pub fn phi_kernel(x: &[f64], t: f64) -> f64 {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    (r + t.sqrt()).powi(-(x.len() as i32) - 1)
}

/// Samples a kernel at the cell centers of `spec`.
///
/// Heat, its gradient and `Φ` are evaluated pointwise. The Oseen tensor
/// (`d×d` components, index `i·d + j`) is the inverse transform of
/// `(δ_ij − k_i k_j/|k|²) e^{−|k|²t}` on the periodic box, so the box should
/// leave a margin of several `√t` around the origin.
pub fn eval_kernel(kind: KernelKind, t: f64, spec: &GridSpec) -> Result<GridField> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("kernel time {t} must be positive"));
    }
    let d = spec.d();
    match kind {
        KernelKind::Heat => Ok(GridField::scalar(spec.clone(), |x| heat_kernel(x, t))),
        KernelKind::GradHeat => Ok(GridField::from_fn(spec.clone(), d, |x, out| {
            let g = heat_kernel(x, t);
            for (o, xi) in out.iter_mut().zip(x) {
                *o = -xi / (2.0 * t) * g;
            }
        })),
        KernelKind::Phi => Ok(GridField::scalar(spec.clone(), |x| phi_kernel(x, t))),
        KernelKind::Oseen => oseen_tensor(t, spec),
    }
}

fn oseen_tensor(t: f64, spec: &GridSpec) -> Result<GridField> {
    let d = spec.d();
    if d < 2 {
        return domain("the Oseen tensor needs d >= 2");
    }
    let ws = SpectralWorkspace::new(spec);
    let x0: Vec<f64> = (0..3)
        .map(|a| if a < d { spec.coord(a, 0) } else { 0.0 })
        .collect();
    let scale = 1.0 / spec.cell_volume();
    let mut spectra: Vec<Spectrum> = vec![vec![Complex64::default(); ws.len()]; d * d];
    ws.for_each_mode(|idx, k, kd, k2, _| {
        let phase = k[0] * x0[0] + k[1] * x0[1] + k[2] * x0[2];
        let base = Complex64::from_polar(scale * (-k2 * t).exp(), phase);
        let kd2 = kd[0] * kd[0] + kd[1] * kd[1] + kd[2] * kd[2];
        for i in 0..d {
            for j in 0..d {
                let mut s = if i == j { 1.0 } else { 0.0 };
                if kd2 > 0.0 {
                    s -= kd[i] * kd[j] / kd2;
                }
                spectra[i * d + j][idx] = base * s;
            }
        }
    });
    let spectra: Vec<Option<Spectrum>> = spectra.into_iter().map(Some).collect();
    ws.to_field(&spectra)
}

/// Envelope families for kernel norms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `∇^h Γ` with `h ∈ {0, 1}`.
    Heat {
        h: u8,
    },
    Phi,
}

/// `t^{−a}(t^{−d/2+d/(2p)} + 𝟙_{t>1} t^{−d/2+d/(2q)})` with constant 1, where
/// `a = h/2` for the heat kernel and `1/2` for `Φ`.
pub fn kernel_amalgam_bound(kind: BoundKind, t: f64, p: Exponent, q: Exponent, d: usize) -> f64 {
    let a = match kind {
        BoundKind::Heat { h } => h as f64 / 2.0,
        BoundKind::Phi => 0.5,
    };
    let d = d as f64;
    let local = t.powf(-d / 2.0 + d * p.recip() / 2.0);
    let tail = if t > 1.0 {
        t.powf(-d / 2.0 + d * q.recip() / 2.0)
    } else {
        0.0
    };
    t.powf(-a) * (local + tail)
}

/// `‖∇^hΓ(·,t)‖_{L^p(ℝ^d)}` or `‖Φ(·,t)‖_{L^p(ℝ^d)}` in closed form.
pub fn kernel_lebesgue_norm(kind: BoundKind, t: f64, p: Exponent, d: usize) -> f64 {
    let df = d as f64;
    // ∫_{ℝ^d} |x|^a e^{−b|x|²} dx.
    let moment = |a: f64, b: f64| {
        PI.powf(df / 2.0)
            * (ln_gamma((a + df) / 2.0) - ln_gamma(df / 2.0)).exp()
            * b.powf(-(a + df) / 2.0)
    };
    let peak = (4.0 * PI * t).powf(-df / 2.0);
    match kind {
        BoundKind::Heat { h: 0 } => match p.finite() {
            None => peak,
            Some(p) => peak * moment(0.0, p / (4.0 * t)).powf(1.0 / p),
        },
        BoundKind::Heat { .. } => match p.finite() {
            None => peak * (2.0 * t).powf(-0.5) * (-0.5f64).exp(),
            Some(p) => peak / (2.0 * t) * moment(p, p / (4.0 * t)).powf(1.0 / p),
        },
        BoundKind::Phi => match p.finite() {
            None => t.powf(-(df + 1.0) / 2.0),
            Some(p) => {
                // |S^{d−1}| ∫₀^∞ r^{d−1}(1+r)^{−(d+1)p} dr = |S^{d−1}| B(d, (d+1)p − d).
                let sphere = 2.0 * PI.powf(df / 2.0) / ln_gamma(df / 2.0).exp();
                let b = (df + 1.0) * p - df;
                let beta = (ln_gamma(df) + ln_gamma(b) - ln_gamma(df + b)).exp();
                t.powf((df - (df + 1.0) * p) / (2.0 * p)) * (sphere * beta).powf(1.0 / p)
            }
        },
    }
}

/// The envelope of [`kernel_amalgam_bound`] with each term carrying the
/// exact Lebesgue constant: `‖K(·,t)‖_{L^p} + 𝟙 ‖K(·,t)‖_{L^q}`.
///
/// The indicator is `t > 1` when `q > p`. For `q ≤ p` the second term is
/// kept for all `t`: at unit constants it is below the first one for
/// `t ≤ 1`, so the two forms agree within a factor 2.
pub fn kernel_calibrated_bound(kind: BoundKind, t: f64, p: Exponent, q: Exponent, d: usize) -> f64 {
    let tail = if t > 1.0 || q.value() <= p.value() {
        kernel_lebesgue_norm(kind, t, q, d)
    } else {
        0.0
    };
    kernel_lebesgue_norm(kind, t, p, d) + tail
}

/// Normalized Solonnikov majorant `(|x|+√t)^{−(d+k+2m)}`.
pub fn oseen_pointwise_bound(x: &[f64], t: f64, k: u32, m: u32) -> f64 {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    (r + t.sqrt()).powi(-((x.len() as u32 + k + 2 * m) as i32))
}
