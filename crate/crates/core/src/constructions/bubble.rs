use serde::{Deserialize, Serialize};

use crate::amalgam::{amalgam_norm, Exponent, GridField, GridSpec};
use crate::error::{domain, Error, Result};
use crate::spectral::SpectralWorkspace;

/// Shrinking, growing bumps `c_k 2^{kβ/2} χ_{B(2k e₁, 2^{−k/2})}`, `β = d/r`,
/// for `k = 1..=K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BubbleTrainSpec {
    pub d: usize,
    pub r: Exponent,
    /// `c_1, …, c_K`.
    pub coeffs: Vec<f64>,
}

impl BubbleTrainSpec {
    pub fn uniform(d: usize, r: Exponent, k: usize) -> Self {
        BubbleTrainSpec {
            d,
            r,
            coeffs: vec![1.0; k],
        }
    }

    pub fn bubbles(&self) -> usize {
        self.coeffs.len()
    }

    pub fn beta(&self) -> f64 {
        self.d as f64 * self.r.recip()
    }

    pub fn center(k: usize) -> f64 {
        2.0 * k as f64
    }

    pub fn radius(k: usize) -> f64 {
        2f64.powf(-(k as f64) / 2.0)
    }

    pub fn amplitude(&self, k: usize) -> f64 {
        self.coeffs[k - 1] * 2f64.powf(k as f64 * self.beta() / 2.0)
    }
}

/// Samples the bubble train; the grid must put at least 8 cells across the
/// smallest radius and contain every ball.
pub fn gen_bubble_train(spec: &BubbleTrainSpec, grid: &GridSpec) -> Result<GridField> {
    if spec.d != grid.d() {
        return domain("bubble train and grid differ in dimension");
    }
    if spec.coeffs.iter().any(|c| !(*c >= 0.0)) {
        return domain("coefficients must be nonnegative");
    }
    let kmax = spec.bubbles();
    if kmax == 0 {
        return Ok(GridField::zeros(grid.clone(), 1));
    }
    if BubbleTrainSpec::radius(kmax) / grid.h() < 8.0 {
        return Err(Error::Resolution(format!(
            "radius {} spans fewer than 8 cells of size {}",
            BubbleTrainSpec::radius(kmax),
            grid.h()
        )));
    }
    for k in 1..=kmax {
        let mut c = vec![0.0; grid.d()];
        c[0] = BubbleTrainSpec::center(k);
        if !grid.contains_ball(&c, BubbleTrainSpec::radius(k), 0.0) {
            return domain(format!("bubble {k} leaves the box"));
        }
    }
    Ok(GridField::scalar(grid.clone(), |x| {
        // Supports are disjoint, so at most one bubble is active.
        let k = (x[0] / 2.0).round();
        if k < 1.0 || k > kmax as f64 {
            return 0.0;
        }
        let k = k as usize;
        let mut r2 = (x[0] - BubbleTrainSpec::center(k)).powi(2);
        for xi in &x[1..] {
            r2 += xi * xi;
        }
        if r2 < BubbleTrainSpec::radius(k).powi(2) {
            spec.amplitude(k)
        } else {
            0.0
        }
    }))
}

/// Heat flow of a bubble train across the time bands `(2^{−k}, 2^{−k+1}]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BubbleBlowup {
    pub p: Exponent,
    pub s: Exponent,
    /// `(t, ‖u(t)‖_{L^p_uloc})` at every node, increasing in `t`.
    pub samples: Vec<(f64, f64)>,
    /// Per band `k`, `min_t ‖u(t)‖_{L^p_uloc} t^{1/s} / c_k` over the band.
    pub band_ratios: Vec<f64>,
    /// `I_k = ∫_{2^{−k}}^1 ‖u(t)‖^s_{L^p_uloc} dt` for `k = 1..=K`.
    pub partial_integrals: Vec<f64>,
}

/// Evolves the train and records the lower-bound ratios and the partial
/// integrals, using `nodes_per_band` geometric nodes in each band.
pub fn bubble_blowup(
    spec: &BubbleTrainSpec,
    grid: &GridSpec,
    s: Exponent,
    p: Exponent,
    nodes_per_band: usize,
) -> Result<BubbleBlowup> {
    let d = spec.d as f64;
    if ((2.0 * s.recip() + d * p.recip()) - d * spec.r.recip()).abs() > 1e-12 {
        return domain("exponents must satisfy 2/s + d/p = d/r");
    }
    if s.is_infinite() || nodes_per_band < 2 {
        return domain("need finite s and at least two nodes per band");
    }
    let a = gen_bubble_train(spec, grid)?;
    let ws = SpectralWorkspace::new(grid);
    let spectra = ws.spectra(&a);
    let kmax = spec.bubbles();
    let sv = s.value();
    let mut samples = Vec::new();
    let mut band_ratios = vec![0.0; kmax];
    let mut band_integrals = vec![0.0; kmax];
    for k in (1..=kmax).rev() {
        let lo = 2f64.powi(-(k as i32));
        let mut prev: Option<(f64, f64)> = None;
        let mut ratio = f64::INFINITY;
        for i in 0..=nodes_per_band {
            let t = lo * 2f64.powf(i as f64 / nodes_per_band as f64);
            let u = ws.heat_from_spectra(&spectra, t, 0)?;
            let v = amalgam_norm(&u, p, Exponent::INF);
            if i > 0 {
                ratio = ratio.min(v * t.powf(s.recip()) / spec.coeffs[k - 1]);
                samples.push((t, v));
            } else if k == kmax {
                samples.push((t, v));
            }
            let g = v.powf(sv);
            if let Some((tp, gp)) = prev {
                band_integrals[k - 1] += 0.5 * (t - tp) * (g + gp);
            }
            prev = Some((t, g));
        }
        band_ratios[k - 1] = ratio;
    }
    let mut partial_integrals = Vec::with_capacity(kmax);
    let mut acc = 0.0;
    for b in &band_integrals {
        acc += b;
        partial_integrals.push(acc);
    }
    Ok(BubbleBlowup {
        p,
        s,
        samples,
        band_ratios,
        partial_integrals,
    })
}
