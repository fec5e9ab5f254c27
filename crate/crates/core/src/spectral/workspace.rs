use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::amalgam::{GridField, GridSpec};
use crate::error::Result;

pub type Spectrum = Vec<Complex64>;

/// FFT plans and wavenumber tables for one periodic box.
pub struct SpectralWorkspace {
    spec: GridSpec,
    n: [usize; 3],
    fwd: Vec<Arc<dyn Fft<f64>>>,
    inv: Vec<Arc<dyn Fft<f64>>>,
    k: [Vec<f64>; 3],
    kd: [Vec<f64>; 3],
    keep: [Vec<bool>; 3],
}

impl SpectralWorkspace {
    pub fn new(spec: &GridSpec) -> Self {
        let n = spec.cells3();
        let mut planner = FftPlanner::new();
        let fwd = n.iter().map(|&len| planner.plan_fft_forward(len)).collect();
        let inv = n.iter().map(|&len| planner.plan_fft_inverse(len)).collect();
        let mut k: [Vec<f64>; 3] = Default::default();
        let mut kd: [Vec<f64>; 3] = Default::default();
        let mut keep: [Vec<bool>; 3] = Default::default();
        for a in 0..3 {
            let len = n[a];
            let l = spec.length(a);
            for j in 0..len {
                let m = if j <= len / 2 {
                    j as i64
                } else {
                    j as i64 - len as i64
                };
                let nyquist = len % 2 == 0 && j == len / 2 && len > 1;
                let kv = if a < spec.d() {
                    2.0 * PI * m as f64 / l
                } else {
                    0.0
                };
                k[a].push(kv);
                kd[a].push(if nyquist { 0.0 } else { kv });
                keep[a].push(3 * m.unsigned_abs() as usize <= len);
            }
        }
        SpectralWorkspace {
            spec: spec.clone(),
            n,
            fwd,
            inv,
            k,
            kd,
            keep,
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Calls `f(idx, k, kd, |k|², dealias_keep)` for every mode, where `kd`
    /// is the wavenumber used by odd (derivative) symbols, zero on Nyquist
    /// modes so that real fields stay real.
    pub fn for_each_mode(&self, mut f: impl FnMut(usize, [f64; 3], [f64; 3], f64, bool)) {
        let mut idx = 0;
        for j0 in 0..self.n[0] {
            let (k0, d0, e0) = (self.k[0][j0], self.kd[0][j0], self.keep[0][j0]);
            for j1 in 0..self.n[1] {
                let (k1, d1, e1) = (self.k[1][j1], self.kd[1][j1], self.keep[1][j1]);
                for j2 in 0..self.n[2] {
                    let (k2, d2, e2) = (self.k[2][j2], self.kd[2][j2], self.keep[2][j2]);
                    f(
                        idx,
                        [k0, k1, k2],
                        [d0, d1, d2],
                        k0 * k0 + k1 * k1 + k2 * k2,
                        e0 && e1 && e2,
                    );
                    idx += 1;
                }
            }
        }
    }

    fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        let plans = if inverse { &self.inv } else { &self.fwd };
        let [n0, n1, n2] = self.n;
        if n2 > 1 {
            plans[2].process(buf);
        }
        if n1 > 1 {
            let mut scratch = vec![Complex64::default(); n1 * n2];
            for j0 in 0..n0 {
                let block = &mut buf[j0 * n1 * n2..(j0 + 1) * n1 * n2];
                for j1 in 0..n1 {
                    for j2 in 0..n2 {
                        scratch[j2 * n1 + j1] = block[j1 * n2 + j2];
                    }
                }
                plans[1].process(&mut scratch);
                for j1 in 0..n1 {
                    for j2 in 0..n2 {
                        block[j1 * n2 + j2] = scratch[j2 * n1 + j1];
                    }
                }
            }
        }
        if n0 > 1 {
            let plane = n1 * n2;
            let mut scratch = vec![Complex64::default(); n0 * plane];
            for j0 in 0..n0 {
                for r in 0..plane {
                    scratch[r * n0 + j0] = buf[j0 * plane + r];
                }
            }
            plans[0].process(&mut scratch);
            for j0 in 0..n0 {
                for r in 0..plane {
                    buf[j0 * plane + r] = scratch[r * n0 + j0];
                }
            }
        }
    }

    /// Unnormalized forward DFT of real samples.
    pub fn forward(&self, data: &[f64]) -> Spectrum {
        let mut buf: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, false);
        buf
    }

    /// Inverse DFT (normalized), real part.
    pub fn inverse_real(&self, spectrum: &[Complex64]) -> Vec<f64> {
        let mut buf = spectrum.to_vec();
        self.transform(&mut buf, true);
        let scale = 1.0 / self.len() as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    /// Spectra of every component; all-zero components map to `None`.
    pub fn spectra(&self, f: &GridField) -> Vec<Option<Spectrum>> {
        (0..f.components())
            .map(|c| {
                let comp = f.component(c);
                if comp.iter().all(|&v| v == 0.0) {
                    None
                } else {
                    Some(self.forward(comp))
                }
            })
            .collect()
    }

    /// Assembles a field from component spectra.
    pub fn to_field(&self, spectra: &[Option<Spectrum>]) -> Result<GridField> {
        let comps = spectra
            .iter()
            .map(|s| match s {
                Some(s) => self.inverse_real(s),
                None => vec![0.0; self.len()],
            })
            .collect();
        GridField::from_components(self.spec.clone(), comps)
    }
}
