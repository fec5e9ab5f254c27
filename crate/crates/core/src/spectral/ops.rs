use num_complex::Complex64;

use crate::amalgam::GridField;
use crate::error::{domain, Result};
use crate::spectral::workspace::{SpectralWorkspace, Spectrum};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

impl SpectralWorkspace {
    /// `∇^h e^{tΔ}` applied to precomputed component spectra. For `h = 1` the
    /// output component `a·m + c` holds `∂_a u_c`.
    pub fn heat_from_spectra(
        &self,
        spectra: &[Option<Spectrum>],
        t: f64,
        h: u8,
    ) -> Result<GridField> {
        if t < 0.0 {
            return domain("heat evolution needs t >= 0");
        }
        let d = self.spec().d();
        let mut decay = vec![0.0; self.len()];
        let mut kd_all = vec![[0.0; 3]; if h == 1 { self.len() } else { 0 }];
        self.for_each_mode(|idx, _, kd, k2, _| {
            decay[idx] = (-k2 * t).exp();
            if h == 1 {
                kd_all[idx] = kd;
            }
        });
        match h {
            0 => {
                if t == 0.0 {
                    return self.to_field(spectra);
                }
                let out: Vec<Option<Spectrum>> = spectra
                    .iter()
                    .map(|s| {
                        s.as_ref()
                            .map(|s| s.iter().zip(&decay).map(|(c, e)| c * e).collect())
                    })
                    .collect();
                self.to_field(&out)
            }
            1 => {
                let mut out = Vec::with_capacity(d * spectra.len());
                for a in 0..d {
                    for s in spectra {
                        out.push(s.as_ref().map(|s| {
                            s.iter()
                                .enumerate()
                                .map(|(idx, c)| c * I * (kd_all[idx][a] * decay[idx]))
                                .collect()
                        }));
                    }
                }
                self.to_field(&out)
            }
            _ => domain("derivative order must be 0 or 1"),
        }
    }

    pub fn heat_evolve(&self, f: &GridField, t: f64, h: u8) -> Result<GridField> {
        self.heat_from_spectra(&self.spectra(f), t, h)
    }

    /// Spatial gradient, `d·m` components.
    pub fn gradient(&self, f: &GridField) -> Result<GridField> {
        self.heat_evolve(f, 0.0, 1)
    }

    /// Band-limited translate `f(· + τ)`; Nyquist modes are left in place.
    pub fn translate(&self, f: &GridField, tau: &[f64]) -> Result<GridField> {
        let d = self.spec().d();
        if tau.len() != d {
            return domain("shift length must equal the dimension");
        }
        let mut phase = vec![Complex64::new(1.0, 0.0); self.len()];
        self.for_each_mode(|idx, _, kd, _, _| {
            let a: f64 = kd[..d].iter().zip(tau).map(|(k, t)| k * t).sum();
            phase[idx] = Complex64::from_polar(1.0, a);
        });
        let out: Vec<Option<Spectrum>> = self
            .spectra(f)
            .into_iter()
            .map(|s| s.map(|s| s.iter().zip(&phase).map(|(c, e)| c * e).collect()))
            .collect();
        self.to_field(&out)
    }

    /// Applies `δ_ij − k_i k_j/|k|²` in place with the Nyquist-free wavenumber,
    /// which keeps the symbol even on real spectra; the mean passes through.
    pub fn project_spectra(&self, v: &mut [Spectrum]) {
        let d = self.spec().d();
        self.for_each_mode(|idx, _, k, _, _| {
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 == 0.0 {
                return;
            }
            let mut dot = Complex64::default();
            for i in 0..d {
                dot += v[i][idx] * k[i];
            }
            let dot = dot / k2;
            for i in 0..d {
                v[i][idx] -= dot * k[i];
            }
        });
    }

    pub fn leray_project(&self, v: &GridField) -> Result<GridField> {
        let d = self.spec().d();
        if v.components() != d {
            return domain(format!(
                "Leray projection needs {d} components, got {}",
                v.components()
            ));
        }
        let mut s: Vec<Spectrum> = (0..d).map(|c| self.forward(v.component(c))).collect();
        self.project_spectra(&mut s);
        let s: Vec<Option<Spectrum>> = s.into_iter().map(Some).collect();
        self.to_field(&s)
    }

    /// Spectrum of `(∇·F)_j = ∂_l F_lj` for a `d×d` tensor field (index `l·d + j`).
    pub fn tensor_divergence_spectra(&self, f: &GridField, dealias: bool) -> Result<Vec<Spectrum>> {
        let d = self.spec().d();
        if f.components() != d * d {
            return domain(format!("tensor field needs {} components", d * d));
        }
        let mut w = vec![vec![Complex64::default(); self.len()]; d];
        let mut kd_all = vec![[0.0; 3]; self.len()];
        let mut keep = vec![true; self.len()];
        self.for_each_mode(|idx, _, kd, _, k| {
            kd_all[idx] = kd;
            keep[idx] = k || !dealias;
        });
        for l in 0..d {
            for j in 0..d {
                let comp = f.component(l * d + j);
                if comp.iter().all(|&v| v == 0.0) {
                    continue;
                }
                let s = self.forward(comp);
                for idx in 0..self.len() {
                    if keep[idx] {
                        w[j][idx] += s[idx] * I * kd_all[idx][l];
                    }
                }
            }
        }
        Ok(w)
    }

    /// Spectrum of `∇·(f⊗g)` with two-thirds dealiasing of the products.
    pub fn product_divergence_spectra(
        &self,
        f: &GridField,
        g: &GridField,
    ) -> Result<Vec<Spectrum>> {
        let d = self.spec().d();
        if f.components() != d
            || g.components() != d
            || f.spec() != self.spec()
            || g.spec() != self.spec()
        {
            return domain("outer product needs two d-component fields on the workspace grid");
        }
        let symmetric = f.data() == g.data();
        let n = self.len();
        let mut w = vec![vec![Complex64::default(); n]; d];
        let mut kd_all = vec![[0.0; 3]; n];
        let mut keep = vec![true; n];
        self.for_each_mode(|idx, _, kd, _, k| {
            kd_all[idx] = kd;
            keep[idx] = k;
        });
        let mut prod = vec![0.0; n];
        for l in 0..d {
            for j in 0..d {
                if symmetric && j < l {
                    continue;
                }
                let (fl, gj) = (f.component(l), g.component(j));
                for ((p, a), b) in prod.iter_mut().zip(fl).zip(gj) {
                    *p = a * b;
                }
                let s = self.forward(&prod);
                for idx in 0..n {
                    if !keep[idx] {
                        continue;
                    }
                    let c = s[idx] * I;
                    w[j][idx] += c * kd_all[idx][l];
                    if symmetric && j != l {
                        w[l][idx] += c * kd_all[idx][j];
                    }
                }
            }
        }
        Ok(w)
    }

    /// `e^{tΔ}ℙ∇·F` for a `d×d` tensor field; the mean mode is zero.
    pub fn oseen_apply(&self, f: &GridField, t: f64) -> Result<GridField> {
        if t <= 0.0 {
            return domain("Oseen evolution needs t > 0");
        }
        let mut w = self.tensor_divergence_spectra(f, false)?;
        self.project_spectra(&mut w);
        self.for_each_mode(|idx, _, _, k2, _| {
            let e = (-k2 * t).exp();
            for c in w.iter_mut() {
                c[idx] *= e;
            }
        });
        let w: Vec<Option<Spectrum>> = w.into_iter().map(Some).collect();
        self.to_field(&w)
    }

    /// `max |k·v̂| / max |k||v̂|`, a scale-free spectral divergence measure.
    pub fn relative_divergence(&self, v: &GridField) -> Result<f64> {
        let d = self.spec().d();
        if v.components() != d {
            return domain("divergence needs d components");
        }
        let s: Vec<Spectrum> = (0..d).map(|c| self.forward(v.component(c))).collect();
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        self.for_each_mode(|idx, _, k, _, _| {
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            let mut dot = Complex64::default();
            let mut mag = 0.0;
            for i in 0..d {
                dot += s[i][idx] * k[i];
                mag += s[i][idx].norm_sqr();
            }
            num = num.max(dot.norm());
            den = den.max((k2 * mag).sqrt());
        });
        Ok(if den == 0.0 { 0.0 } else { num / den })
    }
}

/// `∇^h e^{tΔ} f` on the periodic box of `f`'s grid.
pub fn heat_evolve(f: &GridField, t: f64, h: u8) -> Result<GridField> {
    SpectralWorkspace::new(f.spec()).heat_evolve(f, t, h)
}

pub fn leray_project(v: &GridField) -> Result<GridField> {
    SpectralWorkspace::new(v.spec()).leray_project(v)
}

pub fn oseen_apply(f: &GridField, t: f64) -> Result<GridField> {
    SpectralWorkspace::new(f.spec()).oseen_apply(f, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::GridSpec;
    use std::f64::consts::PI;

    fn gaussian(a: f64, d: usize) -> impl Fn(&[f64]) -> f64 {
        move |x: &[f64]| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            (4.0 * PI * a).powf(-(d as f64) / 2.0) * (-r2 / (4.0 * a)).exp()
        }
    }

    #[test]
    fn translate_moves_a_gaussian() {
        let g = GridSpec::centered(2, 9, 8).unwrap();
        // Narrow enough that the periodic wrap of the tail is below roundoff.
        let f = GridField::scalar(g.clone(), gaussian(0.1, 2));
        let ws = SpectralWorkspace::new(&g);
        let tau = [0.3, -0.05];
        let got = ws.translate(&f, &tau).unwrap();
        let want = GridField::scalar(g, |x| gaussian(0.1, 2)(&[x[0] + tau[0], x[1] + tau[1]]));
        let err = got.sub(&want).unwrap().max_abs();
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn heat_at_time_zero_is_identity() {
        let spec = GridSpec::centered(2, 3, 4).unwrap();
        let f = GridField::scalar(spec, |x| x[0] * x[1] + 1.0);
        let g = heat_evolve(&f, 0.0, 0).unwrap();
        for (a, b) in f.data().iter().zip(g.data()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn gaussian_evolves_in_closed_form() {
        for d in 1..=2 {
            let spec = GridSpec::centered(d, 9, 16).unwrap();
            let (a, t) = (0.05, 0.2);
            let f = GridField::scalar(spec.clone(), gaussian(a, d));
            let want = GridField::scalar(spec, gaussian(a + t, d));
            let got = heat_evolve(&f, t, 0).unwrap();
            assert!(got.sub(&want).unwrap().max_abs() < 1e-8, "d = {d}");
        }
    }

    #[test]
    fn gradient_of_gaussian_matches_closed_form() {
        let spec = GridSpec::centered(2, 9, 16).unwrap();
        let a = 0.1;
        let f = GridField::scalar(spec.clone(), gaussian(a, 2));
        let g = heat_evolve(&f, 0.1, 1).unwrap();
        let want = GridField::from_fn(spec, 2, |x, o| {
            let v = gaussian(0.2, 2)(x);
            o[0] = -x[0] / 0.4 * v;
            o[1] = -x[1] / 0.4 * v;
        });
        assert!(g.sub(&want).unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn semigroup_law() {
        let spec = GridSpec::centered(2, 5, 8).unwrap();
        let f = GridField::scalar(spec, |x| (-(x[0] - 0.3).powi(2) - 2.0 * x[1] * x[1]).exp());
        let ws = SpectralWorkspace::new(f.spec());
        let a = ws
            .heat_evolve(&ws.heat_evolve(&f, 0.1, 0).unwrap(), 0.25, 0)
            .unwrap();
        let b = ws.heat_evolve(&f, 0.35, 0).unwrap();
        assert!(a.sub(&b).unwrap().max_abs() < 1e-12 * b.max_abs());
    }

    #[test]
    fn leray_annihilates_gradients_and_is_idempotent() {
        let spec = GridSpec::centered(3, 2, 8).unwrap();
        let ws = SpectralWorkspace::new(&spec);
        let phi = GridField::scalar(spec.clone(), |x| {
            (PI * x[0]).sin() * (PI * x[1]).cos() + (PI * x[2]).sin()
        });
        let grad = ws.gradient(&phi).unwrap();
        assert!(ws.leray_project(&grad).unwrap().max_abs() < 1e-12);

        let v = GridField::from_fn(spec, 3, |x, o| {
            o[0] = (-x[1] * x[1]).exp() * x[0];
            o[1] = (x[2] * PI).sin();
            o[2] = x[0] * x[1];
        });
        let p1 = ws.leray_project(&v).unwrap();
        let p2 = ws.leray_project(&p1).unwrap();
        assert!(p2.sub(&p1).unwrap().max_abs() < 1e-12 * p1.max_abs());
        assert!(ws.relative_divergence(&p1).unwrap() < 1e-13);
    }

    #[test]
    fn leray_passes_mean_through() {
        let spec = GridSpec::centered(2, 3, 4).unwrap();
        let v = GridField::from_fn(spec, 2, |_, o| {
            o[0] = 2.0;
            o[1] = -1.0;
        });
        let p = leray_project(&v).unwrap();
        assert!(p.sub(&v).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn leray_rejects_wrong_component_count() {
        let spec = GridSpec::centered(2, 3, 4).unwrap();
        assert!(leray_project(&GridField::zeros(spec, 3)).is_err());
    }

    #[test]
    fn pressure_like_tensor_is_annihilated() {
        let spec = GridSpec::centered(3, 2, 8).unwrap();
        let phi = |x: &[f64]| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) * 4.0).exp();
        let f = GridField::from_fn(spec, 9, |x, o| {
            let v = phi(x);
            o[0] = v;
            o[4] = v;
            o[8] = v;
        });
        assert!(oseen_apply(&f, 0.01).unwrap().max_abs() < 1e-12);
        assert!(oseen_apply(&f, 0.0).is_err());
    }

    #[test]
    fn heat_commutes_with_leray() {
        let spec = GridSpec::centered(2, 3, 8).unwrap();
        let ws = SpectralWorkspace::new(&spec);
        let v = GridField::from_fn(spec, 2, |x, o| {
            o[0] = (-(x[0] * x[0]) - x[1] * x[1]).exp();
            o[1] = x[0] * (-(x[1] * x[1])).exp();
        });
        let a = ws
            .heat_evolve(&ws.leray_project(&v).unwrap(), 0.03, 0)
            .unwrap();
        let b = ws
            .leray_project(&ws.heat_evolve(&v, 0.03, 0).unwrap())
            .unwrap();
        assert!(a.sub(&b).unwrap().max_abs() < 1e-12);
    }
}
