use num_complex::Complex64;

use crate::amalgam::{FieldSeries, GridField};
use crate::error::{domain, Result};
use crate::spectral::workspace::{SpectralWorkspace, Spectrum};

/// Streams `L(F)(t) = ∫₀ᵗ e^{(t−τ)Δ}ℙ∇·F(τ) dτ` across increasing nodes.
///
/// Forcing enters as the spectrum of `∇·F` at each node. Over a substep the
/// forcing is held at the average of its endpoint values (its midpoint value
/// to second order) and `∫ e^{−|k|²(t−τ)} dτ` is integrated exactly per mode.
pub struct DuhamelStepper {
    acc: Vec<Spectrum>,
    t: f64,
    last: Option<Vec<Spectrum>>,
}

impl DuhamelStepper {
    pub fn new(ws: &SpectralWorkspace) -> Self {
        let d = ws.spec().d();
        DuhamelStepper {
            acc: vec![vec![Complex64::default(); ws.len()]; d],
            t: 0.0,
            last: None,
        }
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// Supplies `∇·F` at time `t`; the first call must be at `t = 0`.
    pub fn push(&mut self, ws: &SpectralWorkspace, t: f64, w: Vec<Spectrum>) -> Result<()> {
        let Some(last) = self.last.take() else {
            if t != 0.0 {
                return domain("forcing nodes must start at t = 0");
            }
            self.last = Some(w);
            return Ok(());
        };
        let dt = t - self.t;
        if dt <= 0.0 {
            return domain("forcing nodes must increase");
        }
        let d = ws.spec().d();
        let acc = &mut self.acc;
        ws.for_each_mode(|idx, _, k, k2, _| {
            let (e, phi) = if k2 > 0.0 {
                let x = -k2 * dt;
                (x.exp(), -x.exp_m1() / k2)
            } else {
                (1.0, dt)
            };
            let kd2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            let mut mid = [Complex64::default(); 3];
            let mut dot = Complex64::default();
            for j in 0..d {
                mid[j] = 0.5 * (last[j][idx] + w[j][idx]);
                dot += mid[j] * k[j];
            }
            if kd2 > 0.0 {
                dot /= kd2;
            }
            for j in 0..d {
                let proj = mid[j] - dot * k[j];
                acc[j][idx] = acc[j][idx] * e + proj * phi;
            }
        });
        self.t = t;
        self.last = Some(w);
        Ok(())
    }

    pub fn spectrum(&self) -> &[Spectrum] {
        &self.acc
    }

    pub fn field(&self, ws: &SpectralWorkspace) -> Result<GridField> {
        let s: Vec<Option<Spectrum>> = self.acc.iter().cloned().map(Some).collect();
        ws.to_field(&s)
    }
}

fn check_tensor_series(ws: &SpectralWorkspace, f: &FieldSeries) -> Result<()> {
    let d = ws.spec().d();
    if f.components() != d * d || f.spec() != ws.spec() {
        return domain("forcing must be a d×d tensor series on the workspace grid");
    }
    if f.times()[0] != 0.0 {
        return domain("forcing nodes must cover [0, t]");
    }
    Ok(())
}

fn lerp_spectra(a: &[Spectrum], b: &[Spectrum], s: f64) -> Vec<Spectrum> {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            x.iter()
                .zip(y)
                .map(|(u, v)| u * (1.0 - s) + v * s)
                .collect()
        })
        .collect()
}

/// Shared driver: `div(j)` yields `∇·F` at node `j`; returns `L(F)` at `t`.
fn duhamel_at(
    ws: &SpectralWorkspace,
    times: &[f64],
    t: f64,
    mut div: impl FnMut(usize) -> Result<Vec<Spectrum>>,
) -> Result<GridField> {
    if times[0] != 0.0 {
        return domain("forcing nodes must cover [0, t]");
    }
    let last = *times.last().expect("nonempty");
    if !(0.0..=last * (1.0 + 1e-14)).contains(&t) {
        return domain(format!(
            "evaluation time {t} outside the covered span [0, {last}]"
        ));
    }
    let mut stepper = DuhamelStepper::new(ws);
    let mut prev: Option<Vec<Spectrum>> = None;
    for (j, &tj) in times.iter().enumerate() {
        if tj > t {
            let p = prev.expect("first node is 0 <= t");
            let next = div(j)?;
            let s = (t - times[j - 1]) / (tj - times[j - 1]);
            stepper.push(ws, t, lerp_spectra(&p, &next, s))?;
            break;
        }
        let w = div(j)?;
        prev = Some(w.clone());
        stepper.push(ws, tj, w)?;
        if tj == t {
            break;
        }
    }
    stepper.field(ws)
}

/// `L(F)(·, t)` for a tensor series `F` with nodes covering `[0, t]`.
pub fn duhamel(ws: &SpectralWorkspace, f: &FieldSeries, t: f64) -> Result<GridField> {
    check_tensor_series(ws, f)?;
    duhamel_at(ws, f.times(), t, |j| {
        ws.tensor_divergence_spectra(f.field(j), false)
    })
}

/// `L(F)` at every node of `F`.
pub fn duhamel_series(ws: &SpectralWorkspace, f: &FieldSeries) -> Result<FieldSeries> {
    check_tensor_series(ws, f)?;
    let mut stepper = DuhamelStepper::new(ws);
    let mut out = Vec::with_capacity(f.len());
    for (j, &t) in f.times().iter().enumerate() {
        stepper.push(ws, t, ws.tensor_divergence_spectra(f.field(j), false)?)?;
        out.push(stepper.field(ws)?);
    }
    FieldSeries::with_weights(f.times().to_vec(), f.weights().to_vec(), out)
}

fn check_pair(ws: &SpectralWorkspace, f: &FieldSeries, g: &FieldSeries) -> Result<()> {
    let d = ws.spec().d();
    if f.spec() != ws.spec() || g.spec() != ws.spec() || f.times() != g.times() {
        return domain("bilinear form needs aligned series on the workspace grid");
    }
    if f.components() != d || g.components() != d {
        return domain("bilinear form needs d-component series");
    }
    Ok(())
}

/// `B(f,g)(t) = ∫₀ᵗ e^{(t−s)Δ}ℙ∇·(f⊗g) ds`.
pub fn bilinear_b(
    ws: &SpectralWorkspace,
    f: &FieldSeries,
    g: &FieldSeries,
    t: f64,
) -> Result<GridField> {
    check_pair(ws, f, g)?;
    duhamel_at(ws, f.times(), t, |j| {
        ws.product_divergence_spectra(f.field(j), g.field(j))
    })
}

/// `B(f,g)` at every node.
pub fn bilinear_series(
    ws: &SpectralWorkspace,
    f: &FieldSeries,
    g: &FieldSeries,
) -> Result<FieldSeries> {
    check_pair(ws, f, g)?;
    if f.times()[0] != 0.0 {
        return domain("series must start at t = 0");
    }
    let mut stepper = DuhamelStepper::new(ws);
    let mut out = Vec::with_capacity(f.len());
    for (j, &t) in f.times().iter().enumerate() {
        stepper.push(
            ws,
            t,
            ws.product_divergence_spectra(f.field(j), g.field(j))?,
        )?;
        out.push(stepper.field(ws)?);
    }
    FieldSeries::with_weights(f.times().to_vec(), f.weights().to_vec(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::GridSpec;
    use std::f64::consts::PI;

    fn grid() -> GridSpec {
        GridSpec::centered(2, 2, 16).unwrap()
    }

    fn constant_series(f: GridField, times: Vec<f64>) -> FieldSeries {
        let n = times.len();
        FieldSeries::trapezoid(times, vec![f; n]).unwrap()
    }

    #[test]
    fn zero_forcing_gives_zero() {
        let ws = SpectralWorkspace::new(&grid());
        let f = constant_series(GridField::zeros(grid(), 4), vec![0.0, 0.5, 1.0]);
        assert_eq!(duhamel(&ws, &f, 0.7).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn single_mode_matches_closed_form() {
        // F_12 = cos(k·x), k = (π, π) on the 2×2 box. Then (∇·F)_2 = -π sin(k·x),
        // ℙ keeps the part orthogonal to k: w − k(k·w)/|k|² with w = (0, -π sin).
        let spec = grid();
        let ws = SpectralWorkspace::new(&spec);
        let f = GridField::from_fn(spec.clone(), 4, |x, o| o[1] = (PI * (x[0] + x[1])).cos());
        let series = constant_series(f, vec![0.0, 0.1, 0.35, 0.6]);
        let t = 0.6;
        let k2 = 2.0 * PI * PI;
        let factor = (1.0 - (-k2 * t).exp()) / k2;
        let want = GridField::from_fn(spec, 2, |x, o| {
            let s = -PI * (PI * (x[0] + x[1])).sin();
            o[0] = -0.5 * s * factor;
            o[1] = 0.5 * s * factor;
        });
        let got = duhamel(&ws, &series, t).unwrap();
        assert!(got.sub(&want).unwrap().max_abs() < 1e-10 * want.max_abs());
    }

    #[test]
    fn evaluation_between_nodes() {
        let spec = grid();
        let ws = SpectralWorkspace::new(&spec);
        let f = GridField::from_fn(spec, 4, |x, o| o[1] = (PI * x[0]).cos());
        let series = constant_series(f, vec![0.0, 0.5, 1.0]);
        let direct = duhamel(&ws, &series, 0.3).unwrap();
        let refined = constant_series(series.field(0).clone(), vec![0.0, 0.3, 1.0]);
        let want = duhamel(&ws, &refined, 0.3).unwrap();
        assert!(direct.sub(&want).unwrap().max_abs() < 1e-13);
        assert!(duhamel(&ws, &series, 1.5).is_err());
    }

    #[test]
    fn second_order_in_substep() {
        let spec = grid();
        let ws = SpectralWorkspace::new(&spec);
        let shape = |x: &[f64]| (PI * x[0]).sin() * (PI * x[1]).cos();
        let run = |n: usize| {
            let times: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
            let fields = times
                .iter()
                .map(|&t| {
                    GridField::from_fn(spec.clone(), 4, |x, o| o[2] = (3.0 * t).cos() * shape(x))
                })
                .collect();
            duhamel(&ws, &FieldSeries::trapezoid(times, fields).unwrap(), 1.0).unwrap()
        };
        let (a, b, c) = (run(8), run(16), run(32));
        let e1 = a.sub(&b).unwrap().max_abs();
        let e2 = b.sub(&c).unwrap().max_abs();
        assert!(e1 / e2 > 3.5, "observed refinement ratio {}", e1 / e2);
    }

    #[test]
    fn bilinear_is_bilinear_and_divergence_free() {
        let spec = grid();
        let ws = SpectralWorkspace::new(&spec);
        let field = |a: f64| {
            GridField::from_fn(spec.clone(), 2, move |x, o| {
                o[0] = a * (PI * x[1]).sin();
                o[1] = (PI * x[0]).cos() + 0.3 * (PI * x[1]).sin();
            })
        };
        let f = constant_series(field(1.0), vec![0.0, 0.2, 0.4]);
        let g = constant_series(field(-0.5), vec![0.0, 0.2, 0.4]);
        let b = bilinear_b(&ws, &f, &g, 0.4).unwrap();
        let f2 = f.map(|_, u| u.scaled(2.5)).unwrap();
        let b2 = bilinear_b(&ws, &f2, &g, 0.4).unwrap();
        assert!(b2.sub(&b.scaled(2.5)).unwrap().max_abs() < 1e-12 * b2.max_abs());
        assert!(ws.relative_divergence(&b).unwrap() < 1e-10);
        let zero = f.map(|_, u| u.scaled(0.0)).unwrap();
        assert_eq!(bilinear_b(&ws, &f, &zero, 0.4).unwrap().max_abs(), 0.0);
        let series = bilinear_series(&ws, &f, &g).unwrap();
        assert!(series.field(2).sub(&b).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn symmetric_part_controls_symmetrized_form() {
        let spec = grid();
        let ws = SpectralWorkspace::new(&spec);
        let f = constant_series(
            GridField::from_fn(spec.clone(), 2, |x, o| {
                o[0] = (PI * x[1]).sin() * (PI * x[0]).cos();
                o[1] = (PI * x[0]).sin();
            }),
            vec![0.0, 0.25],
        );
        let g = constant_series(
            GridField::from_fn(spec, 2, |x, o| {
                o[0] = (PI * x[1]).cos();
                o[1] = (PI * (x[0] + x[1])).sin();
            }),
            vec![0.0, 0.25],
        );
        let sym = bilinear_b(&ws, &f, &g, 0.25)
            .unwrap()
            .add(&bilinear_b(&ws, &g, &f, 0.25).unwrap())
            .unwrap();
        // f⊗g + g⊗f as an explicit symmetric tensor series.
        let tensor = |j: usize| {
            let (a, b) = (f.field(j), g.field(j));
            let mut comps = Vec::new();
            for l in 0..2 {
                for m in 0..2 {
                    comps.push(
                        (0..a.spec().len())
                            .map(|i| {
                                a.component(l)[i] * b.component(m)[i]
                                    + b.component(l)[i] * a.component(m)[i]
                            })
                            .collect(),
                    );
                }
            }
            GridField::from_components(a.spec().clone(), comps).unwrap()
        };
        let series = FieldSeries::trapezoid(vec![0.0, 0.25], vec![tensor(0), tensor(1)]).unwrap();
        let want = duhamel(&ws, &series, 0.25).unwrap();
        let err = sym.sub(&want).unwrap().max_abs();
        assert!(err < 1e-12 * want.max_abs(), "{err} vs {}", want.max_abs());
    }
}
