use serde::{Deserialize, Serialize};

use crate::amalgam::{amalgam_norm, Exponent, FieldSeries, GridField};
use crate::error::{domain, Error, Result};
use crate::solver::SolverConfig;
use crate::spectral::{DuhamelStepper, SpectralWorkspace};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PicardTrace {
    /// Iteration-norm of `u^{(n)}`, starting with the free evolution.
    pub norms: Vec<f64>,
    /// Iteration-norm of `u^{(n+1)} − u^{(n)}`.
    pub diffs: Vec<f64>,
    pub converged: bool,
    /// Last difference relative to the last iterate.
    pub final_residual: f64,
    /// Largest relative spectral divergence over all iterates and nodes.
    pub max_divergence: f64,
}

impl PicardTrace {
    pub fn iterations(&self) -> usize {
        self.diffs.len()
    }

    /// `diffs[n+1] / diffs[n]` for `n ≥ 1`.
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.diffs.windows(2).skip(1).map(|w| w[1] / w[0]).collect()
    }
}

/// `sup_t t^a ‖u(t)‖_{E^p_q}` accumulated node by node.
struct SupNorm {
    p: Exponent,
    q: Exponent,
    a: f64,
    value: f64,
}

impl SupNorm {
    fn push(&mut self, t: f64, f: &GridField) {
        if self.a != 0.0 && t == 0.0 {
            return;
        }
        let w = if self.a == 0.0 { 1.0 } else { t.powf(self.a) };
        self.value = self.value.max(w * amalgam_norm(f, self.p, self.q));
    }
}

fn check_divergence_free(ws: &SpectralWorkspace, u0: &GridField) -> Result<()> {
    let d = ws.spec().d();
    if d < 2 || u0.components() != d {
        return domain("Navier–Stokes data need d >= 2 and d components");
    }
    let scale = u0.max_abs();
    if scale == 0.0 {
        return Ok(());
    }
    let gap = ws.leray_project(u0)?.sub(u0)?.max_abs();
    if gap > 1e-10 * scale {
        return Err(Error::Precondition(format!(
            "data are not divergence free: |Pu0 - u0| / |u0| = {:.3e}",
            gap / scale
        )));
    }
    Ok(())
}

/// Free evolution `e^{tΔ}u₀` at each node.
fn free_evolution(ws: &SpectralWorkspace, u0: &GridField, times: &[f64]) -> Result<Vec<GridField>> {
    let spectra = ws.spectra(u0);
    times
        .iter()
        .map(|&t| ws.heat_from_spectra(&spectra, t, 0))
        .collect()
}

/// Iterates `u^{(n+1)} = e^{tΔ}u₀ − B(u^{(n)}, u^{(n)})` on the nodes of `cfg`.
///
/// Stops once the difference in the regime norm is below
/// `contraction_tol` times the norm of the new iterate, or at `picard_cap`.
/// Failure to contract is reported in the trace, not as an error.
pub fn picard_solve(u0: &GridField, cfg: &SolverConfig) -> Result<(FieldSeries, PicardTrace)> {
    cfg.validate()?;
    let ws = SpectralWorkspace::new(u0.spec());
    check_divergence_free(&ws, u0)?;
    let times = cfg.times();
    let lin = free_evolution(&ws, u0, &times)?;
    let (p, q, a) = cfg.regime.iteration_norm();
    let mut trace = PicardTrace::default();
    let mut norm0 = SupNorm {
        p,
        q,
        a,
        value: 0.0,
    };
    for (t, f) in times.iter().zip(&lin) {
        norm0.push(*t, f);
        trace.max_divergence = trace.max_divergence.max(ws.relative_divergence(f)?);
    }
    trace.norms.push(norm0.value);
    let mut current = lin.clone();
    if u0.max_abs() == 0.0 {
        trace.converged = true;
        return Ok((FieldSeries::trapezoid(times, current)?, trace));
    }
    for _ in 0..cfg.picard_cap {
        let mut stepper = DuhamelStepper::new(&ws);
        let mut next = Vec::with_capacity(times.len());
        let mut norm = SupNorm {
            p,
            q,
            a,
            value: 0.0,
        };
        let mut diff = SupNorm {
            p,
            q,
            a,
            value: 0.0,
        };
        for (j, &t) in times.iter().enumerate() {
            let w = ws.product_divergence_spectra(&current[j], &current[j])?;
            stepper.push(&ws, t, w)?;
            let u = lin[j].sub(&stepper.field(&ws)?)?;
            norm.push(t, &u);
            diff.push(t, &u.sub(&current[j])?);
            trace.max_divergence = trace.max_divergence.max(ws.relative_divergence(&u)?);
            next.push(u);
        }
        current = next;
        trace.norms.push(norm.value);
        trace.diffs.push(diff.value);
        trace.final_residual = if norm.value > 0.0 {
            diff.value / norm.value
        } else {
            0.0
        };
        if !trace.final_residual.is_finite() || trace.final_residual > 1e6 {
            break;
        }
        if trace.final_residual <= cfg.contraction_tol {
            trace.converged = true;
            break;
        }
    }
    Ok((FieldSeries::trapezoid(times, current)?, trace))
}

/// `‖u(t) − e^{tΔ}u₀ + B(u,u)(t)‖_{E²_q}` at each node, re-evaluating the
/// fixed-point map on a stored series.
pub fn mild_residual(u0: &GridField, u: &FieldSeries, q: Exponent) -> Result<Vec<f64>> {
    if u.times()[0] != 0.0 {
        return domain("series must start at t = 0");
    }
    let ws = SpectralWorkspace::new(u0.spec());
    let spectra = ws.spectra(u0);
    let mut stepper = DuhamelStepper::new(&ws);
    let mut out = Vec::with_capacity(u.len());
    for (j, &t) in u.times().iter().enumerate() {
        let f = u.field(j);
        stepper.push(&ws, t, ws.product_divergence_spectra(f, f)?)?;
        let lin = ws.heat_from_spectra(&spectra, t, 0)?;
        let r = f.sub(&lin)?.add(&stepper.field(&ws)?)?;
        out.push(amalgam_norm(&r, Exponent::TWO, q));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::amalgam::GridSpec;
    use crate::solver::Regime;

    fn shear_vortex(spec: &GridSpec, amp: f64) -> GridField {
        // u = (∂₂ψ, −∂₁ψ) for a two-mode periodic stream function, so the
        // advection term is not a pure gradient.
        GridField::from_fn(spec.clone(), 2, |x, o| {
            let (a, b) = (PI * x[0] / 2.0, PI * x[1] / 2.0);
            o[0] = amp * (PI / 2.0) * (a.sin() * b.cos() + 0.5 * (2.0 * a).sin() * b.cos());
            o[1] = -amp * (PI / 2.0) * (a.cos() * b.sin() + (2.0 * a).cos() * b.sin());
        })
    }

    fn cfg(regime: Regime) -> SolverConfig {
        SolverConfig {
            t_final: 0.25,
            levels: 4,
            substeps: 2,
            picard_cap: 30,
            contraction_tol: 1e-10,
            regime,
        }
    }

    #[test]
    fn zero_data_converge_immediately() {
        let spec = GridSpec::centered(2, 4, 4).unwrap();
        let (u, tr) = picard_solve(
            &GridField::zeros(spec, 2),
            &cfg(Regime::CriticalSmall { q: Exponent::TWO }),
        )
        .unwrap();
        assert!(tr.converged && tr.iterations() == 0);
        assert!(u.fields().iter().all(|f| f.max_abs() == 0.0));
    }

    #[test]
    fn rejects_compressible_data() {
        let spec = GridSpec::centered(2, 4, 4).unwrap();
        let u0 = GridField::from_fn(spec, 2, |x, o| {
            o[0] = (PI * x[0] / 2.0).sin();
        });
        let r = picard_solve(&u0, &cfg(Regime::CriticalSmall { q: Exponent::TWO }));
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn small_data_contract_and_solve_the_mild_equation() {
        let spec = GridSpec::centered(2, 4, 8).unwrap();
        let u0 = shear_vortex(&spec, 0.3);
        let regime = Regime::Subcritical {
            r: Exponent::of(6.0),
            q: Exponent::TWO,
        };
        let (u, tr) = picard_solve(&u0, &cfg(regime)).unwrap();
        assert!(tr.converged, "{tr:?}");
        assert!(
            tr.contraction_ratios().iter().all(|&r| r <= 0.5),
            "{:?}",
            tr.contraction_ratios()
        );
        assert!(tr.max_divergence < 1e-10);
        let res = mild_residual(&u0, &u, Exponent::TWO).unwrap();
        let scale = u
            .fields()
            .iter()
            .map(|f| amalgam_norm(f, Exponent::TWO, Exponent::TWO))
            .fold(0.0, f64::max);
        assert!(res.iter().all(|r| r / scale <= 10.0 * 1e-10), "{res:?}");
    }

    #[test]
    fn huge_data_fail_to_converge_without_panicking() {
        let spec = GridSpec::centered(2, 4, 4).unwrap();
        let u0 = shear_vortex(&spec, 400.0);
        let mut c = cfg(Regime::CriticalSmall { q: Exponent::TWO });
        c.picard_cap = 6;
        let (_, tr) = picard_solve(&u0, &c).unwrap();
        assert!(!tr.converged);
    }
}
