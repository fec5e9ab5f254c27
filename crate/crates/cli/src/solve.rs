use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use amalgam_core::amalgam::io::read_field;
use amalgam_core::constructions::taylor_green;
use amalgam_core::solver::{
    mild_residual, picard_solve, regularized_solve, subcritical_timescale, weighted_norms,
    PicardTrace, RegularizedConfig, SolverConfig, WeightedNorms, REGULARIZED_WINDOW,
};
use amalgam_core::{amalgam_norm, Exponent, GridField, GridSpec, NormSpec};
use amalgam_verify::params::Params;
use amalgam_verify::scenarios::regularized::compact_swirl;
use amalgam_verify::scenarios::theorem::{RegimeKind, TheoremParams};
use amalgam_verify::Verdict;
use anyhow::{bail, Context, Result};
use serde::Serialize;

/// JSON record of one solve: configuration, iteration trace, final norms
/// and residuals.
#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub mode: String,
    pub config: toml::Table,
    pub seed: u64,
    pub solver: serde_json::Value,
    pub data_norm: f64,
    pub trace: PicardTrace,
    pub contraction_ratios: Vec<f64>,
    pub final_norms: serde_json::Value,
    /// Mild-formulation residual at each time node (Picard runs only).
    pub residuals: Vec<f64>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

fn initial_data(
    ps: &mut Params,
    grid: &GridSpec,
    seed: u64,
    q: Exponent,
    norm: (Exponent, Exponent),
) -> Result<GridField> {
    let kind = ps.string("data", "random")?;
    let u = match kind.as_str() {
        "random" => amalgam_core::constructions::gen_divfree_random(seed, grid, 1.0, q)?,
        "taylor_green" => taylor_green(grid, 1.0)?,
        "swirl" => compact_swirl(grid),
        "file" => {
            let path = PathBuf::from(ps.string("field", "")?);
            let f = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
            return Ok(read_field(BufReader::new(f))?);
        }
        other => bail!("unknown data {other:?}"),
    };
    let size = amalgam_norm(&u, norm.0, norm.1);
    if size == 0.0 {
        bail!("initial data vanish");
    }
    let amplitude = ps.f64("amplitude", 0.1)?;
    Ok(u.scaled(amplitude / size))
}

fn grid(ps: &mut Params) -> Result<GridSpec> {
    let side = ps.usize("side", 8)?;
    let n = ps.usize("n", 6)?;
    Ok(GridSpec::centered(3, side, n)?)
}

pub fn solve(ps: &mut Params) -> Result<SolveReport> {
    let config = ps.table().clone();
    let mode = ps.string("mode", "picard")?;
    let seed = ps.u64("seed", 1)?;
    match mode.as_str() {
        "picard" => picard(ps, config, seed),
        "regularized" => regularized(ps, config, seed),
        other => bail!("unknown mode {other:?}"),
    }
}

fn picard(ps: &mut Params, config: toml::Table, seed: u64) -> Result<SolveReport> {
    let prm = TheoremParams::from_params(ps)?;
    let regime = prm.solver_regime();
    let NormSpec::Epq { p, q } = regime.data_norm() else {
        unreachable!()
    };
    let g = grid(ps)?;
    let u0 = initial_data(ps, &g, seed, prm.q, (p, q))?;
    let data_norm = amalgam_norm(&u0, p, q);
    let t_final = match prm.regime {
        RegimeKind::Subcritical => subcritical_timescale(data_norm, prm.r)?.min(prm.t_cap),
        _ => prm.t_cap,
    };
    let cfg = SolverConfig {
        t_final: ps.f64("t_final", t_final)?,
        levels: prm.levels,
        substeps: prm.substeps,
        picard_cap: prm.picard_cap,
        contraction_tol: prm.contraction_tol,
        regime,
    };
    let (u, trace) = picard_solve(&u0, &cfg)?;
    let residuals = mild_residual(&u0, &u, prm.q)?;
    let weighted: WeightedNorms = weighted_norms(&u, regime)?;
    let last = u.field(u.len() - 1);
    let final_norms = serde_json::json!({
        "data_norm_at_t_final": amalgam_norm(last, p, q),
        "energy_e2q_at_t_final": amalgam_norm(last, Exponent::TWO, prm.q),
        "weighted": weighted,
    });
    let mut notes = Vec::new();
    if !trace.converged {
        notes.push("DATA_TOO_LARGE".to_string());
    }
    Ok(SolveReport {
        mode: "picard".into(),
        config,
        seed,
        solver: serde_json::to_value(&cfg)?,
        data_norm,
        contraction_ratios: trace.contraction_ratios(),
        verdict: Verdict::from_bool(trace.converged),
        trace,
        final_norms,
        residuals,
        notes,
    })
}

fn regularized(ps: &mut Params, config: toml::Table, seed: u64) -> Result<SolveReport> {
    let q = ps.exponent("q", Exponent::TWO)?;
    let eps = ps.f64("eps", 0.5)?;
    let g = grid(ps)?;
    let u0 = initial_data(ps, &g, seed, q, (Exponent::TWO, q))?;
    let data_norm = amalgam_norm(&u0, Exponent::TWO, q);
    let window = (REGULARIZED_WINDOW * eps.powi(3) / (data_norm * data_norm)).min(1.0);
    let cfg = RegularizedConfig {
        eps,
        t_final: ps.f64("t_final", 0.5 * window)?,
        levels: ps.usize("levels", 4)? as u32,
        substeps: ps.usize("substeps", 2)? as u32,
        picard_cap: ps.usize("picard_cap", 30)? as u32,
        contraction_tol: ps.f64("contraction_tol", 1e-10)?,
        q,
    };
    let out = regularized_solve(&u0, &cfg)?;
    let mut notes = Vec::new();
    if !out.trace.converged {
        notes.push("DATA_TOO_LARGE".to_string());
    }
    if !out.admissible {
        notes.push("horizon outside the admissible window".to_string());
    }
    let final_norms = serde_json::json!({
        "le_norm": out.le_norm,
        "c0": out.c0,
        "window": out.window,
        "admissible": out.admissible,
    });
    Ok(SolveReport {
        mode: "regularized".into(),
        config,
        seed,
        solver: serde_json::to_value(&cfg)?,
        data_norm,
        contraction_ratios: out.trace.contraction_ratios(),
        verdict: Verdict::from_bool(out.trace.converged && out.admissible),
        trace: out.trace,
        final_norms,
        residuals: Vec::new(),
        notes,
    })
}
