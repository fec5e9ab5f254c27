use std::str::FromStr;

use amalgam_core::constructions::gen_divfree_random;
use amalgam_core::error::{Error, Result};
use amalgam_core::solver::{
    mild_residual, picard_solve, subcritical_timescale, weighted_norms, Regime, SolverConfig,
};
use amalgam_core::{amalgam_norm, spacetime_norm, Exponent, GridField, GridSpec, NormSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::params::Params;
use crate::report::{Verdict, VerifyReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeKind {
    Subcritical,
    CriticalSmall,
    CriticalDecay,
}

impl FromStr for RegimeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subcritical" => Ok(RegimeKind::Subcritical),
            "critical_small" => Ok(RegimeKind::CriticalSmall),
            "critical_decay" => Ok(RegimeKind::CriticalDecay),
            _ => Err(Error::Domain(format!("unknown regime {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremParams {
    pub regime: RegimeKind,
    pub r: Exponent,
    pub q: Exponent,
    pub seeds: Vec<u64>,
    /// Size of the data in the regime's data norm.
    pub amplitude: f64,
    pub side: usize,
    pub n: usize,
    /// Upper cap on the horizon.
    pub t_cap: f64,
    pub levels: u32,
    pub substeps: u32,
    pub picard_cap: u32,
    pub contraction_tol: f64,
    /// Spacetime exponents checked along the solution.
    pub s: Exponent,
    pub p: Exponent,
    pub m: Exponent,
    pub max_contraction: f64,
    /// Allowed relative deviation of the persistence constant from the family mean.
    pub persistence_band: f64,
}

impl TheoremParams {
    pub fn new(regime: RegimeKind) -> Self {
        let (q, amplitude) = match regime {
            RegimeKind::Subcritical => (Exponent::TWO, 0.1),
            RegimeKind::CriticalSmall => (Exponent::of(3.0), 0.05),
            RegimeKind::CriticalDecay => (Exponent::TWO, 0.05),
        };
        TheoremParams {
            regime,
            r: Exponent::of(6.0),
            q,
            seeds: vec![1, 2, 3, 4, 5],
            amplitude,
            side: 8,
            n: 6,
            t_cap: 0.125,
            levels: 4,
            substeps: 2,
            picard_cap: 40,
            contraction_tol: 1e-10,
            s: Exponent::of(5.0),
            p: Exponent::of(5.0),
            m: Exponent::of(5.0),
            max_contraction: 0.5,
            persistence_band: 0.25,
        }
    }

    pub fn from_params(ps: &mut Params) -> Result<Self> {
        let regime: RegimeKind = ps.string("regime", "subcritical")?.parse()?;
        let mut t = TheoremParams::new(regime);
        t.r = ps.exponent("r", t.r)?;
        t.q = ps.exponent("q", t.q)?;
        let seeds: Vec<f64> = t.seeds.iter().map(|&s| s as f64).collect();
        t.seeds = ps
            .f64_list("seeds", &seeds)?
            .into_iter()
            .map(|s| s as u64)
            .collect();
        t.amplitude = ps.f64("amplitude", t.amplitude)?;
        t.side = ps.usize("side", t.side)?;
        t.n = ps.usize("n", t.n)?;
        t.t_cap = ps.f64("t_cap", t.t_cap)?;
        t.levels = ps.usize("levels", t.levels as usize)? as u32;
        t.substeps = ps.usize("substeps", t.substeps as usize)? as u32;
        t.picard_cap = ps.usize("picard_cap", t.picard_cap as usize)? as u32;
        t.contraction_tol = ps.f64("contraction_tol", t.contraction_tol)?;
        t.s = ps.exponent("s", t.s)?;
        t.p = ps.exponent("p", t.p)?;
        t.m = ps.exponent("m", t.m)?;
        t.max_contraction = ps.f64("max_contraction", t.max_contraction)?;
        t.persistence_band = ps.f64("persistence_band", t.persistence_band)?;
        Ok(t)
    }

    pub fn solver_regime(&self) -> Regime {
        match self.regime {
            RegimeKind::Subcritical => Regime::Subcritical {
                r: self.r,
                q: self.q,
            },
            RegimeKind::CriticalSmall => Regime::CriticalSmall { q: self.q },
            RegimeKind::CriticalDecay => Regime::CriticalDecay { q: self.q },
        }
    }
}

/// `m₁` with `2/s + 3/m₁ = 3/q`.
pub fn m1(s: Exponent, q: Exponent) -> Result<Exponent> {
    Exponent::from_recip(q.recip() - 2.0 * s.recip() / 3.0)
}

/// Gate for the global `E^{s,p}_{∞,m}` bound of the decay regime, returning
/// the violated condition if any.
pub fn decay_gate(s: Exponent, p: Exponent, q: Exponent, m: Exponent) -> Option<String> {
    if (2.0 * s.recip() + 3.0 * p.recip() - 1.0).abs() > 1e-12 {
        return Some("2/s + 3/p = 1".into());
    }
    if s.is_infinite() {
        return Some("s < inf".into());
    }
    if q.value() > 3.0 {
        return Some("q <= 3".into());
    }
    let Ok(m1) = m1(s, q) else {
        return Some("1/q - 2/(3s) in [0, 1]".into());
    };
    let pc = p.conjugate();
    if !(m.value() > pc.value()) {
        return Some(format!("m > p' = {}", pc.value()));
    }
    if !(m.value() >= m1.value()) || (q.value() == 1.0 && m.value() <= m1.value()) {
        return Some(format!("m >= m1 = {} (strict when q = 1)", m1.value()));
    }
    None
}

/// Random divergence-free data of the requested size in the regime's data norm.
pub fn theorem_data(prm: &TheoremParams, grid: &GridSpec, seed: u64) -> Result<GridField> {
    let u = gen_divfree_random(seed, grid, 1.0, prm.q)?;
    let NormSpec::Epq { p, q } = prm.solver_regime().data_norm() else {
        unreachable!()
    };
    let size = amalgam_norm(&u, p, q);
    Ok(u.scaled(prm.amplitude / size))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberOutcome {
    pub seed: u64,
    pub t_final: f64,
    pub converged: bool,
    pub iterations: usize,
    pub max_contraction: f64,
    pub residual: f64,
    pub divergence: f64,
    /// `sup_t ‖u‖ / ‖u₀‖` in the iteration norm.
    pub persistence: f64,
    pub spacetime: f64,
    pub spacetime_ls: Option<f64>,
    pub half_sup_inf: f64,
}

fn run_member(prm: &TheoremParams, grid: &GridSpec, seed: u64) -> Result<MemberOutcome> {
    let u0 = theorem_data(prm, grid, seed)?;
    let regime = prm.solver_regime();
    let t_final = match prm.regime {
        RegimeKind::Subcritical => subcritical_timescale(prm.amplitude, prm.r)?.min(prm.t_cap),
        _ => prm.t_cap,
    };
    let cfg = SolverConfig {
        t_final,
        levels: prm.levels,
        substeps: prm.substeps,
        picard_cap: prm.picard_cap,
        contraction_tol: prm.contraction_tol,
        regime,
    };
    let (u, trace) = picard_solve(&u0, &cfg)?;
    let res = mild_residual(&u0, &u, prm.q)?;
    let scale = u
        .fields()
        .iter()
        .map(|f| amalgam_norm(f, Exponent::TWO, prm.q))
        .fold(0.0, f64::max);
    let residual = res.iter().copied().fold(0.0, f64::max) / scale.max(f64::MIN_POSITIVE);
    let (ip, iq, a) = regime.iteration_norm();
    let NormSpec::Epq { p: dp, q: dq } = regime.data_norm() else {
        unreachable!()
    };
    let data = amalgam_norm(&u0, dp, dq);
    let sup = u
        .times()
        .iter()
        .zip(u.fields())
        .filter(|(t, _)| a == 0.0 || **t > 0.0)
        .map(|(t, f)| t.powf(a) * amalgam_norm(f, ip, iq))
        .fold(0.0, f64::max);
    let w = weighted_norms(&u, regime)?;
    let spacetime = spacetime_norm(
        &u,
        NormSpec::Espq {
            s: prm.s,
            p: prm.p,
            q: prm.m,
        },
    )? / data;
    let spacetime_ls = if prm.q.value() <= prm.s.value() {
        Some(
            spacetime_norm(
                &u,
                NormSpec::LsEpq {
                    s: prm.s,
                    p: prm.p,
                    q: prm.m,
                },
            )? / data,
        )
    } else {
        None
    };
    Ok(MemberOutcome {
        seed,
        t_final,
        converged: trace.converged,
        iterations: trace.iterations(),
        max_contraction: trace.contraction_ratios().into_iter().fold(0.0, f64::max),
        residual,
        divergence: trace.max_divergence,
        persistence: sup / data,
        spacetime,
        spacetime_ls,
        half_sup_inf: w.half_sup_inf / data,
    })
}

/// Picard solutions for a small random family: contraction, mild residual,
/// divergence and the stability of the persistence constant.
pub fn scenario_theorem(prm: &TheoremParams) -> Result<VerifyReport> {
    let id = match prm.regime {
        RegimeKind::Subcritical => "theorem_subcritical",
        RegimeKind::CriticalSmall => "theorem_critical",
        RegimeKind::CriticalDecay => "theorem_decay",
    };
    let mut r = VerifyReport::new(
        id,
        "mild solutions persist in the data norm with bounded spacetime norms",
    );
    r.param("regime", format!("{:?}", prm.regime))
        .param("r", prm.r)
        .param("q", prm.q);
    r.param("seeds", format!("{:?}", prm.seeds))
        .param("amplitude", prm.amplitude);
    r.param("side", prm.side)
        .param("n", prm.n)
        .param("t_cap", prm.t_cap);
    r.param("levels", prm.levels)
        .param("substeps", prm.substeps)
        .param("contraction_tol", prm.contraction_tol);
    r.param("s", prm.s).param("p", prm.p).param("m", prm.m);
    r.tolerance = prm.persistence_band;
    if prm.seeds.is_empty() {
        return Err(Error::Domain("empty data family".into()));
    }
    if prm.regime == RegimeKind::CriticalDecay {
        if let Some(why) = decay_gate(prm.s, prm.p, prm.q, prm.m) {
            r.note(format!("global spacetime bound not claimed: {why}"));
            r.fold(Verdict::NotApplicable);
            return Ok(r);
        }
    }
    prm.solver_regime().validate()?;
    let grid = GridSpec::centered(3, prm.side, prm.n)?;
    let members = prm
        .seeds
        .par_iter()
        .map(|&s| run_member(prm, &grid, s))
        .collect::<Result<Vec<_>>>()?;
    let mut ok = true;
    for o in &members {
        let k = o.seed as f64;
        r.sample("persistence", k, o.persistence)
            .sample("residual", k, o.residual);
        r.sample("max_contraction", k, o.max_contraction)
            .sample("spacetime", k, o.spacetime);
        r.sample("half_sup_inf", k, o.half_sup_inf);
        if let Some(v) = o.spacetime_ls {
            r.sample("spacetime_ls", k, v);
        }
        if !o.converged {
            r.note(format!("DATA_TOO_LARGE: seed {} did not contract", o.seed));
        }
        ok &= o.converged
            && o.max_contraction <= prm.max_contraction
            && o.residual <= 10.0 * prm.contraction_tol
            && o.divergence <= 1e-10
            && o.spacetime.is_finite();
    }
    let pers: Vec<f64> = members.iter().map(|o| o.persistence).collect();
    let mean = pers.iter().sum::<f64>() / pers.len() as f64;
    let spread = pers
        .iter()
        .map(|v| (v - mean).abs() / mean)
        .fold(0.0, f64::max);
    let fold = |f: fn(&MemberOutcome) -> f64| members.iter().map(f).fold(0.0, f64::max);
    r.measure("t_final", members[0].t_final);
    r.measure("max_contraction", fold(|o| o.max_contraction));
    r.measure("max_residual", fold(|o| o.residual));
    r.measure("max_divergence", fold(|o| o.divergence));
    r.measure("max_iterations", fold(|o| o.iterations as f64));
    r.measure("persistence_mean", mean)
        .measure("persistence_spread", spread);
    r.measure("max_spacetime_ratio", fold(|o| o.spacetime));
    r.predict("max_contraction", prm.max_contraction)
        .predict("max_residual", 10.0 * prm.contraction_tol);
    r.fold(Verdict::from_bool(ok && spread <= prm.persistence_band));
    Ok(r)
}
