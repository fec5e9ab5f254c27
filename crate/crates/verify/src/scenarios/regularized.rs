use amalgam_core::constructions::gen_divfree_random;
use amalgam_core::error::{Error, Result};
use amalgam_core::solver::{apriori_quantities, regularized_solve, RegularizedConfig};
use amalgam_core::{amalgam_norm, Exponent, GridField, GridSpec};
use serde::{Deserialize, Serialize};

use super::flatness;
use crate::params::Params;
use crate::report::{Verdict, VerifyReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularizedParams {
    pub seed: u64,
    pub q: Exponent,
    /// `‖u₀‖_{E²_q}`.
    pub amplitude: f64,
    pub eps: f64,
    /// `T` as a fraction of the admissible window.
    pub window_fraction: f64,
    pub side: usize,
    pub n: usize,
    pub levels: u32,
    pub substeps: u32,
    pub picard_cap: u32,
    pub contraction_tol: f64,
    /// `‖u^ε‖_{LE_q} ≤ factor · C₀ · ‖u₀‖_{E²_q}`.
    pub factor: f64,
}

impl Default for RegularizedParams {
    fn default() -> Self {
        RegularizedParams {
            seed: 3,
            q: Exponent::TWO,
            amplitude: 0.25,
            eps: 0.5,
            window_fraction: 0.5,
            side: 8,
            n: 4,
            levels: 4,
            substeps: 2,
            picard_cap: 30,
            contraction_tol: 1e-10,
            factor: 2.0,
        }
    }
}

impl RegularizedParams {
    pub fn from_params(ps: &mut Params) -> Result<Self> {
        let def = RegularizedParams::default();
        Ok(RegularizedParams {
            seed: ps.u64("seed", def.seed)?,
            q: ps.exponent("q", def.q)?,
            amplitude: ps.f64("amplitude", def.amplitude)?,
            eps: ps.f64("eps", def.eps)?,
            window_fraction: ps.f64("window_fraction", def.window_fraction)?,
            side: ps.usize("side", def.side)?,
            n: ps.usize("n", def.n)?,
            levels: ps.usize("levels", def.levels as usize)? as u32,
            substeps: ps.usize("substeps", def.substeps as usize)? as u32,
            picard_cap: ps.usize("picard_cap", def.picard_cap as usize)? as u32,
            contraction_tol: ps.f64("contraction_tol", def.contraction_tol)?,
            factor: ps.f64("factor", def.factor)?,
        })
    }
}

/// Random divergence-free data with `‖u₀‖_{E²_q} = amplitude`.
fn random_data(grid: &GridSpec, seed: u64, q: Exponent, amplitude: f64) -> Result<GridField> {
    let u = gen_divfree_random(seed, grid, 1.0, q)?;
    let size = amalgam_norm(&u, Exponent::TWO, q);
    Ok(u.scaled(amplitude / size))
}

/// Mollified, localized scheme on a horizon inside the window
/// `T < min(1, c ε³ ‖u₀‖⁻²)`: the local energy stays below
/// `factor · C₀ · ‖u₀‖_{E²_q}` with `C₀` the free-flow constant.
pub fn scenario_regularized(prm: &RegularizedParams) -> Result<VerifyReport> {
    let mut r = VerifyReport::new(
        "regularized",
        "local energy bound of the regularized scheme",
    );
    r.seed = Some(prm.seed);
    r.param("q", prm.q)
        .param("amplitude", prm.amplitude)
        .param("eps", prm.eps);
    r.param("window_fraction", prm.window_fraction)
        .param("side", prm.side)
        .param("n", prm.n);
    r.param("levels", prm.levels)
        .param("substeps", prm.substeps)
        .param("factor", prm.factor);
    if !(prm.window_fraction > 0.0 && prm.window_fraction <= 1.0) {
        return Err(Error::Domain("window_fraction must lie in (0, 1]".into()));
    }
    let grid = GridSpec::centered(3, prm.side, prm.n)?;
    let u0 = random_data(&grid, prm.seed, prm.q, prm.amplitude)?;
    let data = amalgam_norm(&u0, Exponent::TWO, prm.q);
    let window =
        (amalgam_core::solver::REGULARIZED_WINDOW * prm.eps.powi(3) / (data * data)).min(1.0);
    let cfg = RegularizedConfig {
        eps: prm.eps,
        t_final: prm.window_fraction * window,
        levels: prm.levels,
        substeps: prm.substeps,
        picard_cap: prm.picard_cap,
        contraction_tol: prm.contraction_tol,
        q: prm.q,
    };
    let out = regularized_solve(&u0, &cfg)?;
    let bound = prm.factor * out.c0 * out.data_norm;
    let contraction = out
        .trace
        .contraction_ratios()
        .into_iter()
        .fold(0.0, f64::max);
    r.measure("t_final", cfg.t_final)
        .measure("window", out.window)
        .measure("c0", out.c0);
    r.measure("data_norm", out.data_norm)
        .measure("le_norm", out.le_norm)
        .measure("bound", bound);
    r.measure("ratio", out.le_norm / bound.max(f64::MIN_POSITIVE));
    r.measure("iterations", out.trace.iterations() as f64)
        .measure("max_contraction", contraction);
    r.measure("final_residual", out.trace.final_residual)
        .measure("divergence", out.trace.max_divergence);
    r.predict("ratio", 1.0);
    r.tolerance = prm.factor;
    if !out.trace.converged {
        r.note("DATA_TOO_LARGE");
    }
    if !out.admissible {
        r.note("horizon outside the admissible window");
    }
    r.fold(Verdict::from_bool(
        out.trace.converged && out.admissible && out.le_norm <= bound,
    ));
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AprioriData {
    /// Random divergence-free field spread over the box.
    Random,
    /// Compactly supported swirl inside the unit cube at the origin.
    Swirl,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AprioriParams {
    pub seed: u64,
    pub q: Exponent,
    pub data: AprioriData,
    pub radii: Vec<f64>,
    pub side: usize,
    pub n: usize,
    /// Allowed `max / min` of `R N⁰_{q,R} / ‖u₀‖²_{E²_q}`.
    pub max_spread: f64,
}

impl Default for AprioriParams {
    fn default() -> Self {
        AprioriParams {
            seed: 3,
            q: Exponent::TWO,
            data: AprioriData::Random,
            radii: vec![1.0, 2.0, 4.0, 8.0],
            side: 8,
            n: 4,
            max_spread: 2.0,
        }
    }
}

impl AprioriParams {
    pub fn from_params(ps: &mut Params) -> Result<Self> {
        let def = AprioriParams::default();
        let data = match ps.string("data", "random")?.as_str() {
            "random" => AprioriData::Random,
            "swirl" => AprioriData::Swirl,
            s => return Err(Error::Domain(format!("unknown data {s:?}"))),
        };
        Ok(AprioriParams {
            seed: ps.u64("seed", def.seed)?,
            q: ps.exponent("q", def.q)?,
            data,
            radii: ps.f64_list("radii", &def.radii)?,
            side: ps.usize("side", def.side)?,
            n: ps.usize("n", def.n)?,
            max_spread: ps.f64("max_spread", def.max_spread)?,
        })
    }
}

/// `(−y₁ψ, y₀ψ, 0)` with `ψ` a smooth bump of radius 0.45 at the origin.
pub fn compact_swirl(grid: &GridSpec) -> GridField {
    GridField::from_fn(grid.clone(), 3, |x, o| {
        let r2 = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (0.45 * 0.45);
        if r2 < 1.0 {
            let psi = (1.0 - 1.0 / (1.0 - r2)).exp();
            o[0] = -x[1] * psi;
            o[1] = x[0] * psi;
        }
    })
}

/// `A_{0,q}(R) = R N⁰_{q,R}` against `‖u₀‖²_{E²_q}` over several `R`.
pub fn scenario_apriori(prm: &AprioriParams) -> Result<VerifyReport> {
    let mut r = VerifyReport::new(
        "apriori_scaling",
        "lattice a priori quantities against the data norm",
    );
    r.seed = Some(prm.seed);
    r.param("q", prm.q)
        .param("data", format!("{:?}", prm.data))
        .param("side", prm.side)
        .param("n", prm.n);
    r.param("radii", format!("{:?}", prm.radii));
    let grid = GridSpec::centered(3, prm.side, prm.n)?;
    let u0 = match prm.data {
        AprioriData::Random => random_data(&grid, prm.seed, prm.q, 1.0)?,
        AprioriData::Swirl => compact_swirl(&grid),
    };
    let data = amalgam_norm(&u0, Exponent::TWO, prm.q);
    if data == 0.0 {
        return Err(Error::Domain("a priori scaling needs nonzero data".into()));
    }
    let mut consts = Vec::with_capacity(prm.radii.len());
    for &radius in &prm.radii {
        let a = apriori_quantities(&u0, prm.q, radius)?;
        let c = a.a0q / (data * data);
        r.sample("c_r", radius, c)
            .sample("n0_qr", radius, a.n0_qr)
            .sample("lambda_r", radius, a.lambda_r);
        consts.push(c);
    }
    let spread = flatness(&consts);
    r.measure("data_norm_sq", data * data).measure(
        "c_min",
        consts.iter().copied().fold(f64::INFINITY, f64::min),
    );
    r.measure("c_max", consts.iter().copied().fold(0.0, f64::max))
        .measure("spread", spread);
    r.tolerance = prm.max_spread;
    r.fold(Verdict::from_bool(spread <= prm.max_spread));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swirl_mass_sits_in_one_cube() {
        let prm = AprioriParams {
            data: AprioriData::Swirl,
            q: Exponent::ONE,
            side: 4,
            ..Default::default()
        };
        let r = scenario_apriori(&AprioriParams {
            radii: vec![1.0, 2.0, 4.0],
            ..prm
        })
        .unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        for (_, c) in r.samples_of("c_r") {
            assert!((c - 1.0).abs() < 1e-12, "{c}");
        }
    }

    #[test]
    fn quadratic_exponent_gives_total_mass() {
        let prm = AprioriParams {
            side: 4,
            radii: vec![1.0, 2.0, 4.0],
            ..Default::default()
        };
        let r = scenario_apriori(&prm).unwrap();
        for (_, c) in r.samples_of("c_r") {
            assert!((c - 1.0).abs() < 1e-10, "{c}");
        }
    }

    #[test]
    fn small_regularized_run() {
        let prm = RegularizedParams {
            side: 4,
            levels: 2,
            substeps: 1,
            ..Default::default()
        };
        let r = scenario_regularized(&prm).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:?} {:?}", r.measured, r.notes);
    }
}
