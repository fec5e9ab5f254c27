use std::str::FromStr;

use amalgam_core::amalgam::{cube_norms, espq_from_rows, ls_epq_from_rows, trapezoid_weights};
use amalgam_core::error::{Error, Result};
use amalgam_core::solver::time_grid;
use amalgam_core::spectral::{DuhamelStepper, SpectralWorkspace};
use amalgam_core::{amalgam_norm, Exponent, GridField, GridSpec};
use serde::{Deserialize, Serialize};

use super::{central_lattice_point, odd_at_least};
use crate::params::Params;
use crate::report::{Verdict, VerifyReport};

/// Margin added to a critical exponent when the bound needs `β > α`.
pub const EXPONENT_MARGIN: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `e^{tΔ}f` in `E^{s,p}_{T,m}` or `L^s_T E^p_m` against `‖f‖_{E^r_q}`.
    Heat,
    /// `L(F)` in `E^{s,p}_{T,m}` against `‖F‖_{E^{s̃,p̃}_{T,m̃}}`, `d = 3`.
    Duhamel,
    /// `e^{tΔ}f` in `LE_q(0,T)` against `‖f‖_{E²_q}`, `d = 3`.
    Energy,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heat" => Ok(Variant::Heat),
            "duhamel" => Ok(Variant::Duhamel),
            "energy" => Ok(Variant::Energy),
            _ => Err(Error::Domain(format!("unknown spacetime variant {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// `E^{s,p}_{T,m}`
    Espq,
    /// `L^s_T E^p_m`
    LsEpq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeParams {
    pub variant: Variant,
    pub flavor: Flavor,
    pub d: usize,
    pub r: Exponent,
    pub s: Exponent,
    pub p: Exponent,
    pub q: Exponent,
    pub m: Exponent,
    /// Growth exponent of the energy variant.
    pub beta: f64,
    pub horizons: Vec<f64>,
    pub side: usize,
    pub n: usize,
    pub levels: u32,
    pub substeps: u32,
    /// Allowed `max_T ρ(T) / ρ(T₀)`.
    pub max_growth: f64,
}

impl SpacetimeParams {
    /// One-dimensional heat flow, `2/s + 1/p = 1/r`.
    pub fn heat(flavor: Flavor, r: f64, s: f64, p: f64, q: f64, m: f64) -> Self {
        SpacetimeParams {
            variant: Variant::Heat,
            flavor,
            d: 1,
            r: Exponent::of(r),
            s: Exponent::of(s),
            p: Exponent::of(p),
            q: Exponent::of(q),
            m: Exponent::of(m),
            beta: 0.0,
            horizons: vec![0.25, 1.0, 4.0, 16.0],
            side: 0,
            n: 16,
            levels: 12,
            substeps: 4,
            max_growth: 3.0,
        }
    }

    /// `F = u⊗u` with `s̃ = s/2`, `p̃ = p/2`, `m̃ = max(1, m/2)`.
    pub fn duhamel(s: f64, p: f64, m: f64) -> Self {
        SpacetimeParams {
            variant: Variant::Duhamel,
            flavor: Flavor::Espq,
            d: 3,
            r: Exponent::ONE,
            s: Exponent::of(s),
            p: Exponent::of(p),
            q: Exponent::ONE,
            m: Exponent::of(m),
            beta: 0.0,
            horizons: vec![0.25, 1.0, 4.0],
            side: 32,
            n: 2,
            levels: 8,
            substeps: 2,
            max_growth: 3.0,
        }
    }

    pub fn energy(q: f64) -> Self {
        SpacetimeParams {
            variant: Variant::Energy,
            q: Exponent::of(q),
            beta: 0.1,
            ..SpacetimeParams::duhamel(5.0, 5.0, 5.0)
        }
    }

    pub fn from_params(ps: &mut Params) -> Result<Self> {
        let variant: Variant = ps.string("variant", "heat")?.parse()?;
        let mut st = match variant {
            Variant::Heat => SpacetimeParams::heat(Flavor::Espq, 2.0, 8.0, 4.0, 2.0, 4.0),
            Variant::Duhamel => SpacetimeParams::duhamel(5.0, 5.0, 5.0),
            Variant::Energy => SpacetimeParams::energy(2.0),
        };
        st.flavor = match ps.string("flavor", "espq")?.as_str() {
            "espq" => Flavor::Espq,
            "lsepq" => Flavor::LsEpq,
            other => return Err(Error::Domain(format!("unknown flavor {other:?}"))),
        };
        st.d = ps.usize("d", st.d)?;
        st.r = ps.exponent("r", st.r)?;
        st.s = ps.exponent("s", st.s)?;
        st.p = ps.exponent("p", st.p)?;
        st.q = ps.exponent("q", st.q)?;
        st.m = ps.exponent("m", st.m)?;
        st.beta = ps.f64("beta", st.beta)?;
        st.horizons = ps.f64_list("horizons", &st.horizons)?;
        st.side = ps.usize("side", st.side)?;
        st.n = ps.usize("n", st.n)?;
        st.levels = ps.usize("levels", st.levels as usize)? as u32;
        st.substeps = ps.usize("substeps", st.substeps as usize)? as u32;
        st.max_growth = ps.f64("max_growth", st.max_growth)?;
        Ok(st)
    }
}

/// Growth law `g(T)` attached to the bound, or the violated hypothesis.
#[derive(Clone, Debug, PartialEq)]
pub enum Growth {
    Law {
        label: String,
        terms: Vec<f64>,
        uniform: bool,
    },
    Violated(String),
}

impl Growth {
    /// `Σ T^{e}` over the terms.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Growth::Law { terms, .. } => terms.iter().map(|e| t.powf(*e)).sum(),
            Growth::Violated(_) => f64::NAN,
        }
    }
}

fn choose(alpha: f64, equal_allowed: bool) -> f64 {
    if alpha < 0.0 {
        0.0
    } else if equal_allowed {
        alpha
    } else {
        alpha + EXPONENT_MARGIN
    }
}

fn open(lo: f64, x: f64, hi: f64) -> bool {
    lo < x && x < hi
}

/// Hypotheses and growth law of the heat estimates.
pub fn heat_growth(prm: &SpacetimeParams) -> Growth {
    let d = prm.d as f64;
    let (r, s, p, q, m) = (
        prm.r.value(),
        prm.s.value(),
        prm.p.value(),
        prm.q.value(),
        prm.m.value(),
    );
    if !(r > 1.0) {
        return Growth::Violated("1 < r".into());
    }
    if !(r <= s) {
        return Growth::Violated("r <= s".into());
    }
    if !(r <= p && p.is_finite()) {
        return Growth::Violated("r <= p < inf".into());
    }
    if (2.0 * prm.s.recip() + d * prm.p.recip() - d * prm.r.recip()).abs() > 1e-12 {
        return Growth::Violated("2/s + d/p = d/r".into());
    }
    if !(q <= m) {
        return Growth::Violated("q <= m".into());
    }
    let alpha = d / 2.0 * prm.m.recip() - d / 2.0 * prm.q.recip() + prm.s.recip();
    let alpha_p = d / 2.0 * prm.s.recip() - d / 2.0 * prm.q.recip() + prm.s.recip();
    let strict_qm = open(1.0, q, m) && m.is_finite();
    let in_a = alpha < 0.0 || (alpha == 0.0 && strict_qm);
    let beta = choose(alpha, strict_qm);
    match prm.flavor {
        Flavor::Espq => {
            if in_a {
                Growth::Law {
                    label: "1".into(),
                    terms: vec![0.0],
                    uniform: true,
                }
            } else {
                Growth::Law {
                    label: format!("1 + T^{beta}"),
                    terms: vec![0.0, beta],
                    uniform: false,
                }
            }
        }
        Flavor::LsEpq => {
            if !(q <= s) {
                return Growth::Violated("q <= s".into());
            }
            let mid = q <= s && s < m;
            let e1 = q <= r && r <= s && s <= p && p <= m && s != m && r != p;
            let crit = d * s / (d + 2.0);
            let e2 = s < m && (q < crit || (q == crit && q > 1.0));
            if (m <= s && in_a) || (mid && (e1 || e2)) {
                return Growth::Law {
                    label: "1".into(),
                    terms: vec![0.0],
                    uniform: true,
                };
            }
            let mut terms = vec![0.0];
            let mut label = "1".to_string();
            if m <= s {
                terms.push(beta);
                label.push_str(&format!(" + T^{beta}"));
            }
            if mid && !(q <= r && p <= m) {
                let bp = choose(alpha_p, open(1.0, q, s));
                terms.push(bp);
                label.push_str(&format!(" + T^{bp}"));
            }
            Growth::Law {
                label,
                terms,
                uniform: false,
            }
        }
    }
}

/// `(s̃, p̃, m̃)` for `F = u⊗u`.
pub fn forcing_exponents(prm: &SpacetimeParams) -> (Exponent, Exponent, Exponent) {
    let half = |e: Exponent| Exponent::from_recip((2.0 * e.recip()).min(1.0)).expect("in range");
    (half(prm.s), half(prm.p), half(prm.m))
}

/// Hypotheses and growth law of the Duhamel estimate.
pub fn duhamel_growth(prm: &SpacetimeParams) -> Growth {
    if prm.d != 3 {
        return Growth::Violated("d = 3".into());
    }
    let (st, pt, mt) = forcing_exponents(prm);
    let (s, p, m) = (prm.s, prm.p, prm.m);
    if !(pt.value() <= p.value() && mt.value() <= m.value() && st.value() <= s.value()) {
        return Growth::Violated("pt <= p, mt <= m, st <= s".into());
    }
    let sigma = 0.5 - 1.5 * (pt.recip() - p.recip()) - (st.recip() - s.recip());
    if sigma < -1e-12 {
        return Growth::Violated("sigma >= 0".into());
    }
    let sigma = sigma.max(0.0);
    if sigma == 0.0 && !(open(1.0, st.value(), s.value()) && s.value().is_finite()) {
        return Growth::Violated("1 < st < s < inf when sigma = 0".into());
    }
    let alpha = 0.5 - 1.5 * (mt.recip() - m.recip()) - (st.recip() - s.recip());
    let strict = open(1.0, mt.value(), m.value()) && m.value().is_finite();
    if sigma == 0.0 && (alpha < 0.0 || (alpha.abs() < 1e-12 && strict)) {
        return Growth::Law {
            label: "1".into(),
            terms: vec![0.0],
            uniform: true,
        };
    }
    let beta = choose(alpha, strict);
    let top = 1.0 - st.recip() + s.recip();
    if beta > top {
        return Growth::Violated(format!("beta = {beta} <= 1 - 1/st + 1/s"));
    }
    Growth::Law {
        label: format!("T^{sigma} + T^{beta}"),
        terms: vec![sigma, beta],
        uniform: false,
    }
}

fn gaussian(grid: &GridSpec) -> GridField {
    let c = central_lattice_point(grid);
    GridField::scalar(grid.clone(), |x| {
        (-x.iter()
            .zip(&c)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>())
        .exp()
    })
}

/// Divergence-free swirl `(∂₂ψ, −∂₁ψ, 0)` of `ψ = e^{−|x−c|²/2}`.
pub fn gaussian_swirl(grid: &GridSpec) -> GridField {
    let c = central_lattice_point(grid);
    GridField::from_fn(grid.clone(), 3, |x, out| {
        let y: Vec<f64> = x.iter().zip(&c).map(|(a, b)| a - b).collect();
        let psi = (-0.5 * y.iter().map(|v| v * v).sum::<f64>()).exp();
        out[0] = -y[1] * psi;
        out[1] = y[0] * psi;
    })
}

fn heat_grid(prm: &SpacetimeParams) -> Result<GridSpec> {
    let tmax = prm.horizons.iter().copied().fold(0.0, f64::max);
    let side = if prm.side > 0 {
        prm.side
    } else {
        odd_at_least(2.0 * (6.0 * tmax.sqrt() + 3.0) + 1.0)
    };
    GridSpec::centered(prm.d, side, prm.n)
}

/// `(LHS, RHS)` at horizon `t_final`.
fn sides_at(
    prm: &SpacetimeParams,
    ws: &SpectralWorkspace,
    f: &GridField,
    t_final: f64,
) -> Result<(f64, f64)> {
    let times = time_grid(t_final, prm.levels, prm.substeps);
    let weights = trapezoid_weights(&times)?;
    let spectra = ws.spectra(f);
    match prm.variant {
        Variant::Heat => {
            let mut rows = Vec::with_capacity(times.len());
            for &t in &times {
                rows.push(cube_norms(&ws.heat_from_spectra(&spectra, t, 0)?, prm.p));
            }
            let lhs = match prm.flavor {
                Flavor::Espq => espq_from_rows(&rows, &weights, prm.s, prm.m),
                Flavor::LsEpq => ls_epq_from_rows(&rows, &weights, prm.s, prm.m),
            };
            Ok((lhs, amalgam_norm(f, prm.r, prm.q)))
        }
        Variant::Energy => {
            let (mut ru, mut rg) = (Vec::new(), Vec::new());
            for &t in &times {
                ru.push(cube_norms(
                    &ws.heat_from_spectra(&spectra, t, 0)?,
                    Exponent::TWO,
                ));
                rg.push(cube_norms(
                    &ws.heat_from_spectra(&spectra, t, 1)?,
                    Exponent::TWO,
                ));
            }
            let lhs = espq_from_rows(&ru, &weights, Exponent::INF, prm.q)
                + espq_from_rows(&rg, &weights, Exponent::TWO, prm.q);
            Ok((lhs, amalgam_norm(f, Exponent::TWO, prm.q)))
        }
        Variant::Duhamel => {
            let (st, pt, mt) = forcing_exponents(prm);
            let mut stepper = DuhamelStepper::new(ws);
            let (mut rl, mut rf) = (Vec::new(), Vec::new());
            for &t in &times {
                let u = ws.heat_from_spectra(&spectra, t, 0)?;
                stepper.push(ws, t, ws.product_divergence_spectra(&u, &u)?)?;
                rl.push(cube_norms(&stepper.field(ws)?, prm.p));
                rf.push(cube_norms(&u.magnitude_product(&u)?, pt));
            }
            Ok((
                espq_from_rows(&rl, &weights, prm.s, prm.m),
                espq_from_rows(&rf, &weights, st, mt),
            ))
        }
    }
}

/// Spacetime estimates at several horizons: `ρ(T) = LHS / (RHS·g(T))` must
/// stay within `max_growth` of its value at the first horizon.
pub fn scenario_spacetime(prm: &SpacetimeParams) -> Result<VerifyReport> {
    let id = match prm.variant {
        Variant::Heat => "spacetime_heat",
        Variant::Duhamel => "spacetime_duhamel",
        Variant::Energy => "spacetime_energy",
    };
    let mut r = VerifyReport::new(
        id,
        "spacetime integral bounds for the heat flow and the Duhamel term",
    );
    r.param("variant", format!("{:?}", prm.variant))
        .param("flavor", format!("{:?}", prm.flavor))
        .param("d", prm.d);
    r.param("r", prm.r)
        .param("s", prm.s)
        .param("p", prm.p)
        .param("q", prm.q)
        .param("m", prm.m);
    r.param("horizons", format!("{:?}", prm.horizons))
        .param("n", prm.n);
    r.tolerance = prm.max_growth;
    let growth = match prm.variant {
        Variant::Heat => heat_growth(prm),
        Variant::Duhamel => duhamel_growth(prm),
        Variant::Energy if prm.d != 3 => Growth::Violated("d = 3".into()),
        Variant::Energy if !(prm.beta > 0.0) => Growth::Violated("beta > 0".into()),
        Variant::Energy => Growth::Law {
            label: format!("1 + T^{}", prm.beta),
            terms: vec![0.0, prm.beta],
            uniform: false,
        },
    };
    let label = match &growth {
        Growth::Violated(why) => {
            r.note(format!("hypothesis violated: {why}"));
            r.fold(Verdict::NotApplicable);
            return Ok(r);
        }
        Growth::Law { label, uniform, .. } => {
            r.param("uniform_in_T", uniform);
            label.clone()
        }
    };
    r.param("growth", &label);
    if prm.horizons.is_empty() {
        return Err(Error::Domain("no horizons".into()));
    }
    let grid = match prm.variant {
        Variant::Heat => heat_grid(prm)?,
        _ => GridSpec::centered(3, prm.side, prm.n)?,
    };
    r.param("side", grid.side(0));
    let f = match prm.variant {
        Variant::Heat => gaussian(&grid),
        _ => gaussian_swirl(&grid),
    };
    let ws = SpectralWorkspace::new(&grid);
    let mut rho = Vec::with_capacity(prm.horizons.len());
    for &t in &prm.horizons {
        let (lhs, rhs) = sides_at(prm, &ws, &f, t)?;
        let g = growth.eval(t);
        r.sample("lhs", t, lhs)
            .sample("rhs", t, rhs)
            .sample("rho", t, lhs / (rhs * g));
        rho.push(lhs / (rhs * g));
    }
    let worst = rho.iter().copied().fold(0.0, f64::max) / rho[0];
    r.measure("rho_first", rho[0]).measure("rho_growth", worst);
    r.fold(Verdict::from_bool(
        worst.is_finite() && worst <= prm.max_growth,
    ));
    Ok(r)
}
