use amalgam_core::constructions::{
    gen_moving_bump_exact, gen_strict_inclusion, InclusionCase, MovingBump,
};
use amalgam_core::error::{Error, Result};
use amalgam_core::{amalgam_norm, lebesgue_norm, spacetime_norm, Exponent, GridSpec, NormSpec};
use serde::{Deserialize, Serialize};

use super::odd_at_least;
use crate::params::Params;
use crate::report::{Verdict, VerifyReport};

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mx, my) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + x.ln() / n, b + y.ln() / n)
    });
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in points {
        let dx = x.ln() - mx;
        sxy += dx * (y.ln() - my);
        sxx += dx * dx;
    }
    sxy / sxx
}

fn espq(s: Exponent, p: Exponent, q: Exponent) -> NormSpec {
    NormSpec::Espq { s, p, q }
}

fn lsepq(s: Exponent, p: Exponent, q: Exponent) -> NormSpec {
    NormSpec::LsEpq { s, p, q }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwitchAParams {
    pub d: usize,
    pub bands: usize,
    /// Cells per unit length; a power of two keeps every quadrature exact.
    pub n: usize,
    pub tolerance: f64,
}

impl Default for SwitchAParams {
    fn default() -> Self {
        SwitchAParams {
            d: 1,
            bands: 6,
            n: 4,
            tolerance: 1e-12,
        }
    }
}

impl SwitchAParams {
    pub fn from_params(ps: &mut Params) -> Result<Self> {
        let def = SwitchAParams::default();
        Ok(SwitchAParams {
            d: ps.usize("d", def.d)?,
            bands: ps.usize("bands", def.bands)?,
            n: ps.usize("n", def.n)?,
            tolerance: ps.f64("tolerance", def.tolerance)?,
        })
    }
}

/// Example A: `E^{1,1}_{T,∞} = 1` while `L¹_T L¹_uloc = K`.
pub fn scenario_switch_a(prm: &SwitchAParams) -> Result<VerifyReport> {
    let mut r = VerifyReport::new(
        "switch_a",
        "time and cell norms cannot be switched, piecewise-constant example",
    );
    r.param("d", prm.d)
        .param("bands", prm.bands)
        .param("n", prm.n);
    r.tolerance = prm.tolerance;
    let side = 2 * prm.bands + 3;
    let mut sides = vec![1; prm.d];
    sides[0] = side;
    let mut origin = vec![0i64; prm.d];
    origin[0] = 1;
    let cells: Vec<usize> = sides.iter().map(|s| s * prm.n).collect();
    let grid = GridSpec::new(prm.d, &cells, 1.0 / prm.n as f64, &origin)?;
    let u = gen_moving_bump_exact(MovingBump::SwitchA { bands: prm.bands }, &grid)?;
    let one = Exponent::ONE;
    let e = spacetime_norm(&u, espq(one, one, Exponent::INF))?;
    let l = spacetime_norm(&u, lsepq(one, one, Exponent::INF))?;
    for (t, f) in u.times().iter().zip(u.fields()) {
        r.sample("uloc_norm", *t, amalgam_norm(f, one, Exponent::INF));
    }
    r.measure("E11_uloc", e).predict("E11_uloc", 1.0);
    r.measure("L1_L1uloc", l)
        .predict("L1_L1uloc", prm.bands as f64);
    let k = prm.bands as f64;
    r.fold(Verdict::from_bool(
        (e - 1.0).abs() <= prm.tolerance && (l - k).abs() <= prm.tolerance * k,
    ));
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwitchBParams {
    pub d: usize,
    pub n: usize,
    pub sides: Vec<usize>,
    /// Smallest acceptable log-log growth rate of the truncated `E^{∞,1}_{T,1}`.
    pub min_growth: f64,
    pub tolerance: f64,
}

impl Default for SwitchBParams {
    fn default() -> Self {
        SwitchBParams {
            d: 1,
            n: 4,
            sides: vec![9, 17, 33, 65],
            min_growth: 0.9,
            tolerance: 1e-12,
        }
    }
}

impl SwitchBParams {
    pub fn from_params(ps: &mut Params) -> Result<Self> {
        let def = SwitchBParams::default();
        let sides = ps.f64_list("sides", &[9.0, 17.0, 33.0, 65.0])?;
        Ok(SwitchBParams {
            d: ps.usize("d", def.d)?,
            n: ps.usize("n", def.n)?,
            sides: sides.into_iter().map(|v| v as usize).collect(),
            min_growth: ps.f64("min_growth", def.min_growth)?,
            tolerance: ps.f64("tolerance", def.tolerance)?,
        })
    }
}

/// Example B on growing boxes: `L^∞_T E¹_1` stays at `|B_1|` while the
/// truncated `E^{∞,1}_{T,1}` grows with the box.
pub fn scenario_switch_b(prm: &SwitchBParams) -> Result<VerifyReport> {
    if prm.sides.len() < 2 {
        return Err(Error::Domain("need at least two box sides".into()));
    }
    let mut r = VerifyReport::new(
        "switch_b",
        "time and cell norms cannot be switched, moving unit ball",
    );
    r.param("d", prm.d)
        .param("n", prm.n)
        .param("sides", format!("{:?}", prm.sides));
    r.tolerance = prm.min_growth;
    let (inf, one) = (Exponent::INF, Exponent::ONE);
    let mut growth = Vec::new();
    let mut sup_l1: f64 = 0.0;
    let mut inf_l1 = f64::INFINITY;
    for &side in &prm.sides {
        let grid = GridSpec::centered(prm.d, side, prm.n)?;
        let u = gen_moving_bump_exact(MovingBump::SwitchB, &grid)?;
        let e = spacetime_norm(&u, espq(inf, one, one))?;
        let l = spacetime_norm(&u, lsepq(inf, one, one))?;
        r.sample("E_inf1_1", side as f64, e)
            .sample("Linf_E11", side as f64, l);
        growth.push((side as f64, e));
        sup_l1 = sup_l1.max(l);
        inf_l1 = inf_l1.min(l);
    }
    let slope = loglog_slope(&growth);
    let increasing = growth.windows(2).all(|w| w[1].1 > w[0].1);
    // Every time slice carries the whole ball, so L^∞E¹_1 = |B_1| exactly when
    // the ball is cell aligned (d = 1, |B_1| = 2).
    let ball = match prm.d {
        1 => 2.0,
        2 => std::f64::consts::PI,
        _ => 4.0 * std::f64::consts::PI / 3.0,
    };
    r.measure("growth_slope", slope)
        .measure("Linf_E11_max", sup_l1)
        .measure("Linf_E11_min", inf_l1);
    r.predict("Linf_E11", ball);
    r.fold(Verdict::from_bool(increasing && slope >= prm.min_growth));
    if prm.d == 1 {
        r.fold(Verdict::from_bool(
            (sup_l1 - ball).abs() <= prm.tolerance * ball
                && (inf_l1 - ball).abs() <= prm.tolerance * ball,
        ));
    } else {
        r.fold(Verdict::from_bool(sup_l1 / inf_l1 <= 1.5));
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrictParams {
    pub case: InclusionCase,
    pub p: Exponent,
    pub q: Exponent,
    pub d: usize,
    pub sides: Vec<usize>,
    /// Cells across the narrowest spike in the largest box.
    pub min_cells: f64,
    /// Largest admissible relative change of the convergent norm at the last doubling.
    pub cauchy_tol: f64,
}

impl StrictParams {
    pub fn new(case: InclusionCase) -> Self {
        let (p, q) = match case {
            InclusionCase::PGtQ => (Exponent::of(4.0), Exponent::TWO),
            InclusionCase::PLtQ => (Exponent::TWO, Exponent::of(4.0)),
        };
        StrictParams {
            case,
            p,
            q,
            d: 1,
            sides: vec![9, 17, 33, 65],
            min_cells: 8.0,
            cauchy_tol: 0.05,
        }
    }

    pub fn from_params(ps: &mut Params) -> Result<Self> {
        let case: InclusionCase = ps.string("case", "P_GT_Q")?.parse()?;
        let mut s = StrictParams::new(case);
        s.p = ps.exponent("p", s.p)?;
        s.q = ps.exponent("q", s.q)?;
        s.d = ps.usize("d", s.d)?;
        s.sides = ps
            .f64_list("sides", &[9.0, 17.0, 33.0, 65.0])?
            .into_iter()
            .map(|v| v as usize)
            .collect();
        s.cauchy_tol = ps.f64("cauchy_tol", s.cauchy_tol)?;
        Ok(s)
    }
}

/// Norms of the strict-inclusion spike trains on growing boxes: the norm the
/// train is not in grows monotonically, the norms it is in settle.
pub fn scenario_strict_inclusion(prm: &StrictParams) -> Result<VerifyReport> {
    let mut r = VerifyReport::new(
        "strict_inclusion",
        "spike trains separating E^p_q from L^p and L^q",
    );
    r.param("case", format!("{:?}", prm.case))
        .param("p", prm.p)
        .param("q", prm.q)
        .param("d", prm.d);
    r.param("sides", format!("{:?}", prm.sides));
    r.tolerance = prm.cauchy_tol;
    let largest = *prm
        .sides
        .iter()
        .max()
        .ok_or_else(|| Error::Domain("no box sides".into()))?;
    let far = 1.0 + (prm.d as f64).sqrt() * (largest / 2) as f64;
    let narrowest = match prm.case {
        InclusionCase::PGtQ => far.powf(-prm.p.value() / prm.q.value()),
        InclusionCase::PLtQ => 1.0 / far,
    };
    let n = odd_at_least(prm.min_cells / narrowest);
    r.param("n", n);
    let mut amalgam = Vec::new();
    let mut lp = Vec::new();
    let mut lq = Vec::new();
    for &side in &prm.sides {
        let grid = GridSpec::centered(prm.d, side, n)?;
        let t = gen_strict_inclusion(prm.case, prm.p, prm.q, &grid)?;
        let (a, b, c) = (
            amalgam_norm(&t.field, prm.p, prm.q),
            lebesgue_norm(&t.field, prm.p),
            lebesgue_norm(&t.field, prm.q),
        );
        r.sample("amalgam", side as f64, a)
            .sample("lebesgue_p", side as f64, b)
            .sample("lebesgue_q", side as f64, c);
        amalgam.push(a);
        lp.push(b);
        lq.push(c);
    }
    let grows = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
    let last_change = |v: &[f64]| {
        let k = v.len();
        (v[k - 1] - v[k - 2]).abs() / v[k - 1]
    };
    let ok = match prm.case {
        InclusionCase::PGtQ => {
            let (cp, cq) = (last_change(&lp), last_change(&lq));
            r.measure("lebesgue_p_last_change", cp)
                .measure("lebesgue_q_last_change", cq);
            r.measure("amalgam_growth", amalgam[amalgam.len() - 1] / amalgam[0]);
            grows(&amalgam) && cp <= prm.cauchy_tol && cq <= prm.cauchy_tol
        }
        InclusionCase::PLtQ => {
            let c = last_change(&amalgam);
            r.measure("amalgam_last_change", c);
            r.measure("lebesgue_p_growth", lp[lp.len() - 1] / lp[0])
                .measure("lebesgue_q_growth", lq[lq.len() - 1] / lq[0]);
            grows(&lp) && grows(&lq) && c <= prm.cauchy_tol
        }
    };
    r.fold(Verdict::from_bool(ok));
    Ok(r)
}
