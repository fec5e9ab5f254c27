use std::time::Instant;

use amalgam_core::error::Result;
use amalgam_core::{
    amalgam_norm, holder_gap, lebesgue_norm, spacetime_norm, Exponent, FieldSeries, GridField,
    GridSpec, NormSpec,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::params::Params;
use crate::report::{Verdict, VerifyReport};

const EXPONENTS: [f64; 7] = [1.0, 1.5, 2.0, 3.0, 4.0, 7.5, f64::INFINITY];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityParams {
    pub seed: u64,
    pub dims: Vec<usize>,
    pub fields_per_d: usize,
    /// Relative slack allowed on each inequality.
    pub rel_tol: f64,
}

impl Default for IdentityParams {
    fn default() -> Self {
        IdentityParams {
            seed: 7,
            dims: vec![1, 2, 3],
            fields_per_d: 1000,
            rel_tol: 1e-12,
        }
    }
}

impl IdentityParams {
    pub fn from_params(ps: &mut Params) -> Result<Self> {
        let def = IdentityParams::default();
        Ok(IdentityParams {
            seed: ps.u64("seed", def.seed)?,
            dims: ps
                .f64_list("dims", &[1.0, 2.0, 3.0])?
                .into_iter()
                .map(|v| v as usize)
                .collect(),
            fields_per_d: ps.usize("fields_per_d", def.fields_per_d)?,
            rel_tol: ps.f64("rel_tol", def.rel_tol)?,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IdentityTally {
    pub checks: usize,
    pub violations: usize,
    /// Largest `(lhs − rhs) / scale` seen, over all checks (negative when all hold strictly).
    pub worst: f64,
}

impl IdentityTally {
    /// Records `lhs ≤ rhs` up to `rel_tol · scale`.
    fn le(&mut self, lhs: f64, rhs: f64, rel_tol: f64) {
        let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
        let e = (lhs - rhs) / scale;
        self.checks += 1;
        if self.checks == 1 || e > self.worst {
            self.worst = e;
        }
        if e > rel_tol {
            self.violations += 1;
        }
    }

    fn eq(&mut self, a: f64, b: f64, rel_tol: f64) {
        self.le(a, b, rel_tol);
        self.le(b, a, rel_tol);
    }
}

fn exponent(rng: &mut ChaCha8Rng) -> Exponent {
    Exponent::of(*EXPONENTS.choose(rng).expect("nonempty"))
}

/// Small grid with random side, resolution and origin, and a field whose
/// cube-level scale varies over several orders of magnitude.
fn random_field(rng: &mut ChaCha8Rng, d: usize) -> GridField {
    let side = rng.gen_range(1..=if d == 3 { 3 } else { 5 });
    let n = rng.gen_range(1..=if d == 1 { 8 } else { 3 });
    let origin = rng.gen_range(-2..=2);
    let spec = GridSpec::cube(d, side, n, origin).expect("valid grid");
    let m = if rng.gen_bool(0.5) { 1 } else { d };
    let cube_of = spec.cube_index_map();
    let scales: Vec<f64> = (0..spec.cube_count())
        .map(|_| 10f64.powf(rng.gen_range(-3.0..3.0)))
        .collect();
    let sparse = rng.gen_bool(0.3);
    let mut data = Vec::with_capacity(m * spec.len());
    for _ in 0..m {
        for &c in &cube_of {
            let v: f64 = rng.gen_range(-1.0..1.0);
            let keep = !sparse || rng.gen_bool(0.2);
            data.push(if keep { v * scales[c as usize] } else { 0.0 });
        }
    }
    GridField::new(spec, m, data).expect("consistent size")
}

fn random_series(rng: &mut ChaCha8Rng, first: GridField) -> FieldSeries {
    let len = rng.gen_range(1..=4);
    let spec = first.spec().clone();
    let m = first.components();
    let mut fields = vec![first];
    while fields.len() < len {
        let data = (0..m * spec.len())
            .map(|_| rng.gen_range(-1.0..1.0) * 10f64.powf(rng.gen_range(-2.0..2.0)))
            .collect();
        fields.push(GridField::new(spec.clone(), m, data).expect("consistent size"));
    }
    let mut t = 0.0;
    let times: Vec<f64> = (0..len)
        .map(|_| {
            t += rng.gen_range(0.1..1.0);
            t
        })
        .collect();
    let weights = (0..len).map(|_| rng.gen_range(0.05..2.0)).collect();
    FieldSeries::with_weights(times, weights, fields).expect("valid series")
}

/// Runs every identity and inequality once on one random field.
fn check_field(rng: &mut ChaCha8Rng, d: usize, tol: f64, tally: &mut IdentityTally) -> Result<()> {
    let f = random_field(rng, d);
    let (p, q) = (exponent(rng), exponent(rng));

    // E^p_p = L^p
    tally.eq(amalgam_norm(&f, p, p), lebesgue_norm(&f, p), tol);

    // E^p_q ⊂ E^p_m for m ≥ q, and E^p_q ⊂ E^r_q for r ≤ p, both with constant 1.
    let (a, b) = (exponent(rng), exponent(rng));
    let (lo, hi) = if a.value() <= b.value() {
        (a, b)
    } else {
        (b, a)
    };
    tally.le(amalgam_norm(&f, p, hi), amalgam_norm(&f, p, lo), tol);
    tally.le(amalgam_norm(&f, lo, q), amalgam_norm(&f, hi, q), tol);

    // Hölder with 1/p = 1/p1 + 1/p2 and 1/q ≤ 1/q1 + 1/q2.
    let g = random_field_like(rng, &f);
    let (p1, p2) = loop {
        let (x, y) = (exponent(rng), exponent(rng));
        if x.recip() + y.recip() <= 1.0 {
            break (x, y);
        }
    };
    let ph = Exponent::from_recip(p1.recip() + p2.recip())?;
    let (q1, q2) = (exponent(rng), exponent(rng));
    let cap = (q1.recip() + q2.recip()).min(1.0);
    let qs: Vec<f64> = EXPONENTS
        .iter()
        .copied()
        .filter(|v| 1.0 / v <= cap + 1e-15)
        .collect();
    let qh = Exponent::of(*qs.choose(rng).expect("∞ always qualifies"));
    let gap = holder_gap(&f, &g, ph, p1, p2, qh, q1, q2)?;
    let prod = amalgam_norm(&f, p1, q1) * amalgam_norm(&g, p2, q2);
    tally.le(prod - gap, prod, tol);

    // Minkowski: L^s E^p_q ≤ E^{s,p}_{T,q} if q ≤ s, reversed if q ≥ s.
    let u = random_series(rng, f);
    let s = exponent(rng);
    let ls = spacetime_norm(&u, NormSpec::LsEpq { s, p, q })?;
    let es = spacetime_norm(&u, NormSpec::Espq { s, p, q })?;
    if q.value() <= s.value() {
        tally.le(ls, es, tol);
    }
    if q.value() >= s.value() {
        tally.le(es, ls, tol);
    }
    Ok(())
}

fn random_field_like(rng: &mut ChaCha8Rng, f: &GridField) -> GridField {
    let data = (0..f.data().len())
        .map(|_| rng.gen_range(-1.0..1.0) * 10f64.powf(rng.gen_range(-2.0..2.0)))
        .collect();
    GridField::new(f.spec().clone(), f.components(), data).expect("consistent size")
}

/// Exact discrete identities and inequalities on random fields.
pub fn scenario_identities(prm: &IdentityParams) -> Result<VerifyReport> {
    let mut r = VerifyReport::new(
        "identities",
        "norm identities, embeddings, Hölder and Minkowski on random fields",
    );
    r.seed = Some(prm.seed);
    r.param("dims", format!("{:?}", prm.dims))
        .param("fields_per_d", prm.fields_per_d)
        .param("rel_tol", prm.rel_tol);
    r.tolerance = prm.rel_tol;
    let start = Instant::now();
    let mut total = IdentityTally::default();
    for &d in &prm.dims {
        let mut rng = ChaCha8Rng::seed_from_u64(prm.seed ^ (d as u64) << 32);
        let mut tally = IdentityTally::default();
        for _ in 0..prm.fields_per_d {
            check_field(&mut rng, d, prm.rel_tol, &mut tally)?;
        }
        r.measure(&format!("checks_d{d}"), tally.checks as f64);
        r.measure(&format!("violations_d{d}"), tally.violations as f64);
        r.measure(&format!("worst_d{d}"), tally.worst);
        total.checks += tally.checks;
        total.violations += tally.violations;
        total.worst = if total.checks == tally.checks {
            tally.worst
        } else {
            total.worst.max(tally.worst)
        };
    }
    r.measure("checks", total.checks as f64)
        .measure("violations", total.violations as f64);
    r.measure("worst_relative_excess", total.worst);
    r.measure("seconds", start.elapsed().as_secs_f64());
    r.predict("violations", 0.0);
    r.fold(Verdict::from_bool(total.violations == 0));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_has_no_violations() {
        let prm = IdentityParams {
            fields_per_d: 50,
            ..Default::default()
        };
        let r = scenario_identities(&prm).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.measured);
        assert!(r.measured["checks"] >= 150.0 * 5.0);
    }

    #[test]
    fn tally_counts_excess() {
        let mut t = IdentityTally::default();
        t.le(1.0, 1.0, 1e-12);
        t.le(1.0 + 1e-9, 1.0, 1e-12);
        assert_eq!((t.checks, t.violations), (2, 1));
    }
}
