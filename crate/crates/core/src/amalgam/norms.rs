use std::fmt;

use serde::{Deserialize, Serialize};

use crate::amalgam::exponent::Exponent;
use crate::amalgam::field::{FieldSeries, GridField};
use crate::error::{domain, Result};

/// Selects one of the spatial or spacetime norms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "flavor", rename_all = "snake_case")]
pub enum NormSpec {
    /// `E^p_q`
    Epq { p: Exponent, q: Exponent },
    /// `L^s_T E^p_q`
    LsEpq {
        s: Exponent,
        p: Exponent,
        q: Exponent,
    },
    /// `E^{s,p}_{T,q}`
    Espq {
        s: Exponent,
        p: Exponent,
        q: Exponent,
    },
    /// `LE_q`
    Leq { q: Exponent },
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSpec::Epq { p, q } => write!(f, "E^{p}_{q}"),
            NormSpec::LsEpq { s, p, q } => write!(f, "L^{s}_T E^{p}_{q}"),
            NormSpec::Espq { s, p, q } => write!(f, "E^{{{s},{p}}}_{{T,{q}}}"),
            NormSpec::Leq { q } => write!(f, "LE_{q}"),
        }
    }
}

/// Sums `x^p` over the groups given by `group`, after dividing by `scale`.
fn grouped_power_sums(mag: &[f64], group: &[u32], groups: usize, p: f64, scale: f64) -> Vec<f64> {
    let mut sums = vec![0.0; groups];
    if p == 1.0 {
        for (&v, &g) in mag.iter().zip(group) {
            sums[g as usize] += v / scale;
        }
    } else if p == 2.0 {
        for (&v, &g) in mag.iter().zip(group) {
            let y = v / scale;
            sums[g as usize] += y * y;
        }
    } else {
        for (&v, &g) in mag.iter().zip(group) {
            if v > 0.0 {
                sums[g as usize] += (v / scale).powf(p);
            }
        }
    }
    sums
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, &b| a.max(b))
}

/// Per-cube `L^p` quadrature norms of a pointwise magnitude array.
pub fn cube_norms_of_magnitude(
    mag: &[f64],
    cube_map: &[u32],
    cubes: usize,
    cell_volume: f64,
    p: Exponent,
) -> Vec<f64> {
    if p.is_infinite() {
        let mut out = vec![0.0f64; cubes];
        for (&v, &c) in mag.iter().zip(cube_map) {
            let o = &mut out[c as usize];
            if v > *o {
                *o = v;
            }
        }
        return out;
    }
    let m = max_of(mag);
    if m == 0.0 {
        return vec![0.0; cubes];
    }
    let pv = p.value();
    grouped_power_sums(mag, cube_map, cubes, pv, m)
        .into_iter()
        .map(|s| m * (s * cell_volume).powf(1.0 / pv))
        .collect()
}

/// Per-cube `L^p` norms of `|f|`, indexed like [`GridSpec::cube_index_map`].
///
/// [`GridSpec::cube_index_map`]: crate::amalgam::GridSpec::cube_index_map
pub fn cube_norms(f: &GridField, p: Exponent) -> Vec<f64> {
    let spec = f.spec();
    cube_norms_of_magnitude(
        &f.magnitude(),
        &spec.cube_index_map(),
        spec.cube_count(),
        spec.cell_volume(),
        p,
    )
}

/// `ℓ^q` norm of a nonnegative sequence.
pub fn sequence_norm(values: &[f64], q: Exponent) -> f64 {
    let m = max_of(values);
    if q.is_infinite() || m == 0.0 {
        return m;
    }
    let qv = q.value();
    let s: f64 = values.iter().map(|&v| (v / m).powf(qv)).sum();
    m * s.powf(1.0 / qv)
}

/// Weighted time `L^s` norm `(Σ w_j v_j^s)^{1/s}`; `s = ∞` is the max over nodes.
pub fn time_lebesgue(values: &[f64], weights: &[f64], s: Exponent) -> f64 {
    let m = max_of(values);
    if s.is_infinite() || m == 0.0 {
        return m;
    }
    let sv = s.value();
    let acc: f64 = values
        .iter()
        .zip(weights)
        .map(|(&v, &w)| w * (v / m).powf(sv))
        .sum();
    m * acc.powf(1.0 / sv)
}

fn amalgam_of_magnitude(f: &GridField, mag: &[f64], p: Exponent, q: Exponent) -> f64 {
    let spec = f.spec();
    let map = spec.cube_index_map();
    let cubes = spec.cube_count();
    if p == q && !p.is_infinite() {
        // The cube partition makes the double sum collapse to one global sum.
        let m = max_of(mag);
        if m == 0.0 {
            return 0.0;
        }
        let pv = p.value();
        let total: f64 = grouped_power_sums(mag, &map, cubes, pv, m).iter().sum();
        return m * (total * spec.cell_volume()).powf(1.0 / pv);
    }
    sequence_norm(
        &cube_norms_of_magnitude(mag, &map, cubes, spec.cell_volume(), p),
        q,
    )
}

/// `‖f‖_{E^p_q}`: `ℓ^q` over unit cubes of the per-cube `L^p` quadrature norm.
pub fn amalgam_norm(f: &GridField, p: Exponent, q: Exponent) -> f64 {
    amalgam_of_magnitude(f, &f.magnitude(), p, q)
}

/// Global `L^p` quadrature norm; identical to `amalgam_norm(f, p, p)`.
pub fn lebesgue_norm(f: &GridField, p: Exponent) -> f64 {
    amalgam_norm(f, p, p)
}

/// Per-node cube norms of a series.
pub fn cube_norm_rows(u: &FieldSeries, p: Exponent) -> Vec<Vec<f64>> {
    let spec = u.spec();
    let map = spec.cube_index_map();
    u.fields()
        .iter()
        .map(|f| {
            cube_norms_of_magnitude(
                &f.magnitude(),
                &map,
                spec.cube_count(),
                spec.cell_volume(),
                p,
            )
        })
        .collect()
}

/// `L^s_T E^p_q` from per-node cube norms.
pub fn ls_epq_from_rows(rows: &[Vec<f64>], weights: &[f64], s: Exponent, q: Exponent) -> f64 {
    let per_node: Vec<f64> = rows.iter().map(|r| sequence_norm(r, q)).collect();
    time_lebesgue(&per_node, weights, s)
}

/// `E^{s,p}_{T,q}` from per-node cube norms.
pub fn espq_from_rows(rows: &[Vec<f64>], weights: &[f64], s: Exponent, q: Exponent) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    let cubes = rows[0].len();
    let mut column = vec![0.0; rows.len()];
    let per_cube: Vec<f64> = (0..cubes)
        .map(|k| {
            for (c, r) in column.iter_mut().zip(rows) {
                *c = r[k];
            }
            time_lebesgue(&column, weights, s)
        })
        .collect();
    sequence_norm(&per_cube, q)
}

/// `L^s_T E^p_q` or `E^{s,p}_{T,q}` of a series.
pub fn spacetime_norm(u: &FieldSeries, spec: NormSpec) -> Result<f64> {
    if u.is_empty() {
        return domain("empty series");
    }
    match spec {
        NormSpec::LsEpq { s, p, q } => {
            Ok(ls_epq_from_rows(&cube_norm_rows(u, p), u.weights(), s, q))
        }
        NormSpec::Espq { s, p, q } => Ok(espq_from_rows(&cube_norm_rows(u, p), u.weights(), s, q)),
        other => domain(format!("{other} is not a spacetime norm")),
    }
}

/// `‖u‖_{E^{∞,2}_{T,q}} + ‖∇u‖_{E^{2,2}_{T,q}}`.
pub fn local_energy_norm(u: &FieldSeries, grad_u: &FieldSeries, q: Exponent) -> Result<f64> {
    if u.is_empty() {
        return domain("empty series");
    }
    if u.spec() != grad_u.spec() || u.times() != grad_u.times() {
        return domain("u and grad u must share grid and time nodes");
    }
    if grad_u.components() != u.spec().d() * u.components() {
        return domain("grad u must have d*m components");
    }
    let a = spacetime_norm(
        u,
        NormSpec::Espq {
            s: Exponent::INF,
            p: Exponent::TWO,
            q,
        },
    )?;
    let b = spacetime_norm(
        grad_u,
        NormSpec::Espq {
            s: Exponent::TWO,
            p: Exponent::TWO,
            q,
        },
    )?;
    Ok(a + b)
}

/// Spatial flavors of a single field.
pub fn norm_of_field(f: &GridField, spec: NormSpec) -> Result<f64> {
    match spec {
        NormSpec::Epq { p, q } => Ok(amalgam_norm(f, p, q)),
        other => domain(format!("{other} needs a time series")),
    }
}

/// `‖f‖_{E^{p₁}_{q₁}}‖g‖_{E^{p₂}_{q₂}} − ‖fg‖_{E^p_q}`, nonnegative by Hölder.
#[allow(clippy::too_many_arguments)]
pub fn holder_gap(
    f: &GridField,
    g: &GridField,
    p: Exponent,
    p1: Exponent,
    p2: Exponent,
    q: Exponent,
    q1: Exponent,
    q2: Exponent,
) -> Result<f64> {
    if (p.recip() - p1.recip() - p2.recip()).abs() > 1e-12 {
        return domain("1/p must equal 1/p1 + 1/p2");
    }
    if q.recip() > q1.recip() + q2.recip() + 1e-12 {
        return domain("1/q must not exceed 1/q1 + 1/q2");
    }
    let fg = f.magnitude_product(g)?;
    Ok(amalgam_norm(f, p1, q1) * amalgam_norm(g, p2, q2) - amalgam_norm(&fg, p, q))
}
