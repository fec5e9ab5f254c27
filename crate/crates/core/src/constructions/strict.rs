use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::amalgam::{Exponent, GridField, GridSpec};
use crate::error::{domain, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InclusionCase {
    /// `p > q`: `δ_k = (1+|k|)^{−p/q}`, in `L^p ∩ L^q` but not `E^p_q`.
    PGtQ,
    /// `p < q`: `δ_k = (1+|k|)^{−1}`, in `E^p_q` but not `L^p + L^q`.
    PLtQ,
}

impl FromStr for InclusionCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "P_GT_Q" => Ok(InclusionCase::PGtQ),
            "P_LT_Q" => Ok(InclusionCase::PLtQ),
            _ => domain(format!("unknown inclusion case {s:?}")),
        }
    }
}

/// `Σ_k c_k φ((x−k)/δ_k)` over the lattice sites of the box, with `φ` the
/// indicator of the unit cube centered at 0.
#[derive(Clone, Debug)]
pub struct DeltaTrain {
    pub field: GridField,
    /// Lattice sites in cube order.
    pub sites: Vec<[i64; 3]>,
    pub amplitudes: Vec<f64>,
    /// Widths after snapping to whole cells.
    pub widths: Vec<f64>,
}

/// Snaps `δ` to `w/n` with `w ≥ 1` cells of the same parity as `n`, so that
/// the cube stays centered on the lattice point.
pub fn snap_width(delta: f64, n: usize) -> f64 {
    let parity = n % 2;
    let mut w = (delta * n as f64).round() as usize;
    if w % 2 != parity {
        // Move towards the requested width.
        w = if (w as f64) < delta * n as f64 {
            w + 1
        } else {
            w.saturating_sub(1)
        };
    }
    if w == 0 {
        w = if parity == 1 { 1 } else { 2 };
    }
    w.min(n) as f64 / n as f64
}

/// Builds a delta train from explicit amplitudes and widths, one per unit cube.
pub fn gen_delta_train(
    grid: &GridSpec,
    amplitude: impl Fn([i64; 3]) -> f64,
    width: impl Fn([i64; 3]) -> f64,
) -> Result<DeltaTrain> {
    let n = grid.n_per_unit();
    let d = grid.d();
    let count = grid.cube_count();
    let mut sites = Vec::with_capacity(count);
    let mut amplitudes = Vec::with_capacity(count);
    let mut widths = Vec::with_capacity(count);
    for c in 0..count {
        let k = grid.cube_lattice_point(c);
        let delta = width(k);
        if !(delta > 0.0 && delta <= 1.0) {
            return domain(format!("width {delta} at {k:?} outside (0, 1]"));
        }
        sites.push(k);
        amplitudes.push(amplitude(k));
        widths.push(snap_width(delta, n));
    }
    let cube_of = grid.cube_index_map();
    let coords = grid.axis_coords();
    let mut data = vec![0.0; grid.len()];
    for (idx, v) in data.iter_mut().enumerate() {
        let c = cube_of[idx] as usize;
        let j = grid.unravel(idx);
        let k = sites[c];
        let half = widths[c] / 2.0;
        // Cell centers sit at multiples of h/2 from the site; a quarter-cell
        // slack keeps the comparison clear of rounding.
        let slack = 0.25 * grid.h();
        if (0..d).all(|a| (coords[a][j[a]] - k[a] as f64).abs() < half - slack) {
            *v = amplitudes[c];
        }
    }
    Ok(DeltaTrain {
        field: GridField::new(grid.clone(), 1, data)?,
        sites,
        amplitudes,
        widths,
    })
}

/// The train with `c_k = 1` and the width law of `case`.
pub fn gen_strict_inclusion(
    case: InclusionCase,
    p: Exponent,
    q: Exponent,
    grid: &GridSpec,
) -> Result<DeltaTrain> {
    let ok = match case {
        InclusionCase::PGtQ => p.value() > q.value(),
        InclusionCase::PLtQ => p.value() < q.value(),
    };
    if !ok {
        return domain(format!(
            "case {case:?} does not match p = {}, q = {}",
            p.value(),
            q.value()
        ));
    }
    if q.is_infinite() && case == InclusionCase::PGtQ {
        return domain("q must be finite");
    }
    let d = grid.d();
    let dist = move |k: [i64; 3]| 1.0 + k[..d].iter().map(|v| (v * v) as f64).sum::<f64>().sqrt();
    match case {
        InclusionCase::PGtQ => {
            let e = p.value() / q.value();
            gen_delta_train(grid, |_| 1.0, move |k| dist(k).powf(-e))
        }
        InclusionCase::PLtQ => gen_delta_train(grid, |_| 1.0, move |k| 1.0 / dist(k)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::{amalgam_norm, cube_norms, lebesgue_norm};

    #[test]
    fn snapping_keeps_parity_and_floor() {
        assert_eq!(snap_width(1.0, 9), 1.0);
        assert_eq!(snap_width(0.01, 9), 1.0 / 9.0);
        assert_eq!(snap_width(0.01, 8), 0.25);
        assert_eq!(snap_width(0.5, 9), 5.0 / 9.0);
        assert_eq!(snap_width(0.5, 8), 0.5);
    }

    #[test]
    fn cube_norms_match_snapped_widths() {
        // Per-cube L^p norm of c·𝟙 on a cube of side δ is c·δ^{d/p}.
        let grid = GridSpec::centered(2, 5, 15).unwrap();
        let t = gen_strict_inclusion(InclusionCase::PGtQ, Exponent::of(4.0), Exponent::TWO, &grid)
            .unwrap();
        let p = Exponent::of(4.0);
        let got = cube_norms(&t.field, p);
        for (c, g) in got.iter().enumerate() {
            let want = t.widths[c].powf(2.0 / 4.0);
            assert!((g - want).abs() < 1e-12, "{c}: {g} vs {want}");
        }
    }

    #[test]
    fn single_site_has_finite_norms() {
        let grid = GridSpec::centered(1, 1, 31).unwrap();
        let t = gen_strict_inclusion(InclusionCase::PLtQ, Exponent::TWO, Exponent::of(4.0), &grid)
            .unwrap();
        assert_eq!(t.widths, vec![1.0]);
        assert!((lebesgue_norm(&t.field, Exponent::TWO) - 1.0).abs() < 1e-12);
        assert!((amalgam_norm(&t.field, Exponent::TWO, Exponent::of(4.0)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wrong_case_is_rejected() {
        let grid = GridSpec::centered(1, 3, 7).unwrap();
        assert!(
            gen_strict_inclusion(InclusionCase::PLtQ, Exponent::of(4.0), Exponent::TWO, &grid)
                .is_err()
        );
        assert_eq!(
            "p_gt_q".parse::<InclusionCase>().unwrap(),
            InclusionCase::PGtQ
        );
    }
}
