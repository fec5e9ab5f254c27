use serde::{Deserialize, Serialize};

use crate::amalgam::{sequence_norm, Exponent, GridField};
use crate::error::{domain, Error, Result};
use crate::solver::LAMBDA0;

/// Lattice quantities at scale `R`, with cubes of side `R` centered at `kR`
/// standing in for the balls `B_R(kR)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AprioriQuantities {
    pub r: f64,
    pub q: Exponent,
    /// `R⁻¹ ‖(∫_{Q_R(kR)} |u₀|²)_k‖_{ℓ^{q/2}}`.
    pub n0_qr: f64,
    /// `sup_{x₀} R⁻¹ ∫_{Q_R(x₀)} |u₀|²` over cell-aligned positions.
    pub n0_r: f64,
    /// `A_{0,q}(R) = R N⁰_{q,R}`.
    pub a0q: f64,
    /// `min(λ₀, λ₀R², λ₀R²/A²)`.
    pub lambda_r: f64,
}

/// `ℓ^{q/2}` of nonnegative masses, also for `q < 2` where it is only a quasi-norm.
fn half_exponent_sum(values: &[f64], q: Exponent) -> f64 {
    if q.is_infinite() {
        return values.iter().fold(0.0, |a, &b| a.max(b));
    }
    let e = q.value() / 2.0;
    if e >= 1.0 {
        return sequence_norm(values, Exponent::of(e));
    }
    let m = values.iter().fold(0.0, |a: f64, &b| a.max(b));
    if m == 0.0 {
        return 0.0;
    }
    m * values
        .iter()
        .map(|v| (v / m).powf(e))
        .sum::<f64>()
        .powf(1.0 / e)
}

/// Computes `N⁰_{q,R}`, `N⁰_R`, `A_{0,q}(R)` and `λ_R` exactly on the grid.
///
/// `R·n` must be a whole number of cells `m` with `n − m` even, so that the
/// cubes centered at `kR` have faces on cell faces.
pub fn apriori_quantities(u0: &GridField, q: Exponent, r: f64) -> Result<AprioriQuantities> {
    let spec = u0.spec();
    let n = spec.n_per_unit();
    if !(r > 0.0) {
        return domain("R must be positive");
    }
    let mf = r * n as f64;
    let m = mf.round() as i64;
    if m < 1 || (mf - m as f64).abs() > 1e-9 || (n as i64 - m) % 2 != 0 {
        return Err(Error::Alignment(format!(
            "R = {r} does not give lattice-centered cubes at {n} cells per unit"
        )));
    }
    let d = spec.d();
    let cells = spec.cells3();
    let vol = spec.cell_volume();
    let mass: Vec<f64> = u0.magnitude().iter().map(|v| v * v * vol).collect();

    // Cube index per cell along each axis.
    let mut axis_cube: [Vec<i64>; 3] = Default::default();
    let mut lo = [0i64; 3];
    let mut count = [1usize; 3];
    for a in 0..3 {
        if a >= d {
            axis_cube[a] = vec![0];
            continue;
        }
        let c0 = (n as i64 - m) / 2 - spec.origin()[a] * n as i64;
        axis_cube[a] = (0..cells[a] as i64)
            .map(|j| (j - c0).div_euclid(m))
            .collect();
        lo[a] = axis_cube[a][0];
        count[a] = (axis_cube[a][cells[a] - 1] - lo[a] + 1) as usize;
    }
    let mut cubes = vec![0.0; count.iter().product()];
    for (idx, &w) in mass.iter().enumerate() {
        let j = spec.unravel(idx);
        let k: Vec<usize> = (0..3)
            .map(|a| (axis_cube[a][j[a]] - lo[a]) as usize)
            .collect();
        cubes[(k[0] * count[1] + k[1]) * count[2] + k[2]] += w;
    }
    let a0q = half_exponent_sum(&cubes, q);
    let n0_qr = a0q / r;

    // Sliding windows of side m via a summed-area table.
    let (n0, n1, n2) = (cells[0], cells[1], cells[2]);
    let mut sat = vec![0.0; (n0 + 1) * (n1 + 1) * (n2 + 1)];
    let at = |i: usize, j: usize, k: usize| (i * (n1 + 1) + j) * (n2 + 1) + k;
    for i in 0..n0 {
        for j in 0..n1 {
            for k in 0..n2 {
                let v = mass[spec.ravel([i, j, k])];
                sat[at(i + 1, j + 1, k + 1)] = v
                    + sat[at(i, j + 1, k + 1)]
                    + sat[at(i + 1, j, k + 1)]
                    + sat[at(i + 1, j + 1, k)]
                    - sat[at(i, j, k + 1)]
                    - sat[at(i, j + 1, k)]
                    - sat[at(i + 1, j, k)]
                    + sat[at(i, j, k)];
            }
        }
    }
    let w = |a: usize| if a < d { m } else { 1 };
    let ranges: Vec<Vec<(usize, usize)>> = (0..3)
        .map(|a| {
            let (len, wa) = (cells[a] as i64, w(a) as i64);
            (1 - wa..len)
                .map(|s| (s.max(0) as usize, (s + wa).min(len) as usize))
                .collect()
        })
        .collect();
    let mut best = 0.0f64;
    for &(a0, a1) in &ranges[0] {
        for &(b0, b1) in &ranges[1] {
            for &(c0, c1) in &ranges[2] {
                let s = sat[at(a1, b1, c1)]
                    - sat[at(a0, b1, c1)]
                    - sat[at(a1, b0, c1)]
                    - sat[at(a1, b1, c0)]
                    + sat[at(a0, b0, c1)]
                    + sat[at(a0, b1, c0)]
                    + sat[at(a1, b0, c0)]
                    - sat[at(a0, b0, c0)];
                best = best.max(s);
            }
        }
    }
    let mut lambda_r = LAMBDA0.min(LAMBDA0 * r * r);
    if a0q > 0.0 {
        lambda_r = lambda_r.min(LAMBDA0 * r * r / (a0q * a0q));
    }
    Ok(AprioriQuantities {
        r,
        q,
        n0_qr,
        n0_r: best / r,
        a0q,
        lambda_r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::{amalgam_norm, GridSpec};

    fn cube_data(spec: &GridSpec) -> GridField {
        GridField::from_fn(spec.clone(), 3, |x, o| {
            if x.iter().all(|v| v.abs() < 0.5) {
                o[0] = 2.0;
            }
        })
    }

    #[test]
    fn zero_data_leave_only_lambda() {
        let spec = GridSpec::centered(3, 4, 4).unwrap();
        let z = GridField::zeros(spec, 3);
        let a = apriori_quantities(&z, Exponent::TWO, 2.0).unwrap();
        assert_eq!((a.n0_qr, a.n0_r, a.a0q), (0.0, 0.0, 0.0));
        assert_eq!(a.lambda_r, LAMBDA0);
        let a = apriori_quantities(&z, Exponent::TWO, 0.5).unwrap();
        assert_eq!(a.lambda_r, LAMBDA0 * 0.25);
    }

    #[test]
    fn unit_scale_single_cube() {
        let spec = GridSpec::centered(3, 4, 4).unwrap();
        let u = cube_data(&spec);
        let a = apriori_quantities(&u, Exponent::TWO, 1.0).unwrap();
        let l2 = amalgam_norm(&u, Exponent::TWO, Exponent::TWO);
        assert!((a.n0_qr - l2 * l2).abs() < 1e-12);
        assert!((a.n0_r - l2 * l2).abs() < 1e-12);
    }

    #[test]
    fn alignment_is_enforced() {
        let spec = GridSpec::centered(3, 4, 4).unwrap();
        let u = cube_data(&spec);
        assert!(matches!(
            apriori_quantities(&u, Exponent::TWO, 0.3),
            Err(Error::Alignment(_))
        ));
        assert!(matches!(
            apriori_quantities(&u, Exponent::TWO, 0.25),
            Err(Error::Alignment(_))
        ));
        assert!(apriori_quantities(&u, Exponent::TWO, 1.5).is_ok());
    }

    #[test]
    fn sliding_sup_dominates_lattice_cubes() {
        let spec = GridSpec::centered(3, 8, 2).unwrap();
        let u = GridField::from_fn(spec.clone(), 3, |x, o| {
            o[1] = (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp()
        });
        for r in [1.0, 2.0, 4.0] {
            let top = apriori_quantities(&u, Exponent::INF, r).unwrap().a0q;
            for q in [Exponent::ONE, Exponent::TWO, Exponent::of(3.0)] {
                let a = apriori_quantities(&u, q, r).unwrap();
                assert!(a.n0_r * r >= top * (1.0 - 1e-12));
                assert!(a.a0q >= top * (1.0 - 1e-12));
                assert!((a.a0q - r * a.n0_qr).abs() < 1e-14);
            }
        }
    }
}
