use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::amalgam::{amalgam_norm, Exponent, GridField, GridSpec};
use crate::error::{domain, Result};
use crate::spectral::SpectralWorkspace;

/// Band-limited, divergence-free random field localized by a Gaussian
/// envelope, scaled so that `‖u‖_{E³_q} = amplitude`.
///
/// White noise is cut to `|k| ≤ min(4π, πn/2)`, multiplied by
/// `exp(−|x−c|²/(2σ²))` with `σ` one eighth of the shortest box side, and
/// projected.
pub fn gen_divfree_random(
    seed: u64,
    grid: &GridSpec,
    amplitude: f64,
    q: Exponent,
) -> Result<GridField> {
    let d = grid.d();
    if !(2..=3).contains(&d) {
        return domain("random divergence-free data need d in {2, 3}");
    }
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return domain("amplitude must be finite and nonnegative");
    }
    if amplitude == 0.0 {
        return Ok(GridField::zeros(grid.clone(), d));
    }
    let ws = SpectralWorkspace::new(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kcut = (4.0 * PI).min(PI * grid.n_per_unit() as f64 / 2.0);
    let mut low = vec![true; ws.len()];
    ws.for_each_mode(|idx, _, _, k2, _| low[idx] = k2 <= kcut * kcut);
    let center = grid.center();
    let sigma = (0..d).map(|a| grid.length(a)).fold(f64::INFINITY, f64::min) / 8.0;
    let envelope: Vec<f64> = (0..grid.len())
        .map(|idx| {
            let x = grid.point(idx);
            let r2: f64 = (0..d).map(|a| (x[a] - center[a]).powi(2)).sum();
            (-r2 / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let mut comps = Vec::with_capacity(d);
    for _ in 0..d {
        let noise: Vec<f64> = (0..grid.len())
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let mut s = ws.forward(&noise);
        for (c, keep) in s.iter_mut().zip(&low) {
            if !keep {
                *c = Complex64::default();
            }
        }
        let smooth = ws.inverse_real(&s);
        comps.push(smooth.iter().zip(&envelope).map(|(a, e)| a * e).collect());
    }
    let u = ws.leray_project(&GridField::from_components(grid.clone(), comps)?)?;
    let norm = amalgam_norm(&u, Exponent::of(3.0), q);
    if norm == 0.0 {
        return domain("degenerate random field");
    }
    Ok(u.scaled(amplitude / norm))
}

/// Periodic Taylor–Green field with one period across the box,
/// `(sin x cos y cos z, −cos x sin y cos z, 0)` in 3D and
/// `(sin x cos y, −cos x sin y)` in 2D, times `amplitude`.
pub fn taylor_green(grid: &GridSpec, amplitude: f64) -> Result<GridField> {
    let d = grid.d();
    if !(2..=3).contains(&d) {
        return domain("Taylor–Green data need d in {2, 3}");
    }
    let w: Vec<f64> = (0..d).map(|a| 2.0 * PI / grid.length(a)).collect();
    let lo: Vec<f64> = (0..d).map(|a| grid.lower(a)).collect();
    Ok(GridField::from_fn(grid.clone(), d, |x, o| {
        let a = w[0] * (x[0] - lo[0]);
        let b = w[1] * (x[1] - lo[1]);
        let cz = if d == 3 {
            (w[2] * (x[2] - lo[2])).cos()
        } else {
            1.0
        };
        o[0] = amplitude * a.sin() * b.cos() * cz;
        o[1] = -amplitude * a.cos() * b.sin() * cz;
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_amplitude_gives_zero() {
        let grid = GridSpec::centered(3, 4, 4).unwrap();
        let u = gen_divfree_random(7, &grid, 0.0, Exponent::TWO).unwrap();
        assert_eq!(u.max_abs(), 0.0);
    }

    #[test]
    fn projection_is_idempotent_on_output() {
        let grid = GridSpec::centered(3, 4, 4).unwrap();
        let u = gen_divfree_random(11, &grid, 1.0, Exponent::TWO).unwrap();
        let pu = SpectralWorkspace::new(&grid).leray_project(&u).unwrap();
        assert!(pu.sub(&u).unwrap().max_abs() <= 1e-12 * u.max_abs());
    }

    #[test]
    fn scaled_to_requested_norm() {
        let grid = GridSpec::centered(2, 6, 8).unwrap();
        for q in [Exponent::ONE, Exponent::of(3.0), Exponent::INF] {
            let u = gen_divfree_random(3, &grid, 0.37, q).unwrap();
            assert!((amalgam_norm(&u, Exponent::of(3.0), q) - 0.37).abs() <= 1e-10);
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let grid = GridSpec::centered(2, 4, 4).unwrap();
        let a = gen_divfree_random(5, &grid, 1.0, Exponent::TWO).unwrap();
        let b = gen_divfree_random(5, &grid, 1.0, Exponent::TWO).unwrap();
        let c = gen_divfree_random(6, &grid, 1.0, Exponent::TWO).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn taylor_green_is_divergence_free() {
        let grid = GridSpec::centered(3, 2, 8).unwrap();
        let u = taylor_green(&grid, 1.0).unwrap();
        let ws = SpectralWorkspace::new(&grid);
        assert!(ws.relative_divergence(&u).unwrap() < 1e-12);
    }
}
