use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::amalgam::{trapezoid_weights, FieldSeries, GridField, GridSpec};
use crate::error::{domain, Error, Result};

/// The two space-time examples where the order of the time and cell norms
/// cannot be switched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "example", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MovingBump {
    /// `2^k 𝟙_{Q(2k e₁)}(x) 𝟙_{(2^{−k}, 2^{−k+1}]}(t)` for `k = 1..=bands`,
    /// with `Q` the unit cube.
    SwitchA { bands: usize },
    /// `𝟙_{|x − x₀(t)| < 1}` with `x₀(t) = (cot t, 0, …)`, `t ∈ (0, π)`.
    SwitchB,
}

impl FromStr for MovingBump {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let u = s.to_ascii_uppercase().replace('-', "_");
        if u == "SWITCH_B" {
            return Ok(MovingBump::SwitchB);
        }
        if let Some(rest) = u.strip_prefix("SWITCH_A") {
            let bands = match rest.strip_prefix(':') {
                Some(b) => b
                    .parse()
                    .map_err(|_| Error::Domain(format!("bad band count in {s:?}")))?,
                None if rest.is_empty() => 6,
                None => return domain(format!("unknown example {s:?}")),
            };
            return Ok(MovingBump::SwitchA { bands });
        }
        domain(format!("unknown example {s:?}"))
    }
}

impl MovingBump {
    /// Value at `(x, t)`.
    pub fn eval(&self, x: &[f64], t: f64) -> f64 {
        match *self {
            MovingBump::SwitchA { bands } => {
                if !(t > 0.0 && t <= 1.0) {
                    return 0.0;
                }
                // k with 2^{−k} < t ≤ 2^{−k+1}.
                let k = (1.0 - t.log2()).floor() as i64;
                let k = if 2f64.powi(-(k as i32)) < t { k } else { k + 1 };
                if k < 1 || k as usize > bands {
                    return 0.0;
                }
                let c = 2.0 * k as f64;
                let inside = (x[0] - c).abs() < 0.5 && x[1..].iter().all(|v| v.abs() < 0.5);
                if inside {
                    2f64.powi(k as i32)
                } else {
                    0.0
                }
            }
            MovingBump::SwitchB => {
                if !(t > 0.0 && t < std::f64::consts::PI) {
                    return 0.0;
                }
                let x0 = t.cos() / t.sin();
                let r2 = (x[0] - x0).powi(2) + x[1..].iter().map(|v| v * v).sum::<f64>();
                if r2 < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Time nodes and weights for which the quadrature of the example on
    /// `grid` is exact.
    ///
    /// A: one node per band at its right end with weight `2^{−k}`.
    /// B: the times at which the center passes each lattice and half-lattice
    /// point whose ball stays inside the box, with trapezoid weights.
    pub fn nodes(&self, grid: &GridSpec) -> Result<(Vec<f64>, Vec<f64>)> {
        match *self {
            MovingBump::SwitchA { bands } => {
                let mut times = Vec::with_capacity(bands);
                let mut weights = Vec::with_capacity(bands);
                for k in (1..=bands).rev() {
                    times.push(2f64.powi(1 - k as i32));
                    weights.push(2f64.powi(-(k as i32)));
                }
                Ok((times, weights))
            }
            MovingBump::SwitchB => {
                let mut times = Vec::new();
                let lo = grid.lower(0);
                let hi = grid.upper(0);
                let mut j = (2.0 * lo).ceil() as i64;
                while j as f64 / 2.0 <= hi {
                    let x0 = j as f64 / 2.0;
                    let mut c = vec![0.0; grid.d()];
                    c[0] = x0;
                    if grid.contains_ball(&c, 1.0, 0.0) {
                        times.push(1f64.atan2(x0));
                    }
                    j += 1;
                }
                times.sort_by(|a, b| a.partial_cmp(b).unwrap());
                if times.len() < 2 {
                    return domain("box too small for the moving ball");
                }
                let w = trapezoid_weights(&times)?;
                Ok((times, w))
            }
        }
    }
}

/// Samples the example at `times` with the given quadrature `weights`.
pub fn gen_moving_bump(
    example: MovingBump,
    grid: &GridSpec,
    times: &[f64],
    weights: &[f64],
) -> Result<FieldSeries> {
    if let MovingBump::SwitchA { bands } = example {
        let mut c = vec![0.0; grid.d()];
        c[0] = 2.0 * bands as f64;
        if bands > 0 && !grid.contains_ball(&c, 0.5, 0.0) {
            return domain(format!("band {bands} leaves the box"));
        }
    }
    let fields = times
        .iter()
        .map(|&t| GridField::scalar(grid.clone(), |x| example.eval(x, t)))
        .collect();
    FieldSeries::with_weights(times.to_vec(), weights.to_vec(), fields)
}

/// `gen_moving_bump` on the nodes of [`MovingBump::nodes`].
pub fn gen_moving_bump_exact(example: MovingBump, grid: &GridSpec) -> Result<FieldSeries> {
    let (t, w) = example.nodes(grid)?;
    gen_moving_bump(example, grid, &t, &w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::{spacetime_norm, Exponent, NormSpec};

    fn norms(u: &FieldSeries) -> (f64, f64) {
        let e = spacetime_norm(
            u,
            NormSpec::Espq {
                s: Exponent::ONE,
                p: Exponent::ONE,
                q: Exponent::INF,
            },
        )
        .unwrap();
        let l = spacetime_norm(
            u,
            NormSpec::LsEpq {
                s: Exponent::ONE,
                p: Exponent::ONE,
                q: Exponent::INF,
            },
        )
        .unwrap();
        (e, l)
    }

    #[test]
    fn band_lookup_is_right_closed() {
        let a = MovingBump::SwitchA { bands: 3 };
        assert_eq!(a.eval(&[2.0], 1.0), 2.0);
        assert_eq!(a.eval(&[2.0], 0.5), 0.0);
        assert_eq!(a.eval(&[4.0], 0.5), 4.0);
        assert_eq!(a.eval(&[6.0], 0.25), 8.0);
        assert_eq!(a.eval(&[8.0], 0.125), 0.0);
    }

    #[test]
    fn single_band_norms_agree() {
        let grid = GridSpec::cube(1, 4, 8, 0).unwrap();
        let u = gen_moving_bump_exact(MovingBump::SwitchA { bands: 1 }, &grid).unwrap();
        assert_eq!(norms(&u), (1.0, 1.0));
    }

    #[test]
    fn switch_b_in_one_cell_is_finite() {
        let grid = GridSpec::centered(1, 3, 16).unwrap();
        let u = gen_moving_bump_exact(MovingBump::SwitchB, &grid).unwrap();
        let (e, l) = norms(&u);
        assert!(e.is_finite() && l.is_finite());
    }

    #[test]
    fn parses_examples() {
        assert_eq!(
            "switch_a:4".parse::<MovingBump>().unwrap(),
            MovingBump::SwitchA { bands: 4 }
        );
        assert_eq!(
            "SWITCH_B".parse::<MovingBump>().unwrap(),
            MovingBump::SwitchB
        );
        assert!("switch_c".parse::<MovingBump>().is_err());
    }
}
