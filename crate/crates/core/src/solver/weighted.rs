use serde::{Deserialize, Serialize};

use crate::amalgam::{amalgam_norm, spacetime_norm, Exponent, FieldSeries, NormSpec};
use crate::error::Result;
use crate::solver::{sixth_shift, Regime};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedNorms {
    /// `sup_t t^{1/2}‖u‖_{E^∞_q}` (`E^∞_{q₂}`, `1/q₂ = 1/q − 1/3`, in the decay regime).
    pub half_sup_inf: f64,
    /// `sup_t t^{1/4}‖u‖_{E⁶_q}` (`E⁶_{q₁}`, `1/q₁ = 1/q − 1/6`, in the decay regime).
    pub quarter_sup_six: f64,
    /// `(p, ‖t^a u‖_{E^{∞,p}_{T,q}})` with `a = (p−3)/(2p)` for `p ∈ {6, ∞}`.
    pub time_weighted: Vec<(Exponent, f64)>,
}

fn weighted_sup(u: &FieldSeries, a: f64, p: Exponent, q: Exponent) -> f64 {
    u.times()
        .iter()
        .zip(u.fields())
        .filter(|(t, _)| **t > 0.0)
        .map(|(t, f)| t.powf(a) * amalgam_norm(f, p, q))
        .fold(0.0, f64::max)
}

/// The time-weighted norms attached to each regime. Nodes at `t = 0` are
/// excluded (open endpoint).
pub fn weighted_norms(u: &FieldSeries, regime: Regime) -> Result<WeightedNorms> {
    let q = regime.q();
    let (q_inf, q_six) = match regime {
        Regime::CriticalDecay { q } => {
            let q2 = Exponent::from_recip((q.recip() - 1.0 / 3.0).max(0.0))?;
            (q2, sixth_shift(q))
        }
        _ => (q, q),
    };
    let mut time_weighted = Vec::new();
    for p in [Exponent::of(6.0), Exponent::INF] {
        let a = 0.5 - 1.5 * p.recip();
        let w = u.time_weighted(a)?;
        let v = spacetime_norm(
            &w,
            NormSpec::Espq {
                s: Exponent::INF,
                p,
                q,
            },
        )?;
        time_weighted.push((p, v));
    }
    Ok(WeightedNorms {
        half_sup_inf: weighted_sup(u, 0.5, Exponent::INF, q_inf),
        quarter_sup_six: weighted_sup(u, 0.25, Exponent::of(6.0), q_six),
        time_weighted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::{GridField, GridSpec};
    use crate::spectral::SpectralWorkspace;

    fn heat_series(t_final: f64) -> FieldSeries {
        let spec = GridSpec::centered(3, 5, 4).unwrap();
        let f = GridField::from_fn(spec.clone(), 3, |x, o| {
            if x.iter().all(|v| v.abs() < 0.5) {
                o[0] = 1.0;
            }
        });
        let ws = SpectralWorkspace::new(&spec);
        let s = ws.spectra(&f);
        let times = crate::solver::time_grid(t_final, 8, 1);
        let fields = times
            .iter()
            .map(|&t| ws.heat_from_spectra(&s, t, 0).unwrap())
            .collect();
        FieldSeries::trapezoid(times, fields).unwrap()
    }

    #[test]
    fn zero_series_gives_zero() {
        let spec = GridSpec::centered(3, 3, 2).unwrap();
        let z = FieldSeries::trapezoid(vec![0.0, 0.5, 1.0], vec![GridField::zeros(spec, 3); 3])
            .unwrap();
        let w = weighted_norms(&z, Regime::CriticalSmall { q: Exponent::TWO }).unwrap();
        assert_eq!(w.half_sup_inf, 0.0);
        assert_eq!(w.quarter_sup_six, 0.0);
        assert!(w.time_weighted.iter().all(|(_, v)| *v == 0.0));
    }

    #[test]
    fn quarter_weighted_six_norm_vanishes_as_t_shrinks() {
        let r = Regime::CriticalSmall { q: Exponent::TWO };
        let big = weighted_norms(&heat_series(1.0), r)
            .unwrap()
            .quarter_sup_six;
        let small = weighted_norms(&heat_series(1.0 / 4096.0), r)
            .unwrap()
            .quarter_sup_six;
        assert!(small < 0.5 * big, "{small} vs {big}");
    }

    #[test]
    fn half_weighted_sup_is_bounded_for_cube_data() {
        let w = weighted_norms(
            &heat_series(1.0),
            Regime::CriticalSmall {
                q: Exponent::of(3.0),
            },
        )
        .unwrap();
        assert!(w.half_sup_inf.is_finite() && w.half_sup_inf < 1.0);
    }
}
