use amalgam_core::error::{Error, Result};
use amalgam_core::kernels::{
    eval_kernel, kernel_amalgam_bound, kernel_calibrated_bound, BoundKind, KernelKind,
};
use amalgam_core::{amalgam_norm, Exponent, GridSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{flatness, odd_at_least};
use crate::fit::dyadic_nodes;
use crate::params::Params;
use crate::report::{Verdict, VerifyReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    /// `heat` or `phi`.
    pub kernel: KernelKind,
    pub d: usize,
    pub p: Exponent,
    pub q: Exponent,
    /// Times `2^lo, …, 2^hi`.
    pub range: (i32, i32),
    pub per_octave: u32,
    pub max_flatness: f64,
}

impl KernelParams {
    pub fn new(kernel: KernelKind, d: usize, p: Exponent, q: Exponent) -> Self {
        KernelParams {
            kernel,
            d,
            p,
            q,
            range: (-10, 6),
            per_octave: 1,
            max_flatness: 3.0,
        }
    }

    pub fn from_params(ps: &mut Params) -> Result<Self> {
        let kernel: KernelKind = ps.string("kernel", "heat")?.parse()?;
        let mut k = KernelParams::new(
            kernel,
            ps.usize("d", 1)?,
            ps.exponent("p", Exponent::ONE)?,
            ps.exponent("q", Exponent::ONE)?,
        );
        k.range = (ps.f64("t_lo", -10.0)? as i32, ps.f64("t_hi", 6.0)? as i32);
        k.per_octave = ps.usize("per_octave", 1)? as u32;
        k.max_flatness = ps.f64("max_flatness", 3.0)?;
        Ok(k)
    }
}

/// Grid resolving `√t` with at least two cells and holding `±8√t` around
/// the origin; the origin is a cell center.
pub fn kernel_grid(d: usize, t: f64) -> Result<GridSpec> {
    let n = odd_at_least(2.0 / t.sqrt());
    let side = odd_at_least((16.0 * t.sqrt() + 1.0).max(3.0));
    GridSpec::centered(d, side, n)
}

/// `‖K(·,t)‖_{E^p_q}` divided by the envelope whose two terms carry the
/// exact Lebesgue constants. The ratio against the constant-one envelope is
/// reported alongside.
pub fn scenario_kernel_norms(prm: &KernelParams) -> Result<VerifyReport> {
    let bound = match prm.kernel {
        KernelKind::Heat => BoundKind::Heat { h: 0 },
        KernelKind::GradHeat => BoundKind::Heat { h: 1 },
        KernelKind::Phi => BoundKind::Phi,
        KernelKind::Oseen => {
            return Err(Error::Domain(
                "no amalgam envelope for the Oseen tensor".into(),
            ))
        }
    };
    let mut r = VerifyReport::new(
        "kernel_norms",
        "amalgam norms of the heat kernel and its majorant",
    );
    r.param("kernel", format!("{:?}", prm.kernel))
        .param("d", prm.d)
        .param("p", prm.p)
        .param("q", prm.q);
    r.param("range", format!("[2^{}, 2^{}]", prm.range.0, prm.range.1));
    r.tolerance = prm.max_flatness;
    let times = dyadic_nodes(prm.range.0, prm.range.1, prm.per_octave);
    let rows: Vec<(f64, f64, f64, f64)> = times
        .par_iter()
        .map(|&t| {
            let grid = kernel_grid(prm.d, t)?;
            let k = eval_kernel(prm.kernel, t, &grid)?;
            let m = amalgam_norm(&k, prm.p, prm.q);
            let raw = kernel_amalgam_bound(bound, t, prm.p, prm.q, prm.d);
            Ok((
                t,
                m,
                kernel_calibrated_bound(bound, t, prm.p, prm.q, prm.d),
                raw,
            ))
        })
        .collect::<Result<_>>()?;
    let mut ratios = Vec::with_capacity(rows.len());
    let mut raw = Vec::with_capacity(rows.len());
    for (t, m, b, b1) in rows {
        r.sample("norm", t, m)
            .sample("envelope", t, b)
            .sample("ratio", t, m / b);
        ratios.push(m / b);
        raw.push(m / b1);
    }
    let f = flatness(&ratios);
    r.measure("flatness", f)
        .measure("flatness_unit_constant", flatness(&raw));
    r.measure(
        "ratio_min",
        ratios.iter().copied().fold(f64::INFINITY, f64::min),
    );
    r.measure("ratio_max", ratios.iter().copied().fold(0.0, f64::max));
    r.fold(Verdict::from_bool(f <= prm.max_flatness));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lebesgue_one_norm_of_heat_kernel_is_one() {
        let prm = KernelParams {
            range: (-6, 2),
            ..KernelParams::new(KernelKind::Heat, 1, Exponent::ONE, Exponent::ONE)
        };
        let r = scenario_kernel_norms(&prm).unwrap();
        for (_, v) in r.samples_of("norm") {
            assert!((v - 1.0).abs() < 1e-6, "{v}");
        }
    }

    #[test]
    fn sup_norm_matches_peak() {
        let prm = KernelParams {
            range: (-4, 0),
            ..KernelParams::new(KernelKind::Heat, 2, Exponent::INF, Exponent::INF)
        };
        let r = scenario_kernel_norms(&prm).unwrap();
        for (t, v) in r.samples_of("norm") {
            let peak = 1.0 / (4.0 * std::f64::consts::PI * t);
            assert!((v / peak - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn oseen_has_no_envelope() {
        let prm = KernelParams::new(KernelKind::Oseen, 3, Exponent::ONE, Exponent::ONE);
        assert!(scenario_kernel_norms(&prm).is_err());
    }
}
