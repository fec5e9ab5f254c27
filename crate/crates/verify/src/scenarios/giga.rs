use std::str::FromStr;

use amalgam_core::error::{Error, Result};
use amalgam_core::spectral::SpectralWorkspace;
use amalgam_core::{lebesgue_norm, Exponent, FieldSeries, GridField, GridSpec};
use amalgam_core::{spacetime_norm, NormSpec};
use serde::{Deserialize, Serialize};

use super::flatness;
use crate::fit::dyadic_nodes;
use crate::params::Params;
use crate::report::{Verdict, VerifyReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Gaussian,
    Indicator,
    /// `x₁ e^{−|x|²}`.
    OddGaussian,
}

impl Shape {
    pub const ALL: [Shape; 3] = [Shape::Gaussian, Shape::Indicator, Shape::OddGaussian];

    pub fn eval(self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match self {
            Shape::Gaussian => (-r2).exp(),
            Shape::Indicator => {
                if x.iter().all(|v| v.abs() < 0.5) {
                    1.0
                } else {
                    0.0
                }
            }
            Shape::OddGaussian => x[0] * (-r2).exp(),
        }
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Shape::Gaussian),
            "indicator" => Ok(Shape::Indicator),
            "odd_gaussian" => Ok(Shape::OddGaussian),
            _ => Err(Error::Domain(format!("unknown shape {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GigaParams {
    pub d: usize,
    pub r: Exponent,
    pub s: Exponent,
    pub p: Exponent,
    pub lambdas: Vec<f64>,
    pub shapes: Vec<Shape>,
    pub side: usize,
    pub n: usize,
    /// Time nodes `{0} ∪ {2^{j/per_octave}}` for `j/per_octave` in the range.
    pub range: (i32, i32),
    pub per_octave: u32,
    pub tolerance: f64,
}

impl GigaParams {
    pub fn new(d: usize, r: f64, s: f64, p: f64) -> Self {
        GigaParams {
            d,
            r: Exponent::of(r),
            s: Exponent::of(s),
            p: Exponent::of(p),
            lambdas: vec![1.0, 2.0, 4.0],
            shapes: Shape::ALL.to_vec(),
            side: 99,
            n: 64,
            range: (-18, 6),
            per_octave: 4,
            tolerance: 0.05,
        }
    }

    pub fn from_params(ps: &mut Params) -> Result<Self> {
        let mut g = GigaParams::new(ps.usize("d", 1)?, 2.0, 8.0, 4.0);
        g.r = ps.exponent("r", g.r)?;
        g.s = ps.exponent("s", g.s)?;
        g.p = ps.exponent("p", g.p)?;
        g.lambdas = ps.f64_list("lambdas", &g.lambdas)?;
        g.side = ps.usize("side", g.side)?;
        g.n = ps.usize("n", g.n)?;
        g.tolerance = ps.f64("tolerance", g.tolerance)?;
        let names = ps.string("shapes", "gaussian,indicator,odd_gaussian")?;
        g.shapes = names
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<_>>()?;
        Ok(g)
    }

    /// Checks `1 < r ≤ s`, `r ≤ p < ∞` and `2/s + d/p = d/r`.
    pub fn validate(&self) -> Result<()> {
        let (r, s, p, d) = (
            self.r.value(),
            self.s.value(),
            self.p.value(),
            self.d as f64,
        );
        if !(r > 1.0 && r <= s && r <= p && p.is_finite()) {
            return Err(Error::Domain("need 1 < r <= s and r <= p < inf".into()));
        }
        if (2.0 * self.s.recip() + d * self.p.recip() - d * self.r.recip()).abs() > 1e-12 {
            return Err(Error::Domain(
                "scaling relation 2/s + d/p = d/r fails".into(),
            ));
        }
        Ok(())
    }
}

/// `‖e^{tΔ}a‖_{L^s(0,∞; L^p)} / ‖a‖_{L^r}` for `a_λ(x) = λ^{d/r} a(λx)`.
pub fn giga_ratio(prm: &GigaParams, grid: &GridSpec, shape: Shape, lambda: f64) -> Result<f64> {
    let scale = lambda.powf(prm.d as f64 * prm.r.recip());
    let mut y = vec![0.0; prm.d];
    let a = GridField::scalar(grid.clone(), |x| {
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = lambda * xi;
        }
        scale * shape.eval(&y)
    });
    let ws = SpectralWorkspace::new(grid);
    let spectra = ws.spectra(&a);
    let mut times = vec![0.0];
    times.extend(dyadic_nodes(prm.range.0, prm.range.1, prm.per_octave));
    let fields = times
        .iter()
        .map(|&t| {
            if t == 0.0 {
                Ok(a.clone())
            } else {
                ws.heat_from_spectra(&spectra, t, 0)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let u = FieldSeries::trapezoid(times, fields)?;
    let num = spacetime_norm(
        &u,
        NormSpec::LsEpq {
            s: prm.s,
            p: prm.p,
            q: prm.p,
        },
    )?;
    Ok(num / lebesgue_norm(&a, prm.r))
}

/// Scale invariance of the Giga ratio across `λ`, per data shape.
pub fn scenario_giga(prm: &GigaParams) -> Result<VerifyReport> {
    prm.validate()?;
    let mut r = VerifyReport::new(
        "giga",
        "scale-invariant heat estimate from L^r into L^s L^p",
    );
    r.param("d", prm.d)
        .param("r", prm.r)
        .param("s", prm.s)
        .param("p", prm.p);
    r.param("lambdas", format!("{:?}", prm.lambdas))
        .param("side", prm.side)
        .param("n", prm.n);
    r.tolerance = prm.tolerance;
    let grid = GridSpec::centered(prm.d, prm.side, prm.n)?;
    let mut worst: f64 = 0.0;
    for &shape in &prm.shapes {
        let ratios = prm
            .lambdas
            .iter()
            .map(|&l| giga_ratio(prm, &grid, shape, l))
            .collect::<Result<Vec<_>>>()?;
        let name = format!("{shape:?}").to_lowercase();
        for (l, v) in prm.lambdas.iter().zip(&ratios) {
            r.sample(&name, *l, *v);
        }
        let spread = flatness(&ratios) - 1.0;
        r.measure(&format!("spread_{name}"), spread);
        r.measure(&format!("ratio_{name}"), ratios[0]);
        worst = worst.max(spread);
    }
    r.measure("max_spread", worst);
    r.fold(Verdict::from_bool(worst <= prm.tolerance));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_is_checked() {
        assert!(GigaParams::new(1, 2.0, 4.0, 4.0).validate().is_err());
        assert!(GigaParams::new(1, 2.0, 8.0, 4.0).validate().is_ok());
        assert!(GigaParams::new(1, 1.0, 4.0, 2.0).validate().is_err());
    }

    #[test]
    fn gaussian_ratio_matches_closed_form() {
        // a = e^{−x²}: e^{tΔ}a = (1+4t)^{−1/2} e^{−x²/(1+4t)}, so
        // ‖e^{tΔ}a‖_{L^p} = (1+4t)^{−1/2 + 1/(2p)} (π/p)^{1/(2p)}.
        let mut prm = GigaParams::new(1, 2.0, 8.0, 4.0);
        prm.side = 41;
        prm.n = 16;
        prm.per_octave = 8;
        let grid = GridSpec::centered(1, prm.side, prm.n).unwrap();
        let got = giga_ratio(&prm, &grid, Shape::Gaussian, 1.0).unwrap();
        let (s, p) = (8.0, 4.0);
        let e = s * (-0.5 + 0.5 / p);
        // ∫₀^∞ (1+4t)^e dt = 1 / (4(−e−1)).
        let time = 1.0 / (4.0 * (-e - 1.0));
        let want = (std::f64::consts::PI / p).powf(1.0 / (2.0 * p)) * time.powf(1.0 / s)
            / (std::f64::consts::PI / 2.0).powf(0.25);
        assert!((got / want - 1.0).abs() < 0.01, "{got} vs {want}");
    }
}
