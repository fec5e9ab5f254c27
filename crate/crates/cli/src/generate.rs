use amalgam_core::constructions::{
    gen_bubble_train, gen_divfree_random, gen_strict_inclusion, taylor_green, BubbleTrainSpec,
};
use amalgam_core::{Exponent, GridField, GridSpec};
use amalgam_verify::params::Params;
use amalgam_verify::scenarios::regularized::compact_swirl;
use anyhow::{bail, Result};

pub const GENERATORS: &[(&str, &str)] = &[
    (
        "bubble_train",
        "shrinking bumps c_k 2^{kβ/2} on balls of radius 2^{-k/2} at 2k e1",
    ),
    (
        "strict_inclusion",
        "lattice train of cubes of width δ_k, cases P_GT_Q or P_LT_Q",
    ),
    (
        "divfree_random",
        "band-limited divergence-free noise under a Gaussian envelope",
    ),
    (
        "taylor_green",
        "periodic Taylor-Green vortex with one period across the box",
    ),
    (
        "swirl",
        "compactly supported swirl in the unit cube at the origin",
    ),
];

/// Grid from `d`, `side`, `n` and `origin` (centered by default).
pub fn grid(ps: &mut Params, d: usize, side: usize, n: usize) -> Result<GridSpec> {
    let d = ps.usize("d", d)?;
    let side = ps.usize("side", side)?;
    let n = ps.usize("n", n)?;
    let origin = ps.f64("origin", -((side / 2) as f64))? as i64;
    Ok(GridSpec::cube(d, side, n, origin)?)
}

pub fn generate(name: &str, ps: &mut Params) -> Result<GridField> {
    let field = match name {
        "bubble_train" => {
            let k = ps.usize("bubbles", 4)?;
            let g = grid(ps, 1, 2 * k + 4, 64)?;
            let r = ps.exponent("r", Exponent::of(2.0))?;
            let coeffs = ps.f64_list("coeffs", &vec![1.0; k])?;
            gen_bubble_train(
                &BubbleTrainSpec {
                    d: g.d(),
                    r,
                    coeffs,
                },
                &g,
            )?
        }
        "strict_inclusion" => {
            let g = grid(ps, 1, 9, 33)?;
            let case = ps.string("case", "P_GT_Q")?.parse()?;
            let p = ps.exponent("p", Exponent::of(2.0))?;
            let q = ps.exponent("q", Exponent::ONE)?;
            gen_strict_inclusion(case, p, q, &g)?.field
        }
        "divfree_random" => {
            let g = grid(ps, 3, 4, 8)?;
            let seed = ps.u64("seed", 0)?;
            let amplitude = ps.f64("amplitude", 1.0)?;
            let q = ps.exponent("q", Exponent::TWO)?;
            gen_divfree_random(seed, &g, amplitude, q)?
        }
        "taylor_green" => {
            let g = grid(ps, 3, 4, 8)?;
            taylor_green(&g, ps.f64("amplitude", 1.0)?)?
        }
        "swirl" => {
            let g = grid(ps, 3, 4, 16)?;
            if g.d() != 3 {
                bail!("swirl is three-dimensional");
            }
            compact_swirl(&g)
        }
        other => bail!("unknown generator {other:?}"),
    };
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_generator_runs_on_a_small_grid() {
        for (name, _) in GENERATORS {
            let mut ps = Params::parse("side = 4").unwrap();
            if *name == "bubble_train" {
                ps = Params::parse("bubbles = 2\nside = 8\nn = 32\norigin = 0").unwrap();
            }
            let f = generate(name, &mut ps).unwrap();
            assert!(f.max_abs() > 0.0, "{name}");
        }
        assert!(generate("nope", &mut Params::default()).is_err());
    }
}
