//! Registry of verification scenarios addressable by id.

use amalgam_core::error::{Error, Result};

use crate::params::Params;
use crate::report::VerifyReport;
use crate::scenarios::bubble::{scenario_bubble, BubbleParams};
use crate::scenarios::continuity::{scenario_continuity, ContinuityParams};
use crate::scenarios::decay::{scenario_decay, scenario_truncation, DecayParams};
use crate::scenarios::giga::{scenario_giga, GigaParams};
use crate::scenarios::identities::{scenario_identities, IdentityParams};
use crate::scenarios::kernels::{scenario_kernel_norms, KernelParams};
use crate::scenarios::regularized::{
    scenario_apriori, scenario_regularized, AprioriParams, RegularizedParams,
};
use crate::scenarios::spacetime::{scenario_spacetime, SpacetimeParams};
use crate::scenarios::switch::{
    scenario_strict_inclusion, scenario_switch_a, scenario_switch_b, StrictParams, SwitchAParams,
    SwitchBParams,
};
use crate::scenarios::theorem::{scenario_theorem, TheoremParams};

pub type Runner = fn(&mut Params) -> Result<Vec<VerifyReport>>;

pub struct Entry {
    pub id: &'static str,
    pub title: &'static str,
    /// What kind of statement the scenario probes.
    pub tag: &'static str,
    pub run: Runner,
}

macro_rules! one {
    ($e:expr) => {
        Ok(vec![$e?])
    };
}

fn identities(ps: &mut Params) -> Result<Vec<VerifyReport>> {
    one!(scenario_identities(&IdentityParams::from_params(ps)?))
}

fn decay_heat(ps: &mut Params) -> Result<Vec<VerifyReport>> {
    ps.set_default("operator", "heat");
    one!(scenario_decay(&DecayParams::from_params(ps)?))
}

fn decay_oseen(ps: &mut Params) -> Result<Vec<VerifyReport>> {
    ps.set("operator", "oseen");
    one!(scenario_decay(&DecayParams::from_params(ps)?))
}

fn truncation(ps: &mut Params) -> Result<Vec<VerifyReport>> {
    let max_shift = ps.f64("max_shift", 0.05)?;
    one!(scenario_truncation(
        &DecayParams::from_params(ps)?,
        max_shift
    ))
}

fn kernel_norms(ps: &mut Params) -> Result<Vec<VerifyReport>> {
    one!(scenario_kernel_norms(&KernelParams::from_params(ps)?))
}

fn giga(ps: &mut Params) -> Result<Vec<VerifyReport>> {
    one!(scenario_giga(&GigaParams::from_params(ps)?))
}

fn bubble(ps: &mut Params) -> Result<Vec<VerifyReport>> {
    one!(scenario_bubble(&BubbleParams::from_params(ps)?))
}

fn switch_a(ps: &mut Params) -> Result<Vec<VerifyReport>> {
    one!(scenario_switch_a(&SwitchAParams::from_params(ps)?))
}

fn switch_b(ps: &mut Params) -> Result<Vec<VerifyReport>> {
    one!(scenario_switch_b(&SwitchBParams::from_params(ps)?))
}

fn strict_inclusion(ps: &mut Params) -> Result<Vec<VerifyReport>> {
    one!(scenario_strict_inclusion(&StrictParams::from_params(ps)?))
}

fn continuity(ps: &mut Params) -> Result<Vec<VerifyReport>> {
    one!(scenario_continuity(&ContinuityParams::from_params(ps)?))
}

fn spacetime_with(ps: &mut Params, variant: &str) -> Result<Vec<VerifyReport>> {
    ps.set("variant", variant);
    one!(scenario_spacetime(&SpacetimeParams::from_params(ps)?))
}

fn spacetime_heat(ps: &mut Params) -> Result<Vec<VerifyReport>> {
    spacetime_with(ps, "heat")
}

fn spacetime_duhamel(ps: &mut Params) -> Result<Vec<VerifyReport>> {
    spacetime_with(ps, "duhamel")
}

fn spacetime_energy(ps: &mut Params) -> Result<Vec<VerifyReport>> {
    spacetime_with(ps, "energy")
}

fn theorem_with(ps: &mut Params, regime: &str) -> Result<Vec<VerifyReport>> {
    ps.set("regime", regime);
    one!(scenario_theorem(&TheoremParams::from_params(ps)?))
}

fn theorem_subcritical(ps: &mut Params) -> Result<Vec<VerifyReport>> {
    theorem_with(ps, "subcritical")
}

fn theorem_critical(ps: &mut Params) -> Result<Vec<VerifyReport>> {
    theorem_with(ps, "critical_small")
}

fn theorem_decay(ps: &mut Params) -> Result<Vec<VerifyReport>> {
    theorem_with(ps, "critical_decay")
}

fn regularized(ps: &mut Params) -> Result<Vec<VerifyReport>> {
    one!(scenario_regularized(&RegularizedParams::from_params(ps)?))
}

fn apriori_scaling(ps: &mut Params) -> Result<Vec<VerifyReport>> {
    one!(scenario_apriori(&AprioriParams::from_params(ps)?))
}

pub const CATALOG: &[Entry] = &[
    Entry {
        id: "identities",
        title: "norm identities and inequalities on random fields",
        tag: "identity",
        run: identities,
    },
    Entry {
        id: "decay_heat",
        title: "heat semigroup decay slopes",
        tag: "estimate",
        run: decay_heat,
    },
    Entry {
        id: "decay_oseen",
        title: "Oseen operator decay slope",
        tag: "estimate",
        run: decay_oseen,
    },
    Entry {
        id: "truncation",
        title: "slope shift under box doubling",
        tag: "numerics",
        run: truncation,
    },
    Entry {
        id: "kernel_norms",
        title: "kernel amalgam norms against their envelopes",
        tag: "estimate",
        run: kernel_norms,
    },
    Entry {
        id: "giga",
        title: "Giga-type spacetime bound across dilations",
        tag: "estimate",
        run: giga,
    },
    Entry {
        id: "bubble_blowup",
        title: "bubble train against a contrast family",
        tag: "counterexample",
        run: bubble,
    },
    Entry {
        id: "switch_a",
        title: "exact values on a unit-cube train",
        tag: "counterexample",
        run: switch_a,
    },
    Entry {
        id: "switch_b",
        title: "growth of the sup-time norm on long trains",
        tag: "counterexample",
        run: switch_b,
    },
    Entry {
        id: "strict_inclusion",
        title: "spike trains separating amalgams from Lebesgue spaces",
        tag: "counterexample",
        run: strict_inclusion,
    },
    Entry {
        id: "continuity",
        title: "continuity of translation and heat flow",
        tag: "estimate",
        run: continuity,
    },
    Entry {
        id: "spacetime_heat",
        title: "spacetime bound for the heat flow",
        tag: "estimate",
        run: spacetime_heat,
    },
    Entry {
        id: "spacetime_duhamel",
        title: "spacetime bound for the Duhamel term",
        tag: "estimate",
        run: spacetime_duhamel,
    },
    Entry {
        id: "spacetime_energy",
        title: "local energy bound for the heat flow",
        tag: "estimate",
        run: spacetime_energy,
    },
    Entry {
        id: "theorem_subcritical",
        title: "mild solutions for subcritical data",
        tag: "theorem",
        run: theorem_subcritical,
    },
    Entry {
        id: "theorem_critical",
        title: "mild solutions for small critical data",
        tag: "theorem",
        run: theorem_critical,
    },
    Entry {
        id: "theorem_decay",
        title: "mild solutions for critical data with decay",
        tag: "theorem",
        run: theorem_decay,
    },
    Entry {
        id: "regularized",
        title: "local energy of the regularized scheme",
        tag: "scheme",
        run: regularized,
    },
    Entry {
        id: "apriori_scaling",
        title: "lattice a priori quantities across scales",
        tag: "scheme",
        run: apriori_scaling,
    },
];

pub fn lookup(id: &str) -> Result<&'static Entry> {
    CATALOG
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::Domain(format!("unknown scenario {id:?}")))
}

/// Runs scenario `id` with `params`.
pub fn run(id: &str, params: &mut Params) -> Result<Vec<VerifyReport>> {
    (lookup(id)?.run)(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique() {
        let mut ids: Vec<_> = CATALOG.iter().map(|e| e.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), CATALOG.len());
        assert!(lookup("nope").is_err());
    }

    #[test]
    fn runs_a_cheap_entry() {
        let mut ps = Params::parse("bands = 3").unwrap();
        let reports = run("switch_a", &mut ps).unwrap();
        assert_eq!(reports[0].scenario, "switch_a");
        assert_eq!(reports[0].verdict, crate::Verdict::Pass);
    }
}
