use amalgam_core::amalgam::io::{read_field, write_field};
use amalgam_core::constructions::{gen_divfree_random, taylor_green};
use amalgam_core::solver::{picard_solve, Regime, SolverConfig};
use amalgam_core::spectral::{heat_evolve, leray_project, SpectralWorkspace};
use amalgam_core::{amalgam_norm, lebesgue_norm, Exponent, GridField, GridSpec};

fn bump(spec: &GridSpec) -> GridField {
    GridField::scalar(spec.clone(), |x| {
        (-4.0 * x.iter().map(|v| v * v).sum::<f64>()).exp()
    })
}

#[test]
fn field_file_round_trip() {
    let g = GridSpec::centered(3, 3, 4).unwrap();
    let u = gen_divfree_random(5, &g, 1.0, Exponent::TWO).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.amlg");
    write_field(std::fs::File::create(&path).unwrap(), &u).unwrap();
    let v = read_field(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(u.data(), v.data());
    assert_eq!(u.spec(), v.spec());
}

#[test]
fn heat_flow_is_a_semigroup() {
    let g = GridSpec::centered(2, 5, 8).unwrap();
    let f = bump(&g);
    let a = heat_evolve(&heat_evolve(&f, 0.1, 0).unwrap(), 0.2, 0).unwrap();
    let b = heat_evolve(&f, 0.3, 0).unwrap();
    let err = a.sub(&b).unwrap().max_abs();
    assert!(err < 1e-13, "{err}");
}

#[test]
fn heat_flow_contracts_every_amalgam_norm() {
    let g = GridSpec::centered(1, 9, 16).unwrap();
    let f = bump(&g);
    let e = heat_evolve(&f, 0.5, 0).unwrap();
    for (p, q) in [(1.0, 1.0), (2.0, 1.0), (1.0, 2.0), (f64::INFINITY, 2.0)] {
        let (p, q) = (Exponent::of(p), Exponent::of(q));
        assert!(
            amalgam_norm(&e, p, q) <= amalgam_norm(&f, p, q) * 1.5,
            "{p} {q}"
        );
    }
    // L¹ mass is conserved by the periodic flow of nonnegative data.
    let m0 = lebesgue_norm(&f, Exponent::ONE);
    assert!((lebesgue_norm(&e, Exponent::ONE) / m0 - 1.0).abs() < 1e-12);
}

#[test]
fn leray_projection_is_idempotent_and_solenoidal() {
    let g = GridSpec::centered(3, 2, 8).unwrap();
    let v = GridField::from_fn(g.clone(), 3, |x, o| {
        o[0] = (-x[0] * x[0] * 6.0).exp();
        o[1] = x[0] * (-x[1] * x[1] * 6.0).exp();
        o[2] = 0.3;
    });
    let p = leray_project(&v).unwrap();
    let pp = leray_project(&p).unwrap();
    assert!(p.sub(&pp).unwrap().max_abs() < 1e-12);
    assert!(SpectralWorkspace::new(&g).relative_divergence(&p).unwrap() < 1e-12);
}

#[test]
fn picard_keeps_zero_data_at_zero() {
    let g = GridSpec::centered(3, 2, 4).unwrap();
    let u0 = GridField::zeros(g, 3);
    let cfg = SolverConfig {
        t_final: 0.25,
        levels: 2,
        substeps: 1,
        picard_cap: 5,
        contraction_tol: 1e-10,
        regime: Regime::CriticalSmall {
            q: Exponent::of(3.0),
        },
    };
    let (u, trace) = picard_solve(&u0, &cfg).unwrap();
    assert!(trace.converged);
    assert!(u.fields().iter().all(|f| f.max_abs() == 0.0));
}

#[test]
fn taylor_green_is_divergence_free() {
    let g = GridSpec::centered(3, 2, 8).unwrap();
    let u = taylor_green(&g, 1.0).unwrap();
    assert!(SpectralWorkspace::new(&g).relative_divergence(&u).unwrap() < 1e-12);
}
