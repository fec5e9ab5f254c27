//! Acceptance checks. Each test prints one `criterion N: PASS|FAIL` line.
//! Predicted values are recomputed here from closed forms, not taken from
//! the reports.

use std::sync::Mutex;
use std::time::Instant;

use amalgam_core::kernels::KernelKind;
use amalgam_core::{amalgam_norm, Exponent, GridField, GridSpec};
use amalgam_verify::scenarios::bubble::{scenario_bubble, BubbleParams};
use amalgam_verify::scenarios::decay::{scenario_decay, scenario_truncation, DecayParams};
use amalgam_verify::scenarios::giga::{scenario_giga, GigaParams};
use amalgam_verify::scenarios::identities::{scenario_identities, IdentityParams};
use amalgam_verify::scenarios::kernels::{scenario_kernel_norms, KernelParams};
use amalgam_verify::scenarios::regularized::{
    scenario_apriori, scenario_regularized, AprioriData, AprioriParams, RegularizedParams,
};
use amalgam_verify::scenarios::switch::{
    scenario_switch_a, scenario_switch_b, SwitchAParams, SwitchBParams,
};
use amalgam_verify::scenarios::theorem::{scenario_theorem, RegimeKind, TheoremParams};
use amalgam_verify::{Verdict, VerifyReport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Runtime limits are only meaningful when criteria do not share the CPU.
static SERIAL: Mutex<()> = Mutex::new(());

const C1_REL_TOL: f64 = 1e-12;
const C1_SECONDS: f64 = 60.0;
const C2_TOL_1D: f64 = 0.1;
const C2_TOL: f64 = 0.15;
const C2_SECONDS: f64 = 300.0;
const C3_TOL: f64 = 0.15;
const C3_SECONDS: f64 = 600.0;
const C4_FLATNESS: f64 = 3.0;
const C5_SPREAD: f64 = 0.05;
const C6_LINEAR: f64 = 0.2;
const C6_TAIL_RATIO: f64 = 0.75;
const C6_SECONDS: f64 = 120.0;
const C7_EXACT: f64 = 1e-12;
const C8_CONTRACTION: f64 = 0.5;
const C8_RESIDUAL_FACTOR: f64 = 10.0;
const C8_DIVERGENCE: f64 = 1e-10;
const C8_PERSISTENCE: f64 = 0.25;
const C8_SECONDS: f64 = 1800.0;
const C9_FACTOR: f64 = 2.0;
const C9_SCALING: f64 = 2.0;
const C10_SHIFT: f64 = 0.05;

fn verdict_line(n: u32, ok: bool, detail: &str) {
    println!(
        "criterion {n}: {} {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
}

fn lock() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

/// Small-time heat slope `−(d/2)(1/p̃ − 1/p) − h/2`.
fn heat_slope(d: usize, pt: f64, p: f64, h: u8) -> f64 {
    -(d as f64 / 2.0) * (1.0 / pt - 1.0 / p) - h as f64 / 2.0
}

fn heat_grid() -> Vec<(usize, f64, f64, u8)> {
    let mut out = Vec::new();
    for d in [1usize, 2] {
        for (pt, p) in [(1.0, 2.0), (1.0, f64::INFINITY), (2.0, 4.0)] {
            for h in [0u8, 1] {
                out.push((d, pt, p, h));
            }
        }
    }
    out
}

fn heat_params(d: usize, pt: f64, p: f64, h: u8) -> DecayParams {
    DecayParams::heat_small_t(d, Exponent::of(pt), Exponent::of(p), h)
}

/// `ℓ^q` over unit cubes of per-cube `L^p` norms, by direct summation.
fn brute_amalgam(f: &GridField, p: f64, q: f64) -> f64 {
    let spec = f.spec();
    let map = spec.cube_index_map();
    let mag = f.magnitude();
    let vol = spec.cell_volume();
    let mut cubes = vec![0.0f64; spec.cube_count()];
    for (idx, v) in mag.iter().enumerate() {
        let c = &mut cubes[map[idx] as usize];
        if p.is_infinite() {
            *c = c.max(*v);
        } else {
            *c += v.powf(p) * vol;
        }
    }
    if p.is_finite() {
        cubes.iter_mut().for_each(|c| *c = c.powf(1.0 / p));
    }
    if q.is_infinite() {
        cubes.into_iter().fold(0.0, f64::max)
    } else {
        cubes.iter().map(|c| c.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

#[test]
fn criterion_1_identities() {
    let _g = lock();
    // Oracle: direct cube-by-cube summation on random fields.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut oracle_ok = true;
    for d in 1..=3usize {
        for _ in 0..20 {
            let spec = GridSpec::cube(
                d,
                rng.gen_range(1..=3),
                rng.gen_range(1..=4),
                rng.gen_range(-2..=2),
            )
            .unwrap();
            let f = GridField::scalar(spec, |_| rng.gen_range(-1.0..1.0));
            for (p, q) in [
                (1.0, 1.0),
                (2.0, 1.0),
                (1.5, 3.0),
                (f64::INFINITY, 2.0),
                (3.0, f64::INFINITY),
            ] {
                let a = amalgam_norm(&f, Exponent::of(p), Exponent::of(q));
                let b = brute_amalgam(&f, p, q);
                oracle_ok &= (a - b).abs() <= 1e-12 * b.max(1e-300);
            }
        }
    }
    let start = Instant::now();
    let r = scenario_identities(&IdentityParams {
        fields_per_d: 1000,
        rel_tol: C1_REL_TOL,
        ..Default::default()
    })
    .unwrap();
    let secs = start.elapsed().as_secs_f64();
    let per_d_ok = (1..=3).all(|d| r.measured[&format!("checks_d{d}")] > 0.0);
    let ok = oracle_ok && per_d_ok && r.measured["violations"] == 0.0 && secs < C1_SECONDS;
    verdict_line(
        1,
        ok,
        &format!(
            "checks={} violations={} worst={:.2e} seconds={secs:.1} oracle={oracle_ok}",
            r.measured["checks"], r.measured["violations"], r.measured["worst_relative_excess"]
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_2_heat_slopes() {
    let _g = lock();
    let start = Instant::now();
    let mut ok = true;
    for (d, pt, p, h) in heat_grid() {
        let r = scenario_decay(&heat_params(d, pt, p, h)).unwrap();
        let want = heat_slope(d, pt, p, h);
        let tol = if d == 1 { C2_TOL_1D } else { C2_TOL };
        let got = r.measured["slope"];
        let this = (got - want).abs() <= tol;
        println!("  d={d} p~={pt} p={p} h={h}: slope {got:.4} predicted {want:.4}");
        ok &= this;
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < C2_SECONDS;
    verdict_line(2, ok, &format!("12 fits, seconds={secs:.1}"));
    assert!(ok);
}

#[test]
fn criterion_3_oseen_slope() {
    let _g = lock();
    let start = Instant::now();
    let prm = DecayParams::oseen_small_t();
    assert_eq!(prm.grid().unwrap().len(), 64 * 64 * 64);
    let r = scenario_decay(&prm).unwrap();
    // −(3/2)(2/3 − 1/3) − 1/2.
    let want = -1.5 * (2.0 / 3.0 - 1.0 / 3.0) - 0.5;
    let got = r.measured["slope"];
    let secs = start.elapsed().as_secs_f64();
    let ok = (got - want).abs() <= C3_TOL && secs < C3_SECONDS;
    verdict_line(
        3,
        ok,
        &format!("slope {got:.4} predicted {want:.4} seconds={secs:.1}"),
    );
    assert!(ok);
}

/// `∫_0^∞ w(r) r^{d−1} dr · |S^{d−1}|` by composite Simpson after `r = s/(1−s)`.
fn radial_integral(d: usize, w: impl Fn(f64) -> f64) -> f64 {
    let sphere = [2.0, 2.0 * std::f64::consts::PI, 4.0 * std::f64::consts::PI][d - 1];
    let n = 200_000;
    let h = 1.0 / n as f64;
    let g = |s: f64| {
        if s >= 1.0 {
            return 0.0;
        }
        let r = s / (1.0 - s);
        w(r) * r.powi(d as i32 - 1) / ((1.0 - s) * (1.0 - s))
    };
    let mut acc = g(0.0) + g(1.0);
    for i in 1..n {
        acc += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sphere * acc * h / 3.0
}

/// `‖K(·,1)‖_{L^p(ℝ^d)}` by quadrature; `|∇Γ| = (r/2)Γ` at `t = 1`.
fn unit_time_norm(kernel: KernelKind, d: usize, p: f64) -> f64 {
    let g0 = (4.0 * std::f64::consts::PI).powf(-(d as f64) / 2.0);
    let profile = move |r: f64| match kernel {
        KernelKind::Heat => g0 * (-r * r / 4.0).exp(),
        KernelKind::GradHeat => g0 * r / 2.0 * (-r * r / 4.0).exp(),
        _ => (r + 1.0).powi(-(d as i32) - 1),
    };
    if p.is_infinite() {
        return (0..=100_000)
            .map(|i| profile(i as f64 * 1e-4))
            .fold(0.0, f64::max);
    }
    radial_integral(d, |r| profile(r).powf(p)).powf(1.0 / p)
}

#[test]
fn criterion_4_kernel_flatness() {
    let _g = lock();
    let ex = [1.0, 2.0, f64::INFINITY];
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for kernel in [KernelKind::Heat, KernelKind::Phi] {
        let a = if kernel == KernelKind::Heat { 0.0 } else { 0.5 };
        for d in 1..=3usize {
            for p in ex {
                let cp = unit_time_norm(kernel, d, p);
                for q in ex {
                    let cq = unit_time_norm(kernel, d, q);
                    let r = scenario_kernel_norms(&KernelParams::new(
                        kernel,
                        d,
                        Exponent::of(p),
                        Exponent::of(q),
                    ))
                    .unwrap();
                    let df = d as f64;
                    let ratios: Vec<f64> = r
                        .samples_of("norm")
                        .into_iter()
                        .map(|(t, m)| {
                            let local = cp * t.powf(-a - df / 2.0 + df / (2.0 * p));
                            let keep_tail = t > 1.0 || q <= p;
                            let tail = if keep_tail {
                                cq * t.powf(-a - df / 2.0 + df / (2.0 * q))
                            } else {
                                0.0
                            };
                            m / (local + tail)
                        })
                        .collect();
                    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = ratios.iter().copied().fold(0.0, f64::max);
                    let flat = hi / lo;
                    worst = worst.max(flat);
                    if !(flat <= C4_FLATNESS) {
                        failures.push(format!(
                            "{kernel:?} d={d} (p,q)=({p},{q}) flatness {flat:.3}"
                        ));
                    }
                }
            }
        }
    }
    for f in &failures {
        println!("  {f}");
    }
    let ok = failures.is_empty();
    verdict_line(
        4,
        ok,
        &format!(
            "{} of 54 cases above {C4_FLATNESS}, worst {worst:.3e}",
            failures.len()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_5_giga() {
    let _g = lock();
    let mut ok = true;
    let mut worst = 0.0f64;
    for (d, r, s, p) in [
        (1usize, 2.0, 8.0, 4.0),
        (1, 1.5, 6.0, 3.0),
        (2, 2.0, 4.0, 4.0),
    ] {
        assert!((2.0 / s + d as f64 / p - d as f64 / r).abs() < 1e-12);
        let mut prm = GigaParams::new(d, r, s, p);
        if d == 2 {
            prm.side = 33;
            prm.n = 16;
        }
        assert_eq!(prm.lambdas, vec![1.0, 2.0, 4.0]);
        assert_eq!(prm.shapes.len(), 3);
        let rep = scenario_giga(&prm).unwrap();
        let spread = rep.measured["max_spread"];
        println!("  (d,r,s,p)=({d},{r},{s},{p}): max spread {spread:.2e}");
        worst = worst.max(spread);
        ok &= spread <= C5_SPREAD;
    }
    verdict_line(5, ok, &format!("worst spread {worst:.3e}"));
    assert!(ok);
}

fn least_squares(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let xs: Vec<f64> = (1..=values.len()).map(|k| k as f64).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = values.iter().sum::<f64>() / n;
    let sxy: f64 = xs
        .iter()
        .zip(values)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

#[test]
fn criterion_6_bubble_train() {
    let _g = lock();
    let start = Instant::now();
    let prm = BubbleParams::default();
    assert_eq!((prm.d, prm.bubbles), (1, 6));
    let r = scenario_bubble(&prm).unwrap();
    let uniform: Vec<f64> = r
        .samples_of("uniform_partial_integral")
        .into_iter()
        .map(|(_, v)| v)
        .collect();
    let contrast: Vec<f64> = r
        .samples_of("contrast_partial_integral")
        .into_iter()
        .map(|(_, v)| v)
        .collect();
    let (a, b) = least_squares(&uniform);
    let dev = uniform
        .iter()
        .enumerate()
        .map(|(i, v)| (v - a - b * (i + 1) as f64).abs() / v)
        .fold(0.0, f64::max);
    let k = contrast.len();
    let rho = (contrast[k - 1] - contrast[k - 2]) / (contrast[k - 2] - contrast[k - 3]);
    let secs = start.elapsed().as_secs_f64();
    let ok = b > 0.0 && dev <= C6_LINEAR && rho <= C6_TAIL_RATIO && secs < C6_SECONDS;
    verdict_line(
        6,
        ok,
        &format!(
            "slope {b:.4} linear deviation {dev:.3} contrast tail ratio {rho:.3} seconds={secs:.1}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_7_switches() {
    let _g = lock();
    let prm = SwitchAParams::default();
    let k = prm.bands as f64;
    let a = scenario_switch_a(&prm).unwrap();
    let e11 = a.measured["E11_uloc"];
    let l1 = a.measured["L1_L1uloc"];
    let a_ok = (e11 - 1.0).abs() <= C7_EXACT && (l1 - k).abs() <= C7_EXACT * k;
    let b = scenario_switch_b(&SwitchBParams::default()).unwrap();
    let growth: Vec<(f64, f64)> = b.samples_of("E_inf1_1");
    let increasing = growth.windows(2).all(|w| w[1].1 > w[0].1);
    let b_ok = increasing && growth.len() >= 3 && b.verdict == Verdict::Pass;
    let ok = a_ok && b_ok;
    verdict_line(
        7,
        ok,
        &format!("E11_uloc={e11} L1L1_uloc={l1} (K={k}); E^inf,1 growth {growth:?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_8_picard() {
    let _g = lock();
    let start = Instant::now();
    let mut ok = true;
    for regime in [
        RegimeKind::Subcritical,
        RegimeKind::CriticalSmall,
        RegimeKind::CriticalDecay,
    ] {
        let prm = TheoremParams::new(regime);
        assert_eq!(prm.side * prm.n, 48);
        assert_eq!(prm.seeds.len(), 5);
        assert!(prm.t_cap <= 0.25);
        let r: VerifyReport = scenario_theorem(&prm).unwrap();
        let m = &r.measured;
        let this = m["max_contraction"] <= C8_CONTRACTION
            && m["max_residual"] <= C8_RESIDUAL_FACTOR * prm.contraction_tol
            && m["max_divergence"] <= C8_DIVERGENCE
            && m["persistence_spread"] <= C8_PERSISTENCE
            && r.notes.iter().all(|n| n != "DATA_TOO_LARGE");
        println!(
            "  {regime:?}: contraction {:.2e} residual {:.2e} divergence {:.2e} persistence spread {:.3}",
            m["max_contraction"], m["max_residual"], m["max_divergence"], m["persistence_spread"]
        );
        ok &= this;
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < C8_SECONDS;
    verdict_line(8, ok, &format!("three regimes at 48^3, seconds={secs:.1}"));
    assert!(ok);
}

#[test]
fn criterion_9_regularized() {
    let _g = lock();
    let prm = RegularizedParams::default();
    let r = scenario_regularized(&prm).unwrap();
    let m = &r.measured;
    // Window min(1, ε³/(64‖u₀‖²)).
    let window = (prm.eps.powi(3) / (64.0 * m["data_norm"].powi(2))).min(1.0);
    let window_ok = (m["window"] - window).abs() <= 1e-12 * window && m["t_final"] < window;
    let bound_ok = m["le_norm"] <= C9_FACTOR * m["c0"] * m["data_norm"];
    let mut scaling_ok = true;
    let mut detail = Vec::new();
    for (q, data) in [
        (2.0, AprioriData::Random),
        (1.5, AprioriData::Swirl),
        (1.0, AprioriData::Swirl),
    ] {
        let a = scenario_apriori(&AprioriParams {
            q: Exponent::of(q),
            data,
            ..Default::default()
        })
        .unwrap();
        let norm_sq = a.measured["data_norm_sq"];
        let cs = a.samples_of("c_r");
        let radii: Vec<f64> = cs.iter().map(|c| c.0).collect();
        assert_eq!(radii, vec![1.0, 2.0, 4.0, 8.0]);
        let lo = cs.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        let hi = cs.iter().map(|c| c.1).fold(0.0, f64::max);
        // λ_R = min(λ₀, λ₀R², λ₀R²/A²), λ₀ = 1/64.
        for ((radius, c), (_, lam)) in cs.iter().zip(a.samples_of("lambda_r")) {
            let big_a = c * norm_sq;
            let want = (1.0f64 / 64.0)
                .min(radius * radius / 64.0)
                .min(radius * radius / (64.0 * big_a * big_a));
            scaling_ok &= (lam - want).abs() <= 1e-12 * want;
        }
        scaling_ok &= hi / lo <= C9_SCALING;
        detail.push(format!("q={q}: R*N/|u0|^2 in [{lo:.4}, {hi:.4}]"));
    }
    let ok = window_ok && bound_ok && r.verdict == Verdict::Pass && scaling_ok;
    verdict_line(
        9,
        ok,
        &format!(
            "LE={:.4} <= {C9_FACTOR}*C0*|u0|={:.4}, T={:.4} < window {window:.4}; {}",
            m["le_norm"],
            C9_FACTOR * m["c0"] * m["data_norm"],
            m["t_final"],
            detail.join("; ")
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_10_truncation() {
    let _g = lock();
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut cases: Vec<(String, DecayParams)> = heat_grid()
        .into_iter()
        .map(|(d, pt, p, h)| {
            (
                format!("heat d={d} p~={pt} p={p} h={h}"),
                heat_params(d, pt, p, h),
            )
        })
        .collect();
    cases.push(("oseen".into(), DecayParams::oseen_small_t()));
    for (name, prm) in cases {
        let r = scenario_truncation(&prm, C10_SHIFT).unwrap();
        let shift = (r.measured["slope"] - r.measured["slope_doubled"]).abs();
        println!("  {name}: shift {shift:.2e}");
        worst = worst.max(shift);
        ok &= shift < C10_SHIFT;
    }
    verdict_line(10, ok, &format!("13 fits, worst shift {worst:.3e}"));
    assert!(ok);
}
