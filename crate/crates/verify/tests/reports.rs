use amalgam_verify::catalog;
use amalgam_verify::emit::{emit_report, from_json, to_json};
use amalgam_verify::params::Params;
use amalgam_verify::{fit_exponent, Verdict};

#[test]
fn catalog_reports_round_trip_through_json() {
    let mut ps = Params::parse("bands = 4").unwrap();
    let reports = catalog::run("switch_a", &mut ps).unwrap();
    let back = from_json(&to_json(&reports).unwrap()).unwrap();
    assert_eq!(back, reports);
}

#[test]
fn emitted_files_match_reports() {
    let mut ps = Params::parse("d = 1").unwrap();
    let reports = catalog::run("decay_heat", &mut ps).unwrap();
    assert_eq!(
        reports[0].verdict,
        Verdict::Pass,
        "{}",
        reports[0].summary()
    );
    let dir = tempfile::tempdir().unwrap();
    let out = emit_report(&reports, dir.path()).unwrap();
    assert_eq!(out.svgs.len(), 1);
    let csv = std::fs::read_to_string(&out.csv).unwrap();
    let rows = csv.lines().count() - 1;
    let samples: usize = reports.iter().map(|r| r.samples.len()).sum();
    assert_eq!(rows, samples);
}

#[test]
fn fitted_power_law_from_samples() {
    let samples: Vec<(f64, f64)> = (0..8)
        .map(|j| {
            let t = 2f64.powi(j);
            (t, 3.0 * t.powf(-0.75))
        })
        .collect();
    let fit = fit_exponent(&samples, (1.0, 128.0)).unwrap();
    assert!((fit.slope + 0.75).abs() < 1e-12);
    assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
}
