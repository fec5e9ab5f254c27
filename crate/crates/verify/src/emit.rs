use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use amalgam_core::error::{Error, Result};

use crate::report::VerifyReport;

/// Paths written by [`emit_report`].
#[derive(Clone, Debug, Default)]
pub struct Emitted {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub svgs: Vec<PathBuf>,
}

/// Long-format table `scenario,param,t,value`.
pub fn write_csv<W: Write>(w: W, reports: &[VerifyReport]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["scenario", "param", "t", "value"])?;
    for r in reports {
        for s in &r.samples {
            out.write_record([
                r.scenario.as_str(),
                s.param.as_str(),
                &s.t.to_string(),
                &s.value.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn to_json(reports: &[VerifyReport]) -> Result<String> {
    serde_json::to_string_pretty(reports).map_err(|e| Error::Format(e.to_string()))
}

pub fn from_json(text: &str) -> Result<Vec<VerifyReport>> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Log-log plot of every sample series in the report with positive
/// coordinates; a fitted line is drawn for each fit.
pub fn render_svg(r: &VerifyReport) -> String {
    let (w, h, pad) = (640.0, 420.0, 56.0);
    let mut series: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for s in &r.samples {
        if s.t > 0.0 && s.value > 0.0 && s.t.is_finite() && s.value.is_finite() {
            series
                .entry(&s.param)
                .or_default()
                .push((s.t.log10(), s.value.log10()));
        }
    }
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{} [{}]</text>"#,
        w / 2.0,
        escape(&r.scenario),
        r.verdict
    );
    let pts: Vec<(f64, f64)> = series.values().flatten().copied().collect();
    if pts.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">no positive samples</text>"#,
            w / 2.0,
            h / 2.0
        );
        svg.push_str("</svg>\n");
        return svg;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for (x, y) in &pts {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    if x1 - x0 < 1e-9 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-9 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let _ = writeln!(
        svg,
        r##"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">log10 t  [{x0:.2}, {x1:.2}]</text>"#,
        w / 2.0,
        h - 16.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{}" font-family="sans-serif" font-size="11" transform="rotate(-90 14 {})" text-anchor="middle">log10 value  [{y0:.2}, {y1:.2}]</text>"#,
        h / 2.0,
        h / 2.0
    );
    for (i, (name, p)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = p
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        for (x, y) in p {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                sx(*x),
                sy(*y)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
            w - pad + 4.0 - 120.0,
            pad + 14.0 * (i as f64 + 1.0),
            escape(name)
        );
    }
    for fit in r.fits.values() {
        let (a, b) = (fit.t_min.log10(), fit.t_max.log10());
        let fy = |lx: f64| {
            (fit.intercept + fit.slope * lx * std::f64::consts::LN_10) / std::f64::consts::LN_10
        };
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#000" stroke-dasharray="4 3"/>"##,
            sx(a),
            sy(fy(a)),
            sx(b),
            sy(fy(b))
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn file_stem(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes `reports.csv`, `reports.json` and one SVG per report into `dir`.
pub fn emit_report(reports: &[VerifyReport], dir: &Path) -> Result<Emitted> {
    fs::create_dir_all(dir)?;
    let csv = dir.join("reports.csv");
    write_csv(fs::File::create(&csv)?, reports)?;
    let json = dir.join("reports.json");
    fs::write(&json, to_json(reports)?)?;
    let mut svgs = Vec::new();
    for (i, r) in reports.iter().enumerate() {
        let p = dir.join(format!("{:02}_{}.svg", i, file_stem(&r.scenario)));
        fs::write(&p, render_svg(r))?;
        svgs.push(p);
    }
    Ok(Emitted { csv, json, svgs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Verdict;

    #[test]
    fn empty_list_gives_header_only() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "scenario,param,t,value\n");
    }

    #[test]
    fn svg_handles_empty_and_nonpositive_samples() {
        let mut r = VerifyReport::new("a<b", "none");
        r.sample("x", 0.0, -1.0);
        let s = render_svg(&r);
        assert!(s.contains("no positive samples") && s.contains("a&lt;b"));
        r.verdict = Verdict::Pass;
        r.sample("x", 1.0, 2.0).sample("x", 2.0, 3.0);
        assert!(render_svg(&r).contains("polyline"));
    }
}
