use std::fs;
use std::path::Path;

use amalgam_verify::params::Params;
use anyhow::{bail, Context, Result};
use toml::{Table, Value};

/// Parses `key=value` with the value read as TOML, falling back to a bare
/// string (`q=3/2`, `case=P_GT_Q`).
pub fn parse_assignment(s: &str) -> Result<(String, Value)> {
    let Some((k, v)) = s.split_once('=') else {
        bail!("expected key=value, got {s:?}");
    };
    let k = k.trim();
    if k.is_empty() {
        bail!("empty key in {s:?}");
    }
    let v = v.trim();
    let value = match format!("x = {v}").parse::<Table>() {
        Ok(mut t) => t.remove("x").expect("key present"),
        Err(_) => Value::String(v.to_string()),
    };
    Ok((k.to_string(), value))
}

/// Reads the TOML file (if any), narrows to `[section]` when present and
/// applies overrides in order.
pub fn load(path: Option<&Path>, section: Option<&str>, sets: &[String]) -> Result<Params> {
    let mut table = match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            text.parse::<Table>()
                .with_context(|| format!("parsing {}", p.display()))?
        }
        None => Table::new(),
    };
    if let Some(name) = section {
        if let Some(Value::Table(sub)) = table.remove(name) {
            table = sub;
        }
    }
    for s in sets {
        let (k, v) = parse_assignment(s)?;
        table.insert(k, v);
    }
    Ok(Params::new(table))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assignments() {
        assert_eq!(parse_assignment("n=4").unwrap().1, Value::Integer(4));
        assert_eq!(
            parse_assignment("q = 3/2").unwrap().1,
            Value::String("3/2".into())
        );
        assert_eq!(
            parse_assignment("r=[1, 2]")
                .unwrap()
                .1
                .as_array()
                .unwrap()
                .len(),
            2
        );
        assert_eq!(
            parse_assignment("s=\"inf\"").unwrap().1,
            Value::String("inf".into())
        );
        assert!(parse_assignment("novalue").is_err());
    }

    #[test]
    fn section_then_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        fs::write(&p, "seed = 1\n[giga]\nd = 2\nside = 9\n").unwrap();
        let mut ps = load(Some(&p), Some("giga"), &["side=5".into()]).unwrap();
        assert_eq!(ps.usize("d", 1).unwrap(), 2);
        assert_eq!(ps.usize("side", 1).unwrap(), 5);
        assert!(!ps.contains("seed"));
        let ps = load(Some(&p), Some("absent"), &[]).unwrap();
        assert!(ps.contains("giga"));
    }
}
