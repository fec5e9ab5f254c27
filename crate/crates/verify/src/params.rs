use amalgam_core::error::{Error, Result};
use amalgam_core::Exponent;
use toml::{Table, Value};

/// Scenario parameters read from a TOML table, with defaults supplied at
/// each lookup. Every value used is echoed into [`Params::used`] so reports
/// can record the full configuration.
#[derive(Clone, Debug, Default)]
pub struct Params {
    table: Table,
    used: Vec<(String, String)>,
}

fn bad(key: &str, what: &str) -> Error {
    Error::Format(format!("parameter {key:?}: expected {what}"))
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        Value::String(s) => match s.trim() {
            "inf" | "infinity" | "∞" => Some(f64::INFINITY),
            t => {
                if let Some((a, b)) = t.split_once('/') {
                    Some(a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?)
                } else {
                    t.parse().ok()
                }
            }
        },
        _ => None,
    }
}

impl Params {
    pub fn new(table: Table) -> Self {
        Params {
            table,
            used: Vec::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Format(e.to_string()))?;
        Ok(Params::new(table))
    }

    /// Sub-table `name`, empty if absent.
    pub fn section(&self, name: &str) -> Result<Params> {
        match self.table.get(name) {
            None => Ok(Params::default()),
            Some(Value::Table(t)) => Ok(Params::new(t.clone())),
            Some(_) => Err(bad(name, "a table")),
        }
    }

    pub fn contains(&self, key: &str) -> bool {
        self.table.contains_key(key)
    }

    fn record(&mut self, key: &str, v: impl ToString) {
        self.used.push((key.to_string(), v.to_string()));
    }

    /// Sets `key` unless the table already has it.
    pub fn set_default(&mut self, key: &str, value: impl Into<Value>) {
        self.table.entry(key.to_string()).or_insert(value.into());
    }

    /// Sets `key`, replacing any existing value.
    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.table.insert(key.to_string(), value.into());
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn used(&self) -> &[(String, String)] {
        &self.used
    }

    pub fn f64(&mut self, key: &str, default: f64) -> Result<f64> {
        let v = match self.table.get(key) {
            None => default,
            Some(v) => as_f64(v).ok_or_else(|| bad(key, "a number"))?,
        };
        self.record(key, v);
        Ok(v)
    }

    pub fn usize(&mut self, key: &str, default: usize) -> Result<usize> {
        let v = match self.table.get(key) {
            None => default,
            Some(Value::Integer(i)) if *i >= 0 => *i as usize,
            Some(_) => return Err(bad(key, "a nonnegative integer")),
        };
        self.record(key, v);
        Ok(v)
    }

    pub fn u64(&mut self, key: &str, default: u64) -> Result<u64> {
        self.usize(key, default as usize).map(|v| v as u64)
    }

    pub fn exponent(&mut self, key: &str, default: Exponent) -> Result<Exponent> {
        let v = match self.table.get(key) {
            None => default,
            Some(v) => Exponent::new(as_f64(v).ok_or_else(|| bad(key, "an exponent"))?)?,
        };
        self.record(key, v);
        Ok(v)
    }

    pub fn string(&mut self, key: &str, default: &str) -> Result<String> {
        let v = match self.table.get(key) {
            None => default.to_string(),
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(bad(key, "a string")),
        };
        self.record(key, &v);
        Ok(v)
    }

    pub fn f64_list(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        let v = match self.table.get(key) {
            None => default.to_vec(),
            Some(Value::Array(a)) => a
                .iter()
                .map(|x| as_f64(x).ok_or_else(|| bad(key, "a list of numbers")))
                .collect::<Result<_>>()?,
            Some(_) => return Err(bad(key, "a list of numbers")),
        };
        self.record(key, format!("{v:?}"));
        Ok(v)
    }
}
