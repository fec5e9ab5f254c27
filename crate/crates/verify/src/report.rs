use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fit::ScalingFit;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
    /// Measurement without a verdict.
    Measured,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Pass if both pass; any failure wins, then not-applicable.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (NotApplicable, _) | (_, NotApplicable) => NotApplicable,
            (Measured, x) | (x, Measured) => x,
            (Pass, Pass) => Pass,
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass | Verdict::Measured => 0,
            Verdict::Fail => 1,
            Verdict::NotApplicable => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::NotApplicable => "NOT_APPLICABLE",
            Verdict::Measured => "MEASURED",
        };
        f.write_str(s)
    }
}

/// JSON has no infinities; non-finite reals are written as strings.
mod real {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    struct RealVisitor;

    impl<'de> Visitor<'de> for RealVisitor {
        type Value = f64;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(E::custom(format!("bad real {v:?}"))),
            }
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(RealVisitor)
    }

    pub mod map {
        use serde::de::Deserializer;
        use serde::ser::{SerializeMap, Serializer};
        use serde::Deserialize;
        use std::collections::BTreeMap;

        #[derive(serde::Serialize, Deserialize)]
        struct W(#[serde(with = "super")] f64);

        pub fn serialize<S: Serializer>(
            m: &BTreeMap<String, f64>,
            s: S,
        ) -> Result<S::Ok, S::Error> {
            let mut out = s.serialize_map(Some(m.len()))?;
            for (k, v) in m {
                out.serialize_entry(k, &W(*v))?;
            }
            out.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<BTreeMap<String, f64>, D::Error> {
            let m = BTreeMap::<String, W>::deserialize(d)?;
            Ok(m.into_iter().map(|(k, w)| (k, w.0)).collect())
        }
    }
}

/// One row of the long-format sample table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub param: String,
    #[serde(with = "real")]
    pub t: f64,
    #[serde(with = "real")]
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub scenario: String,
    pub seed: Option<u64>,
    /// The configuration the run was made with, rendered as strings.
    pub params: BTreeMap<String, String>,
    #[serde(with = "real::map")]
    pub measured: BTreeMap<String, f64>,
    #[serde(with = "real::map")]
    pub predicted: BTreeMap<String, f64>,
    #[serde(with = "real")]
    pub tolerance: f64,
    pub verdict: Verdict,
    /// Which estimate the predictions come from.
    pub provenance: String,
    pub fits: BTreeMap<String, ScalingFit>,
    pub samples: Vec<Sample>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn new(scenario: impl Into<String>, provenance: impl Into<String>) -> Self {
        VerifyReport {
            scenario: scenario.into(),
            seed: None,
            params: BTreeMap::new(),
            measured: BTreeMap::new(),
            predicted: BTreeMap::new(),
            tolerance: 0.0,
            verdict: Verdict::Measured,
            provenance: provenance.into(),
            fits: BTreeMap::new(),
            samples: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn measure(&mut self, key: &str, value: f64) -> &mut Self {
        self.measured.insert(key.to_string(), value);
        self
    }

    pub fn predict(&mut self, key: &str, value: f64) -> &mut Self {
        self.predicted.insert(key.to_string(), value);
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn sample(&mut self, param: &str, t: f64, value: f64) -> &mut Self {
        self.samples.push(Sample {
            param: param.to_string(),
            t,
            value,
        });
        self
    }

    pub fn samples_of(&self, param: &str) -> Vec<(f64, f64)> {
        self.samples
            .iter()
            .filter(|s| s.param == param)
            .map(|s| (s.t, s.value))
            .collect()
    }

    /// Folds a sub-verdict into the report verdict.
    pub fn fold(&mut self, v: Verdict) -> &mut Self {
        self.verdict = if self.verdict == Verdict::Measured {
            v
        } else {
            self.verdict.and(v)
        };
        self
    }

    /// One-line summary.
    pub fn summary(&self) -> String {
        let mut s = format!("{} [{}]", self.scenario, self.verdict);
        for (k, v) in &self.measured {
            s.push_str(&format!(" {k}={v:.4}"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_combine() {
        use Verdict::*;
        assert_eq!(Pass.and(Fail), Fail);
        assert_eq!(NotApplicable.and(Pass), NotApplicable);
        assert_eq!(Measured.and(Pass), Pass);
        let mut r = VerifyReport::new("x", "y");
        r.fold(Pass).fold(Pass);
        assert_eq!(r.verdict, Pass);
        r.fold(Fail);
        assert_eq!(r.verdict, Fail);
    }

    #[test]
    fn non_finite_values_round_trip() {
        let mut r = VerifyReport::new("x", "y");
        r.measure("a", f64::INFINITY)
            .measure("b", 0.1 + 0.2)
            .sample("s", 1e-300, f64::NEG_INFINITY);
        let back: VerifyReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
