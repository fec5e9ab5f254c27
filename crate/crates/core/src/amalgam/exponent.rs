use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Lebesgue-type exponent in `[1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INF: Exponent = Exponent(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 1.0 {
            return Err(Error::Domain(format!("exponent {value} is below 1")));
        }
        Ok(Exponent(value))
    }

    /// Panicking constructor for literals.
    pub fn of(value: f64) -> Self {
        Self::new(value).expect("exponent must lie in [1, inf]")
    }

    /// Exponent with the given reciprocal; `0` maps to `∞`.
    pub fn from_recip(recip: f64) -> Result<Self> {
        if !(0.0..=1.0 + 1e-12).contains(&recip) {
            return Err(Error::Domain(format!("reciprocal {recip} outside [0,1]")));
        }
        if recip == 0.0 {
            Ok(Self::INF)
        } else {
            Ok(Exponent((1.0 / recip).max(1.0)))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn recip(self) -> f64 {
        if self.0.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// The value, or `None` for `∞`.
    pub fn finite(self) -> Option<f64> {
        (!self.is_infinite()).then_some(self.0)
    }

    /// Hölder conjugate `p'`.
    pub fn conjugate(self) -> Self {
        if self.0 == 1.0 {
            Self::INF
        } else if self.is_infinite() {
            Self::ONE
        } else {
            Exponent(self.0 / (self.0 - 1.0))
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => return Ok(Self::INF),
            _ => {}
        }
        let value = if let Some((a, b)) = s.split_once('/') {
            let a: f64 = a.trim().parse().map_err(|_| Error::Format(s.into()))?;
            let b: f64 = b.trim().parse().map_err(|_| Error::Format(s.into()))?;
            a / b
        } else {
            s.parse()
                .map_err(|_| Error::Format(format!("bad exponent {s:?}")))?
        };
        Self::new(value)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            ser.serialize_str("inf")
        } else {
            ser.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(v) => Exponent::new(v).map_err(de::Error::custom),
            Raw::Text(s) => s.parse().map_err(de::Error::custom),
        }
    }
}
