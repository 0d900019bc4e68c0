use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Nonnegative extended real: a finite value or `+∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PlusInfinity,
}

impl ExtReal {
    pub const ZERO: Self = Self::Finite(0.0);

    /// Panics on NaN or negative input; `f64::INFINITY` maps to `PlusInfinity`.
    pub fn finite(v: f64) -> Self {
        assert!(!v.is_nan(), "ExtReal from NaN");
        assert!(v >= 0.0, "ExtReal from negative value {v}");
        if v.is_infinite() {
            Self::PlusInfinity
        } else {
            Self::Finite(v)
        }
    }

    /// Like [`Self::finite`] but clamps tiny negative roundoff to zero.
    pub fn from_f64(v: f64) -> Self {
        Self::finite(if v < 0.0 && v > -1e-300 { 0.0 } else { v })
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Self::PlusInfinity)
    }

    pub fn is_zero(self) -> bool {
        self == Self::ZERO
    }

    pub fn value(self) -> f64 {
        match self {
            Self::Finite(v) => v,
            Self::PlusInfinity => f64::INFINITY,
        }
    }

    /// `w·self` for `w >= 0` with `0·∞ = 0`.
    pub fn scale(self, w: f64) -> Self {
        match self {
            Self::PlusInfinity if w > 0.0 => Self::PlusInfinity,
            Self::PlusInfinity => Self::ZERO,
            Self::Finite(v) => Self::finite(w * v),
        }
    }
}

impl Add for ExtReal {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Self::Finite(a), Self::Finite(b)) => Self::finite(a + b),
            _ => Self::PlusInfinity,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value().partial_cmp(&other.value())
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::PlusInfinity => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Finite(v) => s.serialize_f64(*v),
            Self::PlusInfinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) if v >= 0.0 => Ok(Self::finite(v)),
            Raw::Num(v) => Err(serde::de::Error::custom(format!("negative value {v}"))),
            Raw::Text(t) if t == "inf" => Ok(Self::PlusInfinity),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {t:?}"))),
        }
    }
}

/// Neumaier's compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}
