//! Exact truth values in the unit interval.
//!
//! Truth is `0` and falsity is `1`; the ordering on values is the usual one
//! on rationals, so a *smaller* value is *more true*.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Unbounded exact rational, used for raw distance tables and connective
/// intermediate results.
pub type Rational = Ratio<i64>;

/// An exact rational in `[0,1]`, kept in lowest terms.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Value(Rational);

impl Value {
    pub const ZERO: Value = Value(Ratio::new_raw(0, 1));
    pub const ONE: Value = Value(Ratio::new_raw(1, 1));

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::BadRational(format!("{num}/{den}")));
        }
        Self::from_ratio(Ratio::new(num, den))
    }

    pub fn from_ratio(r: Rational) -> Result<Self> {
        if r < Rational::zero() || r > Rational::one() {
            return Err(Error::ValueOutOfRange(r.to_string()));
        }
        Ok(Value(r))
    }

    /// `1/2^k`.
    pub fn dyadic(k: u32) -> Self {
        assert!(k < 62, "dyadic exponent too large");
        Value(Ratio::new(1, 1i64 << k))
    }

    pub fn ratio(self) -> Rational {
        self.0
    }

    pub fn numer(self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(self) -> bool {
        self.0.is_one()
    }

    pub fn half(self) -> Self {
        Value(self.0 / 2)
    }

    /// `min(a + b, 1)`.
    pub fn truncated_add(self, other: Value) -> Result<Self> {
        let s = self
            .0
            .checked_add(&other.0)
            .ok_or(Error::Overflow("addition"))?;
        Ok(Value(s.min(Rational::one())))
    }

    /// `max(a - b, 0)`.
    pub fn truncated_sub(self, other: Value) -> Result<Self> {
        let s = self
            .0
            .checked_sub(&other.0)
            .ok_or(Error::Overflow("subtraction"))?;
        Ok(Value(s.max(Rational::zero())))
    }

    pub fn mul(self, other: Value) -> Result<Self> {
        let p = self
            .0
            .checked_mul(&other.0)
            .ok_or(Error::Overflow("multiplication"))?;
        Ok(Value(p))
    }

    /// `1 - a`.
    pub fn complement(self) -> Self {
        Value(Rational::one() - self.0)
    }

    /// Linear interpolation `a + t (b - a)`; `t` must lie in `[0,1]`.
    pub fn lerp(a: Value, b: Value, t: Rational) -> Result<Self> {
        let diff =
            b.0.checked_sub(&a.0)
                .ok_or(Error::Overflow("interpolation"))?;
        let step = diff
            .checked_mul(&t)
            .ok_or(Error::Overflow("interpolation"))?;
        let v =
            a.0.checked_add(&step)
                .ok_or(Error::Overflow("interpolation"))?;
        Value::from_ratio(v)
    }
}

/// Parses `p/q` or an integer into a (not necessarily bounded) rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::BadRational(s.to_string());
    let t = s.trim();
    match t.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Ratio::new(p, q))
        }
        None => t
            .parse::<i64>()
            .map(Rational::from_integer)
            .map_err(|_| bad()),
    }
}

/// Always renders `p/q`, including `0/1` and `1/1`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl FromStr for Value {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Value::from_ratio(parse_rational(s)?)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
