//! Exact fixed-point numbers for preference values and thresholds.
//!
//! Values are stored as integer multiples of half a grid step, where one grid
//! step is `10^-6`. The extra factor of two lets the reduction constructors
//! place thresholds strictly between grid points without leaving exact
//! integer arithmetic.

use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Internal units per `1.0`.
pub const UNITS_PER_ONE: i64 = 2_000_000;
/// One grid step (`10^-6`) in internal units.
pub const GRID_STEP: i64 = 2;
/// Half a grid step in internal units; the smallest representable positive value.
pub const HALF_STEP: i64 = 1;

/// Largest accepted integer part when parsing.
const MAX_INTEGER_PART: i64 = 1_000_000_000_000;

/// A fixed-point rational, or one of the two saturating infinities.
///
/// `Infinity` is only meaningful as a threshold. `NegInfinity` shows up as a
/// ranking key (`p - inf`) and is never accepted from input files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    NegInfinity,
    Finite(i64),
    Infinity,
}

impl Value {
    pub const ZERO: Value = Value::Finite(0);

    pub const fn from_units(units: i64) -> Value {
        Value::Finite(units)
    }

    /// Whole number `n` as a value.
    pub const fn int(n: i64) -> Value {
        Value::Finite(n * UNITS_PER_ONE)
    }

    /// `n` grid steps (`n * 10^-6`).
    pub const fn steps(n: i64) -> Value {
        Value::Finite(n * GRID_STEP)
    }

    pub fn units(self) -> Option<i64> {
        match self {
            Value::Finite(u) => Some(u),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Value::Finite(_))
    }

    /// True if the value lies on the public `10^-6` grid.
    pub fn on_grid(self) -> bool {
        matches!(self, Value::Finite(u) if u % GRID_STEP == 0)
    }
}

impl Sub for Value {
    type Output = Value;

    /// Saturating difference. An infinite right-hand side yields the opposite
    /// infinity; an infinite left-hand side with finite right-hand side stays put.
    fn sub(self, rhs: Value) -> Value {
        match (self, rhs) {
            (Value::Finite(a), Value::Finite(b)) => Value::Finite(a - b),
            (_, Value::Infinity) => Value::NegInfinity,
            (_, Value::NegInfinity) => Value::Infinity,
            (lhs, Value::Finite(_)) => lhs,
        }
    }
}

impl Add for Value {
    type Output = Value;

    fn add(self, rhs: Value) -> Value {
        match (self, rhs) {
            (Value::Finite(a), Value::Finite(b)) => Value::Finite(a + b),
            (Value::Infinity, _) | (_, Value::Infinity) => Value::Infinity,
            _ => Value::NegInfinity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid number {input:?}: {reason}")]
pub struct ParseValueError {
    pub input: String,
    pub reason: &'static str,
}

impl FromStr for Value {
    type Err = ParseValueError;

    fn from_str(s: &str) -> Result<Value, ParseValueError> {
        let err = |reason| ParseValueError { input: s.to_string(), reason };
        match s {
            "inf" => return Ok(Value::Infinity),
            "-inf" => return Ok(Value::NegInfinity),
            _ => {}
        }
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("expected decimal digits"));
        }
        if body.contains('.') && frac_part.is_empty() {
            return Err(err("empty fraction"));
        }
        if !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("expected decimal digits"));
        }
        if frac_part.len() > 7 {
            return Err(err("more than 7 fraction digits"));
        }
        if frac_part.len() == 7 && !matches!(frac_part.as_bytes()[6], b'0' | b'5') {
            return Err(err("7th fraction digit must be 0 or 5"));
        }
        if int_part.len() > 13 {
            return Err(err("magnitude too large"));
        }
        let int: i64 = int_part.parse().map_err(|_| err("expected decimal digits"))?;
        if int > MAX_INTEGER_PART {
            return Err(err("magnitude too large"));
        }
        // fraction in units of 10^-7 == half steps / 5
        let mut tenth_micros: i64 = 0;
        for (i, b) in frac_part.bytes().enumerate() {
            tenth_micros += i64::from(b - b'0') * 10i64.pow(6 - i as u32);
        }
        let units = int * UNITS_PER_ONE + tenth_micros / 5;
        Ok(Value::Finite(if negative { -units } else { units }))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Value::Infinity => f.write_str("inf"),
            Value::NegInfinity => f.write_str("-inf"),
            Value::Finite(u) => {
                let sign = if u < 0 { "-" } else { "" };
                let abs = u.unsigned_abs();
                let int = abs / UNITS_PER_ONE as u64;
                let frac = (abs % UNITS_PER_ONE as u64) * 5;
                if frac == 0 {
                    write!(f, "{sign}{int}")
                } else {
                    let digits = format!("{frac:07}");
                    write!(f, "{sign}{int}.{}", digits.trim_end_matches('0'))
                }
            }
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Value, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_and_prints() {
        assert_eq!("1".parse::<Value>().unwrap(), Value::int(1));
        assert_eq!("0.5".parse::<Value>().unwrap(), Value::from_units(UNITS_PER_ONE / 2));
        assert_eq!("0.000001".parse::<Value>().unwrap(), Value::steps(1));
        assert_eq!("0.0000005".parse::<Value>().unwrap(), Value::from_units(HALF_STEP));
        assert_eq!("-2.25".parse::<Value>().unwrap(), Value::from_units(-9 * UNITS_PER_ONE / 4));
        assert_eq!("inf".parse::<Value>().unwrap(), Value::Infinity);
        assert_eq!(Value::from_units(HALF_STEP).to_string(), "0.0000005");
        assert_eq!(Value::int(3).to_string(), "3");
        assert_eq!(Value::from_units(-3).to_string(), "-0.0000015");
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "-", "1.", ".5", "1.00000001", "0.0000003", "1e3", "infinity", "1,5", "99999999999999"] {
            assert!(bad.parse::<Value>().is_err(), "{bad}");
        }
    }

    #[test]
    fn saturating_arithmetic() {
        let one = Value::int(1);
        assert_eq!(Value::Infinity - one, Value::Infinity);
        assert_eq!(one - Value::Infinity, Value::NegInfinity);
        assert_eq!(one + Value::Infinity, Value::Infinity);
        assert!(Value::NegInfinity < Value::Finite(i64::MIN));
        assert!(Value::Finite(i64::MAX) < Value::Infinity);
        assert!(!(Value::int(1_000_000) >= Value::Infinity));
    }

    proptest! {
        #[test]
        fn display_round_trips(units in -4_000_000_000_000i64..4_000_000_000_000i64) {
            let v = Value::from_units(units);
            prop_assert_eq!(v.to_string().parse::<Value>().unwrap(), v);
        }
    }
}
