//! Exact rational numbers.
//!
//! Every quantity in this crate (coalition values, balancing weights,
//! payoffs, measure weights) is a [`Rational`]: an arbitrary precision,
//! always-reduced fraction with a positive denominator.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::Error;

pub type Rational = BigRational;

/// Builds `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Builds `num/den`. Panics on a zero denominator.
pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"` or `"p"` (optionally signed, surrounding whitespace allowed).
pub fn parse(text: &str) -> Result<Rational, Error> {
    let trimmed = text.trim();
    let bad = || Error::InvalidRational(text.to_string());
    if trimmed.is_empty() {
        return Err(bad());
    }
    match trimmed.split_once('/') {
        Some((num, den)) => {
            let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
            let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(num, den))
        }
        None => {
            let num = BigInt::from_str(trimmed).map_err(|_| bad())?;
            Ok(Rational::from_integer(num))
        }
    }
}

/// Canonical text form: `"p/q"` when the denominator is not one, else `"p"`.
pub fn format(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Lossy conversion for display only.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn abs(value: &Rational) -> Rational {
    value.abs()
}

/// Serde adapter writing rationals as strings.
pub fn serialize<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&format(value))
}

pub fn serialize_vec<S: Serializer>(values: &[Rational], serializer: S) -> Result<S::Ok, S::Error> {
    let text: Vec<String> = values.iter().map(format).collect();
    text.serialize(serializer)
}

pub fn serialize_opt<S: Serializer>(
    value: &Option<Rational>,
    serializer: S,
) -> Result<S::Ok, S::Error> {
    value.as_ref().map(format).serialize(serializer)
}

/// Exact partial sum of the harmonic series, `1 + 1/2 + ... + 1/n`.
pub fn harmonic(n: u32) -> Rational {
    sum((1..=n).map(|k| frac(1, i64::from(k))))
}

/// Exact sum, added pairwise so that long sums of small fractions stay cheap.
pub fn sum<I: IntoIterator<Item = Rational>>(terms: I) -> Rational {
    let mut level: Vec<Rational> = terms.into_iter().filter(|t| !t.is_zero()).collect();
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        let mut it = level.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a + b,
                None => a,
            });
        }
        level = next;
    }
    level.pop().unwrap_or_else(Rational::zero)
}
