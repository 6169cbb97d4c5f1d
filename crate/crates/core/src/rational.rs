//! Helpers for exact rationals: parsing, rendering and serde adapters.
//!
//! Rationals are written as `"num/den"` in lowest terms, with `"/1"` omitted
//! for integers. Parsing additionally accepts finite decimals (`"2.5"`).

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parse `"n"`, `"n/d"` or a finite decimal such as `"-0.125"` exactly.
pub fn parse(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{int_digits}{frac}").parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10u32), frac.len());
        let value = BigRational::new(digits, scale);
        return Ok(if negative { -value } else { value });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Render in lowest terms as `"num/den"` (or `"num"` when the denominator is 1).
pub fn render(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest `f64`; falls back to a scaled division for huge operands.
pub fn to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let (n, d) = (r.numer(), r.denom());
    let shift = n.bits().max(d.bits()).saturating_sub(1000);
    let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Exact conversion of a finite double (every finite double is a dyadic rational).
pub fn from_f64_exact(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Decimal string with 15 significant digits, used as a readable sidecar.
pub fn decimal(r: &BigRational) -> String {
    format_sig(to_f64(r))
}

pub fn format_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{v:.14e}");
    // Normalise through a round-trip so trailing zeros disappear.
    let parsed: f64 = s.parse().unwrap_or(v);
    format!("{parsed}")
}

/// `2^k` as a rational.
pub fn pow2(k: u32) -> BigRational {
    BigRational::from_integer(BigInt::one() << k)
}

/// Returns `k` when `r == 2^k` for some integer `k` (possibly negative).
pub fn log2_exact(r: &BigRational) -> Option<i64> {
    if !r.is_positive() {
        return None;
    }
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    let is_pow2 = |m: &BigUint| m.count_ones() == 1;
    if !is_pow2(n) || !is_pow2(d) {
        return None;
    }
    Some(n.trailing_zeros()? as i64 - d.trailing_zeros()? as i64)
}

/// Serde adapter serialising a `BigRational` as its `"num/den"` string.
pub mod serde_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&render(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}
