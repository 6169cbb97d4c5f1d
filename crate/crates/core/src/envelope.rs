//! Exact amounts, envelope pairs and the two baseline expectation formulas.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational;

/// A nonnegative, exact quantity of (unitless) currency.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Amount(BigRational);

impl Amount {
    pub fn new(value: BigRational) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::Parse(format!(
                "amounts cannot be negative: {}",
                rational::render(&value)
            )));
        }
        Ok(Amount(value))
    }

    pub fn from_integer(n: u64) -> Self {
        Amount(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num/den`; panics on a zero denominator.
    pub fn ratio(num: u64, den: u64) -> Self {
        Amount(BigRational::new(num.into(), den.into()))
    }

    pub fn zero() -> Self {
        Amount(BigRational::zero())
    }

    /// Exact image of a finite nonnegative double.
    pub fn from_f64_exact(x: f64) -> Result<Self> {
        rational::from_f64_exact(x)
            .ok_or_else(|| Error::Parse(format!("not a finite number: {x}")))
            .and_then(Amount::new)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn double(&self) -> Amount {
        Amount(&self.0 * BigRational::from_integer(2.into()))
    }

    pub fn halve(&self) -> Amount {
        Amount(&self.0 / BigRational::from_integer(2.into()))
    }

    /// Multiply by a nonnegative rational factor.
    pub fn scale(&self, factor: &BigRational) -> Result<Amount> {
        Amount::new(&self.0 * factor)
    }

    /// `self - other`, which may be negative and is therefore a plain rational.
    pub fn signed_diff(&self, other: &Amount) -> BigRational {
        &self.0 - &other.0
    }

    pub fn to_f64(&self) -> f64 {
        rational::to_f64(&self.0)
    }

    fn require_positive(&self) -> Result<()> {
        if self.is_positive() {
            Ok(())
        } else {
            Err(Error::NonPositiveAmount(self.to_string()))
        }
    }
}

impl Add for &Amount {
    type Output = Amount;
    fn add(self, rhs: &Amount) -> Amount {
        Amount(&self.0 + &rhs.0)
    }
}

impl Add for Amount {
    type Output = Amount;
    fn add(self, rhs: Amount) -> Amount {
        Amount(self.0 + rhs.0)
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational::render(&self.0))
    }
}

impl fmt::Debug for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Amount({self})")
    }
}

impl FromStr for Amount {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Amount::new(rational::parse(s)?)
    }
}

impl From<u64> for Amount {
    fn from(n: u64) -> Self {
        Amount::from_integer(n)
    }
}

impl Serialize for Amount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Amount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The pair `{x, 2x}`; `smaller` is strictly positive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EnvelopePair {
    smaller: Amount,
    larger: Amount,
}

impl EnvelopePair {
    pub fn smaller(&self) -> &Amount {
        &self.smaller
    }

    pub fn larger(&self) -> &Amount {
        &self.larger
    }
}

/// An envelope pair together with which amount ended up in envelope A.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pair: EnvelopePair,
    a_holds_smaller: bool,
}

impl Assignment {
    pub fn pair(&self) -> &EnvelopePair {
        &self.pair
    }

    pub fn a_holds_smaller(&self) -> bool {
        self.a_holds_smaller
    }

    /// Content of the first-chosen envelope.
    pub fn a(&self) -> &Amount {
        if self.a_holds_smaller {
            &self.pair.smaller
        } else {
            &self.pair.larger
        }
    }

    pub fn b(&self) -> &Amount {
        if self.a_holds_smaller {
            &self.pair.larger
        } else {
            &self.pair.smaller
        }
    }

    /// What switching gains, `b - a`.
    pub fn swap_gain(&self) -> BigRational {
        self.b().signed_diff(self.a())
    }
}

pub fn make_pair(x: Amount) -> Result<EnvelopePair> {
    x.require_positive()?;
    let larger = x.double();
    Ok(EnvelopePair { smaller: x, larger })
}

/// Place the pair into envelopes A and B; `fair_bit == true` puts the smaller amount in A.
pub fn deal(pair: EnvelopePair, fair_bit: bool) -> Assignment {
    Assignment {
        pair,
        a_holds_smaller: fair_bit,
    }
}

/// The fallacious "other envelope holds 2a or a/2 with equal odds" estimate, `5a/4`.
pub fn naive_switch_estimate(a: &Amount) -> Result<Amount> {
    a.require_positive()?;
    a.scale(&BigRational::new(5.into(), 4.into()))
}

/// Expected content of either envelope once the pair `{x, 2x}` is fixed: `3x/2`.
pub fn pair_conditional_expectation(x: &Amount) -> Result<Amount> {
    x.require_positive()?;
    x.scale(&BigRational::new(3.into(), 2.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amt(s: &str) -> Amount {
        s.parse().unwrap()
    }

    #[test]
    fn make_pair_doubles() {
        let p = make_pair(amt("10")).unwrap();
        assert_eq!((p.smaller(), p.larger()), (&amt("10"), &amt("20")));
        let p = make_pair(amt("1/2")).unwrap();
        assert_eq!((p.smaller(), p.larger()), (&amt("1/2"), &amt("1")));
        assert!(matches!(make_pair(Amount::zero()), Err(Error::NonPositiveAmount(_))));
    }

    #[test]
    fn deal_follows_the_bit() {
        let pair = make_pair(amt("10")).unwrap();
        let up = deal(pair.clone(), true);
        assert_eq!((up.a(), up.b()), (&amt("10"), &amt("20")));
        let down = deal(pair, false);
        assert_eq!((down.a(), down.b()), (&amt("20"), &amt("10")));
        assert_eq!(down.swap_gain(), BigRational::from_integer((-10).into()));
    }

    #[test]
    fn naive_estimate_is_five_quarters() {
        assert_eq!(naive_switch_estimate(&amt("20")).unwrap(), amt("25"));
        assert_eq!(naive_switch_estimate(&amt("4")).unwrap(), amt("5"));
        assert_eq!(naive_switch_estimate(&amt("1/2")).unwrap(), amt("5/8"));
        assert!(naive_switch_estimate(&Amount::zero()).is_err());
    }

    #[test]
    fn pair_expectation_is_three_halves() {
        assert_eq!(pair_conditional_expectation(&amt("10")).unwrap(), amt("15"));
        assert_eq!(pair_conditional_expectation(&amt("2")).unwrap(), amt("3"));
        // Two-outcome enumeration: each envelope is x or 2x with probability 1/2.
        let half = BigRational::new(1.into(), 2.into());
        for x in 1..=100u64 {
            let x = Amount::from(x);
            let enumerated = &half * x.as_rational() + &half * x.double().as_rational();
            assert_eq!(pair_conditional_expectation(&x).unwrap().into_rational(), enumerated);
        }
    }

    #[test]
    fn amounts_reject_negative_and_render_reduced() {
        assert!("-1".parse::<Amount>().is_err());
        assert_eq!(amt("6/4").to_string(), "3/2");
        assert_eq!(amt("0.75").to_string(), "3/4");
        assert_eq!(Amount::from_f64_exact(0.375).unwrap(), amt("3/8"));
    }

    #[test]
    fn large_powers_of_two_do_not_overflow() {
        let mut x = Amount::from(1);
        for _ in 0..200 {
            x = x.double();
        }
        let mut y = x.clone();
        for _ in 0..200 {
            y = y.halve();
        }
        assert_eq!(y, Amount::from(1));
        assert_eq!(x.to_string().len(), 61);
    }
}
