//! Posterior splits, conditional expectations and switching rules.
//!
//! Given `A = a`, the other envelope holds `2a` (A was the smaller) or `a/2`
//! (A was the larger). With a pmf `p` the odds are `p(a) : p(a/2)`; with a
//! density `f` the larger amount's interval is half as wide, so the odds
//! become `2 f(a) : f(a/2)`.

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::envelope::Amount;
use crate::error::{Error, Result};
use crate::prior::{ContinuousPrior, DiscretePrior};
use crate::rational;

/// Relative tolerance for ties in the floating-point path.
pub const CONTINUOUS_TIE_TOLERANCE: f64 = 1e-12;

/// `(P(B = 2a | A = a), P(B = a/2 | A = a))` as exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactSplit {
    #[serde(with = "rational::serde_str")]
    pub p_up: BigRational,
    #[serde(with = "rational::serde_str")]
    pub p_down: BigRational,
}

impl ExactSplit {
    pub fn is_even(&self) -> bool {
        self.p_up == self.p_down
    }
}

/// Floating-point counterpart of [`ExactSplit`] for density priors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ApproxSplit {
    pub p_up: f64,
    pub p_down: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Decision {
    Switch,
    Keep,
    /// The governing criterion holds with equality.
    Indifferent,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Switch => "Switch",
            Decision::Keep => "Keep",
            Decision::Indifferent => "Indifferent",
        })
    }
}

impl Decision {
    /// `lhs < rhs` switches, `lhs > rhs` keeps.
    fn from_ordering(ord: Ordering) -> Self {
        match ord {
            Ordering::Less => Decision::Switch,
            Ordering::Greater => Decision::Keep,
            Ordering::Equal => Decision::Indifferent,
        }
    }

    fn from_reals(lhs: f64, rhs: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs());
        if (lhs - rhs).abs() <= CONTINUOUS_TIE_TOLERANCE * scale {
            Decision::Indifferent
        } else {
            Decision::from_ordering(lhs.partial_cmp(&rhs).unwrap_or(Ordering::Equal))
        }
    }
}

/// `(p(a), p(a/2))`, rejecting observations the prior cannot produce.
fn discrete_masses(prior: &DiscretePrior, a: &Amount) -> Result<(BigRational, BigRational)> {
    if !a.is_positive() {
        return Err(Error::NonPositiveAmount(a.to_string()));
    }
    let up = prior.mass(a);
    let down = prior.mass(&a.halve());
    if up.is_zero() && down.is_zero() {
        return Err(Error::UnattainableObservation(a.to_string()));
    }
    Ok((up, down))
}

fn continuous_densities(prior: &ContinuousPrior, a: f64) -> Result<(f64, f64)> {
    let fa = prior.density_at(a)?;
    let fhalf = prior.density_at(a / 2.0)?;
    if fa == 0.0 && fhalf == 0.0 {
        return Err(Error::UnattainableObservation(format!("{a}")));
    }
    Ok((fa, fhalf))
}

/// `p_up = p(a) / (p(a/2) + p(a))`. Off-grid `a/2` has zero mass, so odd
/// observations on an integer grid give `(1, 0)`.
pub fn split_discrete(prior: &DiscretePrior, a: &Amount) -> Result<ExactSplit> {
    let (up, down) = discrete_masses(prior, a)?;
    let total = &up + &down;
    Ok(ExactSplit {
        p_up: up / &total,
        p_down: down / total,
    })
}

/// `p_up = 2 f(a) / (f(a/2) + 2 f(a))`.
pub fn split_continuous(prior: &ContinuousPrior, a: f64) -> Result<ApproxSplit> {
    let (fa, fhalf) = continuous_densities(prior, a)?;
    let total = fhalf + 2.0 * fa;
    let p_up = 2.0 * fa / total;
    Ok(ApproxSplit {
        p_up,
        p_down: 1.0 - p_up,
    })
}

/// `E[B | A = a] = p_up * 2a + p_down * a/2`, exact.
pub fn conditional_expectation(prior: &DiscretePrior, a: &Amount) -> Result<Amount> {
    let split = split_discrete(prior, a)?;
    let value = &split.p_up * a.double().as_rational() + &split.p_down * a.halve().as_rational();
    Amount::new(value)
}

pub fn conditional_expectation_continuous(prior: &ContinuousPrior, a: f64) -> Result<f64> {
    let split = split_continuous(prior, a)?;
    Ok(split.p_up * 2.0 * a + split.p_down * a / 2.0)
}

/// Expectation-maximising rule: switch iff `p(a/2) < 2 p(a)`.
pub fn decide_expectation(prior: &DiscretePrior, a: &Amount) -> Result<Decision> {
    let (up, down) = discrete_masses(prior, a)?;
    let two = BigRational::from_integer(2.into());
    Ok(Decision::from_ordering(down.cmp(&(two * up))))
}

/// Density version: switch iff `f(a/2) < 4 f(a)`.
pub fn decide_expectation_continuous(prior: &ContinuousPrior, a: f64) -> Result<Decision> {
    let (fa, fhalf) = continuous_densities(prior, a)?;
    Ok(Decision::from_reals(fhalf, 4.0 * fa))
}

/// Chance-of-larger rule: switch iff `p(a/2) < p(a)`, i.e. `p_down < 1/2`.
pub fn decide_probability_of_larger(prior: &DiscretePrior, a: &Amount) -> Result<Decision> {
    let (up, down) = discrete_masses(prior, a)?;
    Ok(Decision::from_ordering(down.cmp(&up)))
}

/// Density version: switch iff `f(a/2) < 2 f(a)`.
pub fn decide_probability_of_larger_continuous(prior: &ContinuousPrior, a: f64) -> Result<Decision> {
    let (fa, fhalf) = continuous_densities(prior, a)?;
    Ok(Decision::from_reals(fhalf, 2.0 * fa))
}

/// Everything the `posterior` command reports for one exact observation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteReport {
    pub prior: String,
    pub a: Amount,
    #[serde(with = "rational::serde_str")]
    pub p_up: BigRational,
    #[serde(with = "rational::serde_str")]
    pub p_down: BigRational,
    pub conditional_expectation: Amount,
    pub conditional_expectation_decimal: String,
    pub decide_expectation: Decision,
    pub decide_probability_of_larger: Decision,
}

impl DiscreteReport {
    pub fn compute(prior: &DiscretePrior, a: &Amount) -> Result<Self> {
        let split = split_discrete(prior, a)?;
        let e = conditional_expectation(prior, a)?;
        Ok(DiscreteReport {
            prior: prior.label().to_string(),
            a: a.clone(),
            p_up: split.p_up,
            p_down: split.p_down,
            conditional_expectation_decimal: rational::decimal(e.as_rational()),
            conditional_expectation: e,
            decide_expectation: decide_expectation(prior, a)?,
            decide_probability_of_larger: decide_probability_of_larger(prior, a)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuousReport {
    pub prior: String,
    pub a: f64,
    pub p_up: f64,
    pub p_down: f64,
    pub conditional_expectation: f64,
    pub decide_expectation: Decision,
    pub decide_probability_of_larger: Decision,
}

impl ContinuousReport {
    pub fn compute(prior: &ContinuousPrior, a: f64) -> Result<Self> {
        let split = split_continuous(prior, a)?;
        Ok(ContinuousReport {
            prior: prior.label().to_string(),
            a,
            p_up: split.p_up,
            p_down: split.p_down,
            conditional_expectation: conditional_expectation_continuous(prior, a)?,
            decide_expectation: decide_expectation_continuous(prior, a)?,
            decide_probability_of_larger: decide_probability_of_larger_continuous(prior, a)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn amt(s: &str) -> Amount {
        s.parse().unwrap()
    }

    #[test]
    fn broome_splits() {
        let b = DiscretePrior::broome();
        let s = split_discrete(&b, &amt("2")).unwrap();
        assert_eq!((s.p_up, s.p_down), (q(2, 5), q(3, 5)));
        let s = split_discrete(&b, &amt("1")).unwrap();
        assert_eq!((s.p_up, s.p_down), (q(1, 1), q(0, 1)));
    }

    #[test]
    fn uniform_top_observation_is_a_certain_loss() {
        let u = DiscretePrior::uniform([amt("1"), amt("2"), amt("4")]).unwrap();
        let s = split_discrete(&u, &amt("8")).unwrap();
        assert_eq!((s.p_up, s.p_down), (q(0, 1), q(1, 1)));
        assert_eq!(decide_expectation(&u, &amt("8")).unwrap(), Decision::Keep);
        assert!(matches!(
            split_discrete(&u, &amt("3")),
            Err(Error::UnattainableObservation(_))
        ));
        assert!(matches!(
            split_discrete(&u, &Amount::zero()),
            Err(Error::NonPositiveAmount(_))
        ));
    }

    #[test]
    fn broome_expectations() {
        let b = DiscretePrior::broome();
        assert_eq!(conditional_expectation(&b, &amt("4")).unwrap(), amt("22/5"));
        assert_eq!(conditional_expectation(&b, &amt("1")).unwrap(), amt("2"));
        for n in 0..10u32 {
            let a = Amount::from(1u64 << n);
            assert_eq!(decide_expectation(&b, &a).unwrap(), Decision::Switch);
        }
        assert_eq!(decide_probability_of_larger(&b, &amt("2")).unwrap(), Decision::Keep);
        assert_eq!(decide_probability_of_larger(&b, &amt("1")).unwrap(), Decision::Switch);
    }

    #[test]
    fn point_mass_expectation_is_double() {
        let pm = DiscretePrior::point_mass(amt("7/3")).unwrap();
        assert_eq!(conditional_expectation(&pm, &amt("7/3")).unwrap(), amt("14/3"));
    }

    #[test]
    fn exact_tie_is_indifferent() {
        // p(1) = 2/3 = 2 * p(2), so at a = 2: p(a/2) = 2 p(a).
        let p = DiscretePrior::finite([(amt("1"), q(2, 3)), (amt("2"), q(1, 3))]).unwrap();
        assert_eq!(decide_expectation(&p, &amt("2")).unwrap(), Decision::Indifferent);
        assert_eq!(conditional_expectation(&p, &amt("2")).unwrap(), amt("2"));
        // Equal masses tie the probability rule instead.
        let e = DiscretePrior::uniform([amt("1"), amt("2")]).unwrap();
        assert_eq!(decide_probability_of_larger(&e, &amt("2")).unwrap(), Decision::Indifferent);
    }

    #[test]
    fn odd_observation_always_switches() {
        let p = DiscretePrior::uniform([amt("3"), amt("5"), amt("6")]).unwrap();
        for a in ["3", "5"] {
            assert_eq!(decide_probability_of_larger(&p, &amt(a)).unwrap(), Decision::Switch);
            assert_eq!(decide_expectation(&p, &amt(a)).unwrap(), Decision::Switch);
        }
    }

    #[test]
    fn even_split_reproduces_five_quarters() {
        let u = DiscretePrior::uniform([amt("1"), amt("2"), amt("4")]).unwrap();
        let s = split_discrete(&u, &amt("4")).unwrap();
        assert!(s.is_even());
        assert_eq!(conditional_expectation(&u, &amt("4")).unwrap(), amt("5"));
    }

    #[test]
    fn continuous_flat_region_gives_two_thirds() {
        let u = ContinuousPrior::uniform(10.0).unwrap();
        let s = split_continuous(&u, 4.0).unwrap();
        assert!((s.p_up - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.p_down - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(decide_probability_of_larger_continuous(&u, 4.0).unwrap(), Decision::Switch);
        assert_eq!(decide_expectation_continuous(&u, 4.0).unwrap(), Decision::Switch);
    }

    #[test]
    fn continuous_exponential_at_two() {
        let e = ContinuousPrior::exponential(1.0).unwrap();
        let s = split_continuous(&e, 2.0).unwrap();
        let (e1, e2) = ((-1.0f64).exp(), (-2.0f64).exp());
        let expected = 2.0 * e2 / (e1 + 2.0 * e2);
        assert!((s.p_up - expected).abs() < 1e-15);
        assert!((s.p_up - 0.4239).abs() < 1e-4);
        assert!((s.p_up + s.p_down - 1.0).abs() < 1e-12);
    }

    #[test]
    fn continuous_degenerate_and_errors() {
        let u = ContinuousPrior::uniform(10.0).unwrap();
        let s = split_continuous(&u, 15.0).unwrap();
        assert_eq!((s.p_up, s.p_down), (0.0, 1.0));
        assert_eq!(decide_expectation_continuous(&u, 15.0).unwrap(), Decision::Keep);
        assert!(matches!(
            split_continuous(&u, 25.0),
            Err(Error::UnattainableObservation(_))
        ));
        assert!(matches!(split_continuous(&u, -1.0), Err(Error::NonPositivePoint(_))));
    }

    #[test]
    fn continuous_criteria_thresholds() {
        // f(a/2) = 4 f(a) exactly: exponential with a/2 = ln 4.
        let e = ContinuousPrior::exponential(1.0).unwrap();
        let a = 2.0 * 4f64.ln();
        assert_eq!(decide_expectation_continuous(&e, a).unwrap(), Decision::Indifferent);
        let expected = conditional_expectation_continuous(&e, a).unwrap();
        assert!((expected - a).abs() < 1e-12 * a);
        let a = 2.0 * 2f64.ln();
        assert_eq!(decide_probability_of_larger_continuous(&e, a).unwrap(), Decision::Indifferent);
        assert_eq!(decide_expectation_continuous(&e, a).unwrap(), Decision::Switch);
    }
}
