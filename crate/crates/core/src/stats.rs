//! Exact tallies and the floating-point summaries derived from them.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::rational;

/// Multiset of exact observations. Merging is order-insensitive, so any
/// partition of the trials into workers produces the same tally.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    counts: BTreeMap<BigRational, u64>,
    n: u64,
}

impl Tally {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, value: BigRational) {
        *self.counts.entry(value).or_insert(0) += 1;
        self.n += 1;
    }

    pub fn record_n(&mut self, value: BigRational, count: u64) {
        if count > 0 {
            *self.counts.entry(value).or_insert(0) += count;
            self.n += count;
        }
    }

    pub fn record_ref(&mut self, value: &BigRational) {
        if let Some(c) = self.counts.get_mut(value) {
            *c += 1;
            self.n += 1;
        } else {
            self.record(value.clone());
        }
    }

    pub fn merge(&mut self, other: Tally) {
        for (v, c) in other.counts {
            *self.counts.entry(v).or_insert(0) += c;
        }
        self.n += other.n;
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn exact_sum(&self) -> BigRational {
        self.counts
            .iter()
            .fold(BigRational::zero(), |acc, (v, &c)| acc + v * BigInt::from(c))
    }

    pub fn exact_mean(&self) -> Option<BigRational> {
        (self.n > 0).then(|| self.exact_sum() / BigInt::from(self.n))
    }

    /// Unbiased sample variance, exact; `None` below two observations.
    pub fn exact_sample_variance(&self) -> Option<BigRational> {
        if self.n < 2 {
            return None;
        }
        let mean = self.exact_mean()?;
        let ss = self.counts.iter().fold(BigRational::zero(), |acc, (v, &c)| {
            let d = v - &mean;
            acc + &d * &d * BigInt::from(c)
        });
        Some(ss / BigInt::from(self.n - 1))
    }

    /// Distinct observed values with their counts, ascending.
    pub fn counts(&self) -> impl Iterator<Item = (&BigRational, u64)> {
        self.counts.iter().map(|(v, &c)| (v, c))
    }

    pub fn summarize(&self, schema: &str, seed: u64) -> SummaryStats {
        let mean_exact = self.exact_mean().unwrap_or_else(BigRational::zero);
        let var = self
            .exact_sample_variance()
            .map(|v| rational::to_f64(&v))
            .unwrap_or(0.0);
        SummaryStats::from_moments(schema, seed, self.n, rational::to_f64(&mean_exact), var)
            .with_exact_mean(mean_exact)
    }
}

/// Monte Carlo aggregate. `ci95_halfwidth = 1.96 * sqrt(sample_variance / n)`;
/// a single trial reports zero variance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub schema: String,
    pub seed: u64,
    pub n: u64,
    pub mean: f64,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_ratio")]
    pub exact_mean: Option<BigRational>,
    pub sample_variance: f64,
    pub ci95_halfwidth: f64,
}

impl SummaryStats {
    pub fn from_moments(schema: &str, seed: u64, n: u64, mean: f64, sample_variance: f64) -> Self {
        let ci95_halfwidth = if n == 0 {
            0.0
        } else {
            1.96 * (sample_variance / n as f64).sqrt()
        };
        SummaryStats {
            schema: schema.to_string(),
            seed,
            n,
            mean,
            exact_mean: None,
            sample_variance,
            ci95_halfwidth,
        }
    }

    /// Summary of 0/1 outcomes given the number of successes.
    pub fn from_bernoulli(schema: &str, seed: u64, n: u64, successes: u64) -> Self {
        let mut t = Tally::new();
        if n > 0 {
            t.counts.insert(BigRational::from_integer(1.into()), successes);
            t.counts.insert(BigRational::zero(), n - successes);
            t.counts.retain(|_, c| *c > 0);
            t.n = n;
        }
        t.summarize(schema, seed)
    }

    fn with_exact_mean(mut self, m: BigRational) -> Self {
        if self.n > 0 {
            self.exact_mean = Some(m);
        }
        self
    }

    /// Whether `target` lies within `k` confidence half-widths of the mean.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.ci95_halfwidth
    }

    pub fn standard_error(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.sample_variance / self.n as f64).sqrt()
        }
    }
}

mod opt_ratio {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        r: &Option<BigRational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_str(&rational::render(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<BigRational>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|s| rational::parse(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn tally_moments_are_exact() {
        let mut t = Tally::new();
        for v in [1, 2, 3, 4] {
            t.record(q(v));
        }
        assert_eq!(t.exact_mean().unwrap(), BigRational::new(5.into(), 2.into()));
        assert_eq!(t.exact_sample_variance().unwrap(), BigRational::new(5.into(), 3.into()));
        let s = t.summarize("x", 1);
        assert!((s.ci95_halfwidth - 1.96 * (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn merge_is_order_insensitive() {
        let (mut a, mut b, mut all) = (Tally::new(), Tally::new(), Tally::new());
        for v in 0..10 {
            let t = if v % 3 == 0 { &mut a } else { &mut b };
            t.record(q(v % 4));
            all.record(q(v % 4));
        }
        let mut ab = a.clone();
        ab.merge(b.clone());
        let mut ba = b;
        ba.merge(a);
        assert_eq!(ab, ba);
        assert_eq!(ab, all);
    }

    #[test]
    fn single_trial_has_zero_width() {
        let mut t = Tally::new();
        t.record(q(10));
        let s = t.summarize("x", 0);
        assert_eq!((s.mean, s.sample_variance, s.ci95_halfwidth), (10.0, 0.0, 0.0));
    }

    #[test]
    fn bernoulli_summary() {
        let s = SummaryStats::from_bernoulli("b", 0, 4, 1);
        assert_eq!(s.mean, 0.25);
        assert!((s.sample_variance - 0.25).abs() < 1e-15);
    }
}
