//! Seeded Monte Carlo over the envelope-filling schemas.
//!
//! Trial `i` draws all of its randomness from `trial_rng(seed, lane, i)`, so
//! the set of kept trials and every aggregate are identical for any worker
//! count. Envelope contents stay exact; only the final summaries are
//! floating point.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::Serialize;

use crate::envelope::{self, Amount};
use crate::error::{Error, Result};
use crate::posterior;
use crate::prior::{BroomePrior, DiscretePrior};
use crate::rational;
use crate::stats::{SummaryStats, Tally};
use crate::streams::{self, lane};

const CHUNK: u64 = 1 << 16;
/// Attempts after which a starving rejection loop is abandoned.
pub const BUDGET_MIN_ATTEMPTS: u64 = 10_000_000;
/// Acceptance ratio below which a rejection loop is considered starving.
pub const BUDGET_MIN_ACCEPTANCE: f64 = 1e-6;
/// CSV trial logs stop after this many rows.
pub const TRIAL_LOG_CAP: usize = 100_000;

/// How envelopes are filled on every repetition.
#[derive(Clone, Debug)]
pub enum Schema {
    /// The pair `{x, 2x}` is fixed; only the assignment to A/B is random.
    FixedPair { x: Amount },
    /// A holds `x`; the other envelope gets `x/2` or `2x` by a fair coin.
    ConditionalFill { x: Amount },
    /// `X` drawn from the prior, dealt at random; only trials with `A = a` are kept.
    PriorConditioned { prior: DiscretePrior, a: Amount },
    /// Ali holds `x` (envelope A); Baba's envelope (B) gets `x/2` or `2x`.
    AliBaba { x: Amount },
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schema::FixedPair { x } => write!(f, "fixed(x={x})"),
            Schema::ConditionalFill { x } => write!(f, "conditional(x={x})"),
            Schema::PriorConditioned { prior, a } => write!(f, "prior({},a={a})", prior.label()),
            Schema::AliBaba { x } => write!(f, "alibaba(x={x})"),
        }
    }
}

impl Schema {
    fn validate(&self) -> Result<()> {
        match self {
            Schema::FixedPair { x } | Schema::ConditionalFill { x } | Schema::AliBaba { x } => {
                if x.is_positive() {
                    Ok(())
                } else {
                    Err(Error::NonPositiveAmount(x.to_string()))
                }
            }
            Schema::PriorConditioned { prior, a } => {
                if !prior.is_proper() {
                    return Err(Error::ImproperPrior(rational::render(&prior.total_mass())));
                }
                // Fails fast on unattainable observations.
                posterior::split_discrete(prior, a).map(|_| ())
            }
        }
    }

    /// One repetition: `Some((a, b))` for a kept trial, `None` for a rejected one.
    pub fn attempt(&self, seed: u64, index: u64) -> Option<(Amount, Amount)> {
        match self {
            Schema::FixedPair { x } => {
                let mut rng = streams::trial_rng(seed, lane::DEAL, index);
                let pair = envelope::make_pair(x.clone()).ok()?;
                let dealt = envelope::deal(pair, rng.random::<bool>());
                Some((dealt.a().clone(), dealt.b().clone()))
            }
            Schema::ConditionalFill { x } | Schema::AliBaba { x } => {
                let mut rng = streams::trial_rng(seed, lane::DEAL, index);
                let other = if rng.random::<bool>() { x.double() } else { x.halve() };
                Some((x.clone(), other))
            }
            Schema::PriorConditioned { prior, a } => {
                let mut rng = streams::trial_rng(seed, lane::PRIOR, index);
                let smaller = prior.sample_unchecked(rng.next_u64());
                let a_holds_smaller = rng.random::<bool>();
                let observed_ok = if a_holds_smaller {
                    &smaller == a
                } else {
                    &smaller.double() == a
                };
                if !observed_ok {
                    return None;
                }
                let pair = envelope::make_pair(smaller).ok()?;
                let dealt = envelope::deal(pair, a_holds_smaller);
                Some((dealt.a().clone(), dealt.b().clone()))
            }
        }
    }

    /// Exact outcome distribution `(probability, a, b)` of a kept trial.
    pub fn exact_outcomes(&self) -> Result<Vec<(BigRational, Amount, Amount)>> {
        self.validate()?;
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        Ok(match self {
            Schema::FixedPair { x } => vec![
                (half.clone(), x.clone(), x.double()),
                (half, x.double(), x.clone()),
            ],
            Schema::ConditionalFill { x } | Schema::AliBaba { x } => vec![
                (half.clone(), x.clone(), x.double()),
                (half, x.clone(), x.halve()),
            ],
            Schema::PriorConditioned { prior, a } => {
                let split = posterior::split_discrete(prior, a)?;
                vec![(split.p_up, a.clone(), a.double()), (split.p_down, a.clone(), a.halve())]
            }
        })
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global rayon pool. Never affects results.
    pub threads: Option<usize>,
    /// How many kept trials to retain for CSV output.
    pub trial_log: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub a: Amount,
    pub b: Amount,
    #[serde(with = "rational::serde_str")]
    pub gain: BigRational,
}

/// Exact counts of every distinct `(a, b)` outcome among kept trials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OutcomeTally {
    counts: BTreeMap<(Amount, Amount), u64>,
}

impl OutcomeTally {
    fn record(&mut self, a: Amount, b: Amount) {
        *self.counts.entry((a, b)).or_insert(0) += 1;
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Amount, &Amount, u64)> {
        self.counts.iter().map(|((a, b), &c)| (a, b, c))
    }

    /// Tally of `f(a, b)` over kept trials.
    pub fn tally<F: Fn(&Amount, &Amount) -> BigRational>(&self, f: F) -> Tally {
        let mut t = Tally::new();
        for ((a, b), &c) in &self.counts {
            t.record_n(f(a, b), c);
        }
        t
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationReport {
    pub schema: String,
    pub seed: u64,
    pub n: u64,
    pub attempts: u64,
    pub acceptance_rate: f64,
    /// Content of envelope A.
    pub a: SummaryStats,
    /// Content of envelope B.
    pub b: SummaryStats,
    /// Swap gain `b - a`.
    pub gain: SummaryStats,
    /// `a + b`.
    pub total: SummaryStats,
    #[serde(skip)]
    pub outcomes: OutcomeTally,
    #[serde(skip)]
    pub trials: Vec<TrialRecord>,
}

/// Run `schema` until `n` trials are kept.
pub fn run(schema: &Schema, n: u64, seed: u64, opts: &RunOptions) -> Result<SimulationReport> {
    if n == 0 {
        return Err(Error::ZeroTrials);
    }
    schema.validate()?;
    match opts.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::Io(e.to_string()))?;
            pool.install(|| run_inner(schema, n, seed, opts))
        }
        None => run_inner(schema, n, seed, opts),
    }
}

fn run_inner(schema: &Schema, n: u64, seed: u64, opts: &RunOptions) -> Result<SimulationReport> {
    let mut outcomes = OutcomeTally::default();
    let mut trials = Vec::new();
    let mut kept = 0u64;
    let mut attempts = 0u64;
    let mut next = 0u64;
    while kept < n {
        let start = next;
        // Non-rejection schemas never need more than the remaining count.
        let len = match schema {
            Schema::PriorConditioned { .. } => CHUNK,
            _ => CHUNK.min(n - kept),
        };
        let batch: Vec<Option<(Amount, Amount)>> = (start..start + len)
            .into_par_iter()
            .map(|i| schema.attempt(seed, i))
            .collect();
        next += len;
        for (offset, result) in batch.into_iter().enumerate() {
            let Some((a, b)) = result else { continue };
            let index = start + offset as u64;
            if trials.len() < opts.trial_log {
                trials.push(TrialRecord {
                    trial: index,
                    gain: b.signed_diff(&a),
                    a: a.clone(),
                    b: b.clone(),
                });
            }
            outcomes.record(a, b);
            kept += 1;
            attempts = index + 1;
            if kept == n {
                break;
            }
        }
        if kept < n {
            attempts = next;
            if attempts >= BUDGET_MIN_ATTEMPTS
                && (kept as f64) < BUDGET_MIN_ACCEPTANCE * attempts as f64
            {
                return Err(Error::BudgetExceeded { kept, attempted: attempts });
            }
        }
    }
    let label = schema.to_string();
    let summarize = |t: Tally| t.summarize(&label, seed);
    Ok(SimulationReport {
        schema: label.clone(),
        seed,
        n,
        attempts,
        acceptance_rate: kept as f64 / attempts as f64,
        a: summarize(outcomes.tally(|a, _| a.as_rational().clone())),
        b: summarize(outcomes.tally(|_, b| b.as_rational().clone())),
        gain: summarize(outcomes.tally(|a, b| b.signed_diff(a))),
        total: summarize(outcomes.tally(|a, b| (a + b).into_rational())),
        outcomes,
        trials,
    })
}

/// Swap gain (`report.gain`, true mean 0) and envelope content
/// (`report.a`, true mean `3x/2`) for a fixed pair.
pub fn run_fixed_pair(x: &Amount, n: u64, seed: u64) -> Result<SimulationReport> {
    run(&Schema::FixedPair { x: x.clone() }, n, seed, &RunOptions::default())
}

/// One fixed-pair trial with the assignment bit supplied by the caller.
pub fn fixed_pair_trial(x: &Amount, a_holds_smaller: bool) -> Result<BigRational> {
    let pair = envelope::make_pair(x.clone())?;
    Ok(envelope::deal(pair, a_holds_smaller).swap_gain())
}

/// Other-envelope content (`report.b`, true mean `5x/4`).
pub fn run_conditional_fill(x: &Amount, n: u64, seed: u64) -> Result<SimulationReport> {
    run(&Schema::ConditionalFill { x: x.clone() }, n, seed, &RunOptions::default())
}

/// `B` given `A = a` by rejection (`report.b`), with the acceptance rate.
pub fn run_prior_conditioned(
    prior: &DiscretePrior,
    a: &Amount,
    n_target: u64,
    seed: u64,
) -> Result<SimulationReport> {
    let schema = Schema::PriorConditioned {
        prior: prior.clone(),
        a: a.clone(),
    };
    run(&schema, n_target, seed, &RunOptions::default())
}

#[derive(Clone, Debug, Serialize)]
pub struct AliBabaReport {
    pub ali: SummaryStats,
    /// True mean `5x/4`.
    pub baba: SummaryStats,
    /// True mean `9x/4`.
    pub total: SummaryStats,
    /// Baba's view: Ali's content over Baba's, true mean `5/4`.
    pub ali_over_baba: SummaryStats,
}

pub fn run_alibaba(x: &Amount, n: u64, seed: u64) -> Result<AliBabaReport> {
    run_alibaba_with(x, n, seed, &RunOptions::default())
}

pub fn run_alibaba_with(x: &Amount, n: u64, seed: u64, opts: &RunOptions) -> Result<AliBabaReport> {
    let report = run(&Schema::AliBaba { x: x.clone() }, n, seed, opts)?;
    let ratio = report
        .outcomes
        .tally(|ali, baba| ali.as_rational() / baba.as_rational())
        .summarize(&report.schema, seed);
    Ok(AliBabaReport {
        ali: report.a,
        baba: report.b,
        total: report.total,
        ali_over_baba: ratio,
    })
}

/// One branch of the Ali Baba bookkeeping, with `Ali = x` and `Baba = y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AliBabaBranch {
    #[serde(with = "rational::serde_str")]
    pub probability: BigRational,
    pub ali: Amount,
    pub baba: Amount,
    /// What the two envelopes actually hold together.
    pub sum_of_contents: Amount,
    /// `E(Baba | Ali = x) + E(Ali | Baba = y) = 5/4 (x + y)`.
    pub sum_of_estimates: Amount,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AliBabaAsymmetry {
    pub branches: Vec<AliBabaBranch>,
    /// `9x/4`.
    pub mean_sum_of_contents: Amount,
    /// `45x/16`.
    pub mean_sum_of_estimates: Amount,
}

/// Enumerate both coin outcomes: the two swap estimates are individually
/// right yet their sum overstates what the envelopes hold together.
pub fn alibaba_asymmetry(x: &Amount) -> Result<AliBabaAsymmetry> {
    let five_quarters = BigRational::new(5.into(), 4.into());
    let half = BigRational::new(1.into(), 2.into());
    let mut branches = Vec::new();
    let mut contents = BigRational::zero();
    let mut estimates = BigRational::zero();
    if !x.is_positive() {
        return Err(Error::NonPositiveAmount(x.to_string()));
    }
    for baba in [x.halve(), x.double()] {
        let sum = x + &baba;
        let est = envelope::naive_switch_estimate(x)? + envelope::naive_switch_estimate(&baba)?;
        debug_assert_eq!(est, sum.scale(&five_quarters)?);
        contents += &half * sum.as_rational();
        estimates += &half * est.as_rational();
        branches.push(AliBabaBranch {
            probability: half.clone(),
            ali: x.clone(),
            baba,
            sum_of_contents: sum,
            sum_of_estimates: est,
        });
    }
    Ok(AliBabaAsymmetry {
        branches,
        mean_sum_of_contents: Amount::new(contents)?,
        mean_sum_of_estimates: Amount::new(estimates)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartialMean {
    pub terms: u32,
    #[serde(with = "rational::serde_str")]
    pub partial_mean: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivergingMean {
    pub rows: Vec<PartialMean>,
    /// Always true for the Broome law: the increments `(1/2)(4/3)^n` grow.
    pub infinite_mean: bool,
}

impl DivergingMean {
    /// Smallest tabulated `N` whose partial mean exceeds `bound`.
    pub fn first_exceeding(&self, bound: &BigRational) -> Option<u32> {
        self.rows
            .iter()
            .find(|r| &r.partial_mean > bound)
            .map(|r| r.terms)
    }
}

/// Partial sums `sum_{n<N} p(n) * (3/2) * 2^n` of an envelope's expected
/// content under the Broome law, for `N = 1..=max_terms`.
pub fn diverging_mean_diagnostic(prior: &BroomePrior, max_terms: u32) -> DivergingMean {
    let three_halves = BigRational::new(3.into(), 2.into());
    let mut sum = BigRational::zero();
    let mut rows = Vec::with_capacity(max_terms as usize);
    for n in 0..max_terms {
        sum += prior.pmf(n) * &three_halves * rational::pow2(n);
        rows.push(PartialMean {
            terms: n + 1,
            partial_mean: sum.clone(),
        });
    }
    DivergingMean {
        rows,
        infinite_mean: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amt(s: &str) -> Amount {
        s.parse().unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn errors() {
        assert!(matches!(run_fixed_pair(&amt("0"), 10, 0), Err(Error::NonPositiveAmount(_))));
        assert!(matches!(run_conditional_fill(&amt("1"), 0, 0), Err(Error::ZeroTrials)));
        let u = DiscretePrior::uniform([amt("1"), amt("2")]).unwrap();
        assert!(matches!(
            run_prior_conditioned(&u, &amt("3"), 10, 0),
            Err(Error::UnattainableObservation(_))
        ));
        let partial = DiscretePrior::finite([(amt("1"), q(1, 2))]).unwrap();
        assert!(matches!(
            run_prior_conditioned(&partial, &amt("1"), 10, 0),
            Err(Error::ImproperPrior(_))
        ));
    }

    #[test]
    fn forced_single_fixed_pair_trial() {
        assert_eq!(fixed_pair_trial(&amt("10"), true).unwrap(), q(10, 1));
        assert_eq!(fixed_pair_trial(&amt("10"), false).unwrap(), q(-10, 1));
    }

    #[test]
    fn single_trial_run() {
        let r = run_fixed_pair(&amt("10"), 1, 3).unwrap();
        assert_eq!(r.gain.n, 1);
        assert_eq!(r.gain.mean.abs(), 10.0);
        assert_eq!(r.gain.ci95_halfwidth, 0.0);
    }

    #[test]
    fn point_mass_conditioning_is_deterministic() {
        let pm = DiscretePrior::point_mass(amt("3")).unwrap();
        let r = run_prior_conditioned(&pm, &amt("3"), 1000, 5).unwrap();
        assert_eq!(r.b.exact_mean, Some(q(6, 1)));
        assert_eq!(r.b.sample_variance, 0.0);
    }

    #[test]
    fn exact_outcomes_enumerate_two_branches() {
        let s = Schema::ConditionalFill { x: amt("4") };
        let mean: BigRational = s
            .exact_outcomes()
            .unwrap()
            .iter()
            .map(|(p, _, b)| p * b.as_rational())
            .sum();
        assert_eq!(mean, q(5, 1));
    }

    #[test]
    fn thread_count_never_changes_results() {
        let s = Schema::PriorConditioned {
            prior: DiscretePrior::broome(),
            a: amt("4"),
        };
        let one = run(&s, 20_000, 11, &RunOptions { threads: Some(1), trial_log: 50 }).unwrap();
        let four = run(&s, 20_000, 11, &RunOptions { threads: Some(4), trial_log: 50 }).unwrap();
        assert_eq!(one.outcomes, four.outcomes);
        assert_eq!(one.trials, four.trials);
        assert_eq!(one.attempts, four.attempts);
        assert_eq!(
            serde_json::to_string(&one).unwrap(),
            serde_json::to_string(&four).unwrap()
        );
    }

    #[test]
    fn trial_log_is_capped_and_ordered() {
        let r = run(
            &Schema::FixedPair { x: amt("1") },
            500,
            0,
            &RunOptions { threads: None, trial_log: 100 },
        )
        .unwrap();
        assert_eq!(r.trials.len(), 100);
        assert!(r.trials.windows(2).all(|w| w[0].trial < w[1].trial));
        for t in &r.trials {
            assert_eq!(t.gain, t.b.signed_diff(&t.a));
        }
    }

    #[test]
    fn alibaba_table() {
        let t = alibaba_asymmetry(&amt("100")).unwrap();
        assert_eq!(t.mean_sum_of_contents, amt("225"));
        assert_eq!(t.mean_sum_of_estimates, amt("1125/4"));
        assert_eq!(t.branches[0].sum_of_estimates, amt("375/2"));
        assert_eq!(t.branches[1].sum_of_estimates, amt("375"));
    }

    #[test]
    fn diverging_partial_means() {
        let d = diverging_mean_diagnostic(&BroomePrior, 40);
        assert_eq!(d.rows[0].partial_mean, q(1, 2));
        assert_eq!(d.rows[1].partial_mean, q(7, 6));
        assert!(d.rows.windows(2).all(|w| w[0].partial_mean < w[1].partial_mean));
        // Closed form: (3/2)((4/3)^N - 1).
        for r in &d.rows {
            let closed = q(3, 2)
                * (num_traits::pow(q(4, 3), r.terms as usize) - BigRational::one());
            assert_eq!(r.partial_mean, closed);
        }
        assert_eq!(d.first_exceeding(&q(1000, 1)), Some(23));
        assert!(d.infinite_mean);
    }
}
