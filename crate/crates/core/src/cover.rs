//! The randomized switching strategy: draw a private threshold `Z`, switch
//! iff `Z` exceeds the number seen in envelope A.
//!
//! Whatever two distinct positive numbers the envelopes hold, the player
//! ends with the larger one with probability
//! `1/2 + P(Z falls between them) / 2`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::envelope::Assignment;
use crate::error::{Error, Result};
use crate::lazy::{self, BitStream, NegExpThreshold};
use crate::posterior::Decision;
use crate::stats::SummaryStats;
use crate::streams::{self, lane};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type Sampler = Arc<dyn Fn(&mut dyn RngCore) -> f64 + Send + Sync>;

/// Distribution of the private threshold `Z` on `[0, inf)`, given by its
/// survival function `S(z) = P(Z > z)` and a sampler.
#[derive(Clone)]
pub struct Probe {
    label: String,
    survival: RealFn,
    sampler: Sampler,
    /// Set for exponential probes, which get a cancellation-free interval
    /// mass and the lazy coin-toss realisation.
    rate: Option<f64>,
}

impl fmt::Debug for Probe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Probe")
            .field("label", &self.label)
            .field("rate", &self.rate)
            .finish_non_exhaustive()
    }
}

impl Default for Probe {
    fn default() -> Self {
        Probe::exponential(1.0).expect("unit rate is valid")
    }
}

impl Probe {
    /// `S(z) = exp(-rate * z)`, sampled as `Z = -ln(U) / rate`.
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidProbe(format!("rate must be positive, got {rate}")));
        }
        let probe = Probe {
            label: format!("exponential(rate={rate})"),
            survival: Arc::new(move |z: f64| if z <= 0.0 { 1.0 } else { (-rate * z).exp() }),
            sampler: Arc::new(move |rng: &mut dyn RngCore| {
                // U in (0, 1]: 53 random bits, never zero.
                let u = ((rng.next_u64() >> 11) + 1) as f64 / (1u64 << 53) as f64;
                -u.ln() / rate
            }),
            rate: Some(rate),
        };
        probe.validate()?;
        Ok(probe)
    }

    /// Any probe given as survival function plus sampler. Rejected unless
    /// `S(0) = 1`, `S` is nonincreasing and `S` decays to zero.
    pub fn custom<S, D>(label: &str, survival: S, sampler: D) -> Result<Self>
    where
        S: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(&mut dyn RngCore) -> f64 + Send + Sync + 'static,
    {
        let probe = Probe {
            label: label.to_string(),
            survival: Arc::new(survival),
            sampler: Arc::new(sampler),
            rate: None,
        };
        probe.validate()?;
        Ok(probe)
    }

    /// `Z = shift + Exp(1)`: flat survival on `[0, shift]`, exponential after.
    pub fn shifted_exponential(shift: f64) -> Result<Self> {
        if !(shift.is_finite() && shift >= 0.0) {
            return Err(Error::InvalidProbe(format!("shift must be nonnegative, got {shift}")));
        }
        Probe::custom(
            &format!("shifted-exponential(shift={shift})"),
            move |z| if z <= shift { 1.0 } else { (-(z - shift)).exp() },
            move |rng| {
                let u = ((rng.next_u64() >> 11) + 1) as f64 / (1u64 << 53) as f64;
                shift - u.ln()
            },
        )
    }

    fn validate(&self) -> Result<()> {
        let s0 = (self.survival)(0.0);
        if (s0 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidProbe(format!("{}: S(0) = {s0}, expected 1", self.label)));
        }
        let mut prev = s0;
        // Quarter-octave grid from 2^-60 to 2^400.
        for k in -240..=1600 {
            let z = 2f64.powf(k as f64 / 4.0);
            let s = (self.survival)(z);
            if !(0.0..=1.0).contains(&s) || s > prev {
                return Err(Error::InvalidProbe(format!(
                    "{}: survival not monotone at z = {z}",
                    self.label
                )));
            }
            prev = s;
        }
        if prev > 1e-9 {
            return Err(Error::InvalidProbe(format!(
                "{}: survival does not decay to zero (S = {prev} at z = 2^400)",
                self.label
            )));
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn exponential_rate(&self) -> Option<f64> {
        self.rate
    }

    pub fn survival(&self, z: f64) -> f64 {
        (self.survival)(z)
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        (self.sampler)(rng)
    }

    /// `P(lo < Z <= hi)` for `lo < hi`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        match self.rate {
            // e^(-r lo) - e^(-r hi) without cancellation.
            Some(r) => (-r * lo).exp() * -(-r * (hi - lo)).exp_m1(),
            None => ((self.survival)(lo) - (self.survival)(hi)).max(0.0),
        }
    }
}

fn check_numbers(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::NonPositiveNumbers(a, b));
    }
    if a == b {
        return Err(Error::EqualNumbers(a));
    }
    Ok(())
}

/// `P(Z falls between a and b) / 2`, the edge over a coin flip.
pub fn win_advantage(a: f64, b: f64, probe: &Probe) -> Result<f64> {
    check_numbers(a, b)?;
    Ok(probe.mass_between(a.min(b), a.max(b)) / 2.0)
}

/// `1/2 + P(Z falls between a and b) / 2`.
pub fn exact_win_probability(a: f64, b: f64, probe: &Probe) -> Result<f64> {
    Ok(0.5 + win_advantage(a, b, probe)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoverPlay {
    pub decision: Decision,
    pub won: bool,
    pub z: f64,
}

/// Apply the rule for a given threshold: switch iff `z > a`.
pub fn play_with_threshold(a: f64, b: f64, z: f64) -> CoverPlay {
    let decision = if z > a { Decision::Switch } else { Decision::Keep };
    let kept_larger = a > b;
    let won = match decision {
        Decision::Switch => !kept_larger,
        _ => kept_larger,
    };
    CoverPlay { decision, won, z }
}

pub fn play_cover(assignment: &Assignment, probe: &Probe, rng: &mut dyn RngCore) -> CoverPlay {
    let z = probe.sample(rng);
    play_with_threshold(assignment.a().to_f64(), assignment.b().to_f64(), z)
}

/// Where the threshold fell relative to the two numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Stratum {
    BelowBoth,
    Between,
    AboveBoth,
}

impl Stratum {
    fn classify(exceeds_a: bool, exceeds_b: bool) -> Self {
        match (exceeds_a, exceeds_b) {
            (false, false) => Stratum::BelowBoth,
            (true, true) => Stratum::AboveBoth,
            _ => Stratum::Between,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairEstimate {
    pub a: f64,
    pub b: f64,
    pub exact_p: f64,
    pub win: SummaryStats,
    /// Win rate within each stratum: below both, between, above both.
    pub strata: [SummaryStats; 3],
    /// Mean coin tosses to reach the switch decision (exponential probes only).
    pub bits_mean: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default)]
struct Counts {
    trials: u64,
    wins: u64,
    stratum_trials: [u64; 3],
    stratum_wins: [u64; 3],
    bits: u64,
}

impl Counts {
    fn merge(mut self, o: Counts) -> Counts {
        self.trials += o.trials;
        self.wins += o.wins;
        self.bits += o.bits;
        for i in 0..3 {
            self.stratum_trials[i] += o.stratum_trials[i];
            self.stratum_wins[i] += o.stratum_wins[i];
        }
        self
    }
}

struct PairContext<'a> {
    numbers: (f64, f64),
    probe: &'a Probe,
    /// Thresholds `e^(-rate * x)` for the two numbers, exponential probes only.
    thresholds: Option<(NegExpThreshold, NegExpThreshold)>,
}

impl PairContext<'_> {
    fn trial(&self, mut rng: ChaCha8Rng) -> Result<Counts> {
        let first_is_a = rng.random::<bool>();
        let (x, y) = self.numbers;
        let (in_a, in_b) = if first_is_a { (x, y) } else { (y, x) };
        let (exceeds_a, exceeds_b, bits) = match &self.thresholds {
            Some((tx, ty)) => {
                let (ta, tb) = if first_is_a { (tx, ty) } else { (ty, tx) };
                let mut stream = BitStream::new(rng);
                let va = lazy::lazy_compare_threshold(&mut stream, ta)?;
                let vb = lazy::lazy_compare_threshold(&mut stream, tb)?;
                (va.z_exceeds_a, vb.z_exceeds_a, va.bits_used as u64)
            }
            None => {
                let z = self.probe.sample(&mut rng);
                (z > in_a, z > in_b, 0)
            }
        };
        let won = play_with_threshold(in_a, in_b, if exceeds_a { f64::INFINITY } else { 0.0 }).won;
        let s = Stratum::classify(exceeds_a, exceeds_b).index();
        let mut c = Counts {
            trials: 1,
            wins: won as u64,
            bits,
            ..Counts::default()
        };
        c.stratum_trials[s] = 1;
        c.stratum_wins[s] = won as u64;
        Ok(c)
    }
}

/// Monte Carlo win rate of the strategy on each pair.
///
/// Trial `i` of pair `j` uses its own stream, so results do not depend on
/// scheduling. Exponential probes are realised with lazy coin tosses.
pub fn estimate_win_rate(
    pairs: &[(f64, f64)],
    probe: &Probe,
    n_per_pair: u64,
    seed: u64,
) -> Result<Vec<PairEstimate>> {
    if n_per_pair == 0 {
        return Err(Error::ZeroTrials);
    }
    pairs
        .iter()
        .enumerate()
        .map(|(j, &(a, b))| {
            let exact_p = exact_win_probability(a, b, probe)?;
            let thresholds = match probe.rate {
                Some(r) => Some((NegExpThreshold::new(r * a)?, NegExpThreshold::new(r * b)?)),
                None => None,
            };
            let ctx = PairContext {
                numbers: (a, b),
                probe,
                thresholds,
            };
            let pair_lane = lane::COVER.wrapping_add((j as u64) << 32);
            let counts = (0..n_per_pair)
                .into_par_iter()
                .map(|i| ctx.trial(streams::trial_rng(seed, pair_lane, i)))
                .try_reduce(Counts::default, |x, y| Ok(x.merge(y)))?;
            let label = format!("cover({a},{b};{})", probe.label());
            let strata = [0, 1, 2].map(|s| {
                SummaryStats::from_bernoulli(
                    &label,
                    seed,
                    counts.stratum_trials[s],
                    counts.stratum_wins[s],
                )
            });
            Ok(PairEstimate {
                a,
                b,
                exact_p,
                win: SummaryStats::from_bernoulli(&label, seed, counts.trials, counts.wins),
                strata,
                bits_mean: probe
                    .rate
                    .map(|_| counts.bits as f64 / counts.trials as f64),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{deal, make_pair, Amount};
    use rand::SeedableRng;

    #[test]
    fn closed_form_for_one_two() {
        let p = exact_win_probability(1.0, 2.0, &Probe::default()).unwrap();
        let expected = 0.5 + ((-1.0f64).exp() - (-2.0f64).exp()) / 2.0;
        assert!((p - expected).abs() < 1e-15);
        assert!((p - 0.6163).abs() < 1e-4);
        assert_eq!(p, exact_win_probability(2.0, 1.0, &Probe::default()).unwrap());
    }

    #[test]
    fn flat_survival_gives_exactly_half() {
        let probe = Probe::shifted_exponential(3.0).unwrap();
        assert_eq!(exact_win_probability(1.0, 2.0, &probe).unwrap(), 0.5);
        assert!(exact_win_probability(2.0, 4.0, &probe).unwrap() > 0.5);
    }

    #[test]
    fn far_pairs_approach_half() {
        let p = exact_win_probability(50.0, 100.0, &Probe::default()).unwrap();
        assert!((p - 0.5).abs() < 1e-20);
        // The edge itself is still strictly positive.
        assert!(win_advantage(50.0, 100.0, &Probe::default()).unwrap() > 0.0);
    }

    #[test]
    fn argument_errors() {
        let p = Probe::default();
        assert!(matches!(exact_win_probability(1.0, 1.0, &p), Err(Error::EqualNumbers(_))));
        assert!(matches!(exact_win_probability(0.0, 1.0, &p), Err(Error::NonPositiveNumbers(..))));
        assert!(matches!(exact_win_probability(-1.0, 1.0, &p), Err(Error::NonPositiveNumbers(..))));
    }

    #[test]
    fn degenerate_probes_are_rejected() {
        assert!(Probe::custom("stuck", |_| 1.0, |_| 1.0).is_err());
        assert!(Probe::custom("starts-low", |z: f64| 0.5 * (-z).exp(), |_| 1.0).is_err());
        assert!(Probe::custom("rises", |z: f64| if z > 1.0 && z < 2.0 { 0.9 } else { (-z).exp() }, |_| 1.0).is_err());
        assert!(Probe::exponential(0.0).is_err());
    }

    #[test]
    fn play_cases() {
        let cases = [
            (1.0, 2.0, 1.5, Decision::Switch, true),
            (2.0, 1.0, 1.5, Decision::Keep, true),
            (1.0, 2.0, 0.5, Decision::Keep, false),
            (1.0, 2.0, 2.5, Decision::Switch, true),
            (2.0, 1.0, 2.5, Decision::Switch, false),
        ];
        for (a, b, z, d, won) in cases {
            let play = play_with_threshold(a, b, z);
            assert_eq!((play.decision, play.won), (d, won), "a={a} b={b} z={z}");
        }
    }

    #[test]
    fn play_cover_uses_the_assignment() {
        let dealt = deal(make_pair(Amount::from(1)).unwrap(), true);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let play = play_cover(&dealt, &Probe::default(), &mut rng);
        assert_eq!(play.decision == Decision::Switch, play.z > 1.0);
        assert_eq!(play.won, play.z > 1.0);
    }

    #[test]
    fn generic_probe_estimate_matches_closed_form() {
        let probe = Probe::shifted_exponential(0.5).unwrap();
        let est = estimate_win_rate(&[(1.0, 2.0)], &probe, 200_000, 9).unwrap();
        let e = &est[0];
        assert!(e.win.within(e.exact_p, 3.0), "{} vs {}", e.win.mean, e.exact_p);
        assert!(e.bits_mean.is_none());
    }
}
