use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use two_envelopes::cover::{self, Probe};
use two_envelopes::envelope::{deal, make_pair, Amount};
use two_envelopes::game::{self, ArrangerStrategy, PlayerStrategy};
use two_envelopes::lazy::{self, BitStream};
use two_envelopes::posterior::{self, Decision};
use two_envelopes::prior::{self, DiscretePrior};
use two_envelopes::rational;
use two_envelopes::simulate::{self, RunOptions, Schema};
use two_envelopes::stats::Tally;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn pow2(k: u32) -> Amount {
    Amount::new(BigRational::from_integer(BigInt::one() << k)).unwrap()
}

/// Finite prior on distinct powers of two with positive integer weights.
fn dyadic_prior() -> impl Strategy<Value = DiscretePrior> {
    prop::collection::btree_map(0u32..16, 1u64..100, 1..8).prop_map(|atoms| {
        let total: u64 = atoms.values().sum();
        DiscretePrior::finite(
            atoms
                .into_iter()
                .map(|(k, w)| (pow2(k), q(w as i64, total as i64))),
        )
        .unwrap()
    })
}

/// A prior together with an observation it can produce.
fn prior_and_observation() -> impl Strategy<Value = (DiscretePrior, Amount)> {
    dyadic_prior().prop_flat_map(|p| {
        let mut obs: Vec<Amount> = p.support(0).iter().flat_map(|x| [x.clone(), x.double()]).collect();
        obs.sort();
        obs.dedup();
        (Just(p), prop::sample::select(obs))
    })
}

fn positive_rational() -> impl Strategy<Value = Amount> {
    (1i64..1_000_000, 1i64..1000).prop_map(|(n, d)| Amount::new(q(n, d)).unwrap())
}

proptest! {
    #[test]
    fn rational_render_parse_round_trip(n in -1_000_000i64..1_000_000, d in 1i64..100_000) {
        let r = q(n, d);
        prop_assert_eq!(rational::parse(&rational::render(&r)).unwrap(), r);
    }

    #[test]
    fn pairs_and_deals(x in positive_rational(), bit in any::<bool>()) {
        let pair = make_pair(x.clone()).unwrap();
        prop_assert_eq!(pair.larger(), &x.double());
        let dealt = deal(pair.clone(), bit);
        let other = deal(pair, !bit);
        prop_assert_eq!(dealt.a(), other.b());
        prop_assert!((dealt.swap_gain() + other.swap_gain()).is_zero());
    }

    #[test]
    fn split_sums_to_one_and_decisions_agree((p, a) in prior_and_observation()) {
        let split = posterior::split_discrete(&p, &a).unwrap();
        prop_assert!((&split.p_up + &split.p_down).is_one());
        let e = posterior::conditional_expectation(&p, &a).unwrap();
        let d = posterior::decide_expectation(&p, &a).unwrap();
        prop_assert_eq!(d == Decision::Switch, e > a);
        prop_assert_eq!(d == Decision::Keep, e < a);
        // Probability-of-larger switches exactly when the up move is likelier.
        let dp = posterior::decide_probability_of_larger(&p, &a).unwrap();
        prop_assert_eq!(dp == Decision::Switch, split.p_up > split.p_down);
    }

    #[test]
    fn every_proper_prior_has_an_uneven_split(p in dyadic_prior()) {
        let w = prior::find_half_half_violation(&p).unwrap();
        prop_assert!(!w.split.is_even());
        prop_assert_eq!(posterior::split_discrete(&p, &w.a).unwrap(), w.split);
    }

    #[test]
    fn cover_probability_is_symmetric_and_above_half(a in 1e-3f64..60.0, b in 1e-3f64..60.0) {
        prop_assume!(a != b);
        let probe = Probe::default();
        let p = cover::exact_win_probability(a, b, &probe).unwrap();
        prop_assert_eq!(p, cover::exact_win_probability(b, a, &probe).unwrap());
        // Far out the edge is below half an ulp of 1/2; the advantage itself stays positive.
        let edge = cover::win_advantage(a, b, &probe).unwrap();
        prop_assert!(edge > 0.0);
        prop_assert!(p > 0.5 || edge < f64::EPSILON);
    }

    #[test]
    fn symmetric_players_get_exactly_half(xs in prop::collection::btree_map(1u64..10_000, 1i64..50, 1..6)) {
        let total: i64 = xs.values().sum();
        let arranger = ArrangerStrategy::new(
            xs.iter().map(|(&x, &w)| (make_pair(Amount::from(x)).unwrap(), q(w, total))),
        ).unwrap();
        let half = q(1, 2);
        prop_assert_eq!(game::exact_win_value(&arranger, &PlayerStrategy::always_switch()), half.clone());
        prop_assert_eq!(game::exact_win_value(&arranger, &PlayerStrategy::never_switch()), half);
    }

    #[test]
    fn win_value_is_affine_in_each_q(xs in prop::collection::btree_set(1u64..64, 1..5), pick in any::<prop::sample::Index>()) {
        let arranger = ArrangerStrategy::uniform(xs.iter().map(|&x| Amount::from(x))).unwrap();
        let xs: Vec<u64> = xs.into_iter().collect();
        let target = Amount::from(xs[pick.index(xs.len())]);
        let value = |p: BigRational| {
            let player = PlayerStrategy::new([(target.clone(), p)], q(1, 3)).unwrap();
            game::exact_win_value(&arranger, &player)
        };
        let (v0, vh, v1) = (value(q(0, 1)), value(q(1, 2)), value(q(1, 1)));
        prop_assert_eq!(vh * BigRational::from_integer(2.into()), v0 + v1);
    }

    #[test]
    fn tally_merge_ignores_partition(values in prop::collection::vec(-50i64..50, 0..60), cut in any::<prop::sample::Index>()) {
        let cut = if values.is_empty() { 0 } else { cut.index(values.len() + 1) };
        let mut left = Tally::new();
        let mut right = Tally::new();
        let mut all = Tally::new();
        for (i, &v) in values.iter().enumerate() {
            let r = q(v, 3);
            all.record(r.clone());
            if i < cut { left.record(r) } else { right.record(r) }
        }
        right.merge(left);
        prop_assert_eq!(right.exact_mean(), all.exact_mean());
        prop_assert_eq!(right, all);
    }

    #[test]
    fn lazy_verdicts_are_monotone_in_the_threshold(seed in any::<u64>(), a in 1e-3f64..20.0, b in 1e-3f64..20.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let mut stream = BitStream::seeded(seed, 0);
        let first = lazy::lazy_compare(&mut stream, lo).unwrap();
        let second = lazy::lazy_compare(&mut stream, hi).unwrap();
        if second.z_exceeds_a {
            prop_assert!(first.z_exceeds_a);
        }
        // Same bits, same verdict.
        let again = lazy::lazy_compare(&mut BitStream::seeded(seed, 0), lo).unwrap();
        prop_assert_eq!(again.z_exceeds_a, first.z_exceeds_a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn simulations_ignore_thread_count(seed in any::<u64>(), n in 1u64..3000) {
        let schema = Schema::PriorConditioned { prior: DiscretePrior::broome(), a: Amount::from(4) };
        let one = simulate::run(&schema, n, seed, &RunOptions { threads: Some(1), trial_log: 50 }).unwrap();
        let many = simulate::run(&schema, n, seed, &RunOptions { threads: Some(4), trial_log: 50 }).unwrap();
        prop_assert_eq!(&one.outcomes, &many.outcomes);
        prop_assert_eq!(&one.trials, &many.trials);
        prop_assert_eq!(one.attempts, many.attempts);
    }
}

#[test]
fn deal_is_fair_over_a_million_trials() {
    let n = 1_000_000u64;
    let report = simulate::run_fixed_pair(&Amount::from(1), n, 3).unwrap();
    let a_smaller = report
        .outcomes
        .iter()
        .filter(|(a, _, _)| **a == Amount::from(1))
        .map(|(_, _, c)| c)
        .sum::<u64>();
    let sigma = (0.25 / n as f64).sqrt();
    let freq = a_smaller as f64 / n as f64;
    assert!((freq - 0.5).abs() <= 3.0 * sigma, "frequency {freq}");
}

#[test]
fn broome_sampling_matches_the_pmf() {
    // Chi-square over n = 0..9 and a pooled tail, 10 degrees of freedom.
    // 29.59 is the 0.999 quantile.
    let draws = 200_000u64;
    let prior = DiscretePrior::broome();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut bins = [0u64; 11];
    for _ in 0..draws {
        let x = prior.sample(&mut rng).unwrap();
        let n = rational::log2_exact(x.as_rational()).unwrap() as usize;
        bins[n.min(10)] += 1;
    }
    let pmf = |n: u32| (2.0f64 / 3.0).powi(n as i32) / 3.0;
    let mut chi2 = 0.0;
    for (n, &observed) in bins.iter().enumerate() {
        let p = if n < 10 { pmf(n as u32) } else { (2.0f64 / 3.0).powi(10) };
        let expected = p * draws as f64;
        chi2 += (observed as f64 - expected).powi(2) / expected;
        // Each bin on its own, with a wider margin since there are eleven.
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        assert!((observed as f64 - expected).abs() <= 4.0 * sigma, "bin {n}: {observed} vs {expected}");
    }
    assert!(chi2 < 29.59, "chi-square {chi2}");
}

#[test]
fn finite_prior_sampling_matches_weights() {
    let prior = DiscretePrior::finite([
        (Amount::from(1), q(1, 2)),
        (Amount::from(4), q(1, 3)),
        (Amount::from(16), q(1, 6)),
    ])
    .unwrap();
    let draws = 120_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut counts = [0u64; 3];
    for _ in 0..draws {
        let x = prior.sample(&mut rng).unwrap();
        let i = match x.to_string().as_str() {
            "1" => 0,
            "4" => 1,
            "16" => 2,
            other => panic!("unexpected draw {other}"),
        };
        counts[i] += 1;
    }
    for (c, p) in counts.iter().zip([0.5, 1.0 / 3.0, 1.0 / 6.0]) {
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        assert!((*c as f64 - p * draws as f64).abs() <= 3.0 * sigma);
    }
}
