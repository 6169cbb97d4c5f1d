//! The arranger fills the envelopes, the player picks a switching policy.
//! Payoff is 1 if the player ends with the larger amount, else 0.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cover::{self, Probe};
use crate::envelope::{make_pair, Amount, EnvelopePair};
use crate::error::{Error, Result};
use crate::rational;

/// Finite mixture over envelope pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrangerStrategy {
    atoms: Vec<(EnvelopePair, BigRational)>,
}

impl ArrangerStrategy {
    /// Weights must be positive, sum to exactly one, and pairs must be distinct.
    pub fn new<I: IntoIterator<Item = (EnvelopePair, BigRational)>>(atoms: I) -> Result<Self> {
        let atoms: Vec<_> = atoms.into_iter().collect();
        if atoms.is_empty() {
            return Err(Error::InvalidStrategy("arranger has no pairs".into()));
        }
        let mut seen = BTreeSet::new();
        let mut total = BigRational::zero();
        for (pair, w) in &atoms {
            if *w <= BigRational::zero() {
                return Err(Error::InvalidStrategy(format!(
                    "weight {} for pair {} must be positive",
                    rational::render(w),
                    pair.smaller()
                )));
            }
            if !seen.insert(pair.smaller().clone()) {
                return Err(Error::InvalidStrategy(format!("pair {} listed twice", pair.smaller())));
            }
            total += w;
        }
        if !total.is_one() {
            return Err(Error::InvalidStrategy(format!(
                "weights sum to {}, not 1",
                rational::render(&total)
            )));
        }
        Ok(ArrangerStrategy { atoms })
    }

    /// All mass on the pair `(x, 2x)`.
    pub fn point_mass(x: Amount) -> Result<Self> {
        ArrangerStrategy::new([(make_pair(x)?, BigRational::one())])
    }

    /// Equal weight on the pairs with the given smaller amounts.
    pub fn uniform<I: IntoIterator<Item = Amount>>(smaller: I) -> Result<Self> {
        let pairs = smaller.into_iter().map(make_pair).collect::<Result<Vec<_>>>()?;
        let w = BigRational::new(1.into(), pairs.len().max(1).into());
        ArrangerStrategy::new(pairs.into_iter().map(|p| (p, w.clone())))
    }

    pub fn atoms(&self) -> &[(EnvelopePair, BigRational)] {
        &self.atoms
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ArrangerSpec = serde_json::from_str(text)?;
        let atoms = spec
            .atoms
            .into_iter()
            .map(|a| Ok((make_pair(a.x)?, a.w)))
            .collect::<Result<Vec<_>>>()?;
        ArrangerStrategy::new(atoms)
    }

    pub fn to_spec(&self) -> ArrangerSpec {
        ArrangerSpec {
            atoms: self
                .atoms
                .iter()
                .map(|(p, w)| PairWeight {
                    x: p.smaller().clone(),
                    w: w.clone(),
                })
                .collect(),
        }
    }
}

/// JSON form: `{"atoms": [{"x": "1", "w": "1/2"}, ...]}`, where `x` is the
/// smaller amount of each pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArrangerSpec {
    pub atoms: Vec<PairWeight>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairWeight {
    pub x: Amount,
    #[serde(with = "rational::serde_str")]
    pub w: BigRational,
}

/// Switch probability for each observed amount; unlisted amounts use
/// `default_q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayerStrategy {
    #[serde(default, with = "q_map")]
    q: BTreeMap<Amount, BigRational>,
    #[serde(with = "rational::serde_str")]
    default_q: BigRational,
}

impl PlayerStrategy {
    pub fn new<I: IntoIterator<Item = (Amount, BigRational)>>(q: I, default_q: BigRational) -> Result<Self> {
        let q: BTreeMap<_, _> = q.into_iter().collect();
        let player = PlayerStrategy { q, default_q };
        player.validate()?;
        Ok(player)
    }

    pub fn always_switch() -> Self {
        PlayerStrategy {
            q: BTreeMap::new(),
            default_q: BigRational::one(),
        }
    }

    pub fn never_switch() -> Self {
        PlayerStrategy {
            q: BTreeMap::new(),
            default_q: BigRational::zero(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let player: PlayerStrategy = serde_json::from_str(text)?;
        player.validate()?;
        Ok(player)
    }

    fn validate(&self) -> Result<()> {
        let unit = |p: &BigRational| *p >= BigRational::zero() && *p <= BigRational::one();
        if !unit(&self.default_q) {
            return Err(Error::InvalidStrategy(format!(
                "default_q = {} is not a probability",
                rational::render(&self.default_q)
            )));
        }
        for (a, p) in &self.q {
            if !unit(p) {
                return Err(Error::InvalidStrategy(format!(
                    "q({a}) = {} is not a probability",
                    rational::render(p)
                )));
            }
        }
        Ok(())
    }

    /// Probability of switching after seeing `a`.
    pub fn q(&self, a: &Amount) -> &BigRational {
        self.q.get(a).unwrap_or(&self.default_q)
    }
}

mod q_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        q: &BTreeMap<Amount, BigRational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let m: BTreeMap<String, String> = q
            .iter()
            .map(|(a, p)| (a.to_string(), rational::render(p)))
            .collect();
        m.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<Amount, BigRational>, D::Error> {
        let m: BTreeMap<String, String> = BTreeMap::deserialize(d)?;
        m.into_iter()
            .map(|(a, p)| {
                let a = a.parse::<Amount>().map_err(serde::de::Error::custom)?;
                let p = rational::parse(&p).map_err(serde::de::Error::custom)?;
                Ok((a, p))
            })
            .collect()
    }
}

/// Exact probability that the player ends with the larger amount.
///
/// Each pair `(x, 2x)` with weight `w` is dealt both ways with weight `w/2`:
/// seeing `x` the player wins by switching, seeing `2x` by keeping.
pub fn exact_win_value(arranger: &ArrangerStrategy, player: &PlayerStrategy) -> BigRational {
    let half = BigRational::new(1.into(), 2.into());
    arranger
        .atoms
        .iter()
        .fold(BigRational::zero(), |acc, (pair, w)| {
            let from_smaller = player.q(pair.smaller()).clone();
            let from_larger = BigRational::one() - player.q(pair.larger());
            acc + w * &half * (from_smaller + from_larger)
        })
}

/// Win probability of the threshold strategy, averaged over the arranger.
pub fn cover_vs_arranger(arranger: &ArrangerStrategy, probe: &Probe) -> Result<f64> {
    arranger.atoms.iter().try_fold(0.0, |acc, (pair, w)| {
        let p = cover::exact_win_probability(pair.smaller().to_f64(), pair.larger().to_f64(), probe)?;
        Ok(acc + rational::to_f64(w) * p)
    })
}

/// Pair found by [`shift_adversary`].
#[derive(Clone, Debug, Serialize)]
pub struct AdversaryReport {
    pub probe: String,
    pub epsilon: f64,
    pub k: f64,
    pub pair: (Amount, Amount),
    pub win_value: f64,
    pub advantage: f64,
}

/// A pair `(k, 2k)` against which the threshold strategy wins with
/// probability below `1/2 + epsilon`.
///
/// `k` doubles from 1 until the advantage drops below `epsilon`, then a
/// bisection moves it down to the smallest such double.
pub fn shift_adversary(probe: &Probe, epsilon: f64) -> Result<ArrangerStrategy> {
    ArrangerStrategy::point_mass(Amount::from_f64_exact(shift_adversary_k(probe, epsilon)?)?)
}

fn shift_adversary_k(probe: &Probe, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidStrategy(format!("epsilon must lie in (0, 1/2), got {epsilon}")));
    }
    let beats = |k: f64| -> Result<bool> { Ok(cover::win_advantage(k, 2.0 * k, probe)? < epsilon) };
    let mut hi = 1.0f64;
    if beats(hi)? {
        return Ok(hi);
    }
    while !beats(hi)? {
        hi *= 2.0;
        if !(2.0 * hi).is_finite() {
            return Err(Error::SearchFailed(format!(
                "advantage of {} never falls below {epsilon}",
                probe.label()
            )));
        }
    }
    let mut lo = hi / 2.0;
    loop {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            return Ok(hi);
        }
        if beats(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// [`shift_adversary`] with the resulting values spelled out.
pub fn shift_adversary_report(probe: &Probe, epsilon: f64) -> Result<AdversaryReport> {
    let arranger = shift_adversary(probe, epsilon)?;
    let pair = &arranger.atoms[0].0;
    let (k, two_k) = (pair.smaller().to_f64(), pair.larger().to_f64());
    let advantage = cover::win_advantage(k, two_k, probe)?;
    Ok(AdversaryReport {
        probe: probe.label().to_string(),
        epsilon,
        k,
        pair: (pair.smaller().clone(), pair.larger().clone()),
        win_value: 0.5 + advantage,
        advantage,
    })
}
