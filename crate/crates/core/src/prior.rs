//! Probability laws for the smaller amount `X`.
//!
//! Discrete priors are exact: weights are rationals, properness is decided
//! by exact summation, and infinite-support families carry an analytic
//! geometric tail instead of being truncated. Continuous priors are
//! evaluation handles over `f64`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::envelope::Amount;
use crate::error::{Error, Result};
use crate::posterior::{self, ExactSplit};
use crate::rational;

/// Geometric family on a dyadic grid: mass `first * ratio^m` at
/// `base * 2^(start + m)` for `m = 0, 1, 2, ...`, with `0 < ratio < 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometricTail {
    base: Amount,
    start: u32,
    first: BigRational,
    ratio: BigRational,
}

impl GeometricTail {
    pub fn new(base: Amount, start: u32, first: BigRational, ratio: BigRational) -> Result<Self> {
        if !base.is_positive() {
            return Err(Error::InvalidPrior("tail base must be positive".into()));
        }
        if !first.is_positive() {
            return Err(Error::InvalidPrior("tail leading mass must be positive".into()));
        }
        if !ratio.is_positive() || ratio >= BigRational::one() {
            return Err(Error::InvalidPrior("tail ratio must lie in (0, 1)".into()));
        }
        Ok(GeometricTail { base, start, first, ratio })
    }

    /// `sum_m first * ratio^m = first / (1 - ratio)`.
    pub fn total_mass(&self) -> BigRational {
        &self.first / (BigRational::one() - &self.ratio)
    }

    /// Support point of tail term `m`.
    pub fn point(&self, m: u64) -> Amount {
        let k = self.start as u64 + m;
        self.base
            .scale(&rational::pow2(k as u32))
            .expect("positive scale")
    }

    pub fn term_mass(&self, m: u64) -> BigRational {
        &self.first * num_traits::pow(self.ratio.clone(), m as usize)
    }

    /// Tail index of `x`, if `x` lies on the tail's grid.
    fn index_of(&self, x: &Amount) -> Option<u64> {
        if !x.is_positive() {
            return None;
        }
        let k = rational::log2_exact(&(x.as_rational() / self.base.as_rational()))?;
        (k >= self.start as i64).then(|| (k - self.start as i64) as u64)
    }
}

/// Cumulative threshold used by exact inverse-CDF sampling: the draw
/// `u = k / 2^64` falls at or before this point iff `k * den < num * 2^64`.
/// The fraction need not be in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Threshold {
    point: Amount,
    num_shifted: BigUint,
    den: BigUint,
}

impl Threshold {
    fn covers(&self, k: u64) -> bool {
        &self.den * k < self.num_shifted
    }
}

fn magnitude(b: &BigInt) -> BigUint {
    b.to_biguint().expect("nonnegative")
}

/// Running cumulative mass through the geometric tail, kept over the
/// unreduced common denominator `explicit_den * b * q^m` so that each step
/// is a pair of small multiplications rather than a gcd.
#[derive(Clone, Debug)]
struct TailCursor {
    m: u64,
    num: BigUint,
    den: BigUint,
    term_num: BigUint,
    p: BigUint,
    q: BigUint,
}

impl TailCursor {
    fn start(explicit: &BigRational, tail: &GeometricTail) -> Self {
        let (en, ed) = (magnitude(explicit.numer()), magnitude(explicit.denom()));
        let (a, b) = (magnitude(tail.first.numer()), magnitude(tail.first.denom()));
        TailCursor {
            m: 0,
            num: en * &b,
            den: &ed * b,
            term_num: a * ed,
            p: magnitude(tail.ratio.numer()),
            q: magnitude(tail.ratio.denom()),
        }
    }

    /// Add term `m` and return the threshold for its support point.
    fn advance(&mut self, tail: &GeometricTail) -> Threshold {
        self.num += &self.term_num;
        let t = Threshold {
            point: tail.point(self.m),
            num_shifted: &self.num << 64u32,
            den: self.den.clone(),
        };
        self.num *= &self.q;
        self.den *= &self.q;
        self.term_num *= &self.p;
        self.m += 1;
        t
    }

    fn remaining_below(&self, tail_total: &BigRational, explicit: &BigRational, bits: u32) -> bool {
        // remaining = explicit + tail_total - num/den, compared with 2^-bits.
        let cum = BigRational::new(self.num.clone().into(), self.den.clone().into());
        let remaining = explicit + tail_total - cum;
        remaining * BigRational::from_integer(BigInt::one() << bits) < BigRational::one()
    }
}

const MAX_PRECOMPUTED_TAIL_TERMS: u64 = 256;

/// A pmf on positive exact amounts: finitely many explicit atoms plus an
/// optional geometric tail.
#[derive(Clone, PartialEq, Eq)]
pub struct DiscretePrior {
    label: String,
    atoms: BTreeMap<Amount, BigRational>,
    tail: Option<GeometricTail>,
    thresholds: Vec<Threshold>,
}

impl fmt::Debug for DiscretePrior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscretePrior")
            .field("label", &self.label)
            .field("atoms", &self.atoms)
            .field("tail", &self.tail)
            .finish()
    }
}

impl DiscretePrior {
    /// Finite-support prior. Atoms must be distinct and positive, weights
    /// nonnegative, and the total must not exceed one.
    pub fn finite<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Amount, BigRational)>,
    {
        Self::with_tail("discrete", atoms, None)
    }

    pub fn with_tail<I>(label: &str, atoms: I, tail: Option<GeometricTail>) -> Result<Self>
    where
        I: IntoIterator<Item = (Amount, BigRational)>,
    {
        let mut map = BTreeMap::new();
        for (x, w) in atoms {
            if !x.is_positive() {
                return Err(Error::InvalidPrior(format!("support point {x} is not positive")));
            }
            if w.is_negative() {
                return Err(Error::InvalidPrior(format!("negative weight at {x}")));
            }
            if let Some(t) = &tail {
                if t.index_of(&x).is_some() {
                    return Err(Error::InvalidPrior(format!("atom {x} overlaps the tail")));
                }
            }
            if map.insert(x.clone(), w).is_some() {
                return Err(Error::InvalidPrior(format!("duplicate support point {x}")));
            }
        }
        let mut prior = DiscretePrior {
            label: label.to_string(),
            atoms: map,
            tail,
            thresholds: Vec::new(),
        };
        let total = prior.total_mass();
        if total > BigRational::one() {
            return Err(Error::MassExceedsOne(rational::render(&total)));
        }
        prior.thresholds = prior.build_thresholds();
        Ok(prior)
    }

    /// Point mass at `x`.
    pub fn point_mass(x: Amount) -> Result<Self> {
        Self::finite([(x, BigRational::one())])
    }

    /// Equal weights on the given points.
    pub fn uniform<I: IntoIterator<Item = Amount>>(points: I) -> Result<Self> {
        let points: Vec<Amount> = points.into_iter().collect();
        if points.is_empty() {
            return Err(Error::InvalidPrior("uniform prior needs at least one point".into()));
        }
        let w = BigRational::new(BigInt::one(), BigInt::from(points.len()));
        Self::finite(points.into_iter().map(|x| (x, w.clone())))
    }

    /// Broome's law: smaller amount `2^n` with probability `2^n / 3^(n+1)`.
    pub fn broome() -> Self {
        BroomePrior.to_discrete()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn tail(&self) -> Option<&GeometricTail> {
        self.tail.as_ref()
    }

    pub fn has_infinite_support(&self) -> bool {
        self.tail.is_some()
    }

    /// Explicit atoms in ascending order.
    pub fn atoms(&self) -> impl Iterator<Item = (&Amount, &BigRational)> {
        self.atoms.iter()
    }

    /// `P(X = x)`, exact; zero off the support.
    pub fn mass(&self, x: &Amount) -> BigRational {
        if let Some(w) = self.atoms.get(x) {
            return w.clone();
        }
        match self.tail.as_ref().and_then(|t| t.index_of(x).map(|m| t.term_mass(m))) {
            Some(w) => w,
            None => BigRational::zero(),
        }
    }

    /// Explicit weights plus analytic tail mass.
    pub fn total_mass(&self) -> BigRational {
        let explicit = self
            .atoms
            .values()
            .fold(BigRational::zero(), |acc, w| acc + w);
        match &self.tail {
            Some(t) => explicit + t.total_mass(),
            None => explicit,
        }
    }

    pub fn is_proper(&self) -> bool {
        self.total_mass().is_one()
    }

    /// Support points with positive mass, up to `tail_terms` tail points.
    pub fn support(&self, tail_terms: u64) -> Vec<Amount> {
        let mut pts: Vec<Amount> = self
            .atoms
            .iter()
            .filter(|(_, w)| w.is_positive())
            .map(|(x, _)| x.clone())
            .collect();
        if let Some(t) = &self.tail {
            pts.extend((0..tail_terms).map(|m| t.point(m)));
        }
        pts.sort();
        pts
    }

    /// `E[X]` for finite-support priors; `None` when a tail is present
    /// (geometric tails on a doubling grid may have infinite mean).
    pub fn mean(&self) -> Option<BigRational> {
        if self.tail.is_some() {
            return None;
        }
        Some(
            self.atoms
                .iter()
                .fold(BigRational::zero(), |acc, (x, w)| acc + x.as_rational() * w),
        )
    }

    fn explicit_mass(&self) -> BigRational {
        self.atoms.values().fold(BigRational::zero(), |acc, w| acc + w)
    }

    fn build_thresholds(&self) -> Vec<Threshold> {
        let mut cum = BigRational::zero();
        let mut out = Vec::new();
        // Inverse-CDF only needs a fixed order: atoms first, then the tail.
        for (x, w) in &self.atoms {
            cum += w;
            out.push(Threshold {
                point: x.clone(),
                num_shifted: magnitude(cum.numer()) << 64u32,
                den: magnitude(cum.denom()),
            });
        }
        if let Some(t) = &self.tail {
            let total = t.total_mass();
            let mut cursor = TailCursor::start(&cum, t);
            while cursor.m < MAX_PRECOMPUTED_TAIL_TERMS {
                out.push(cursor.advance(t));
                if cursor.m.is_multiple_of(16) && cursor.remaining_below(&total, &cum, 80) {
                    break;
                }
            }
        }
        out
    }

    /// Exact inverse-CDF draw of `X` from a 64-bit uniform `u = k / 2^64`.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<Amount> {
        if !self.is_proper() {
            return Err(Error::ImproperPrior(rational::render(&self.total_mass())));
        }
        Ok(self.sample_unchecked(rng.next_u64()))
    }

    pub(crate) fn sample_unchecked(&self, k: u64) -> Amount {
        let idx = self.thresholds.partition_point(|t| !t.covers(k));
        if let Some(t) = self.thresholds.get(idx) {
            return t.point.clone();
        }
        // Beyond the precomputed prefix: replay the tail and keep going.
        let t = self
            .tail
            .as_ref()
            .expect("a proper finite prior always covers u < 1");
        let mut cursor = TailCursor::start(&self.explicit_mass(), t);
        loop {
            let th = cursor.advance(t);
            if cursor.m as usize > self.thresholds.len() - self.atoms.len() && th.covers(k) {
                return th.point;
            }
        }
    }
}

/// The Broome prior as a standalone value; see [`DiscretePrior::broome`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BroomePrior;

impl BroomePrior {
    pub fn pmf(&self, n: u32) -> BigRational {
        BigRational::new(
            BigInt::one() << n,
            num_traits::pow(BigInt::from(3u32), n as usize + 1),
        )
    }

    /// `sum_{n<N} p(n) = 1 - (2/3)^N`.
    pub fn partial_mass(&self, terms: u32) -> BigRational {
        BigRational::one() - num_traits::pow(BigRational::new(2.into(), 3.into()), terms as usize)
    }

    pub fn to_discrete(self) -> DiscretePrior {
        let tail = GeometricTail::new(
            Amount::from(1),
            0,
            BigRational::new(1.into(), 3.into()),
            BigRational::new(2.into(), 3.into()),
        )
        .expect("valid Broome tail");
        DiscretePrior::with_tail("broome", std::iter::empty(), Some(tail)).expect("Broome is proper")
    }
}

/// `2^n / 3^(n+1)`.
pub fn broome_pmf(n: i64) -> Result<BigRational> {
    let n = u32::try_from(n).map_err(|_| Error::NegativeIndex(n))?;
    Ok(BroomePrior.pmf(n))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Properness {
    pub proper: bool,
    #[serde(with = "rational::serde_str")]
    pub total_mass: BigRational,
}

pub fn check_proper(prior: &DiscretePrior) -> Result<Properness> {
    let total_mass = prior.total_mass();
    if total_mass > BigRational::one() {
        return Err(Error::MassExceedsOne(rational::render(&total_mass)));
    }
    Ok(Properness {
        proper: total_mass.is_one(),
        total_mass,
    })
}

/// The "uniform over every `base * 2^n`" law. It cannot be normalised: any
/// positive per-point weight diverges, zero weight gives no mass at all.
/// It exists only to be rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImproperDyadicUniform {
    pub weight: BigRational,
}

impl ImproperDyadicUniform {
    /// Mass of the first `terms` grid points.
    pub fn partial_mass(&self, terms: u64) -> BigRational {
        &self.weight * BigInt::from(terms)
    }

    pub fn check_proper(&self) -> Result<Properness> {
        if self.weight.is_positive() {
            // First partial sum strictly above one.
            let terms: BigInt = (BigRational::one() / &self.weight).floor().to_integer() + 1;
            let terms = terms.to_u64().unwrap_or(u64::MAX);
            return Err(Error::MassExceedsOne(format!(
                "{} after {terms} points and unbounded beyond",
                rational::render(&self.partial_mass(terms))
            )));
        }
        Ok(Properness {
            proper: false,
            total_mass: BigRational::zero(),
        })
    }
}

/// An observation whose posterior split is not `(1/2, 1/2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfHalfWitness {
    pub a: Amount,
    pub split: ExactSplit,
}

/// Exhibit an observation at which the posterior is not an even split.
///
/// The scan runs over the observations that could be the larger amount,
/// `2 * support`, in ascending order: an even split there would force
/// `p(a) = p(a/2)` all the way up, which no proper prior allows. For
/// finite support the largest such observation is always a witness.
pub fn find_half_half_violation(prior: &DiscretePrior) -> Result<HalfHalfWitness> {
    if !prior.is_proper() {
        return Err(Error::ImproperPrior(rational::render(&prior.total_mass())));
    }
    let half = BigRational::new(1.into(), 2.into());
    let mut candidates: Vec<Amount> = prior.support(3).iter().map(Amount::double).collect();
    candidates.extend(prior.support(3));
    candidates.sort();
    candidates.dedup();
    let doubled: Vec<&Amount> = candidates
        .iter()
        .filter(|a| prior.mass(&a.halve()).is_positive())
        .collect();
    for a in doubled.into_iter().chain(candidates.iter()) {
        if let Ok(split) = posterior::split_discrete(prior, a) {
            if split.p_up != half {
                return Ok(HalfHalfWitness { a: a.clone(), split });
            }
        }
    }
    Err(Error::InvalidPrior("no observation breaks the even split".into()))
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Density handle for a continuously distributed smaller amount.
///
/// `scale` sets the log-grid used by the normalisation spot check and
/// `upper` the right end of the support when it is bounded.
#[derive(Clone)]
pub struct ContinuousPrior {
    label: String,
    density: RealFn,
    survival: Option<RealFn>,
    scale: f64,
    upper: Option<f64>,
}

impl fmt::Debug for ContinuousPrior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContinuousPrior")
            .field("label", &self.label)
            .field("scale", &self.scale)
            .field("upper", &self.upper)
            .finish_non_exhaustive()
    }
}

impl ContinuousPrior {
    /// A user density. Integrating to one is the caller's job; use
    /// [`ContinuousPrior::check_normalized`] to spot-check it.
    pub fn custom<F>(label: &str, density: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ContinuousPrior {
            label: label.to_string(),
            density: Arc::new(density),
            survival: None,
            scale: 1.0,
            upper: None,
        }
    }

    pub fn with_survival<F>(mut self, survival: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.survival = Some(Arc::new(survival));
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_upper(mut self, upper: f64) -> Self {
        self.upper = Some(upper);
        self
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidPrior(format!("exponential rate must be positive, got {rate}")));
        }
        Ok(ContinuousPrior::custom(&format!("exponential(rate={rate})"), move |x| {
            if x < 0.0 {
                0.0
            } else {
                rate * (-rate * x).exp()
            }
        })
        .with_survival(move |x| if x <= 0.0 { 1.0 } else { (-rate * x).exp() })
        .with_scale(1.0 / rate))
    }

    /// Uniform on `(0, max]`.
    pub fn uniform(max: f64) -> Result<Self> {
        if !(max.is_finite() && max > 0.0) {
            return Err(Error::InvalidPrior(format!("uniform bound must be positive, got {max}")));
        }
        Ok(ContinuousPrior::custom(&format!("uniform(0,{max}]"), move |x| {
            if x > 0.0 && x <= max {
                1.0 / max
            } else {
                0.0
            }
        })
        .with_survival(move |x| (1.0 - x.max(0.0) / max).max(0.0))
        .with_scale(max)
        .with_upper(max))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `f(x)` for `x > 0`.
    pub fn density_at(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::NonPositivePoint(x));
        }
        let f = (self.density)(x);
        if !(f >= 0.0) {
            return Err(Error::InvalidPrior(format!("density at {x} is {f}")));
        }
        Ok(f)
    }

    pub fn survival_at(&self, x: f64) -> Option<f64> {
        self.survival.as_ref().map(|s| s(x))
    }

    /// Trapezoid integral of the density on a log grid spanning
    /// `[scale * 1e-9, upper or scale * 1e4]`.
    pub fn normalization(&self) -> f64 {
        const POINTS: usize = 200_000;
        let lo = self.scale * 1e-9;
        let hi = self.upper.unwrap_or(self.scale * 1e4);
        let (llo, lhi) = (lo.ln(), hi.ln());
        let step = (lhi - llo) / (POINTS - 1) as f64;
        let mut prev_x = lo;
        let mut prev_f = (self.density)(lo);
        // Mass left of the grid, approximated as a rectangle.
        let mut total = prev_f * lo;
        for i in 1..POINTS {
            let x = if i == POINTS - 1 { hi } else { (llo + step * i as f64).exp() };
            let f = (self.density)(x);
            total += 0.5 * (f + prev_f) * (x - prev_x);
            prev_x = x;
            prev_f = f;
        }
        total
    }

    /// Normalisation within relative `1e-6`, nonnegative density and
    /// nonincreasing survival on the check grid.
    pub fn check_normalized(&self) -> Result<()> {
        let total = self.normalization();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidPrior(format!(
                "{} integrates to {total}, not 1",
                self.label
            )));
        }
        if let Some(s) = &self.survival {
            let mut prev = f64::INFINITY;
            for k in -40..=40 {
                let x = self.scale * 2f64.powi(k);
                let v = s(x);
                if !(0.0..=1.0).contains(&v) || v > prev {
                    return Err(Error::InvalidPrior(format!(
                        "{}: survival not monotone at {x}",
                        self.label
                    )));
                }
                prev = v;
            }
        }
        Ok(())
    }
}

/// Either kind of prior, as loaded from a file or a built-in name.
#[derive(Clone, Debug)]
pub enum Prior {
    Discrete(DiscretePrior),
    Continuous(ContinuousPrior),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub x: Amount,
    #[serde(with = "rational::serde_str")]
    pub w: BigRational,
}

/// On-disk prior definition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PriorSpec {
    Discrete { atoms: Vec<AtomSpec> },
    Broome,
    Exponential { rate: f64 },
    Uniform { max: f64 },
}

impl PriorSpec {
    pub fn builtin(name: &str) -> Option<PriorSpec> {
        match name {
            "broome" => Some(PriorSpec::Broome),
            "exponential" => Some(PriorSpec::Exponential { rate: 1.0 }),
            _ => None,
        }
    }

    pub fn from_json(text: &str) -> Result<PriorSpec> {
        Ok(serde_json::from_str(text)?)
    }

    /// A built-in name, or otherwise a path to a JSON definition.
    pub fn resolve(name_or_path: &str) -> Result<PriorSpec> {
        if let Some(spec) = Self::builtin(name_or_path) {
            return Ok(spec);
        }
        let text = std::fs::read_to_string(Path::new(name_or_path))
            .map_err(|e| Error::Io(format!("{name_or_path}: {e}")))?;
        Self::from_json(&text)
    }

    pub fn build(&self) -> Result<Prior> {
        Ok(match self {
            PriorSpec::Discrete { atoms } => Prior::Discrete(DiscretePrior::finite(
                atoms.iter().map(|a| (a.x.clone(), a.w.clone())),
            )?),
            PriorSpec::Broome => Prior::Discrete(DiscretePrior::broome()),
            PriorSpec::Exponential { rate } => Prior::Continuous(ContinuousPrior::exponential(*rate)?),
            PriorSpec::Uniform { max } => Prior::Continuous(ContinuousPrior::uniform(*max)?),
        })
    }
}
