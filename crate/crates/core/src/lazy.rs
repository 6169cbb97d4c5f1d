//! Deciding `Z > a` for `Z = -ln(U)` from finitely many fair coin tosses.
//!
//! `Z > a` is the same event as `U < e^(-a)`. The bits of `U` arrive one at
//! a time, pinning `U` to a dyadic interval of width `2^-k`; `e^(-a)` is
//! enclosed by a dyadic interval computed with directed-rounding fixed-point
//! arithmetic. As soon as the two intervals separate the verdict is final.
//! The enclosure is recomputed at 64, 128 and 256 bits as needed.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::streams::{self, lane};

/// Working precisions tried in order.
pub const PRECISION_LADDER: [u32; 3] = [64, 128, 256];
const GUARD_BITS: u32 = 32;

/// Fair bits drawn on demand, remembering the prefix read so far so that
/// several thresholds can be compared against the same `U`.
#[derive(Clone, Debug)]
pub struct BitStream {
    rng: ChaCha8Rng,
    word: u64,
    left_in_word: u32,
    prefix: BigUint,
    used: u32,
}

impl BitStream {
    pub fn new(rng: ChaCha8Rng) -> Self {
        BitStream {
            rng,
            word: 0,
            left_in_word: 0,
            prefix: BigUint::zero(),
            used: 0,
        }
    }

    /// The stream for case `index` under `seed`.
    pub fn seeded(seed: u64, index: u64) -> Self {
        BitStream::new(streams::trial_rng(seed, lane::LAZY, index))
    }

    /// Next fair bit; words are consumed most significant bit first.
    pub fn next_bit(&mut self) -> bool {
        if self.left_in_word == 0 {
            self.word = self.rng.next_u64();
            self.left_in_word = 64;
        }
        self.left_in_word -= 1;
        let bit = (self.word >> self.left_in_word) & 1 == 1;
        self.prefix <<= 1u32;
        if bit {
            self.prefix += 1u32;
        }
        self.used += 1;
        bit
    }

    /// Bits consumed so far.
    pub fn bits_used(&self) -> u32 {
        self.used
    }

    /// The integer `P` with `U in [P / 2^k, (P + 1) / 2^k)`, `k = bits_used()`.
    pub fn prefix(&self) -> &BigUint {
        &self.prefix
    }

    fn extend_to(&mut self, k: u32) {
        while self.used < k {
            self.next_bit();
        }
    }
}

/// `[lo, hi] / 2^prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub prec: u32,
    pub lo: BigUint,
    pub hi: BigUint,
}

/// Fixed-point interval with scale `2^w`.
#[derive(Clone, Debug)]
struct Fixed {
    lo: BigUint,
    hi: BigUint,
}

fn ceil_shr(x: &BigUint, s: u32) -> BigUint {
    let q = x >> s;
    if (&q << s) == *x {
        q
    } else {
        q + 1u32
    }
}

impl Fixed {
    fn mul(&self, other: &Fixed, w: u32) -> Fixed {
        Fixed {
            lo: (&self.lo * &other.lo) >> w,
            hi: ceil_shr(&(&self.hi * &other.hi), w),
        }
    }

    fn div_small(&self, d: u32) -> Fixed {
        let d = BigUint::from(d);
        Fixed {
            lo: &self.lo / &d,
            hi: Integer::div_ceil(&self.hi, &d),
        }
    }
}

/// `e^(-x)` for `x` in `[0, 1]` by the alternating Taylor series.
fn exp_neg_unit(x: &Fixed, w: u32) -> Fixed {
    let one = BigUint::one() << w;
    let mut lo = BigInt::from(one.clone());
    let mut hi = lo.clone();
    let mut term = Fixed {
        lo: one.clone(),
        hi: one,
    };
    let mut i = 1u32;
    loop {
        term = term.mul(x, w).div_small(i);
        if i % 2 == 1 {
            lo -= BigInt::from(term.hi.clone());
            hi -= BigInt::from(term.lo.clone());
        } else {
            lo += BigInt::from(term.lo.clone());
            hi += BigInt::from(term.hi.clone());
        }
        if term.hi <= BigUint::one() {
            break;
        }
        i += 1;
    }
    // Next term is at most the last one since x / (i + 1) <= 1.
    let slack = BigInt::from(term.hi);
    lo -= &slack;
    hi += slack;
    let clamp = |v: BigInt| v.to_biguint().unwrap_or_default();
    Fixed {
        lo: clamp(lo),
        hi: clamp(hi),
    }
}

/// Rigorous enclosure of `e^(-a)` at `prec` fractional bits.
pub fn exp_neg_enclosure(a: f64, prec: u32) -> Result<Enclosure> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::NonPositiveNumbers(a, a));
    }
    let w = prec + GUARD_BITS;
    let exact = BigRational::from_float(a).expect("finite");
    let k = exact.floor();
    // e^(-a) < 2^(-1.44 a), far below one unit at this precision.
    if k > BigRational::from_integer(BigInt::from(4 * prec)) {
        return Ok(Enclosure {
            prec,
            lo: BigUint::zero(),
            hi: BigUint::one(),
        });
    }
    let k = k.to_integer().to_u32().expect("bounded above");
    let frac = (&exact - BigRational::from_integer(k.into())) * BigRational::from_integer(BigInt::one() << w);
    let x = Fixed {
        lo: frac.floor().to_integer().to_biguint().expect("nonnegative"),
        hi: frac.ceil().to_integer().to_biguint().expect("nonnegative"),
    };
    let mut value = exp_neg_unit(&x, w);
    if k > 0 {
        let one = BigUint::one() << w;
        let inv_e = exp_neg_unit(&Fixed { lo: one.clone(), hi: one }, w);
        for _ in 0..k {
            value = value.mul(&inv_e, w);
        }
    }
    Ok(Enclosure {
        prec,
        lo: value.lo >> GUARD_BITS,
        hi: ceil_shr(&value.hi, GUARD_BITS),
    })
}

/// `e^(-a)` enclosed at every rung of the precision ladder.
#[derive(Clone, Debug)]
pub struct NegExpThreshold {
    a: f64,
    levels: Vec<Enclosure>,
}

impl NegExpThreshold {
    pub fn new(a: f64) -> Result<Self> {
        let levels = PRECISION_LADDER
            .iter()
            .map(|&p| exp_neg_enclosure(a, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(NegExpThreshold { a, levels })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LazyVerdict {
    pub z_exceeds_a: bool,
    /// Total bits drawn from the stream once the verdict was reached.
    pub bits_used: u32,
}

/// Decide `-ln(U) > a` reading only as many bits of `U` as needed.
pub fn lazy_compare(bits: &mut BitStream, a: f64) -> Result<LazyVerdict> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::NonPositiveNumbers(a, a));
    }
    lazy_compare_threshold(bits, &NegExpThreshold::new(a)?)
}

/// [`lazy_compare`] against a precomputed threshold.
pub fn lazy_compare_threshold(bits: &mut BitStream, threshold: &NegExpThreshold) -> Result<LazyVerdict> {
    let mut level = 0;
    let mut k = bits.bits_used().max(1);
    loop {
        bits.extend_to(k);
        let enc = &threshold.levels[level];
        let p = bits.prefix();
        let u_hi = (p + 1u32) << enc.prec;
        if u_hi <= (&enc.lo << k) {
            return Ok(LazyVerdict {
                z_exceeds_a: true,
                bits_used: bits.bits_used(),
            });
        }
        if (p << enc.prec) >= (&enc.hi << k) {
            return Ok(LazyVerdict {
                z_exceeds_a: false,
                bits_used: bits.bits_used(),
            });
        }
        // Undecided with U's interval finer than the enclosure: refine.
        if k + 2 >= enc.prec {
            level += 1;
            if level == threshold.levels.len() {
                return Err(Error::PrecisionExhausted(enc.prec));
            }
            continue;
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn to_f64(e: &Enclosure) -> (f64, f64) {
        let s = 2f64.powi(e.prec as i32);
        (e.lo.to_f64().unwrap() / s, e.hi.to_f64().unwrap() / s)
    }

    #[test]
    fn enclosures_contain_the_true_value() {
        for &a in &[1e-30, 1e-3, 0.5, 1.0, 2.0, 3.75, 10.0, 40.0, 100.0] {
            for &p in &PRECISION_LADDER {
                let e = exp_neg_enclosure(a, p).unwrap();
                assert!(e.lo <= e.hi);
                let (lo, hi) = to_f64(&e);
                let t = (-a).exp();
                assert!(lo <= t * (1.0 + 1e-15) && t <= hi * (1.0 + 1e-15) + 1e-300, "a={a} p={p}");
                // Width is a handful of units in the last place.
                let width = &e.hi - &e.lo;
                assert!(width.bits() <= 12, "a={a} p={p} width bits {}", width.bits());
            }
        }
    }

    #[test]
    fn enormous_arguments_collapse_to_one_ulp() {
        let e = exp_neg_enclosure(1e6, 64).unwrap();
        assert_eq!((e.lo, e.hi), (BigUint::zero(), BigUint::one()));
    }

    #[test]
    fn rejects_non_positive() {
        assert!(exp_neg_enclosure(0.0, 64).is_err());
        assert!(lazy_compare(&mut BitStream::seeded(0, 0), -1.0).is_err());
        assert!(lazy_compare(&mut BitStream::seeded(0, 0), f64::NAN).is_err());
    }

    #[test]
    fn separated_intervals_decide_in_two_bits() {
        // e^(-0.5) ~ 0.607 = 0.1001101...b. Any U starting 0.0 or 0.11 is decided by bit two.
        let t = NegExpThreshold::new(0.5).unwrap();
        for index in 0..200 {
            let mut bits = BitStream::seeded(3, index);
            let probe = bits.clone().next_bit();
            let v = lazy_compare_threshold(&mut bits, &t).unwrap();
            if !probe {
                // U < 1/2 < e^(-0.5), decided after the first bit.
                assert!(v.z_exceeds_a);
                assert_eq!(v.bits_used, 1);
            }
        }
    }

    #[test]
    fn reuses_prefix_for_second_threshold() {
        let mut bits = BitStream::seeded(5, 1);
        let first = lazy_compare(&mut bits, 1.0).unwrap();
        let used = bits.bits_used();
        let second = lazy_compare(&mut bits, 2.0).unwrap();
        assert!(bits.bits_used() >= used);
        // Z > 2 implies Z > 1.
        if second.z_exceeds_a {
            assert!(first.z_exceeds_a);
        }
    }
}
