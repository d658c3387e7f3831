//! Certified rational enclosures of the exponential function.
//!
//! Every comparison the hardness reduction needs reduces to
//! `rational vs rational * e^(rational)`. Enclosing `e^x` between exact
//! rational bounds (truncated series plus a geometric tail bound) turns
//! those into exact integer comparisons; widening the series until the
//! bounds separate yields a certified answer. `e^x` is irrational for
//! nonzero rational `x`, so the loop terminates whenever the compared
//! quantities are not genuinely equal.

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{One, Signed};
use std::cmp::Ordering;

use crate::error::{Error, Result};

pub(crate) type Rat = Ratio<BigInt>;

pub(crate) fn rat_u64(v: u64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Series term budgets tried in order before giving up.
const TERM_SCHEDULE: [usize; 6] = [24, 48, 96, 192, 384, 768];

/// Encloses `e^x` for rational `x >= 0` with `m` series terms.
///
/// With `S = sum_{j<m} x^j / j!` the tail is positive and bounded by
/// `x^m/m! * 1/(1 - x/(m+1))`, valid whenever `x < m + 1`.
pub(crate) fn exp_enclosure(x: &Rat, m: usize) -> (Rat, Rat) {
    assert!(!x.is_negative(), "exponent must be non-negative");
    // Keep the geometric ratio below 1/2 so the tail bound is tight.
    let m = m.max(2 * (x.ceil().to_integer().try_into().unwrap_or(1usize)) + 2);
    let mut term = Rat::one();
    let mut sum = Rat::one();
    for j in 1..m {
        term = term * x / Rat::from_integer(BigInt::from(j as u64));
        sum += &term;
    }
    let next = term * x / Rat::from_integer(BigInt::from(m as u64));
    let ratio = x / Rat::from_integer(BigInt::from((m + 1) as u64));
    debug_assert!(ratio < Rat::one());
    let tail = next / (Rat::one() - ratio);
    let hi = &sum + tail;
    (sum, hi)
}

/// `floor(scale * e^(-num/den))`, certified: the enclosure is refined until
/// it contains no integer.
pub(crate) fn floor_scaled_exp_neg(scale: u64, num: u64, den: u64) -> Result<u64> {
    let x = Rat::new(BigInt::from(num), BigInt::from(den));
    let scale = rat_u64(scale);
    for m in TERM_SCHEDULE {
        let (elo, ehi) = exp_enclosure(&x, m);
        // e^{-x} lies in [1/ehi, 1/elo]
        let lo = &scale / &ehi;
        let hi = &scale / &elo;
        let flo = lo.floor().to_integer();
        let fhi = hi.floor().to_integer();
        if flo == fhi {
            return (&flo)
                .try_into()
                .map_err(|_| Error::Overflow("rounded probability numerator"));
        }
    }
    Err(Error::PrecisionExhausted)
}

/// Certified order of a rational `q` against `a * e^(-num/den)`.
///
/// Returns an error only if the enclosure cannot separate the two at the
/// maximum series length, which signals genuine (or near-) equality.
pub(crate) fn cmp_vs_scaled_exp_neg(q: &Rat, a: u64, num: u64, den: u64) -> Result<Ordering> {
    let x = Rat::new(BigInt::from(num), BigInt::from(den));
    let a = rat_u64(a);
    for m in TERM_SCHEDULE {
        let (elo, ehi) = exp_enclosure(&x, m);
        let rhs_lo = &a / &ehi;
        let rhs_hi = &a / &elo;
        if *q > rhs_hi {
            return Ok(Ordering::Greater);
        }
        if *q < rhs_lo {
            return Ok(Ordering::Less);
        }
    }
    Err(Error::PrecisionExhausted)
}

/// Certified check that the per-item rounding loss cannot flip the
/// feasibility decision: with `x = e^(cmax/m) / k`, requires
///
/// ```text
/// (1 - x)^(-n) < min{ (m/(m-1)) e^(-1/m),  (m/(m+1)) e^(1/m) }.
/// ```
///
/// The left side bounds the total value lost to rounding all `n`
/// probabilities down by `1/k`; the right side is the value-space gap
/// between a profit sum hitting the target exactly and its best integer
/// neighbor. Returns `false` when the bounds cannot certify sufficiency
/// (the caller then escalates `k`).
pub(crate) fn rounding_denominator_sufficient(n: usize, m: u64, cmax: u64, k: u64) -> bool {
    let inv_m = Rat::new(BigInt::one(), BigInt::from(m));
    let x_exp = Rat::new(BigInt::from(cmax), BigInt::from(m));
    for terms in TERM_SCHEDULE {
        let (ec_lo, ec_hi) = exp_enclosure(&x_exp, terms);
        let x_hi = &ec_hi / rat_u64(k);
        if x_hi >= Rat::one() {
            return false;
        }
        let x_lo = &ec_lo / rat_u64(k);
        let lhs_hi = (Rat::one() / (Rat::one() - &x_hi)).pow(n as i32);
        let lhs_lo = (Rat::one() / (Rat::one() - &x_lo)).pow(n as i32);

        let (e1_lo, e1_hi) = exp_enclosure(&inv_m, terms);
        // (m/(m-1)) e^{-1/m} in [m/((m-1) e1_hi), m/((m-1) e1_lo)]
        let below_lo = rat_u64(m) / (rat_u64(m - 1) * &e1_hi);
        let below_hi = rat_u64(m) / (rat_u64(m - 1) * &e1_lo);
        // (m/(m+1)) e^{1/m} in [m e1_lo/(m+1), m e1_hi/(m+1)]
        let above_lo = rat_u64(m) * &e1_lo / rat_u64(m + 1);
        let above_hi = rat_u64(m) * &e1_hi / rat_u64(m + 1);

        if lhs_hi < below_lo && lhs_hi < above_lo {
            return true;
        }
        if lhs_lo > below_hi || lhs_lo > above_hi {
            return false;
        }
    }
    false
}
