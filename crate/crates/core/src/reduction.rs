//! Subset sum decided through the all-or-nothing solver.
//!
//! A subset-sum question (weights `c_i`, target `M`) maps to an instance
//! with profits `c_i` and probabilities `e^(-c_i/M)`: a support summing to
//! `N` is then worth `N e^(-N/M)`, which as a function of `N` has a strict
//! maximum at `N = M`. Some subset hits the target exactly if and only if
//! the optimum value exceeds the larger of the two integer neighbors'
//! values, `max{(M-1)e^(-(M-1)/M), (M+1)e^(-(M+1)/M)}`.
//!
//! To keep the construction finitely representable the probabilities are
//! rounded down to rationals `k_i/K` with `k_i = floor(K e^(-c_i/M))`.
//! Rounding only lowers values, so a decision of "feasible" is sound for
//! any `K`; "infeasible" is sound once the total rounding loss provably
//! stays below the gap to the threshold. The decision procedure certifies
//! that condition with exact interval arithmetic and enlarges `K` when the
//! default `6 n M^2` cannot be certified (which happens, e.g., for a single
//! weight equal to a small target).

use num::bigint::{BigInt, BigUint};
use num::{One, Zero};
use std::cmp::Ordering;

use crate::certexp::{
    cmp_vs_scaled_exp_neg, exp_enclosure, floor_scaled_exp_neg,
    rounding_denominator_sufficient, Rat,
};
use crate::error::{Error, Result};
use crate::exact::{fill_table, walk_support};
use crate::instance::{Instance, Item};

/// A subset-sum question: does some subset of `weights` sum to `target`?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSumInstance {
    pub weights: Vec<u64>,
    pub target: u64,
}

impl SubsetSumInstance {
    pub fn new(weights: Vec<u64>, target: u64) -> Self {
        SubsetSumInstance { weights, target }
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.is_empty() {
            return Err(Error::EmptyWeights);
        }
        for (index, &w) in self.weights.iter().enumerate() {
            if w == 0 {
                return Err(Error::ZeroWeight { index });
            }
        }
        if self.target == 0 {
            return Err(Error::BadDomain("target must be at least 1".into()));
        }
        Ok(())
    }
}

/// The image of a subset-sum instance: integer profits plus exact rational
/// probabilities `k_i / K`.
#[derive(Debug, Clone)]
pub struct ReducedInstance {
    /// Surviving weights, in original order.
    pub profits: Vec<u64>,
    /// `k_i = floor(K e^(-c_i/M))`, parallel to `profits`.
    pub numerators: Vec<u64>,
    /// The shared denominator `K`.
    pub denominator: u64,
    /// Original indices of weights above the target, which can never join a
    /// subset summing to it.
    pub dropped: Vec<usize>,
    /// The target `M`.
    pub target: u64,
}

impl ReducedInstance {
    /// Probability of item `idx` as an exact rational.
    pub fn probability(&self, idx: usize) -> Rat {
        Rat::new(
            BigInt::from(self.numerators[idx]),
            BigInt::from(self.denominator),
        )
    }

    /// Double-precision view for the floating solvers.
    pub fn to_instance(&self) -> Instance {
        Instance::new(
            self.profits
                .iter()
                .zip(&self.numerators)
                .map(|(&c, &k)| Item::new(c, k as f64 / self.denominator as f64))
                .collect(),
        )
    }
}

/// Decision outcome with the certified comparison's data, in log space.
#[derive(Debug, Clone)]
pub struct DecisionReport {
    pub feasible: bool,
    /// `ln` of the reduced instance's optimal value.
    pub optimal_log_value: f64,
    /// `ln` of the decision threshold.
    pub threshold: f64,
    pub margin: f64,
    /// Always true in a returned report; failure to certify is an error.
    pub certified: bool,
}

/// `f(y) = ln y - y/M`: the log objective of a support summing to `y` under
/// probabilities `e^(-c_i/M)`. Strictly maximal at `y = M`.
pub fn potential(y: f64, m: u64) -> Result<f64> {
    if y <= 0.0 || m < 2 {
        return Err(Error::BadDomain(format!("potential needs y > 0, M >= 2; got y={y}, M={m}")));
    }
    Ok(y.ln() - y / m as f64)
}

/// Lower bound `1/(5 M^2)` on `f(M) - f(N)` over integers `N != M`.
pub fn potential_gap_bound(m: u64) -> Result<f64> {
    if m < 2 {
        return Err(Error::BadDomain(format!("gap bound needs M >= 2; got {m}")));
    }
    Ok(1.0 / (5.0 * (m as f64) * (m as f64)))
}

/// Decision threshold in log space:
/// `max{ln(M-1) - (M-1)/M, ln(M+1) - (M+1)/M}`.
pub fn decision_threshold(m: u64) -> Result<f64> {
    if m < 2 {
        return Err(Error::BadDomain(format!("threshold needs M >= 2; got {m}")));
    }
    let mf = m as f64;
    let below = (mf - 1.0).ln() - (mf - 1.0) / mf;
    let above = (mf + 1.0).ln() - (mf + 1.0) / mf;
    Ok(below.max(above))
}

/// The default rounding denominator `K = 6 n M^2`.
pub fn rounding_denominator(n: usize, m: u64) -> Result<u64> {
    if n == 0 || m < 2 {
        return Err(Error::BadDomain(format!("need n >= 1, M >= 2; got n={n}, M={m}")));
    }
    let k = (n as u64)
        .checked_mul(6)
        .and_then(|v| v.checked_mul(m.checked_mul(m)?))
        .ok_or(Error::Overflow("rounding denominator"))?;
    // K must clear 5nM^2 / (1 - 1/(10nM^2)); equivalent to 10nM^2 > 6.
    let nm2 = n as u128 * m as u128 * m as u128;
    assert!(6 * nm2 * (10 * nm2 - 1) > 50 * nm2 * nm2);
    Ok(k)
}

/// Upper bound on the log-space loss from rounding all probabilities down
/// by at most `1/K`: `-n ln(1 - e^(cmax/M)/K)`.
pub fn rounding_loss_bound(n: usize, m: u64, cmax: u64, k: u64) -> f64 {
    let x = (cmax as f64 / m as f64).exp() / k as f64;
    -(n as f64) * (1.0 - x).ln()
}

fn reduce_with_denominator(
    ss: &SubsetSumInstance,
    denominator: u64,
) -> Result<ReducedInstance> {
    let m = ss.target;
    let mut profits = Vec::new();
    let mut numerators = Vec::new();
    let mut dropped = Vec::new();
    for (i, &w) in ss.weights.iter().enumerate() {
        if w > m {
            dropped.push(i);
            continue;
        }
        let k_i = floor_scaled_exp_neg(denominator, w, m)?;
        debug_assert!(k_i >= 1 && k_i < denominator);
        profits.push(w);
        numerators.push(k_i);
    }
    if profits.is_empty() {
        return Err(Error::AllWeightsExceedTarget { target: m });
    }
    Ok(ReducedInstance {
        profits,
        numerators,
        denominator,
        dropped,
        target: m,
    })
}

/// Maps a subset-sum instance to an all-or-nothing instance with exact
/// rational probabilities, using `K = 6 n M^2` (with `n` the full weight
/// count). Weights above the target are dropped rather than rejected.
pub fn reduce(ss: &SubsetSumInstance) -> Result<ReducedInstance> {
    ss.validate()?;
    if ss.target < 2 {
        return Err(Error::TargetTooSmall { target: ss.target });
    }
    let k = rounding_denominator(ss.weights.len(), ss.target)?;
    reduce_with_denominator(ss, k)
}

/// Exact optimum of a reduced instance: profit level, support (positions
/// into `profits`), and the value as an exact rational.
fn solve_reduced_exact(red: &ReducedInstance) -> Result<(u64, Vec<usize>, Rat)> {
    let n = red.profits.len();
    let k_big = BigUint::from(red.denominator);
    let scale_full = k_big.pow(n as u32);
    let scale_item = k_big.pow((n - 1) as u32);
    // Probabilities as integers at the fixed scale K^n; products divide the
    // scale back out exactly, and same-scale comparisons are plain integer
    // comparisons.
    let probs: Vec<BigUint> = red
        .numerators
        .iter()
        .map(|&k_i| BigUint::from(k_i) * &scale_item)
        .collect();
    let table = fill_table(
        &red.profits,
        &probs,
        &BigUint::zero(),
        &scale_full,
        |a, b| {
            let prod = a * b;
            debug_assert!((&prod % &scale_full).is_zero());
            prod / &scale_full
        },
    )?;
    let cbar = (table.width - 1) as u64;
    let mut best: Option<(u64, BigUint)> = None;
    for c in 1..=cbar {
        let p = table.at(n, c as usize);
        if p.is_zero() {
            continue;
        }
        let scaled_value = p * BigUint::from(c);
        if best.as_ref().is_none_or(|(_, bv)| scaled_value > *bv) {
            best = Some((c, scaled_value));
        }
    }
    let (c_star, scaled_value) = best.expect("non-empty reduced instance has a reachable level");
    let support = walk_support(&table, &red.profits, c_star);
    let value = Rat::new(
        BigInt::from(scaled_value),
        BigInt::from(scale_full),
    );
    Ok((c_star, support, value))
}

/// Decides the subset-sum question by solving the reduced instance exactly
/// and comparing its optimum against the threshold with certified interval
/// arithmetic.
///
/// A "feasible" outcome is sound for any denominator because rounding only
/// lowers values. An "infeasible" outcome is returned only once the
/// denominator is certified large enough that rounding cannot have pushed a
/// target-hitting support below the threshold; the denominator is doubled
/// until that certificate holds.
///
/// `target = 1` needs no rounding scheme: feasible exactly when some weight
/// equals 1. The report then carries an infinite margin.
pub fn decide(ss: &SubsetSumInstance) -> Result<DecisionReport> {
    ss.validate()?;
    let m = ss.target;
    if m == 1 {
        let feasible = ss.weights.contains(&1);
        return Ok(DecisionReport {
            feasible,
            optimal_log_value: if feasible { 0.0 } else { f64::NEG_INFINITY },
            threshold: f64::NEG_INFINITY,
            margin: f64::INFINITY,
            certified: true,
        });
    }
    let threshold = decision_threshold(m)?;
    if ss.weights.iter().all(|&w| w > m) {
        return Ok(DecisionReport {
            feasible: false,
            optimal_log_value: f64::NEG_INFINITY,
            threshold,
            margin: f64::INFINITY,
            certified: true,
        });
    }

    let mut denominator = rounding_denominator(ss.weights.len(), m)?;
    loop {
        let red = reduce_with_denominator(ss, denominator)?;
        let (c_star, support, value) = solve_reduced_exact(&red)?;
        let vs_below = cmp_vs_scaled_exp_neg(&value, m - 1, m - 1, m)?;
        let vs_above = cmp_vs_scaled_exp_neg(&value, m + 1, m + 1, m)?;
        let feasible = vs_below == Ordering::Greater && vs_above == Ordering::Greater;

        let n_surviving = red.profits.len();
        let cmax = *red.profits.iter().max().expect("non-empty");
        if feasible || rounding_denominator_sufficient(n_surviving, m, cmax, denominator) {
            let optimal_log_value = (c_star as f64).ln()
                + support
                    .iter()
                    .map(|&i| (red.numerators[i] as f64).ln() - (denominator as f64).ln())
                    .sum::<f64>();
            return Ok(DecisionReport {
                feasible,
                optimal_log_value,
                threshold,
                margin: (optimal_log_value - threshold).abs(),
                certified: true,
            });
        }
        denominator = denominator
            .checked_mul(2)
            .ok_or(Error::PrecisionExhausted)?;
    }
}

/// Exact enclosure check used by tests: `k/K <= e^(-c/M) < (k+1)/K`.
pub fn probability_sandwich_holds(k: u64, denominator: u64, c: u64, m: u64) -> bool {
    let x = Rat::new(BigInt::from(c), BigInt::from(m));
    let (elo, ehi) = exp_enclosure(&x, 96);
    let exp_neg_lo = Rat::one() / ehi;
    let exp_neg_hi = Rat::one() / elo;
    let lower = Rat::new(BigInt::from(k), BigInt::from(denominator));
    let upper = Rat::new(BigInt::from(k + 1), BigInt::from(denominator));
    lower <= exp_neg_lo && exp_neg_hi < upper
}

/// Log objective of a support under the unrounded probabilities
/// `e^(-c_i/M)`: `ln(sum c_i) - (sum c_i)/M`, i.e. the potential of the sum.
pub fn unrounded_log_objective(red: &ReducedInstance, support: &[usize]) -> Result<f64> {
    let sum: u64 = support.iter().map(|&i| red.profits[i]).sum();
    potential(sum as f64, red.target)
}

/// Log objective of a support under the rounded probabilities `k_i/K`.
pub fn rounded_log_objective(red: &ReducedInstance, support: &[usize]) -> Result<f64> {
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    let sum: u64 = support.iter().map(|&i| red.profits[i]).sum();
    let logs: f64 = support
        .iter()
        .map(|&i| (red.numerators[i] as f64).ln() - (red.denominator as f64).ln())
        .sum();
    Ok((sum as f64).ln() + logs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_hand_values() {
        let v = potential(4.0, 4).unwrap();
        assert!((v - (4.0f64.ln() - 1.0)).abs() < 1e-12);
        let v = potential(1.0, 2).unwrap();
        assert!((v + 0.5).abs() < 1e-12);
        assert!(potential(0.0, 4).is_err());
        assert!(potential(1.0, 1).is_err());
    }

    #[test]
    fn gap_bound_hand_values() {
        assert!((potential_gap_bound(4).unwrap() - 0.0125).abs() < 1e-15);
        assert!((potential_gap_bound(2).unwrap() - 0.05).abs() < 1e-15);
    }

    #[test]
    fn integer_gap_respects_the_bound_on_a_sweep() {
        for m in 2..=200u64 {
            let bound = potential_gap_bound(m).unwrap();
            let fm = potential(m as f64, m).unwrap();
            for n in 1..=(3 * m) {
                if n == m {
                    continue;
                }
                let fn_ = potential(n as f64, m).unwrap();
                assert!(
                    fm - fn_ >= bound,
                    "gap {} below bound {} at M={m}, N={n}",
                    fm - fn_,
                    bound
                );
            }
        }
    }

    #[test]
    fn denominator_formula() {
        assert_eq!(rounding_denominator(3, 4).unwrap(), 288);
        assert_eq!(rounding_denominator(1, 2).unwrap(), 24);
        assert!(rounding_denominator(0, 4).is_err());
        assert!(rounding_denominator(1, 1).is_err());
        // the formula clears its own lower bound: 240/(1 - 1/480) < 288
        let lower = 5.0 * 3.0 * 16.0 / (1.0 - 1.0 / (10.0 * 3.0 * 16.0));
        assert!(lower < 288.0);
    }

    #[test]
    fn reduce_worked_example() {
        let red = reduce(&SubsetSumInstance::new(vec![1, 2, 3], 4)).unwrap();
        assert_eq!(red.denominator, 288);
        assert_eq!(red.profits, vec![1, 2, 3]);
        assert_eq!(red.numerators, vec![224, 174, 136]);
        assert!(red.dropped.is_empty());
        for (idx, &c) in red.profits.iter().enumerate() {
            assert!(probability_sandwich_holds(
                red.numerators[idx],
                red.denominator,
                c,
                4
            ));
        }
    }

    #[test]
    fn reduce_drops_oversized_weights() {
        let red = reduce(&SubsetSumInstance::new(vec![5, 2], 4)).unwrap();
        assert_eq!(red.dropped, vec![0]);
        assert_eq!(red.profits, vec![2]);
        assert!(matches!(
            reduce(&SubsetSumInstance::new(vec![5, 6], 4)),
            Err(Error::AllWeightsExceedTarget { target: 4 })
        ));
        assert!(matches!(
            reduce(&SubsetSumInstance::new(vec![1], 1)),
            Err(Error::TargetTooSmall { target: 1 })
        ));
    }

    #[test]
    fn decide_worked_examples() {
        let report = decide(&SubsetSumInstance::new(vec![1, 2, 3], 4)).unwrap();
        assert!(report.feasible);
        assert!(report.certified);
        assert!((report.threshold - 0.359438).abs() < 1e-5);
        assert!(report.optimal_log_value > report.threshold);

        let report = decide(&SubsetSumInstance::new(vec![3, 3], 4)).unwrap();
        assert!(!report.feasible);
        assert!(report.certified);
    }

    #[test]
    fn decide_single_weight_equal_to_small_target() {
        // The default denominator 24 rounds e^{-1} to 8/24 = 1/3, whose value
        // 2/3 falls below the threshold 3e^{-3/2}; the decision procedure
        // must escalate the denominator rather than report "infeasible".
        let report = decide(&SubsetSumInstance::new(vec![2], 2)).unwrap();
        assert!(report.feasible);
        assert!(report.certified);
        let expected = 2.0f64.ln() + (17.0 / 48.0f64).ln();
        assert!((report.optimal_log_value - expected).abs() < 1e-12);
        assert!(report.optimal_log_value > decision_threshold(2).unwrap());
    }

    #[test]
    fn decide_target_one_special_case() {
        let report = decide(&SubsetSumInstance::new(vec![3, 1], 1)).unwrap();
        assert!(report.feasible);
        assert!(report.certified);
        let report = decide(&SubsetSumInstance::new(vec![3, 2], 1)).unwrap();
        assert!(!report.feasible);
    }

    #[test]
    fn decide_all_weights_above_target() {
        let report = decide(&SubsetSumInstance::new(vec![7, 9], 4)).unwrap();
        assert!(!report.feasible);
        assert!(report.certified);
    }

    // Independent reachability oracle.
    fn subset_sum_oracle(weights: &[u64], target: u64) -> bool {
        let target = target as usize;
        let mut reach = vec![false; target + 1];
        reach[0] = true;
        for &w in weights {
            let w = w as usize;
            if w > target {
                continue;
            }
            for c in (w..=target).rev() {
                if reach[c - w] {
                    reach[c] = true;
                }
            }
        }
        reach[target]
    }

    #[test]
    fn decide_matches_oracle_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5EED);
        for _ in 0..60 {
            let m = rng.gen_range(2..=30u64);
            let n = rng.gen_range(1..=8usize);
            let weights: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=m)).collect();
            let ss = SubsetSumInstance::new(weights.clone(), m);
            let report = decide(&ss).unwrap();
            assert_eq!(
                report.feasible,
                subset_sum_oracle(&weights, m),
                "disagreement on {weights:?} target {m}"
            );
            assert!(report.certified);
        }
    }

    #[test]
    fn potential_equals_log_objective_of_unrounded_probabilities() {
        // max over supports of f(sum) equals ln M - 1 exactly when some
        // subset hits the target.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x17AB);
        for _ in 0..40 {
            let m = rng.gen_range(2..=25u64);
            let n = rng.gen_range(1..=10usize);
            let weights: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=m)).collect();
            let mut best = f64::NEG_INFINITY;
            for mask in 1u32..(1 << n) {
                let sum: u64 = (0..n)
                    .filter(|&i| mask & (1 << i) != 0)
                    .map(|i| weights[i])
                    .sum();
                best = best.max(potential(sum as f64, m).unwrap());
            }
            let top = potential(m as f64, m).unwrap();
            if subset_sum_oracle(&weights, m) {
                assert!((best - top).abs() < 1e-12);
            } else {
                assert!(best < top - potential_gap_bound(m).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn rounding_loss_stays_within_the_envelope() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xE47);
        for _ in 0..20 {
            let m = rng.gen_range(2..=30u64);
            let n = rng.gen_range(1..=8usize);
            let weights: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=m)).collect();
            let red = reduce(&SubsetSumInstance::new(weights, m)).unwrap();
            let n_red = red.profits.len();
            let cmax = *red.profits.iter().max().unwrap();
            let envelope = rounding_loss_bound(n_red, m, cmax, red.denominator);
            for mask in 1u32..(1 << n_red) {
                let support: Vec<usize> = (0..n_red).filter(|&i| mask & (1 << i) != 0).collect();
                let z = unrounded_log_objective(&red, &support).unwrap();
                let zhat = rounded_log_objective(&red, &support).unwrap();
                assert!(z - zhat >= 0.0, "rounding raised a value");
                assert!(z - zhat <= envelope, "loss {} above envelope {envelope}", z - zhat);
            }
        }
    }

    #[test]
    fn feasible_optimum_sits_inside_the_loss_window() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xFEA5);
        let mut feasible_seen = 0;
        for _ in 0..80 {
            let m = rng.gen_range(2..=25u64);
            let n = rng.gen_range(1..=8usize);
            let weights: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=m)).collect();
            if !subset_sum_oracle(&weights, m) {
                continue;
            }
            feasible_seen += 1;
            let report = decide(&SubsetSumInstance::new(weights.clone(), m)).unwrap();
            assert!(report.feasible);
            let top = potential(m as f64, m).unwrap();
            assert!(report.optimal_log_value <= top + 1e-12);
            // margin over the threshold is at least the integer gap bound
            // minus the rounding loss budget
            let red = reduce(&SubsetSumInstance::new(weights, m)).unwrap();
            let cmax = *red.profits.iter().max().unwrap();
            let slack = potential_gap_bound(m).unwrap()
                - rounding_loss_bound(red.profits.len(), m, cmax, red.denominator);
            assert!(report.optimal_log_value - report.threshold >= slack - 1e-12);
        }
        assert!(feasible_seen > 10);
    }
}
