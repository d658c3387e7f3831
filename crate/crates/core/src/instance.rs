//! Problem representation and the all-or-nothing objective.
//!
//! An instance is a list of items, each carrying a positive integer profit
//! `c_i` and a success probability `p_i`. A subset `S` is worth
//! `(sum of c_i over S) * (product of p_i over S)`: the profit is earned only
//! if every selected item succeeds.

use crate::error::{Error, Result};

/// One selectable item: integer profit, success probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Item {
    pub profit: u64,
    pub prob: f64,
}

impl Item {
    pub fn new(profit: u64, prob: f64) -> Self {
        Item { profit, prob }
    }
}

/// An ordered list of items. Items are identified everywhere by their
/// 0-based position in this list, also after normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub items: Vec<Item>,
}

/// A chosen index subset with its exact profit sum and objective value.
///
/// The empty support is legal and has value 0; solvers never return it for
/// instances with a positive-probability item but must not choke on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Item indices, strictly increasing.
    pub support: Vec<usize>,
    /// Exact integer profit sum over the support.
    pub profit_sum: u64,
    /// Objective value `profit_sum * product of probabilities`.
    pub value: f64,
}

impl Solution {
    pub fn empty() -> Self {
        Solution {
            support: Vec::new(),
            profit_sum: 0,
            value: 0.0,
        }
    }

    /// Builds a solution from a support, recomputing profit sum and value.
    pub fn from_support(instance: &Instance, mut support: Vec<usize>) -> Result<Self> {
        support.sort_unstable();
        support.dedup();
        let value = instance.objective(&support)?;
        let profit_sum = support.iter().map(|&i| instance.items[i].profit).sum();
        Ok(Solution {
            support,
            profit_sum,
            value,
        })
    }
}

/// Outcome of splitting an instance into forced, dropped, and residual items.
///
/// Items with `p = 1` are always worth taking and items with `p = 0` never
/// are, so solvers may run on the residual instance (all `0 < p < 1`) and add
/// the forced indices back afterwards.
#[derive(Debug, Clone)]
pub struct NormalizationReport {
    /// Original indices of items with `p = 1`.
    pub forced_in: Vec<usize>,
    /// Original indices of items with `p = 0`.
    pub dropped: Vec<usize>,
    /// Instance over the remaining items, in original order.
    pub residual: Instance,
    /// Maps residual positions back to original indices.
    pub residual_to_original: Vec<usize>,
}

impl NormalizationReport {
    /// Lifts a support over the residual instance back to original indices,
    /// unioning the forced items.
    pub fn lift(&self, residual_support: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = residual_support
            .iter()
            .map(|&i| self.residual_to_original[i])
            .chain(self.forced_in.iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl Instance {
    pub fn new(items: Vec<Item>) -> Self {
        Instance { items }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Checks the type invariants: at least one item, positive profits,
    /// probabilities in `[0, 1]`.
    pub fn validate(&self) -> Result<()> {
        if self.items.is_empty() {
            return Err(Error::EmptyInstance);
        }
        for (index, item) in self.items.iter().enumerate() {
            if item.profit == 0 {
                return Err(Error::NonPositiveProfit { index });
            }
            if !(0.0..=1.0).contains(&item.prob) {
                return Err(Error::ProbabilityOutOfRange {
                    index,
                    prob: item.prob,
                });
            }
        }
        Ok(())
    }

    /// Objective value of a support: exact integer profit sum times the
    /// floating-point probability product. Indices must be distinct.
    pub fn objective(&self, support: &[usize]) -> Result<f64> {
        let mut profit: u128 = 0;
        let mut prob = 1.0f64;
        for &i in support {
            let item = self
                .items
                .get(i)
                .ok_or(Error::IndexOutOfRange {
                    index: i,
                    len: self.items.len(),
                })?;
            profit += u128::from(item.profit);
            prob *= item.prob;
        }
        if support.is_empty() {
            return Ok(0.0);
        }
        Ok(profit as f64 * prob)
    }

    /// Log objective `ln(sum c_i) + sum ln p_i` over a non-empty support.
    /// All probabilities in the support must be positive.
    pub fn log_objective(&self, support: &[usize]) -> Result<f64> {
        if support.is_empty() {
            return Err(Error::EmptySupport);
        }
        let mut profit: u128 = 0;
        let mut log_prob = 0.0f64;
        for &i in support {
            let item = self
                .items
                .get(i)
                .ok_or(Error::IndexOutOfRange {
                    index: i,
                    len: self.items.len(),
                })?;
            if item.prob <= 0.0 {
                return Err(Error::ZeroProbabilityInSupport { index: i });
            }
            profit += u128::from(item.profit);
            log_prob += item.prob.ln();
        }
        Ok((profit as f64).ln() + log_prob)
    }

    /// Splits off items with probability exactly 1 (always selected) or
    /// exactly 0 (never selected); the residual keeps everything else.
    pub fn normalize(&self) -> Result<NormalizationReport> {
        self.validate()?;
        let mut forced_in = Vec::new();
        let mut dropped = Vec::new();
        let mut residual_items = Vec::new();
        let mut residual_to_original = Vec::new();
        for (i, item) in self.items.iter().enumerate() {
            if item.prob == 1.0 {
                forced_in.push(i);
            } else if item.prob == 0.0 {
                dropped.push(i);
            } else {
                residual_items.push(*item);
                residual_to_original.push(i);
            }
        }
        Ok(NormalizationReport {
            forced_in,
            dropped,
            residual: Instance::new(residual_items),
            residual_to_original,
        })
    }
}
