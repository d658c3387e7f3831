//! Exact solvers: exhaustive enumeration and the profit-indexed dynamic
//! program with solution reconstruction.
//!
//! The DP table `P(i, C)` holds the maximum success probability of a subset
//! of the first `i` items whose profit sum is exactly `C`. The recurrence is
//!
//! ```text
//! P(i, C) = max { P(i-1, C),  p_i * P(i-1, C - c_i) }   if c_i <= C,
//! P(i, C) = P(i-1, C)                                   if c_i > C,
//! P(i, 0) = 1,  P(0, C) = 0 for C >= 1.
//! ```
//!
//! Note the `c_i <= C` boundary: an item whose profit equals the target level
//! must be takeable (via the `C = 0` base row), otherwise single-item levels
//! are unreachable. The optimum is `max over C of C * P(n, C)`.

use crate::error::{Error, Result};
use crate::instance::{Instance, Solution};

/// Enumeration is capped at `2^BRUTE_FORCE_MAX_ITEMS` subsets.
pub const BRUTE_FORCE_MAX_ITEMS: usize = 25;

/// Profit-indexed table over any probability-like type.
///
/// `P` needs ordering and a product; f64 is used by the floating solver and
/// an exact big-integer representation by the hardness-reduction decision
/// procedure.
#[derive(Debug, Clone)]
pub(crate) struct TableBuf<P> {
    pub probs: Vec<P>,
    pub took: Vec<bool>,
    pub rows: usize,  // n + 1
    pub width: usize, // cbar + 1
}

impl<P: Clone> TableBuf<P> {
    pub fn at(&self, i: usize, c: usize) -> &P {
        &self.probs[i * self.width + c]
    }

    pub fn took(&self, i: usize, c: usize) -> bool {
        self.took[i * self.width + c]
    }
}

/// Fills the table bottom-up. `mul(entry, item_prob)` must return the exact
/// or rounded product in `P`'s representation; ties between take and skip
/// keep the skip branch so reconstruction is deterministic.
pub(crate) fn fill_table<P, M>(
    profits: &[u64],
    probs: &[P],
    zero: &P,
    one: &P,
    mul: M,
) -> Result<TableBuf<P>>
where
    P: Clone + PartialOrd,
    M: Fn(&P, &P) -> P,
{
    let n = profits.len();
    let cbar: u64 = profits
        .iter()
        .try_fold(0u64, |acc, &c| acc.checked_add(c))
        .ok_or(Error::CapacityOverflow)?;
    let width = usize::try_from(cbar)
        .ok()
        .and_then(|w| w.checked_add(1))
        .ok_or(Error::CapacityOverflow)?;
    let cells = (n + 1).checked_mul(width).ok_or(Error::CapacityOverflow)?;

    let mut table = TableBuf {
        probs: vec![zero.clone(); cells],
        took: vec![false; cells],
        rows: n + 1,
        width,
    };
    table.probs[0] = one.clone();
    for i in 1..=n {
        let c_i = profits[i - 1] as usize;
        table.probs[i * width] = one.clone();
        for c in 1..width {
            let skip = table.probs[(i - 1) * width + c].clone();
            let mut best = skip;
            let mut took = false;
            if c_i <= c {
                let take = mul(table.at(i - 1, c - c_i), &probs[i - 1]);
                if take > best {
                    best = take;
                    took = true;
                }
            }
            table.probs[i * width + c] = best;
            table.took[i * width + c] = took;
        }
    }
    Ok(table)
}

/// Walks the take flags from the last item down, returning the support that
/// achieves profit `c` in the final row. Purely structural; shared by every
/// table instantiation.
pub(crate) fn walk_support<P: Clone>(table: &TableBuf<P>, profits: &[u64], c: u64) -> Vec<usize> {
    let mut support = Vec::new();
    let mut c = c as usize;
    for i in (1..table.rows).rev() {
        if table.took(i, c) {
            support.push(i - 1);
            c -= profits[i - 1] as usize;
        }
    }
    support.reverse();
    support
}

/// The floating-point DP table with take flags for reconstruction.
#[derive(Debug, Clone)]
pub struct DpTable {
    buf: TableBuf<f64>,
    profits: Vec<u64>,
    cbar: u64,
}

impl DpTable {
    /// `P(i, c)`: maximum probability over subsets of the first `i` items
    /// with profit exactly `c`.
    pub fn prob(&self, i: usize, c: u64) -> f64 {
        *self.buf.at(i, c as usize)
    }

    pub fn took(&self, i: usize, c: u64) -> bool {
        self.buf.took(i, c as usize)
    }

    /// Total profit `sum c_i`, the last reachable column.
    pub fn cbar(&self) -> u64 {
        self.cbar
    }

    pub fn n(&self) -> usize {
        self.buf.rows - 1
    }

    /// Number of table cells, the work proxy reported by benchmarks.
    pub fn cells(&self) -> u64 {
        self.buf.rows as u64 * self.buf.width as u64
    }
}

/// Builds the DP table for an instance.
pub fn build_dp(instance: &Instance) -> Result<DpTable> {
    instance.validate()?;
    let profits: Vec<u64> = instance.items.iter().map(|it| it.profit).collect();
    let probs: Vec<f64> = instance.items.iter().map(|it| it.prob).collect();
    let buf = fill_table(&profits, &probs, &0.0, &1.0, |a, b| a * b)?;
    let cbar = (buf.width - 1) as u64;
    Ok(DpTable { buf, profits, cbar })
}

/// Returns the support achieving `P(n, c)`, or `UnreachableProfit` if no
/// subset sums to `c`.
pub fn reconstruct(table: &DpTable, instance: &Instance, c: u64) -> Result<Vec<usize>> {
    if c > table.cbar() || table.prob(table.n(), c) == 0.0 {
        return Err(Error::UnreachableProfit { profit: c });
    }
    let support = walk_support(&table.buf, &table.profits, c);
    debug_assert_eq!(
        support.iter().map(|&i| instance.items[i].profit).sum::<u64>(),
        c
    );
    Ok(support)
}

/// Solves an instance via the DP: scans `C * P(n, C)` over all profit levels
/// and reconstructs the best support. Ties keep the smallest profit level.
pub fn dp_solve(instance: &Instance) -> Result<Solution> {
    let table = build_dp(instance)?;
    let n = table.n();
    let mut best: Option<(u64, f64)> = None;
    for c in 1..=table.cbar() {
        let v = c as f64 * table.prob(n, c);
        if v > best.map_or(0.0, |(_, bv)| bv) {
            best = Some((c, v));
        }
    }
    match best {
        None => Ok(Solution::empty()),
        Some((c, _)) => {
            let support = reconstruct(&table, instance, c)?;
            Solution::from_support(instance, support)
        }
    }
}

/// Exhaustive enumeration over all `2^n` subsets; the testing oracle.
///
/// Ties are broken by smallest profit sum, then lexicographically smallest
/// support.
pub fn brute_force(instance: &Instance) -> Result<Solution> {
    instance.validate()?;
    let n = instance.len();
    if n > BRUTE_FORCE_MAX_ITEMS {
        return Err(Error::TooLargeForEnumeration {
            n,
            max: BRUTE_FORCE_MAX_ITEMS,
        });
    }
    let mut best_mask: u32 = 0;
    let mut best_value = 0.0f64;
    let mut best_profit: u64 = 0;
    for mask in 1u32..(1u32 << n) {
        let mut profit: u64 = 0;
        let mut prob = 1.0f64;
        for i in 0..n {
            if mask & (1 << i) != 0 {
                profit += instance.items[i].profit;
                prob *= instance.items[i].prob;
            }
        }
        let value = profit as f64 * prob;
        let better = value > best_value
            || (value == best_value
                && (profit < best_profit
                    || (profit == best_profit && lex_smaller(mask, best_mask, n))));
        if better {
            best_mask = mask;
            best_value = value;
            best_profit = profit;
        }
    }
    let support: Vec<usize> = (0..n).filter(|i| best_mask & (1 << i) != 0).collect();
    Solution::from_support(instance, support)
}

// Lexicographic order on the sorted index sequences of two masks.
fn lex_smaller(a: u32, b: u32, n: usize) -> bool {
    for i in 0..n {
        let in_a = a & (1 << i) != 0;
        let in_b = b & (1 << i) != 0;
        if in_a != in_b {
            return in_a;
        }
    }
    false
}
