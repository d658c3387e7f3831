//! Approximation scheme with profit scaling.
//!
//! Profits are divided by a factor `kappa = eps * max_i(p_i c_i) / n` and
//! floored, which caps the scaled profits of high-probability items (those
//! with `p_i >= 1/2`) at `2n/eps` and the scaled DP capacity at
//! `2n^2/eps + n`. Any optimal support contains at most one item with
//! `p < 1/2`, so running the scaled DP over the high items while enumerating
//! that one extra low item (or none) covers every optimum shape; singleton
//! candidates cover the rest. Candidates are ranked by their true objective,
//! which makes the returned value a lower bound on the scaled proxy's
//! guarantee: at least `(1 - eps)` times the exact optimum.
//!
//! The floors `c_i / kappa` are computed in exact rational arithmetic; a
//! floor that is off by one would silently void the guarantee. When epsilon
//! arrives as a decimal string it is taken as the exact decimal it spells,
//! not as its nearest double.

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{fill_table, walk_support, TableBuf};
use crate::instance::{Instance, Solution};

type Rat = Ratio<BigInt>;

/// Relative accuracy target, exact both as a decimal and as a double.
#[derive(Debug, Clone)]
pub struct Epsilon {
    approx: f64,
    exact: Rat,
}

impl Epsilon {
    /// Accepts a double, interpreted exactly (every finite double is a
    /// binary rational).
    pub fn new(value: f64) -> Result<Self> {
        let exact = Rat::from_float(value).ok_or(Error::EpsilonOutOfRange { eps: value })?;
        Self::checked(value, exact)
    }

    /// Accepts a decimal string such as `0.1`, interpreted as the exact
    /// decimal it spells rather than the nearest double.
    pub fn parse(text: &str) -> Result<Self> {
        let approx: f64 = text
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad epsilon: {text:?}")))?;
        let exact =
            parse_decimal(text.trim()).ok_or_else(|| Error::Parse(format!("bad epsilon: {text:?}")))?;
        Self::checked(approx, exact)
    }

    fn checked(approx: f64, exact: Rat) -> Result<Self> {
        if exact <= Rat::zero() || exact >= Rat::one() {
            return Err(Error::EpsilonOutOfRange { eps: approx });
        }
        Ok(Epsilon { approx, exact })
    }

    pub fn value(&self) -> f64 {
        self.approx
    }

    pub fn exact(&self) -> &Rat {
        &self.exact
    }
}

// `[+]digits[.digits][e[+-]digits]` as an exact rational.
fn parse_decimal(s: &str) -> Option<Rat> {
    let s = s.strip_prefix('+').unwrap_or(s);
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse().ok()?;
    let scale = frac_part.len() as i32 - exp;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        Rat::new(num, ten.pow(scale as u32))
    } else {
        Rat::from_integer(num * ten.pow((-scale) as u32))
    })
}

/// The profit divisor `kappa`, kept exact so floors are exact.
#[derive(Debug, Clone)]
pub struct ScaleFactor {
    exact: Rat,
    approx: f64,
}

impl ScaleFactor {
    /// Wraps an explicitly chosen positive factor.
    pub fn new(value: f64) -> Result<Self> {
        let exact = Rat::from_float(value)
            .filter(|r| r.is_positive())
            .ok_or_else(|| Error::BadDomain(format!("scale factor must be positive, got {value}")))?;
        Ok(ScaleFactor {
            exact,
            approx: value,
        })
    }

    pub fn approx(&self) -> f64 {
        self.approx
    }

    pub fn exact(&self) -> &Rat {
        &self.exact
    }
}

/// `kappa = eps * max_i(p_i c_i) / n`, maximized over all items.
///
/// `max_i p_i c_i` never exceeds the optimum value, so scaling by this
/// factor loses at most an `eps` fraction of any support's value.
pub fn scale_factor(instance: &Instance, eps: &Epsilon) -> Result<ScaleFactor> {
    instance.validate()?;
    let mut best: Option<Rat> = None;
    for item in &instance.items {
        let pc = Rat::from_float(item.prob)
            .ok_or(Error::BadDomain("non-finite probability".into()))?
            * Rat::from_integer(BigInt::from(item.profit));
        if best.as_ref().is_none_or(|b| pc > *b) {
            best = Some(pc);
        }
    }
    let best = best.expect("validated instance is non-empty");
    if best.is_zero() {
        return Err(Error::BadDomain(
            "every probability is zero; nothing to scale".into(),
        ));
    }
    let exact = eps.exact() * best / Rat::from_integer(BigInt::from(instance.len() as u64));
    let approx = exact.to_f64().unwrap_or(f64::NAN);
    Ok(ScaleFactor { exact, approx })
}

/// Scaled profits plus the probability split at one half.
#[derive(Debug, Clone)]
pub struct ScaledView {
    /// The divisor the profits were scaled by.
    pub scale: ScaleFactor,
    /// `floor(c_i / kappa)` for every item, exact.
    pub scaled_profits: Vec<u64>,
    /// Indices with `p_i >= 1/2`, ascending.
    pub high: Vec<usize>,
    /// Complement of `high`, ascending.
    pub low: Vec<usize>,
    /// Sum of scaled profits over `high`: the scaled DP capacity.
    pub cbar_high: u64,
}

impl ScaledView {
    pub fn kappa(&self) -> f64 {
        self.scale.approx()
    }
}

/// Scales an instance by `kappa` and partitions items at probability 1/2
/// (the boundary lands in `high`).
///
/// For factors produced by [`scale_factor`] every high item's scaled profit
/// is at most `ceil(2n/eps)`; this is asserted at build time.
pub fn scale(instance: &Instance, kappa: &ScaleFactor, eps: &Epsilon) -> Result<ScaledView> {
    instance.validate()?;
    let n = instance.len();
    let mut scaled_profits = Vec::with_capacity(n);
    let mut high = Vec::new();
    let mut low = Vec::new();
    let high_bound = (Rat::from_integer(BigInt::from(2 * n as u64)) / eps.exact())
        .ceil()
        .to_integer();
    let mut cbar_high: u64 = 0;
    for (i, item) in instance.items.iter().enumerate() {
        let exact_quotient = Rat::from_integer(BigInt::from(item.profit)) / kappa.exact();
        let floored = exact_quotient.floor().to_integer();
        let scaled: u64 = (&floored)
            .try_into()
            .map_err(|_| Error::Overflow("scaled profit"))?;
        if item.prob >= 0.5 {
            assert!(
                floored <= high_bound,
                "scaled profit {scaled} of high item {i} exceeds 2n/eps; scale factor too small"
            );
            cbar_high = cbar_high
                .checked_add(scaled)
                .ok_or(Error::Overflow("scaled capacity"))?;
            high.push(i);
        } else {
            low.push(i);
        }
        scaled_profits.push(scaled);
    }
    Ok(ScaledView {
        scale: kappa.clone(),
        scaled_profits,
        high,
        low,
        cbar_high,
    })
}

/// Scaled-DP value of the best support made of high items plus at most one
/// given low item: `max over C of (C + chat_extra) * Phat(C) * p_extra`,
/// together with that support. Without an extra item the level `C = 0` is
/// excluded (the empty support contributes nothing).
pub fn best_with_extra(
    view: &ScaledView,
    instance: &Instance,
    extra: Option<usize>,
) -> Result<(f64, Vec<usize>)> {
    if let Some(j) = extra {
        if !view.low.contains(&j) {
            return Err(Error::ExtraNotLow { index: j });
        }
    }
    let (profits_high, probs_high) = high_arrays(view, instance);
    let table = fill_table(&profits_high, &probs_high, &0.0, &1.0, |a, b| a * b)?;
    Ok(scan_with_extra(&table, view, instance, &profits_high, extra))
}

fn high_arrays(view: &ScaledView, instance: &Instance) -> (Vec<u64>, Vec<f64>) {
    let profits = view.high.iter().map(|&i| view.scaled_profits[i]).collect();
    let probs = view.high.iter().map(|&i| instance.items[i].prob).collect();
    (profits, probs)
}

fn scan_with_extra(
    table: &TableBuf<f64>,
    view: &ScaledView,
    instance: &Instance,
    profits_high: &[u64],
    extra: Option<usize>,
) -> (f64, Vec<usize>) {
    let n_high = profits_high.len();
    let (extra_profit, extra_prob) = match extra {
        Some(j) => (view.scaled_profits[j] as f64, instance.items[j].prob),
        None => (0.0, 1.0),
    };
    let start = if extra.is_some() { 0 } else { 1 };
    let mut best: Option<(usize, f64)> = None;
    for c in start..table.width {
        let v = (c as f64 + extra_profit) * table.at(n_high, c) * extra_prob;
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some((c, v));
        }
    }
    match best {
        None => (0.0, Vec::new()),
        Some((c, v)) => {
            let mut support: Vec<usize> = walk_support(table, profits_high, c as u64)
                .into_iter()
                .map(|k| view.high[k])
                .collect();
            if let Some(j) = extra {
                support.push(j);
            }
            support.sort_unstable();
            (v, support)
        }
    }
}

/// Outcome of the approximation scheme.
#[derive(Debug, Clone)]
pub struct FptasResult {
    /// The best candidate, valued under the original profits and
    /// probabilities. Its value is at least `(1 - eps)` times the optimum.
    pub solution: Solution,
    /// `kappa * zhat` for the winning candidate; never above the true value
    /// beyond float rounding.
    pub proxy_value: f64,
    pub epsilon: f64,
    pub candidates_evaluated: usize,
    /// DP cells filled, the work proxy reported by benchmarks.
    pub table_cells: u64,
}

#[derive(Debug, Clone)]
pub(crate) struct Candidate {
    pub support: Vec<usize>,
    pub value: f64,
    pub proxy: f64,
    /// The candidate's items with probability below one half.
    #[cfg_attr(not(test), allow(dead_code))]
    pub low_part: Vec<usize>,
}

pub(crate) fn candidates(instance: &Instance, eps: &Epsilon) -> Result<(Vec<Candidate>, u64)> {
    let report = instance.normalize()?;
    let kappa = scale_factor(instance, eps)?;
    let view = scale(instance, &kappa, eps)?;
    let (profits_high, probs_high) = high_arrays(&view, instance);
    let table = fill_table(&profits_high, &probs_high, &0.0, &1.0, |a, b| a * b)?;
    let table_cells = table.rows as u64 * table.width as u64;

    let mut out = Vec::with_capacity(view.low.len() + 1 + instance.len());
    let push_scaled = |extra: Option<usize>, out: &mut Vec<Candidate>| -> Result<()> {
        let (zhat, mut support) = scan_with_extra(&table, &view, instance, &profits_high, extra);
        support.extend_from_slice(&report.forced_in);
        support.sort_unstable();
        support.dedup();
        let value = instance.objective(&support)?;
        out.push(Candidate {
            support,
            value,
            proxy: kappa.approx() * zhat,
            low_part: extra.into_iter().collect(),
        });
        Ok(())
    };
    push_scaled(None, &mut out)?;
    for &j in &view.low {
        push_scaled(Some(j), &mut out)?;
    }
    for i in 0..instance.len() {
        let mut support = vec![i];
        support.extend_from_slice(&report.forced_in);
        support.sort_unstable();
        support.dedup();
        let value = instance.objective(&support)?;
        let item = &instance.items[i];
        out.push(Candidate {
            support,
            value,
            proxy: item.profit as f64 * item.prob,
            low_part: if view.low.contains(&i) { vec![i] } else { vec![] },
        });
    }
    Ok((out, table_cells))
}

/// Runs the approximation scheme: the returned solution's true objective is
/// at least `(1 - eps)` times the exact optimum.
pub fn solve(instance: &Instance, eps: &Epsilon) -> Result<FptasResult> {
    instance.validate()?;
    if instance.items.iter().all(|it| it.prob == 0.0) {
        return Ok(FptasResult {
            solution: Solution::empty(),
            proxy_value: 0.0,
            epsilon: eps.value(),
            candidates_evaluated: 0,
            table_cells: 0,
        });
    }
    let (cands, table_cells) = candidates(instance, eps)?;
    let best = cands
        .iter()
        .max_by(|a, b| a.value.partial_cmp(&b.value).expect("finite values"))
        .expect("candidate list is non-empty");
    // max_by keeps the last maximum; scan forward for the first instead.
    let best = cands
        .iter()
        .find(|c| c.value == best.value)
        .expect("just found");
    Ok(FptasResult {
        solution: Solution::from_support(instance, best.support.clone())?,
        proxy_value: best.proxy,
        epsilon: eps.value(),
        candidates_evaluated: cands.len(),
        table_cells,
    })
}
