//! Rate–fidelity trade-off of typical-subspace truncation for `n` copies.
//!
//! Weight classes are taken greedily in order of decreasing class probability
//! (ties: smaller `|m − n·p|`, then smaller `m`). A class is kept if the total
//! retained dimension stays within the budget, otherwise it is skipped and the
//! scan continues. Fidelity is the squared overlap of the renormalized
//! truncated state with the full `n`-copy state, i.e. the retained mass.

use super::combinatorics::{log2_add, log2_binomial};
use super::concentration::{ln_class_probability, TwoTermSource};
use crate::error::{Error, Result};
use crate::scalar::Real;
use std::cmp::Ordering;

/// Slack on the log-dimension budget so that `R = 1` keeps every class.
const RATE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFidelityPoint<T> {
    pub copies_n: u64,
    /// Requested rate `R`.
    pub rate: T,
    /// `log₂(retained dimension) / n` actually used, `≤ R`.
    pub retained_rate: T,
    pub fidelity: T,
}

/// Class order used by the greedy selection.
pub fn class_order<T: Real>(src: &TwoTermSource<T>, n: u64) -> Vec<(u64, T)> {
    let np = src.p().as_f64() * n as f64;
    let mut classes: Vec<(u64, T)> = (0..=n).map(|m| (m, ln_class_probability(src, n, m))).collect();
    classes.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| {
                let da = (a.0 as f64 - np).abs();
                let db = (b.0 as f64 - np).abs();
                da.partial_cmp(&db).unwrap_or(Ordering::Equal)
            })
            .then_with(|| a.0.cmp(&b.0))
    });
    classes
}

/// Probability mass below which the remaining tail of the class order is
/// dropped from the scan.
const TAIL_CUTOFF: f64 = 1e-18;

struct Selection<T> {
    capacity: T,
    log_dim: T,
    mass: T,
}

/// Number of exact change points followed before falling back to the
/// fixed breakpoints alone.
const EXACT_EVENTS: usize = 4096;

struct Scan<T> {
    log_dim: T,
    mass: T,
    /// Smallest budget at which some skipped class would have been kept.
    next: Option<T>,
}

/// Greedy skip-and-continue scan over `order` with log₂-dimension budget `capacity`.
fn skip_fill<T: Real>(order: &[(T, T)], capacity: T) -> Scan<T> {
    let mut log_dim = T::zero() - T::one() / T::zero();
    let mut mass = T::zero();
    let mut next: Option<T> = None;
    for &(log2_dim, ln_prob) in order {
        let candidate = log2_add(log_dim, log2_dim);
        if candidate <= capacity {
            log_dim = candidate;
            mass += ln_prob.exp();
        } else if next.map_or(true, |n| candidate < n) {
            next = Some(candidate);
        }
    }
    Scan { log_dim, mass, next }
}

/// The skip-and-continue rule alone is not monotone in the budget: a larger
/// budget can admit a big class early and then have no room for later ones.
/// Each rate therefore gets the best greedy selection over a set of budgets
/// at or below its own. The set holds every class dimension, every prefix
/// sum of the class order, `0` and `n`, plus the first few thousand budgets
/// at which the greedy outcome actually changes (`acc + dim` of a skipped
/// class), which makes it exact for small `n`. The result is nondecreasing
/// in `R`, independent of which rates are asked for, and never below the
/// plain greedy value at any listed budget.
fn selections<T: Real>(src: &TwoTermSource<T>, n: u64) -> Vec<Selection<T>> {
    let order = class_order(src, n);
    let total = order.len();
    let cut = order
        .iter()
        .enumerate()
        .position(|(i, &(_, lp))| T::lit((total - i) as f64) * lp.exp() < T::lit(TAIL_CUTOFF))
        .unwrap_or(total);
    let order: Vec<(T, T)> = order[..cut].iter().map(|&(m, lp)| (log2_binomial::<T>(n, m), lp)).collect();
    let top = T::lit(n as f64);

    let mut budgets = vec![T::zero(), top];
    let mut acc = T::zero() - T::one() / T::zero();
    for &(log2_dim, _) in &order {
        budgets.push(log2_dim);
        acc = log2_add(acc, log2_dim);
        budgets.push(acc);
    }
    let mut scans = Vec::new();
    let mut capacity = T::zero();
    for _ in 0..EXACT_EVENTS {
        let scan = skip_fill(&order, capacity + T::lit(RATE_SLACK));
        let next = scan.next;
        scans.push((capacity, scan));
        match next {
            Some(c) if c <= top + T::lit(RATE_SLACK) => capacity = c,
            _ => break,
        }
    }
    let known: Vec<T> = scans.iter().map(|(c, _)| *c).collect();
    let reach = known.last().copied().unwrap_or(T::zero());
    for b in budgets {
        if b > reach && b <= top + T::lit(RATE_SLACK) {
            scans.push((b, skip_fill(&order, b + T::lit(RATE_SLACK))));
        }
    }
    scans.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));

    // running best, so each entry answers every budget from its capacity up
    let mut out: Vec<Selection<T>> = Vec::with_capacity(scans.len());
    for (capacity, scan) in scans {
        match out.last() {
            Some(prev) if prev.mass >= scan.mass => {
                let (log_dim, mass) = (prev.log_dim, prev.mass);
                out.push(Selection { capacity, log_dim, mass });
            }
            _ => out.push(Selection {
                capacity,
                log_dim: scan.log_dim,
                mass: scan.mass,
            }),
        }
    }
    out
}

/// Fidelity at each requested rate for `n` copies.
pub fn dilution_curve<T: Real>(
    src: &TwoTermSource<T>,
    n: u64,
    rates: &[T],
) -> Result<Vec<RateFidelityPoint<T>>> {
    if n == 0 {
        return Err(Error::Validation("need at least one copy".into()));
    }
    if let Some(r) = rates.iter().find(|r| !(**r >= T::zero()) || !r.is_finite()) {
        return Err(Error::Validation(format!("invalid rate {r}")));
    }
    let table = selections(src, n);
    let nf = T::lit(n as f64);
    Ok(rates
        .iter()
        .map(|&rate| {
            let budget = rate * nf + T::lit(RATE_SLACK);
            let idx = table.partition_point(|s| s.capacity <= budget);
            let (log_dim, mass) = match idx {
                0 => (T::zero() - T::one() / T::zero(), T::zero()),
                i => (table[i - 1].log_dim, table[i - 1].mass),
            };
            RateFidelityPoint {
                copies_n: n,
                rate,
                retained_rate: if log_dim.is_finite() { (log_dim / nf).max(T::zero()) } else { T::zero() },
                fidelity: mass.min(T::one()),
            }
        })
        .collect())
}

/// `start, start + step, …` up to and including `stop` (within rounding).
pub fn rate_grid<T: Real>(start: T, stop: T, step: T) -> Result<Vec<T>> {
    if !(step > T::zero()) || stop < start {
        return Err(Error::Validation(format!(
            "rate grid {start}:{stop}:{step} is empty or unbounded"
        )));
    }
    let count = ((stop - start) / step + T::lit(1e-9)).floor().as_f64() as usize;
    Ok((0..=count).map(|i| start + step * T::lit(i as f64)).collect())
}
