//! The zero + tent system on a rational grid, checked against an explicit
//! δ-pseudo-orbit family instead of the full hyperspace.
//!
//! `p_n = tent^n(1/7)` and `E_1 = {δ}`, `E_{n+1} = {δ} ∪ g(tent(E_n))` where
//! `g(v) = v + δ` while that stays in `[0, 1]`. The pseudo-orbit is
//! `{1/7}, {p_1} ∪ E_1, {p_2} ∪ E_2, ...`; it is eventually periodic on the
//! grid, so every comparison below is over one prefix plus one cycle.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::multimap::{builders, MultiMap};
use crate::rational::Rational;
use crate::space::{grid_interval, CompactSet};

use super::average::{limit_average_distance, PeriodicPseudoOrbit, PseudoKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TentReport {
    pub grid: usize,
    pub epsilon: Rational,
    pub delta: Rational,
    pub pseudo_orbit_valid: bool,
    pub max_defect: Rational,
    pub prefix_len: usize,
    pub cycle_len: usize,
    /// First index whose spread part `E_n` holds a point above 1/2.
    pub terminal_index: Option<usize>,
    /// `F^n(z) = {0, tent^n(z)}` for every `z` and `n >= 1`.
    pub orbit_shape_holds: bool,
    /// Per grid point `z`: first `n` with `d_H(F^n(z), A_n) >= ε`, if any.
    pub failing_index: Vec<Option<usize>>,
    /// Smallest long-run average distance from the pseudo-orbit over all `z`.
    pub min_limit_average: Rational,
    pub not_shadowable: bool,
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

pub fn tent_counterexample_check(n: usize, epsilon: Rational, delta: Rational) -> Result<TentReport> {
    if n == 0 || !n.is_multiple_of(14) {
        return Err(Error::InvalidArgument(format!(
            "grid size must be a positive multiple of 14, got {n}"
        )));
    }
    if !epsilon.is_positive() {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let steps = delta.checked_mul_int(n as i64)?;
    if !delta.is_positive() || steps.denom() != 1 || steps.numer() > n as i64 {
        return Err(Error::InvalidArgument(format!(
            "delta must be a positive grid value 1/{n}..1, got {delta}"
        )));
    }
    let j = steps.numer() as usize;

    let space = grid_interval(n)?;
    let tent = builders::tent(n);
    let f = MultiMap::new(n + 1, vec![builders::zero(n + 1), tent.clone()])?;

    // states (p_n, E_n) until the first repeat
    let mut seen: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    let mut sets: Vec<CompactSet> = Vec::new();
    let mut spreads: Vec<Vec<usize>> = Vec::new();
    let mut p = n / 7;
    let mut spread: BTreeSet<usize> = BTreeSet::new();
    let transient = loop {
        let key = (p, spread.iter().copied().collect::<Vec<_>>());
        if let Some(&t) = seen.get(&key) {
            break t;
        }
        seen.insert(key.clone(), sets.len());
        sets.push(CompactSet::new(std::iter::once(p).chain(spread.iter().copied()))?);
        spreads.push(key.1);
        p = tent[p];
        let mut next: BTreeSet<usize> = spread
            .iter()
            .map(|&e| {
                let v = tent[e];
                if v + j <= n {
                    v + j
                } else {
                    v
                }
            })
            .collect();
        next.insert(j);
        spread = next;
    };
    let cycle = sets.split_off(transient);
    let pseudo = PeriodicPseudoOrbit::new(sets, cycle, delta, PseudoKind::Pointwise)?;
    let (pre, cyc) = pseudo.defects(&space, &f)?;
    let max_defect = pre.iter().chain(&cyc).copied().max().unwrap_or(Rational::ZERO);
    let terminal_index = spreads.iter().position(|e| e.iter().any(|&v| 2 * v > n));

    let mut orbit_shape_holds = true;
    let mut failing_index = Vec::with_capacity(n + 1);
    let mut min_limit_average: Option<Rational> = None;
    for z in 0..=n {
        let trace = f.orbit(&CompactSet::singleton(z));
        let mut t = z;
        for i in 1..trace.sets.len() {
            t = tent[t];
            if trace.sets[i] != CompactSet::new([0, t])? {
                orbit_shape_holds = false;
            }
        }
        let horizon = trace.transient.max(pseudo.prefix.len()) + lcm(trace.period, pseudo.cycle.len());
        failing_index
            .push((0..horizon).find(|&i| space.hausdorff(trace.at(i), pseudo.at(i)) >= epsilon));
        let avg = limit_average_distance(&space, &f, z, &pseudo)?;
        min_limit_average = Some(min_limit_average.map_or(avg, |m| m.min(avg)));
    }

    Ok(TentReport {
        grid: n,
        epsilon,
        delta,
        pseudo_orbit_valid: pseudo.is_valid(&space, &f),
        max_defect,
        prefix_len: pseudo.prefix.len(),
        cycle_len: pseudo.cycle.len(),
        terminal_index,
        orbit_shape_holds,
        not_shadowable: failing_index.iter().all(Option::is_some),
        failing_index,
        min_limit_average: min_limit_average.unwrap_or(Rational::ZERO),
    })
}
