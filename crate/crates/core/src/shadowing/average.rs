//! Eventually periodic pseudo-orbits, exact long-run averages and the
//! block-orbit refuter for average shadowing.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::multimap::{MultiMap, OrbitTrace};
use crate::rational::Rational;
use crate::space::{CompactSet, FiniteMetricSpace};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PseudoKind {
    /// Every step defect is at most the claimed δ.
    Pointwise,
    /// Every window of at least `window` consecutive defects, starting at
    /// index 1 or later, averages below the claimed δ. A claimed δ of 0
    /// means those defects are all 0.
    Average { window: usize },
}

/// The sequence `prefix, cycle, cycle, ...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodicPseudoOrbit {
    pub prefix: Vec<CompactSet>,
    pub cycle: Vec<CompactSet>,
    pub claimed_delta: Rational,
    pub kind: PseudoKind,
}

impl PeriodicPseudoOrbit {
    pub fn new(
        prefix: Vec<CompactSet>,
        cycle: Vec<CompactSet>,
        claimed_delta: Rational,
        kind: PseudoKind,
    ) -> Result<PeriodicPseudoOrbit> {
        if cycle.is_empty() {
            return Err(Error::InvalidPseudoOrbit("cycle is empty".into()));
        }
        let first = prefix.first().unwrap_or(&cycle[0]);
        if !first.is_singleton() {
            return Err(Error::InvalidPseudoOrbit(format!("starts at {first}, not a singleton")));
        }
        if claimed_delta.is_negative() {
            return Err(Error::InvalidPseudoOrbit(format!("negative delta {claimed_delta}")));
        }
        Ok(PeriodicPseudoOrbit { prefix, cycle, claimed_delta, kind })
    }

    /// `A_i`.
    pub fn at(&self, i: usize) -> &CompactSet {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn first(&self) -> &CompactSet {
        self.at(0)
    }

    /// Sets before the first repeat: `prefix ++ cycle`.
    pub fn span(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    /// Step defects `d_H(F(A_i), A_{i+1})`, split into the prefix part and
    /// the repeating part (the last cycle entry wraps to `cycle[0]`).
    pub fn defects(
        &self,
        space: &FiniteMetricSpace,
        f: &MultiMap,
    ) -> Result<(Vec<Rational>, Vec<Rational>)> {
        for set in self.prefix.iter().chain(&self.cycle) {
            space.check_set(set)?;
        }
        let all: Vec<Rational> = (0..self.span())
            .map(|i| space.hausdorff(&f.image(self.at(i)), self.at(i + 1)))
            .collect();
        let cycle = all[self.prefix.len()..].to_vec();
        let mut prefix = all;
        prefix.truncate(self.prefix.len());
        Ok((prefix, cycle))
    }

    pub fn validate(&self, space: &FiniteMetricSpace, f: &MultiMap) -> Result<()> {
        let (pre, cyc) = self.defects(space, f)?;
        match self.kind {
            PseudoKind::Pointwise => {
                if let Some(i) = pre.iter().chain(&cyc).position(|d| *d > self.claimed_delta) {
                    return Err(Error::InvalidPseudoOrbit(format!(
                        "step {i} has defect {} > {}",
                        pre.iter().chain(&cyc).nth(i).unwrap(),
                        self.claimed_delta
                    )));
                }
            }
            PseudoKind::Average { window } => {
                if self.claimed_delta.is_zero() {
                    if pre.iter().skip(1).chain(&cyc).any(|d| !d.is_zero()) {
                        return Err(Error::InvalidPseudoOrbit(
                            "claimed exact, but a defect after step 0 is nonzero".into(),
                        ));
                    }
                } else {
                    match window_threshold(&pre, &cyc, self.claimed_delta)? {
                        Some(w) if w <= window.max(1) => {}
                        Some(w) => {
                            return Err(Error::InvalidPseudoOrbit(format!(
                                "windows shorter than {w} can reach average {}",
                                self.claimed_delta
                            )))
                        }
                        None => {
                            return Err(Error::InvalidPseudoOrbit(format!(
                                "long windows do not average below {}",
                                self.claimed_delta
                            )))
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self, space: &FiniteMetricSpace, f: &MultiMap) -> bool {
        self.validate(space, f).is_ok()
    }

    /// Smallest `N` such that every window of length `>= N` starting at index
    /// 1 or later averages below `delta`; `None` when no `N` works.
    pub fn average_threshold(
        &self,
        space: &FiniteMetricSpace,
        f: &MultiMap,
        delta: Rational,
    ) -> Result<Option<usize>> {
        let (pre, cyc) = self.defects(space, f)?;
        window_threshold(&pre, &cyc, delta)
    }
}

fn floor(x: Rational) -> i64 {
    x.numer().div_euclid(x.denom())
}

/// Exact sliding-window check over an eventually periodic defect sequence.
///
/// For a window starting at `k`, with `h` prefix defects inside it and
/// length `n = h + q c + r`, the quantity `sum - delta n` is affine in `q`,
/// so each `(k, r)` class fails either for a bounded range of `q` or for
/// all large `q`.
fn window_threshold(pre: &[Rational], cyc: &[Rational], delta: Rational) -> Result<Option<usize>> {
    let (a, c) = (pre.len(), cyc.len());
    let e = |i: usize| if i < a { pre[i] } else { cyc[(i - a) % c] };
    let cycle_sum = Rational::checked_sum(cyc.iter().copied())?;
    let slope = cycle_sum.checked_sub(delta.checked_mul_int(c as i64)?)?;
    if slope.is_positive() {
        return Ok(None);
    }
    let mut longest_failure = 0usize;
    for k in 1..a.max(1) + c {
        let h = a.saturating_sub(k);
        let mut head = Rational::ZERO;
        for n in 1..=h {
            head = head.checked_add(e(k + n - 1))?;
            if head >= delta.checked_mul_int(n as i64)? {
                longest_failure = longest_failure.max(n);
            }
        }
        let start = k.max(a);
        let mut partial = Rational::ZERO;
        for r in 0..c {
            if r > 0 {
                partial = partial.checked_add(e(start + r - 1))?;
            }
            let q0: i64 = if r == 0 { 1 } else { 0 };
            let g0 = head
                .checked_add(partial)?
                .checked_sub(delta.checked_mul_int((h + r) as i64)?)?;
            let at_q0 = g0.checked_add(slope.checked_mul_int(q0)?)?;
            if at_q0.is_negative() {
                continue;
            }
            if slope.is_zero() {
                return Ok(None);
            }
            let qmax = floor(g0.checked_div(slope.checked_neg()?)?);
            let len = h as i64 + qmax * c as i64 + r as i64;
            longest_failure = longest_failure.max(len as usize);
        }
    }
    Ok(Some(longest_failure + 1))
}

/// Replaces each `A_i` of a pseudo-orbit of `F^k` by
/// `A_i, F(A_i), ..., F^{k-1}(A_i)`, giving a pseudo-orbit of `F`.
pub fn interleave_for_power(
    space: &FiniteMetricSpace,
    f: &MultiMap,
    k: usize,
    pseudo: &PeriodicPseudoOrbit,
) -> Result<PeriodicPseudoOrbit> {
    let fk = f.compose_power(k)?;
    pseudo.validate(space, &fk)?;
    let expand = |sets: &[CompactSet]| -> Vec<CompactSet> {
        sets.iter()
            .flat_map(|a| {
                std::iter::successors(Some(a.clone()), |s| Some(f.image(s))).take(k)
            })
            .collect()
    };
    let mut out = PeriodicPseudoOrbit {
        prefix: expand(&pseudo.prefix),
        cycle: expand(&pseudo.cycle),
        claimed_delta: pseudo.claimed_delta,
        kind: pseudo.kind.clone(),
    };
    if let PseudoKind::Average { .. } = out.kind {
        if !out.claimed_delta.is_zero() {
            let window = out
                .average_threshold(space, f, out.claimed_delta)?
                .ok_or_else(|| {
                    Error::InvalidPseudoOrbit("interleaved sequence has no averaging window".into())
                })?;
            out.kind = PseudoKind::Average { window };
        }
    }
    out.validate(space, f)?;
    Ok(out)
}

fn orbit_traces(f: &MultiMap) -> Vec<OrbitTrace> {
    (0..f.points()).map(|a| f.orbit(&CompactSet::singleton(a))).collect()
}

/// Longest exact run `F^{l-L+1}(a), ..., F^l(a) = target`, with `L <= n - 1`.
fn backward_run(traces: &[OrbitTrace], target: &CompactSet, n: usize) -> Vec<CompactSet> {
    let want = n - 1;
    let mut best: Vec<CompactSet> = Vec::new();
    for trace in traces {
        let (t, p) = (trace.transient, trace.period);
        let periodic = trace.sets[t..].contains(target);
        let end = if periodic {
            let from = (n - 2).max(1);
            (from..from + t + p).find(|&l| trace.at(l) == target)
        } else {
            (1..t).rev().find(|&l| trace.at(l) == target)
        };
        let Some(l) = end else { continue };
        let begin = l.saturating_sub(want - 1);
        if l + 1 - begin > best.len() {
            best = (begin..=l).map(|i| trace.at(i).clone()).collect();
        }
        if best.len() == want {
            break;
        }
    }
    best
}

fn build_block(
    traces: &[OrbitTrace],
    x: usize,
    target: &CompactSet,
    n: usize,
    diameter: Rational,
) -> Result<PeriodicPseudoOrbit> {
    let run = backward_run(traces, target, n);
    if run.is_empty() {
        return Err(Error::NotInRange(target.to_string()));
    }
    let forward = 2 * n - run.len();
    let mut cycle: Vec<CompactSet> = (0..forward).map(|i| traces[x].at(i).clone()).collect();
    cycle.extend(run);
    Ok(PeriodicPseudoOrbit {
        prefix: Vec::new(),
        cycle,
        claimed_delta: diameter.checked_mul_int(3)?.checked_div_int(n as i64)?,
        kind: PseudoKind::Average { window: 2 * n },
    })
}

/// Repeating block of length `2N`: the exact orbit of `x`, then an exact run
/// of orbit sets ending at `target`, then back to `{x}`. Each block has at
/// most two jumps of size at most `D`, so long windows average below `3D/N`.
pub fn block_average_orbit(
    space: &FiniteMetricSpace,
    f: &MultiMap,
    x: usize,
    target: &CompactSet,
    n: usize,
) -> Result<PeriodicPseudoOrbit> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("block size must be at least 2, got {n}")));
    }
    if x >= f.points() {
        return Err(Error::IndexOutOfRange { index: x, size: f.points() });
    }
    space.check_set(target)?;
    if !f.ran().contains(target) {
        return Err(Error::NotInRange(target.to_string()));
    }
    let block = build_block(&orbit_traces(f), x, target, n, space.diameter())?;
    block.validate(space, f)?;
    Ok(block)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn tail_average(
    space: &FiniteMetricSpace,
    trace: &OrbitTrace,
    pseudo: &PeriodicPseudoOrbit,
) -> Result<Rational> {
    let start = trace.transient.max(pseudo.prefix.len());
    let (p, c) = (trace.period, pseudo.cycle.len());
    let period = p / gcd(p, c) * c;
    let total = Rational::checked_sum(
        (start..start + period).map(|i| space.hausdorff(trace.at(i), pseudo.at(i))),
    )?;
    Ok(total.checked_div_int(period as i64)?)
}

/// `lim (1/n) sum_{i<n} d_H(F^i(y), A_i)`. Both sequences are eventually
/// periodic, so this is the mean over one common tail period.
pub fn limit_average_distance(
    space: &FiniteMetricSpace,
    f: &MultiMap,
    y: usize,
    pseudo: &PeriodicPseudoOrbit,
) -> Result<Rational> {
    if y >= f.points() {
        return Err(Error::IndexOutOfRange { index: y, size: f.points() });
    }
    for set in pseudo.prefix.iter().chain(&pseudo.cycle) {
        space.check_set(set)?;
    }
    tail_average(space, &f.orbit(&CompactSet::singleton(y)), pseudo)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefutationEntry {
    pub delta: Rational,
    pub block: usize,
    pub start: usize,
    pub target: CompactSet,
    pub pseudo: PeriodicPseudoOrbit,
    /// Minimum over all `y` of the limit average distance.
    pub min_limit_average: Rational,
    pub nearest: usize,
}

/// One average-pseudo-orbit per scheduled δ that no orbit follows within ε
/// on average.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AverageRefutation {
    pub epsilon: Rational,
    pub per_delta: Vec<RefutationEntry>,
}

/// Largest block size tried by the refuter.
pub const MAX_BLOCK: usize = 256;

/// Searches block orbits for a δ-average-pseudo-orbit at every scheduled δ
/// that is not ε-shadowed on average. `None` means the search came up empty,
/// not that average shadowing holds.
pub fn refute_average_shadowing(
    space: &FiniteMetricSpace,
    f: &MultiMap,
    epsilon: Rational,
    schedule: &[Rational],
) -> Result<Option<AverageRefutation>> {
    if !epsilon.is_positive() {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("delta schedule is empty".into()));
    }
    if let Some(d) = schedule.iter().find(|d| !d.is_positive()) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {d}")));
    }
    if space.len() != f.points() {
        return Err(Error::InvalidMap(format!(
            "map acts on {} points, space has {}",
            f.points(),
            space.len()
        )));
    }
    let diameter = space.diameter();
    if epsilon > diameter {
        return Ok(None);
    }
    let traces = orbit_traces(f);
    let range = f.ran();
    let mut per_delta = Vec::new();
    for &delta in schedule {
        // smallest N >= 2 with 3D/N < delta
        let n_min = (floor(diameter.checked_mul_int(3)?.checked_div(delta)?) + 1).max(2) as usize;
        let mut sizes: Vec<usize> = [n_min, n_min + 1, 2 * n_min, 4 * n_min]
            .into_iter()
            .filter(|&n| n <= MAX_BLOCK)
            .collect();
        sizes.dedup();
        let mut found = None;
        'search: for &n in &sizes {
            for x in 0..f.points() {
                for target in range.iter() {
                    let block = build_block(&traces, x, target, n, diameter)?;
                    let mut best = (diameter, 0);
                    for (y, trace) in traces.iter().enumerate() {
                        let avg = tail_average(space, trace, &block)?;
                        if avg < best.0 || y == 0 {
                            best = (avg, y);
                        }
                        if avg < epsilon {
                            break;
                        }
                    }
                    if best.0 >= epsilon {
                        block.validate(space, f)?;
                        found = Some(RefutationEntry {
                            delta,
                            block: n,
                            start: x,
                            target: target.clone(),
                            pseudo: block,
                            min_limit_average: best.0,
                            nearest: best.1,
                        });
                        break 'search;
                    }
                }
            }
        }
        match found {
            Some(entry) => per_delta.push(entry),
            None => return Ok(None),
        }
    }
    Ok(Some(AverageRefutation { epsilon, per_delta }))
}
