//! Shadowing of δ-pseudo-orbits in the hyperspace.
//!
//! A δ-pseudo-orbit is an infinite path `{x} = A_0, A_1, ...` in the δ-graph;
//! it is ε-shadowed by `y` when `d_H(F^n(y), A_n) < ε` for every `n`. Only
//! nodes that start an infinite path ("live" nodes) carry an obligation.
//!
//! Two procedures are provided:
//!
//! * [`simulation_relation`] is the greatest fixpoint of pairs
//!   `(pseudo, orbit)` that stay ε-close under every live δ-step. A start
//!   `{x}` related to `{y}` is shadowed by `y` uniformly, whatever path the
//!   pseudo-orbit takes.
//! * [`shadowing_holds`] is the exact decision. The shadowing point may
//!   depend on the whole pseudo-orbit, so it tracks, along each finite path,
//!   the set of orbit states `F^n(y)` of points that are still within ε. The
//!   property fails iff some live path empties that set.
//!
//! The uniform relation is used to prune the exact search and to report
//! witnesses.

mod average;
mod tent;

pub use average::{
    block_average_orbit, interleave_for_power, limit_average_distance, refute_average_shadowing,
    AverageRefutation, PeriodicPseudoOrbit, PseudoKind, RefutationEntry,
};
pub use tent::{tent_counterexample_check, TentReport};

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperspace::{HyperGraph, Hyperspace, Mask};
use crate::rational::Rational;
use crate::space::{CompactSet, FiniteMetricSpace};

/// Pairs `(pseudo-node, orbit-node)` reachable from singleton starts that
/// can never be driven ε-apart by live δ-steps.
pub struct SimulationRelation {
    pub epsilon: Rational,
    pub delta: Rational,
    pairs: HashSet<(Mask, Mask)>,
}

impl SimulationRelation {
    pub fn contains(&self, pseudo: &CompactSet, orbit: &CompactSet) -> bool {
        self.pairs.contains(&(pseudo.to_mask(), orbit.to_mask()))
    }

    pub fn contains_masks(&self, pseudo: Mask, orbit: Mask) -> bool {
        self.pairs.contains(&(pseudo, orbit))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (CompactSet, CompactSet)> + '_ {
        self.pairs
            .iter()
            .map(|&(a, b)| (CompactSet::from_mask(a), CompactSet::from_mask(b)))
    }
}

/// Shadowing obligations for one `(ε, δ)` on one hyperspace.
struct Decider<'h, 'a> {
    hs: &'h Hyperspace<'a>,
    graph: &'h HyperGraph,
    live: &'h [bool],
    eps_rank: u16,
}

impl Decider<'_, '_> {
    fn close(&self, a: Mask, b: Mask) -> bool {
        self.hs.distance_rank(a, b) < self.eps_rank
    }

    fn live_successors(&self, a: Mask) -> impl Iterator<Item = Mask> + '_ {
        self.graph
            .successors(a)
            .iter()
            .copied()
            .filter(|&b| self.live[b as usize])
    }

    fn live_starts(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.hs.points()).filter(|&x| self.live[1usize << x])
    }

    fn relation(&self) -> HashSet<(Mask, Mask)> {
        let mut index: HashMap<(Mask, Mask), usize> = HashMap::new();
        let mut states: Vec<(Mask, Mask)> = Vec::new();
        let mut bad: Vec<bool> = Vec::new();
        let mut preds: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::new();

        let mut intern = |s: (Mask, Mask),
                          states: &mut Vec<(Mask, Mask)>,
                          bad: &mut Vec<bool>,
                          preds: &mut Vec<Vec<usize>>,
                          queue: &mut VecDeque<usize>| {
            *index.entry(s).or_insert_with(|| {
                states.push(s);
                bad.push(!self.close(s.0, s.1));
                preds.push(Vec::new());
                queue.push_back(states.len() - 1);
                states.len() - 1
            })
        };

        for x in self.live_starts() {
            for y in 0..self.hs.points() {
                intern((1 << x, 1 << y), &mut states, &mut bad, &mut preds, &mut queue);
            }
        }
        while let Some(i) = queue.pop_front() {
            if bad[i] {
                continue;
            }
            let (a, b) = states[i];
            let fb = self.hs.image(b);
            let succs: Vec<Mask> = self.live_successors(a).collect();
            for a2 in succs {
                let j = intern((a2, fb), &mut states, &mut bad, &mut preds, &mut queue);
                preds[j].push(i);
            }
        }

        // backward propagation of badness
        let mut stack: Vec<usize> = (0..states.len()).filter(|&i| bad[i]).collect();
        while let Some(j) = stack.pop() {
            for &i in &preds[j] {
                if !bad[i] {
                    bad[i] = true;
                    stack.push(i);
                }
            }
        }
        states
            .into_iter()
            .zip(bad)
            .filter_map(|(s, b)| (!b).then_some(s))
            .collect()
    }

    /// Finds a finite live path from a singleton that no orbit follows
    /// within ε, or proves none exists.
    fn find_unshadowed(&self, relation: &HashSet<(Mask, Mask)>) -> Option<(usize, Vec<Mask>)> {
        type State = (Mask, Vec<Mask>);
        let mut seen: HashSet<State> = HashSet::new();
        let mut nodes: Vec<(Mask, Option<usize>, usize)> = Vec::new(); // (pseudo, parent, start)
        let mut queue: VecDeque<(usize, Vec<Mask>)> = VecDeque::new();

        let safe = |a: Mask, orbits: &[Mask]| orbits.iter().any(|&b| relation.contains(&(a, b)));

        for x in self.live_starts() {
            let a: Mask = 1 << x;
            let orbits: Vec<Mask> = (0..self.hs.points())
                .map(|y| 1 << y)
                .filter(|&b| self.close(a, b))
                .collect();
            if orbits.is_empty() {
                return Some((x, vec![a]));
            }
            if safe(a, &orbits) || !seen.insert((a, orbits.clone())) {
                continue;
            }
            nodes.push((a, None, x));
            queue.push_back((nodes.len() - 1, orbits));
        }

        while let Some((i, orbits)) = queue.pop_front() {
            let (a, _, start) = nodes[i];
            let images: Vec<Mask> = orbits.iter().map(|&b| self.hs.image(b)).collect();
            for a2 in self.live_successors(a) {
                let mut next: Vec<Mask> =
                    images.iter().copied().filter(|&b| self.close(a2, b)).collect();
                next.sort_unstable();
                next.dedup();
                if next.is_empty() {
                    let mut path = vec![a2];
                    let mut cur = Some(i);
                    while let Some(k) = cur {
                        path.push(nodes[k].0);
                        cur = nodes[k].1;
                    }
                    path.reverse();
                    return Some((start, path));
                }
                if safe(a2, &next) || !seen.insert((a2, next.clone())) {
                    continue;
                }
                nodes.push((a2, Some(i), start));
                queue.push_back((nodes.len() - 1, next));
            }
        }
        None
    }
}

fn check_parameters(epsilon: Rational, delta: Rational) -> Result<()> {
    if !epsilon.is_positive() {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if delta.is_negative() {
        return Err(Error::InvalidArgument(format!("delta must be nonnegative, got {delta}")));
    }
    Ok(())
}

pub fn simulation_relation(
    hs: &Hyperspace<'_>,
    epsilon: Rational,
    delta: Rational,
) -> Result<SimulationRelation> {
    check_parameters(epsilon, delta)?;
    let graph = hs.graph(delta);
    let live = graph.live_nodes();
    let decider = Decider { hs, graph: &graph, live: &live, eps_rank: hs.rank_below(epsilon) };
    Ok(SimulationRelation { epsilon, delta, pairs: decider.relation() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StartWitness {
    pub start: usize,
    /// False when every δ-pseudo-orbit from `{start}` dies out.
    pub live: bool,
    /// A point whose orbit shadows every pseudo-orbit from this start, when
    /// one exists.
    pub uniform_shadow: Option<usize>,
}

/// A finite δ-pseudo-orbit prefix, extendable to an infinite one, that no
/// orbit stays ε-close to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShadowingFailure {
    pub start: usize,
    pub prefix: Vec<CompactSet>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShadowingVerdict {
    pub holds: bool,
    pub epsilon: Rational,
    pub delta: Rational,
    pub starts: Vec<StartWitness>,
    pub failure: Option<ShadowingFailure>,
}

fn decide(hs: &Hyperspace<'_>, graph: &HyperGraph, live: &[bool], epsilon: Rational) -> ShadowingVerdict {
    let decider = Decider { hs, graph, live, eps_rank: hs.rank_below(epsilon) };
    let relation = decider.relation();
    let starts = (0..hs.points())
        .map(|x| {
            let a: Mask = 1 << x;
            let is_live = live[a as usize];
            StartWitness {
                start: x,
                live: is_live,
                uniform_shadow: if is_live {
                    (0..hs.points()).find(|&y| relation.contains(&(a, 1 << y)))
                } else {
                    None
                },
            }
        })
        .collect();
    let failure = decider.find_unshadowed(&relation).map(|(start, path)| ShadowingFailure {
        start,
        prefix: path.into_iter().map(CompactSet::from_mask).collect(),
    });
    ShadowingVerdict {
        holds: failure.is_none(),
        epsilon,
        delta: graph.delta(),
        starts,
        failure,
    }
}

/// Decides whether every δ-pseudo-orbit is ε-shadowed by some orbit.
pub fn shadowing_holds(
    hs: &Hyperspace<'_>,
    epsilon: Rational,
    delta: Rational,
) -> Result<ShadowingVerdict> {
    check_parameters(epsilon, delta)?;
    let graph = hs.graph(delta);
    let live = graph.live_nodes();
    Ok(decide(hs, &graph, &live, epsilon))
}

/// Working δ for one ε.
///
/// `delta` is the largest critical value (or 0) at which shadowing holds;
/// the verdict is the same for every δ in `[delta, delta_limit)`. A `delta`
/// of 0 stands for "any δ below the smallest positive distance".
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Modulus {
    pub epsilon: Rational,
    pub delta: Option<Rational>,
    pub delta_limit: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShadowingSummary {
    pub holds: bool,
    pub moduli: Vec<Modulus>,
}

impl ShadowingSummary {
    pub fn modulus(&self, epsilon: Rational) -> Option<&Modulus> {
        self.moduli.iter().find(|m| m.epsilon == epsilon)
    }
}

/// Quantifies ε over the critical values of the metric. Verdicts only change
/// at critical values (ε compares strictly, δ non-strictly), and every
/// ε above the diameter is trivially fine.
pub fn has_shadowing(hs: &Hyperspace<'_>) -> ShadowingSummary {
    let critical = hs.space().critical_values();
    let mut reps = vec![Rational::ZERO];
    reps.extend(critical.iter().copied());

    let mut graphs: HashMap<usize, (HyperGraph, Vec<bool>)> = HashMap::new();
    let mut holds_at = |eps: Rational, i: usize| {
        let (graph, live) = graphs.entry(i).or_insert_with(|| {
            let g = hs.graph(reps[i]);
            let l = g.live_nodes();
            (g, l)
        });
        decide(hs, graph, live, eps).holds
    };

    let mut moduli = Vec::new();
    for &eps in &critical {
        // verdicts are monotone in δ: binary search the last working index
        let found = if !holds_at(eps, 0) {
            None
        } else {
            let (mut lo, mut hi) = (0usize, reps.len());
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if holds_at(eps, mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Some(lo)
        };
        moduli.push(Modulus {
            epsilon: eps,
            delta: found.map(|i| reps[i]),
            delta_limit: found.and_then(|i| reps.get(i + 1).copied()),
        });
    }
    ShadowingSummary { holds: moduli.iter().all(|m| m.delta.is_some()), moduli }
}

/// Classical shadowing for a single map acting on points: `x_0, x_1, ...`
/// with `d(f(x_i), x_{i+1}) <= δ` must stay within ε of some `f^n(y)`.
/// Returns a failing finite prefix, or `None` when every pseudo-orbit is
/// shadowed. Every point has a successor (`f(x)` itself), so every prefix
/// extends.
pub fn point_shadowing_failure(
    space: &FiniteMetricSpace,
    table: &[usize],
    epsilon: Rational,
    delta: Rational,
) -> Result<Option<Vec<usize>>> {
    check_parameters(epsilon, delta)?;
    let n = space.len();
    if table.len() != n || table.iter().any(|&v| v >= n) {
        return Err(Error::InvalidMap(format!("table does not act on {n} points")));
    }
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|x| (0..n).filter(|&b| space.distance(table[x], b) <= delta).collect())
        .collect();
    let close = |a: usize, b: usize| space.distance(a, b) < epsilon;

    let mut seen: HashSet<(usize, Vec<usize>)> = HashSet::new();
    let mut nodes: Vec<(usize, Option<usize>)> = Vec::new();
    let mut queue: VecDeque<(usize, Vec<usize>)> = VecDeque::new();
    for x in 0..n {
        let alive: Vec<usize> = (0..n).filter(|&y| close(x, y)).collect();
        if seen.insert((x, alive.clone())) {
            nodes.push((x, None));
            queue.push_back((nodes.len() - 1, alive));
        }
    }
    while let Some((i, alive)) = queue.pop_front() {
        let x = nodes[i].0;
        for &x2 in &succ[x] {
            let mut next: Vec<usize> =
                alive.iter().map(|&y| table[y]).filter(|&y| close(x2, y)).collect();
            next.sort_unstable();
            next.dedup();
            if next.is_empty() {
                let mut path = vec![x2];
                let mut cur = Some(i);
                while let Some(k) = cur {
                    path.push(nodes[k].0);
                    cur = nodes[k].1;
                }
                path.reverse();
                return Ok(Some(path));
            }
            if seen.insert((x2, next.clone())) {
                nodes.push((x2, Some(i)));
                queue.push_back((nodes.len() - 1, next));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests;
