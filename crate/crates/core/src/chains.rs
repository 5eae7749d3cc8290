//! δ-chains in the hyperspace: witness search, achievable chain lengths, and
//! the chain transitivity / chain mixing decisions.
//!
//! A chain starts at a singleton `{x}` and every step satisfies
//! `d_H(F(A_i), A_{i+1}) <= δ`; its length is the number of steps. On a
//! finite space `d_H` takes finitely many values, so the δ-graph is the same
//! for every `δ` in `(0, smallest positive distance)`. The "for all δ > 0"
//! properties are therefore decided on the `δ = 0` graph.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperspace::{bits, HyperGraph, Hyperspace, Mask};
use crate::rational::Rational;
use crate::space::CompactSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub sets: Vec<CompactSet>,
    pub delta: Rational,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.sets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.sets.len() <= 1
    }

    /// Re-checks the chain against the metric directly: singleton start and
    /// every step within `delta`.
    pub fn is_valid(&self, hs: &Hyperspace<'_>) -> bool {
        let space = hs.space();
        let map = hs.map();
        self.sets.first().is_some_and(CompactSet::is_singleton)
            && self
                .sets
                .windows(2)
                .all(|w| space.hausdorff(&map.image(&w[0]), &w[1]) <= self.delta)
    }
}

/// Achievable chain lengths from a start to a target. Eventually periodic:
/// `n` is achievable iff `n < onset` and `n` is in `prefix`, or `n >= onset`
/// and `onset + (n - onset) % period` is in `residues`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LengthSpectrum {
    pub prefix: Vec<usize>,
    pub onset: usize,
    pub period: usize,
    pub residues: Vec<usize>,
}

impl LengthSpectrum {
    pub fn contains(&self, n: usize) -> bool {
        if n < self.onset {
            self.prefix.binary_search(&n).is_ok()
        } else {
            let r = self.onset + (n - self.onset) % self.period;
            self.residues.binary_search(&r).is_ok()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty() && self.residues.is_empty()
    }

    pub fn is_cofinite(&self) -> bool {
        self.residues.len() == self.period
    }

    /// Smallest tail length `n >= onset` that is not achievable; every
    /// `n + k * period` is then missing too.
    pub fn first_missing_tail(&self) -> Option<usize> {
        (self.onset..self.onset + self.period).find(|r| self.residues.binary_search(r).is_err())
    }
}

/// A failing `(x, A)` pair. For chain mixing, `missing` is a residue class
/// `n ≡ start (mod period), n >= start` of lengths with no chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainFailure {
    pub x: usize,
    pub target: CompactSet,
    pub missing: Option<MissingClass>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MissingClass {
    pub start: usize,
    pub period: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainVerdict {
    pub holds: bool,
    /// `None` means the verdict covers every `δ > 0`.
    pub delta: Option<Rational>,
    pub failure: Option<ChainFailure>,
}

pub fn build_hypergraph(hs: &Hyperspace<'_>, delta: Rational) -> HyperGraph {
    hs.graph(delta)
}

/// Shortest δ-chain from `{x}` to `target`, if any.
pub fn find_chain(
    hs: &Hyperspace<'_>,
    delta: Rational,
    x: usize,
    target: &CompactSet,
) -> Result<Option<Chain>> {
    check_point(hs, x)?;
    let goal = hs.to_mask(target)?;
    let graph = hs.graph(delta);
    Ok(shortest_path(&graph, 1 << x, goal).map(|path| Chain {
        sets: path.into_iter().map(CompactSet::from_mask).collect(),
        delta,
    }))
}

fn check_point(hs: &Hyperspace<'_>, x: usize) -> Result<()> {
    if x >= hs.points() {
        return Err(Error::IndexOutOfRange { index: x, size: hs.points() });
    }
    Ok(())
}

fn shortest_path(graph: &HyperGraph, start: Mask, goal: Mask) -> Option<Vec<Mask>> {
    let mut parent: HashMap<Mask, Mask> = HashMap::new();
    parent.insert(start, start);
    let mut queue = VecDeque::from([start]);
    while let Some(a) = queue.pop_front() {
        if a == goal {
            let mut path = vec![a];
            let mut cur = a;
            while cur != start {
                cur = parent[&cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &b in graph.successors(a) {
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(b) {
                e.insert(a);
                queue.push_back(b);
            }
        }
    }
    None
}

fn reachable(graph: &HyperGraph, size: usize, start: Mask) -> Vec<bool> {
    let mut seen = vec![false; size];
    seen[start as usize] = true;
    let mut stack = vec![start];
    while let Some(a) = stack.pop() {
        for &b in graph.successors(a) {
            if !seen[b as usize] {
                seen[b as usize] = true;
                stack.push(b);
            }
        }
    }
    seen
}

fn range_masks(hs: &Hyperspace<'_>) -> Vec<Mask> {
    hs.map().ran().iter().map(CompactSet::to_mask).collect()
}

pub fn is_chain_transitive(hs: &Hyperspace<'_>) -> ChainVerdict {
    ChainVerdict { delta: None, ..is_chain_transitive_at(hs, Rational::ZERO) }
}

/// Chain transitivity for a single `δ`.
pub fn is_chain_transitive_at(hs: &Hyperspace<'_>, delta: Rational) -> ChainVerdict {
    let graph = hs.graph(delta);
    let size = 1usize << hs.points();
    let targets = range_masks(hs);
    for x in 0..hs.points() {
        let seen = reachable(&graph, size, 1 << x);
        if let Some(&a) = targets.iter().find(|&&a| !seen[a as usize]) {
            return ChainVerdict {
                holds: false,
                delta: Some(delta),
                failure: Some(ChainFailure {
                    x,
                    target: CompactSet::from_mask(a),
                    missing: None,
                }),
            };
        }
    }
    ChainVerdict { holds: true, delta: Some(delta), failure: None }
}

/// The sequence of layers `L_0 = {{x}}`, `L_{k+1} = succ(L_k)`, recorded
/// until it repeats. Layers are node bitsets.
struct Layers {
    layers: Vec<Vec<u64>>,
    onset: usize,
    period: usize,
}

impl Layers {
    fn compute(graph: &HyperGraph, points: usize, start: Mask) -> Layers {
        let size = 1usize << points;
        let words = size.div_ceil(64);
        let mut first = vec![0u64; words];
        first[start as usize / 64] |= 1 << (start % 64);
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut layers = Vec::new();
        let mut current = first;
        loop {
            if let Some(&onset) = index.get(&current) {
                let period = layers.len() - onset;
                return Layers { layers, onset, period };
            }
            let mut next = vec![0u64; words];
            for a in layer_members(&current) {
                for &b in graph.successors(a) {
                    next[b as usize / 64] |= 1 << (b % 64);
                }
            }
            index.insert(current.clone(), layers.len());
            layers.push(current);
            current = next;
        }
    }

    fn spectrum(&self, target: Mask) -> LengthSpectrum {
        let hit = |k: usize| self.layers[k][target as usize / 64] >> (target % 64) & 1 == 1;
        LengthSpectrum {
            prefix: (0..self.onset).filter(|&k| hit(k)).collect(),
            onset: self.onset,
            period: self.period,
            residues: (self.onset..self.onset + self.period).filter(|&k| hit(k)).collect(),
        }
    }
}

fn layer_members(layer: &[u64]) -> impl Iterator<Item = Mask> + '_ {
    layer.iter().enumerate().flat_map(|(w, &word)| {
        bits(word as u32)
            .map(move |b| (w * 64 + b) as Mask)
            .chain(bits((word >> 32) as u32).map(move |b| (w * 64 + 32 + b) as Mask))
    })
}

pub fn chain_length_spectrum(
    hs: &Hyperspace<'_>,
    delta: Rational,
    x: usize,
    target: &CompactSet,
) -> Result<LengthSpectrum> {
    check_point(hs, x)?;
    let goal = hs.to_mask(target)?;
    let graph = hs.graph(delta);
    Ok(Layers::compute(&graph, hs.points(), 1 << x).spectrum(goal))
}

pub fn is_chain_mixing(hs: &Hyperspace<'_>) -> ChainVerdict {
    ChainVerdict { delta: None, ..is_chain_mixing_at(hs, Rational::ZERO) }
}

/// Chain mixing for a single `δ`: every spectrum from a point to a range
/// element must be cofinite.
pub fn is_chain_mixing_at(hs: &Hyperspace<'_>, delta: Rational) -> ChainVerdict {
    let graph = hs.graph(delta);
    let targets = range_masks(hs);
    for x in 0..hs.points() {
        let layers = Layers::compute(&graph, hs.points(), 1 << x);
        for &a in &targets {
            let spectrum = layers.spectrum(a);
            if let Some(start) = spectrum.first_missing_tail() {
                return ChainVerdict {
                    holds: false,
                    delta: Some(delta),
                    failure: Some(ChainFailure {
                        x,
                        target: CompactSet::from_mask(a),
                        missing: Some(MissingClass { start, period: spectrum.period }),
                    }),
                };
            }
        }
    }
    ChainVerdict { holds: true, delta: Some(delta), failure: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multimap::MultiMap;
    use crate::rational::q;
    use crate::space::{grid_interval, FiniteMetricSpace};

    fn set(v: &[usize]) -> CompactSet {
        CompactSet::new(v.iter().copied()).unwrap()
    }

    fn perm3() -> (FiniteMetricSpace, MultiMap) {
        let s = FiniteMetricSpace::discrete_n(3).unwrap();
        let f = MultiMap::new(3, vec![vec![1, 2, 0], vec![2, 0, 1]]).unwrap();
        (s, f)
    }

    fn binary01() -> (FiniteMetricSpace, MultiMap) {
        let s = grid_interval(1).unwrap();
        let f = MultiMap::new(2, vec![vec![0, 0], vec![1, 1]]).unwrap();
        (s, f)
    }

    fn const_ab() -> (FiniteMetricSpace, MultiMap) {
        let s = FiniteMetricSpace::discrete_n(3).unwrap();
        let f = MultiMap::new(3, vec![vec![0; 3], vec![1; 3]]).unwrap();
        (s, f)
    }

    #[test]
    fn find_chain_examples() {
        let (s, f) = perm3();
        let h = Hyperspace::new(&s, &f).unwrap();
        assert_eq!(find_chain(&h, q(1, 2), 0, &set(&[0, 2])).unwrap(), None);

        let (s, f) = binary01();
        let h = Hyperspace::new(&s, &f).unwrap();
        let c = find_chain(&h, q(1, 4), 0, &set(&[0, 1])).unwrap().unwrap();
        assert_eq!(c.sets, vec![set(&[0]), set(&[0, 1])]);
        assert_eq!(c.len(), 1);
        assert!(c.is_valid(&h));

        let same = find_chain(&h, q(1, 4), 1, &set(&[1])).unwrap().unwrap();
        assert_eq!(same.len(), 0);
    }

    #[test]
    fn zero_delta_chain_follows_true_orbit() {
        let s = grid_interval(4).unwrap();
        let f = MultiMap::new(5, vec![vec![1, 2, 3, 4, 0], vec![0, 0, 1, 1, 2]]).unwrap();
        let h = Hyperspace::new(&s, &f).unwrap();
        for n in 0..4 {
            let target = f.power_image(3, n);
            let c = find_chain(&h, Rational::ZERO, 3, &target).unwrap().unwrap();
            assert!(c.len() <= n);
            let orbit = f.orbit(&CompactSet::singleton(3));
            assert_eq!(&c.sets[..], &orbit.sets[..c.len() + 1]);
        }
    }

    #[test]
    fn chain_transitivity_examples() {
        let (s, f) = perm3();
        let h = Hyperspace::new(&s, &f).unwrap();
        let v = is_chain_transitive(&h);
        assert!(!v.holds);
        let fail = v.failure.unwrap();
        assert_eq!((fail.x, fail.target), (0, set(&[0, 2])));
        assert!(is_chain_transitive_at(&h, Rational::ONE).holds);
        assert!(!is_chain_transitive_at(&h, q(1, 2)).holds);

        let (s, f) = binary01();
        assert!(is_chain_transitive(&Hyperspace::new(&s, &f).unwrap()).holds);
        let (s, f) = const_ab();
        assert!(is_chain_transitive(&Hyperspace::new(&s, &f).unwrap()).holds);
    }

    #[test]
    fn spectrum_examples() {
        let (s, f) = binary01();
        let h = Hyperspace::new(&s, &f).unwrap();
        let sp = chain_length_spectrum(&h, q(1, 4), 0, &set(&[0, 1])).unwrap();
        assert!(!sp.contains(0));
        assert!((1..50).all(|n| sp.contains(n)));
        assert!(sp.is_cofinite());

        let (s, f) = perm3();
        let h = Hyperspace::new(&s, &f).unwrap();
        let sp = chain_length_spectrum(&h, q(1, 2), 0, &set(&[0, 2])).unwrap();
        assert!(sp.is_empty());
    }

    #[test]
    fn zero_delta_spectrum_on_a_cycle() {
        // a single 4-cycle with a tail: 4 -> 0 -> 1 -> 2 -> 3 -> 0
        let s = FiniteMetricSpace::discrete_n(5).unwrap();
        let f = MultiMap::new(5, vec![vec![1, 2, 3, 0, 0]]).unwrap();
        let h = Hyperspace::new(&s, &f).unwrap();
        let sp = chain_length_spectrum(&h, Rational::ZERO, 4, &set(&[2])).unwrap();
        let hits: Vec<usize> = (0..20).filter(|&n| sp.contains(n)).collect();
        assert_eq!(hits, vec![3, 7, 11, 15, 19]);
    }

    #[test]
    fn chain_mixing_examples() {
        let (s, f) = binary01();
        assert!(is_chain_mixing(&Hyperspace::new(&s, &f).unwrap()).holds);
        let (s, f) = perm3();
        let v = is_chain_mixing(&Hyperspace::new(&s, &f).unwrap());
        assert!(!v.holds);
        let s = FiniteMetricSpace::discrete_n(2).unwrap();
        let f = MultiMap::identity(2);
        let h = Hyperspace::new(&s, &f).unwrap();
        let v = is_chain_mixing(&h);
        assert!(!v.holds);
        assert_eq!(v.failure.unwrap().target, set(&[1]));
        assert!(is_chain_mixing_at(&h, Rational::ONE).holds);
    }
}
