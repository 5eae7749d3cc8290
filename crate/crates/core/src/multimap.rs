//! Multiple mappings `F = {f1, ..., fm}` as explicit index tables, with the
//! induced action on subsets, iterates, orbits and `Ran(F)`.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{CompactSet, FiniteMetricSpace};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MultiMap {
    points: usize,
    maps: Vec<Vec<usize>>,
}

impl MultiMap {
    /// Each table must have one entry per point, all in range, and there must
    /// be at least one table.
    pub fn new(points: usize, maps: Vec<Vec<usize>>) -> Result<MultiMap> {
        if maps.is_empty() {
            return Err(Error::InvalidMap("a multiple mapping needs at least one map".into()));
        }
        for (j, table) in maps.iter().enumerate() {
            if table.len() != points {
                return Err(Error::InvalidMap(format!(
                    "map {j} has {} entries for {points} points",
                    table.len()
                )));
            }
            if let Some((x, &y)) = table.iter().enumerate().find(|(_, &y)| y >= points) {
                return Err(Error::InvalidMap(format!(
                    "map {j} sends point {x} to index {y}, out of range for {points} points"
                )));
            }
        }
        Ok(MultiMap { points, maps })
    }

    pub fn for_space(space: &FiniteMetricSpace, maps: Vec<Vec<usize>>) -> Result<MultiMap> {
        MultiMap::new(space.len(), maps)
    }

    pub fn identity(points: usize) -> MultiMap {
        MultiMap { points, maps: vec![(0..points).collect()] }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Number of component maps `m`.
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn tables(&self) -> &[Vec<usize>] {
        &self.maps
    }

    /// The single-map system `{f_j}`.
    pub fn component(&self, j: usize) -> MultiMap {
        MultiMap { points: self.points, maps: vec![self.maps[j].clone()] }
    }

    /// `F(x) = {f1(x), ..., fm(x)}`.
    pub fn point_image(&self, x: usize) -> CompactSet {
        CompactSet::new(self.maps.iter().map(|t| t[x])).expect("m >= 1")
    }

    /// The induced map on nonempty subsets: the union of `f_j(A)`.
    pub fn image(&self, set: &CompactSet) -> CompactSet {
        CompactSet::new(set.iter().flat_map(|x| self.maps.iter().map(move |t| t[x])))
            .expect("image of a nonempty set is nonempty")
    }

    /// `F^n(x)`, with `F^0(x) = {x}`.
    pub fn power_image(&self, x: usize, n: usize) -> CompactSet {
        let mut set = CompactSet::singleton(x);
        for _ in 0..n {
            set = self.image(&set);
        }
        set
    }

    pub fn orbit(&self, start: &CompactSet) -> OrbitTrace {
        let mut seen: HashMap<CompactSet, usize> = HashMap::new();
        let mut sets = Vec::new();
        let mut current = start.clone();
        loop {
            if let Some(&t) = seen.get(&current) {
                let period = sets.len() - t;
                return OrbitTrace { sets, transient: t, period };
            }
            seen.insert(current.clone(), sets.len());
            let next = self.image(&current);
            sets.push(current);
            current = next;
        }
    }

    /// `F^k` as a multiple mapping: every composition `f_{i1} o ... o f_{ik}`,
    /// deduplicated as tables.
    pub fn compose_power(&self, k: usize) -> Result<MultiMap> {
        if k == 0 {
            return Err(Error::InvalidArgument("power k must be at least 1".into()));
        }
        let mut current = dedup_tables(self.maps.iter().cloned());
        for _ in 1..k {
            let composed = self.maps.iter().flat_map(|outer| {
                current
                    .iter()
                    .map(move |inner| inner.iter().map(|&y| outer[y]).collect::<Vec<_>>())
            });
            current = dedup_tables(composed);
        }
        Ok(MultiMap { points: self.points, maps: current })
    }

    /// `Ran(F) = {F^n(x) : n >= 1, x in X}` enumerated from the orbit of every
    /// singleton. Sets are listed by the first time `n` at which they occur,
    /// ties broken by the smallest starting point.
    pub fn ran(&self) -> RangeFamily {
        let traces: Vec<OrbitTrace> =
            (0..self.points).map(|x| self.orbit(&CompactSet::singleton(x))).collect();
        let horizon = traces.iter().map(|t| t.transient + t.period).max().unwrap_or(0);
        let mut seen = HashSet::new();
        let mut family = Vec::new();
        for n in 1..=horizon {
            for trace in &traces {
                let set = trace.at(n);
                if seen.insert(set.clone()) {
                    family.push(set.clone());
                }
            }
        }
        RangeFamily { family }
    }
}

fn dedup_tables<I: IntoIterator<Item = Vec<usize>>>(tables: I) -> Vec<Vec<usize>> {
    let mut seen = HashSet::new();
    tables.into_iter().filter(|t| seen.insert(t.clone())).collect()
}

/// The orbit `A0, F(A0), F^2(A0), ...` recorded up to its first repeat.
///
/// `sets` holds the `transient + period` distinct sets; afterwards the orbit
/// cycles through `sets[transient..]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitTrace {
    pub sets: Vec<CompactSet>,
    pub transient: usize,
    pub period: usize,
}

impl OrbitTrace {
    pub fn at(&self, n: usize) -> &CompactSet {
        let idx = if n < self.sets.len() {
            n
        } else {
            self.transient + (n - self.transient) % self.period
        };
        &self.sets[idx]
    }

    /// Index of `n` inside `sets`.
    pub fn phase(&self, n: usize) -> usize {
        if n < self.transient {
            n
        } else {
            self.transient + (n - self.transient) % self.period
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeFamily {
    pub family: Vec<CompactSet>,
}

impl RangeFamily {
    pub fn contains(&self, set: &CompactSet) -> bool {
        self.family.contains(set)
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &CompactSet> {
        self.family.iter()
    }
}

/// Named table builders. All of them are closed on their space by
/// construction; `const_at` and `cycle` validate their indices.
pub mod builders {
    use super::*;

    pub fn zero(points: usize) -> Vec<usize> {
        vec![0; points]
    }

    pub fn const_at(points: usize, c: usize) -> Result<Vec<usize>> {
        if c >= points {
            return Err(Error::IndexOutOfRange { index: c, size: points });
        }
        Ok(vec![c; points])
    }

    /// The tent map `x -> 2x` on `[0, 1/2]`, `x -> 2 - 2x` on `(1/2, 1]`,
    /// acting on grid indices `i/N`.
    pub fn tent(grid: usize) -> Vec<usize> {
        (0..=grid)
            .map(|i| if 2 * i <= grid { 2 * i } else { 2 * grid - 2 * i })
            .collect()
    }

    /// Cyclic permutation `c0 -> c1 -> ... -> c0`; other points are fixed.
    pub fn cycle(points: usize, cycle: &[usize]) -> Result<Vec<usize>> {
        let mut table: Vec<usize> = (0..points).collect();
        let mut seen = HashSet::new();
        for &c in cycle {
            if c >= points {
                return Err(Error::IndexOutOfRange { index: c, size: points });
            }
            if !seen.insert(c) {
                return Err(Error::InvalidMap(format!("cycle repeats point {c}")));
            }
        }
        for (k, &c) in cycle.iter().enumerate() {
            table[c] = cycle[(k + 1) % cycle.len()];
        }
        Ok(table)
    }
}

pub fn image(f: &MultiMap, set: &CompactSet) -> CompactSet {
    f.image(set)
}

pub fn power_image(f: &MultiMap, x: usize, n: usize) -> CompactSet {
    f.power_image(x, n)
}

pub fn orbit(f: &MultiMap, start: &CompactSet) -> OrbitTrace {
    f.orbit(start)
}

pub fn compose_power(f: &MultiMap, k: usize) -> Result<MultiMap> {
    f.compose_power(k)
}

pub fn ran(f: &MultiMap) -> RangeFamily {
    f.ran()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(v: &[usize]) -> CompactSet {
        CompactSet::new(v.iter().copied()).unwrap()
    }

    fn perm3() -> MultiMap {
        MultiMap::new(3, vec![vec![1, 2, 0], vec![2, 0, 1]]).unwrap()
    }

    fn binary01() -> MultiMap {
        MultiMap::new(2, vec![vec![0, 0], vec![1, 1]]).unwrap()
    }

    fn const_ab() -> MultiMap {
        MultiMap::new(3, vec![vec![0; 3], vec![1; 3]]).unwrap()
    }

    // independent oracle: every length-n word of maps applied to x
    fn all_compositions(f: &MultiMap, x: usize, n: usize) -> CompactSet {
        let m = f.len();
        let words = m.pow(n as u32);
        let pts = (0..words).map(|mut w| {
            let mut y = x;
            for _ in 0..n {
                y = f.tables()[w % m][y];
                w /= m;
            }
            y
        });
        CompactSet::new(pts).unwrap()
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(MultiMap::new(2, vec![]).is_err());
        assert!(MultiMap::new(2, vec![vec![0]]).is_err());
        assert!(MultiMap::new(2, vec![vec![0, 2]]).is_err());
    }

    #[test]
    fn image_examples() {
        for x in 0..3 {
            assert_eq!(const_ab().image(&CompactSet::singleton(x)), set(&[0, 1]));
        }
        assert_eq!(perm3().image(&set(&[0])), set(&[1, 2]));
        let id = MultiMap::identity(4);
        assert_eq!(id.image(&set(&[1, 3])), set(&[1, 3]));
    }

    #[test]
    fn power_image_examples() {
        assert_eq!(perm3().power_image(0, 2), set(&[0, 1, 2]));
        assert_eq!(const_ab().power_image(2, 5), set(&[0, 1]));
        assert_eq!(perm3().power_image(1, 0), set(&[1]));
    }

    #[test]
    fn orbit_examples() {
        let o = perm3().orbit(&set(&[0]));
        assert_eq!(o.sets, vec![set(&[0]), set(&[1, 2]), set(&[0, 1, 2])]);
        assert_eq!((o.transient, o.period), (2, 1));
        let o = binary01().orbit(&set(&[0]));
        assert_eq!(o.sets, vec![set(&[0]), set(&[0, 1])]);
        assert_eq!((o.transient, o.period), (1, 1));
        let o = MultiMap::identity(3).orbit(&set(&[2]));
        assert_eq!((o.transient, o.period), (0, 1));
    }

    #[test]
    fn compose_power_examples() {
        let f2 = const_ab().compose_power(2).unwrap();
        assert_eq!(f2.tables(), [vec![0; 3], vec![1; 3]]);

        let rot = MultiMap::new(3, vec![vec![1, 2, 0]]).unwrap();
        let r3 = rot.compose_power(3).unwrap();
        assert_eq!(r3.tables(), [vec![0, 1, 2]]);

        // f1^2 = f2, f2^2 = f1, f1 f2 = f2 f1 = id
        let p2 = perm3().compose_power(2).unwrap();
        let mut tables = p2.tables().to_vec();
        tables.sort();
        assert_eq!(tables, vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]);
        assert!(perm3().compose_power(0).is_err());
    }

    #[test]
    fn ran_examples() {
        let r = perm3().ran();
        assert_eq!(
            r.family,
            vec![set(&[1, 2]), set(&[0, 2]), set(&[0, 1]), set(&[0, 1, 2])]
        );
        assert_eq!(binary01().ran().family, vec![set(&[0, 1])]);
        assert_eq!(const_ab().ran().family, vec![set(&[0, 1])]);
        // identity with t = 0: F^1(x) = {x} must be included
        assert_eq!(MultiMap::identity(2).ran().family, vec![set(&[0]), set(&[1])]);
    }

    #[test]
    fn builders_are_closed() {
        assert_eq!(builders::tent(4), vec![0, 2, 4, 2, 0]);
        assert_eq!(builders::tent(3), vec![0, 2, 2, 0]);
        assert_eq!(builders::cycle(4, &[0, 2]).unwrap(), vec![2, 1, 0, 3]);
        assert!(builders::cycle(3, &[0, 0]).is_err());
        assert!(builders::const_at(3, 3).is_err());
    }

    fn system() -> impl Strategy<Value = MultiMap> {
        (1usize..=6, 1usize..=3).prop_flat_map(|(n, m)| {
            proptest::collection::vec(proptest::collection::vec(0..n, n), m)
                .prop_map(move |maps| MultiMap::new(n, maps).unwrap())
        })
    }

    proptest! {
        #[test]
        fn iteration_matches_compositions(f in system(), x in 0usize..6, n in 0usize..=6) {
            let x = x % f.points();
            prop_assert_eq!(f.power_image(x, n), all_compositions(&f, x, n));
        }

        #[test]
        fn image_is_monotone(f in system(), a in 1u32..64, b in 1u32..64) {
            let full = (1u32 << f.points()) - 1;
            let (a, b) = (a & full, (a | b) & full);
            prop_assume!(a != 0);
            let (sa, sb) = (CompactSet::from_mask(a), CompactSet::from_mask(b));
            prop_assert!(f.image(&sa).is_subset(&f.image(&sb)));
        }

        #[test]
        fn orbit_is_minimal_and_closed(f in system(), x in 0usize..6) {
            let x = x % f.points();
            let o = f.orbit(&CompactSet::singleton(x));
            prop_assert!(o.sets.len() < 1 << f.points());
            for w in o.sets.windows(2) {
                prop_assert_eq!(&f.image(&w[0]), &w[1]);
            }
            prop_assert_eq!(&f.image(o.sets.last().unwrap()), &o.sets[o.transient]);
            let distinct: HashSet<_> = o.sets.iter().collect();
            prop_assert_eq!(distinct.len(), o.sets.len());
        }

        #[test]
        fn power_orbit_samples_every_k(f in system(), x in 0usize..6, k in 1usize..=3) {
            let x = x % f.points();
            let fk = f.compose_power(k).unwrap();
            for n in 0..6 {
                prop_assert_eq!(fk.power_image(x, n), f.power_image(x, n * k));
            }
            let big = f.ran();
            for a in fk.ran().iter() {
                prop_assert!(big.contains(a));
            }
        }
    }
}
