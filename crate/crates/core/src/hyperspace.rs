//! Bitmask view of the hyperspace `K(X)` for small spaces.
//!
//! Nodes are the nonempty subsets of `X`, encoded as `u32` masks. Distances
//! are replaced by their rank among the distinct values of the metric, so
//! every threshold comparison becomes an integer comparison; the rational
//! value of a rank is recovered with [`Hyperspace::level`].

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::multimap::MultiMap;
use crate::rational::Rational;
use crate::space::{CompactSet, FiniteMetricSpace};

pub type Mask = u32;

pub const DEFAULT_NODE_CAP: usize = 12;
/// Hard ceiling regardless of configuration: the tables below are `O(n 2^n)`.
pub const MAX_NODE_CAP: usize = 20;
pub const NODE_CAP_ENV: &str = "HYPERSPACE_NODE_CAP";

/// Point cap for exhaustive hyperspace algorithms, read from
/// `HYPERSPACE_NODE_CAP` when set and clamped to [`MAX_NODE_CAP`].
pub fn node_cap_from_env() -> usize {
    std::env::var(NODE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map(|c| c.min(MAX_NODE_CAP))
        .unwrap_or(DEFAULT_NODE_CAP)
}

pub struct Hyperspace<'a> {
    space: &'a FiniteMetricSpace,
    map: &'a MultiMap,
    n: usize,
    levels: Vec<Rational>,
    rank: Vec<u16>,
    image: Vec<Mask>,
    // near[p << n | mask] = min rank from point p to the set mask
    near: Vec<u16>,
}

impl<'a> Hyperspace<'a> {
    pub fn new(space: &'a FiniteMetricSpace, map: &'a MultiMap) -> Result<Hyperspace<'a>> {
        Hyperspace::with_cap(space, map, node_cap_from_env())
    }

    pub fn with_cap(
        space: &'a FiniteMetricSpace,
        map: &'a MultiMap,
        cap: usize,
    ) -> Result<Hyperspace<'a>> {
        let n = space.len();
        let cap = cap.min(MAX_NODE_CAP);
        if n > cap {
            return Err(Error::HyperspaceTooLarge { points: n, cap });
        }
        if map.points() != n {
            return Err(Error::InvalidMap(format!(
                "map acts on {} points, space has {n}",
                map.points()
            )));
        }
        let mut levels: Vec<Rational> =
            space.matrix().iter().flat_map(|r| r.iter().copied()).collect();
        levels.sort();
        levels.dedup();
        let rank: Vec<u16> = (0..n * n)
            .map(|k| {
                let d = space.distance(k / n, k % n);
                levels.binary_search(&d).expect("distance is a level") as u16
            })
            .collect();

        let size = 1usize << n;
        let point_image: Vec<Mask> = (0..n)
            .map(|x| map.tables().iter().fold(0, |m, t| m | 1 << t[x]))
            .collect();
        let mut image = vec![0 as Mask; size];
        for mask in 1..size {
            let low = mask.trailing_zeros() as usize;
            image[mask] = image[mask & (mask - 1)] | point_image[low];
        }
        let mut near = vec![u16::MAX; n * size];
        for p in 0..n {
            let row = &mut near[p * size..(p + 1) * size];
            for mask in 1..size {
                let low = mask.trailing_zeros() as usize;
                row[mask] = row[mask & (mask - 1)].min(rank[p * n + low]);
            }
        }
        Ok(Hyperspace { space, map, n, levels, rank, image, near })
    }

    pub fn space(&self) -> &'a FiniteMetricSpace {
        self.space
    }

    pub fn map(&self) -> &'a MultiMap {
        self.map
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn full_mask(&self) -> Mask {
        ((1u64 << self.n) - 1) as Mask
    }

    /// All nodes in increasing mask order.
    pub fn nodes(&self) -> impl Iterator<Item = Mask> {
        1..=self.full_mask()
    }

    pub fn node_count(&self) -> usize {
        self.full_mask() as usize
    }

    pub fn image(&self, mask: Mask) -> Mask {
        self.image[mask as usize]
    }

    pub fn point_rank(&self, i: usize, j: usize) -> u16 {
        self.rank[i * self.n + j]
    }

    fn near(&self, p: usize, mask: Mask) -> u16 {
        self.near[(p << self.n) | mask as usize]
    }

    /// Hausdorff distance as a level rank.
    pub fn distance_rank(&self, a: Mask, b: Mask) -> u16 {
        let directed = |from: Mask, to: Mask| {
            bits(from).map(|p| self.near(p, to)).max().unwrap_or(0)
        };
        directed(a, b).max(directed(b, a))
    }

    pub fn hausdorff(&self, a: Mask, b: Mask) -> Rational {
        self.levels[self.distance_rank(a, b) as usize]
    }

    pub fn level(&self, rank: u16) -> Rational {
        self.levels[rank as usize]
    }

    /// Distinct distances, ascending, starting with 0.
    pub fn levels(&self) -> &[Rational] {
        &self.levels
    }

    /// Largest rank whose level is `<= delta`, or `None` for negative delta.
    pub fn rank_at_most(&self, delta: Rational) -> Option<u16> {
        let count = self.levels.partition_point(|l| *l <= delta);
        count.checked_sub(1).map(|r| r as u16)
    }

    /// Number of levels strictly below `eps`: `d < eps` iff `rank < rank_below(eps)`.
    pub fn rank_below(&self, eps: Rational) -> u16 {
        self.levels.partition_point(|l| *l < eps) as u16
    }

    pub fn to_set(&self, mask: Mask) -> CompactSet {
        CompactSet::from_mask(mask)
    }

    pub fn to_mask(&self, set: &CompactSet) -> Result<Mask> {
        self.space.check_set(set)?;
        Ok(set.to_mask())
    }

    /// The δ-graph: `A -> B` iff `d_H(F(A), B) <= delta`.
    pub fn graph(&self, delta: Rational) -> HyperGraph {
        let delta_rank = self.rank_at_most(delta);
        let size = 1usize << self.n;
        let mut list_of_image: HashMap<Mask, u32> = HashMap::new();
        let mut lists: Vec<Vec<Mask>> = Vec::new();
        let mut list_of = vec![u32::MAX; size];
        for a in self.nodes() {
            let c = self.image(a);
            let id = *list_of_image.entry(c).or_insert_with(|| {
                lists.push(self.within(c, delta_rank));
                (lists.len() - 1) as u32
            });
            list_of[a as usize] = id;
        }
        HyperGraph { delta, delta_rank, lists, list_of }
    }

    /// Every `B` with `d_H(c, B) <= rank`, in increasing mask order.
    fn within(&self, c: Mask, rank: Option<u16>) -> Vec<Mask> {
        let Some(r) = rank else { return Vec::new() };
        // B must sit inside the r-neighbourhood of c and cover c within r
        let nbhd = (0..self.n)
            .filter(|&p| self.near(p, c) <= r)
            .fold(0 as Mask, |m, p| m | 1 << p);
        let mut out = Vec::new();
        let mut sub = nbhd;
        while sub != 0 {
            if bits(c).all(|p| self.near(p, sub) <= r) {
                out.push(sub);
            }
            sub = (sub - 1) & nbhd;
        }
        out.reverse();
        out
    }
}

/// Indices of the set bits of `mask`, ascending.
pub fn bits(mask: Mask) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

/// The δ-pseudo-orbit edge relation over the whole hyperspace.
///
/// Successor lists depend only on `F(A)`, so nodes with equal images share
/// one list.
pub struct HyperGraph {
    delta: Rational,
    delta_rank: Option<u16>,
    lists: Vec<Vec<Mask>>,
    list_of: Vec<u32>,
}

impl HyperGraph {
    pub fn delta(&self) -> Rational {
        self.delta
    }

    pub fn delta_rank(&self) -> Option<u16> {
        self.delta_rank
    }

    pub fn successors(&self, a: Mask) -> &[Mask] {
        &self.lists[self.list_of[a as usize] as usize]
    }

    pub fn has_edge(&self, a: Mask, b: Mask) -> bool {
        self.successors(a).binary_search(&b).is_ok()
    }

    pub fn node_count(&self) -> usize {
        self.list_of.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        (1..self.list_of.len()).map(|a| self.successors(a as Mask).len()).sum()
    }

    /// Nodes from which an infinite path exists (greatest fixpoint of
    /// "has a successor that is live").
    pub fn live_nodes(&self) -> Vec<bool> {
        let size = self.list_of.len();
        let mut preds: Vec<Vec<Mask>> = vec![Vec::new(); size];
        let mut out_deg = vec![0usize; size];
        for a in 1..size {
            let succ = self.successors(a as Mask);
            out_deg[a] = succ.len();
            for &b in succ {
                preds[b as usize].push(a as Mask);
            }
        }
        let mut live = vec![true; size];
        live[0] = false;
        let mut queue: Vec<usize> = (1..size).filter(|&a| out_deg[a] == 0).collect();
        while let Some(b) = queue.pop() {
            if !live[b] {
                continue;
            }
            live[b] = false;
            for &a in &preds[b] {
                let a = a as usize;
                out_deg[a] -= 1;
                if out_deg[a] == 0 && live[a] {
                    queue.push(a);
                }
            }
        }
        live
    }
}
