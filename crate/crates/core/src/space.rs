//! Finite metric spaces with exact distances, their nonempty subsets, and
//! the Hausdorff metric between those subsets.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Why a matrix fails to be a metric. The `Display` strings are part of the
/// CLI contract (`"symmetry at (0,1)"`, `"triangle (0,1,2)"`).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("empty space")]
    Empty,
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("negative entry at ({0},{1})")]
    NegativeEntry(usize, usize),
    #[error("diagonal at ({0},{0})")]
    Diagonal(usize),
    #[error("symmetry at ({0},{1})")]
    Symmetry(usize, usize),
    #[error("positivity at ({0},{1})")]
    Positivity(usize, usize),
    /// `d(i,k) > d(i,j) + d(j,k)`.
    #[error("triangle ({0},{1},{2})")]
    Triangle(usize, usize, usize),
}

impl MetricError {
    /// True for axiom violations, false for malformed input.
    pub fn is_axiom_violation(&self) -> bool {
        !matches!(
            self,
            MetricError::Empty | MetricError::NotSquare { .. } | MetricError::NegativeEntry(..)
        )
    }
}

/// Checks the four metric axioms. Malformed input (non-square, negative
/// entries) is reported before any axiom is examined.
pub fn validate_metric(matrix: &[Vec<Rational>]) -> Result<(), MetricError> {
    let n = matrix.len();
    if n == 0 {
        return Err(MetricError::Empty);
    }
    for (row, r) in matrix.iter().enumerate() {
        if r.len() != n {
            return Err(MetricError::NotSquare { row, len: r.len(), expected: n });
        }
    }
    for i in 0..n {
        for j in 0..n {
            if matrix[i][j].is_negative() {
                return Err(MetricError::NegativeEntry(i, j));
            }
        }
    }
    for i in 0..n {
        if !matrix[i][i].is_zero() {
            return Err(MetricError::Diagonal(i));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if matrix[i][j] != matrix[j][i] {
                return Err(MetricError::Symmetry(i, j));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if !matrix[i][j].is_positive() {
                return Err(MetricError::Positivity(i, j));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                // entries are bounded by i64, so the i128 sum cannot overflow
                let lhs = matrix[i][k];
                let via = matrix[i][j].checked_add(matrix[j][k]);
                let broken = match via {
                    Ok(sum) => lhs > sum,
                    Err(_) => false,
                };
                if broken {
                    return Err(MetricError::Triangle(i, j, k));
                }
            }
        }
    }
    Ok(())
}

/// A nonempty set of point indices, kept sorted and deduplicated.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct CompactSet {
    members: Vec<usize>,
}

impl CompactSet {
    pub fn new<I: IntoIterator<Item = usize>>(points: I) -> Result<CompactSet> {
        let set: BTreeSet<usize> = points.into_iter().collect();
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(CompactSet { members: set.into_iter().collect() })
    }

    pub fn singleton(x: usize) -> CompactSet {
        CompactSet { members: vec![x] }
    }

    /// Builds from a bitmask; bit `i` set means point `i` is a member.
    ///
    /// Panics on the empty mask.
    pub fn from_mask(mask: u32) -> CompactSet {
        assert!(mask != 0, "empty mask");
        let members = (0..32).filter(|i| mask >> i & 1 == 1).collect();
        CompactSet { members }
    }

    /// Bitmask form; only valid while every member is below 32.
    pub fn to_mask(&self) -> u32 {
        self.members.iter().fold(0u32, |m, &i| {
            assert!(i < 32, "point {i} does not fit a mask");
            m | 1 << i
        })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_singleton(&self) -> bool {
        self.members.len() == 1
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn is_subset(&self, other: &CompactSet) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }

    pub fn max_index(&self) -> usize {
        *self.members.last().expect("nonempty")
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }
}

impl TryFrom<Vec<usize>> for CompactSet {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        CompactSet::new(v)
    }
}

impl From<CompactSet> for Vec<usize> {
    fn from(s: CompactSet) -> Self {
        s.members
    }
}

impl fmt::Display for CompactSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, x) in self.members.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for CompactSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    #[serde(rename = "metric")]
    dist: Vec<Vec<Rational>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<usize>,
}

impl FiniteMetricSpace {
    pub fn new(labels: Vec<String>, dist: Vec<Vec<Rational>>) -> Result<FiniteMetricSpace> {
        validate_metric(&dist)?;
        if labels.len() != dist.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for a {}x{} metric",
                labels.len(),
                dist.len(),
                dist.len()
            )));
        }
        Ok(FiniteMetricSpace { labels, dist, grid: None })
    }

    /// Distance 1 between every pair of distinct points.
    pub fn discrete<S: Into<String>>(labels: Vec<S>) -> Result<FiniteMetricSpace> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        let dist = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rational::ZERO } else { Rational::ONE })
                    .collect()
            })
            .collect();
        FiniteMetricSpace::new(labels, dist)
    }

    /// The discrete metric on points labelled `0..n`.
    pub fn discrete_n(n: usize) -> Result<FiniteMetricSpace> {
        FiniteMetricSpace::discrete((0..n).map(|i| i.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    pub fn distance(&self, i: usize, j: usize) -> Rational {
        self.dist[i][j]
    }

    /// `Some(N)` when the space was built by [`grid_interval`].
    pub fn grid_size(&self) -> Option<usize> {
        self.grid
    }

    pub fn check_set(&self, set: &CompactSet) -> Result<()> {
        match set.max_index() {
            i if i < self.len() => Ok(()),
            index => Err(Error::IndexOutOfRange { index, size: self.len() }),
        }
    }

    pub fn hausdorff(&self, a: &CompactSet, b: &CompactSet) -> Rational {
        let directed = |from: &CompactSet, to: &CompactSet| {
            from.iter()
                .map(|x| to.iter().map(|y| self.dist[x][y]).min().expect("nonempty"))
                .max()
                .expect("nonempty")
        };
        directed(a, b).max(directed(b, a))
    }

    pub fn diameter(&self) -> Rational {
        self.dist
            .iter()
            .flat_map(|row| row.iter().copied())
            .max()
            .unwrap_or(Rational::ZERO)
    }

    /// Distinct positive pairwise distances, ascending. Every Hausdorff
    /// distance between subsets is one of these (or zero), and every one of
    /// them is realized by a pair of singletons.
    pub fn critical_values(&self) -> Vec<Rational> {
        let set: BTreeSet<Rational> = self
            .dist
            .iter()
            .flat_map(|row| row.iter().copied())
            .filter(|d| d.is_positive())
            .collect();
        set.into_iter().collect()
    }
}

/// `{i/N : 0 <= i <= N}` with `d = |i-j|/N`, labelled by the reduced fractions.
pub fn grid_interval(n: usize) -> Result<FiniteMetricSpace> {
    if n == 0 {
        return Err(Error::InvalidArgument("grid size N must be at least 1".into()));
    }
    let den = i64::try_from(n).map_err(|_| Error::InvalidArgument("grid too large".into()))?;
    let labels = (0..=n)
        .map(|i| Rational::new(i as i64, den).map(|r| r.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let dist = (0..=n)
        .map(|i| {
            (0..=n)
                .map(|j| Rational::new((i as i64 - j as i64).abs(), den))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut space = FiniteMetricSpace::new(labels, dist)?;
    space.grid = Some(n);
    Ok(space)
}

pub fn hausdorff(a: &CompactSet, b: &CompactSet, space: &FiniteMetricSpace) -> Rational {
    space.hausdorff(a, b)
}

pub fn diameter(space: &FiniteMetricSpace) -> Rational {
    space.diameter()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use proptest::prelude::*;

    fn int_matrix(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| Rational::integer(v)).collect())
            .collect()
    }

    fn set(v: &[usize]) -> CompactSet {
        CompactSet::new(v.iter().copied()).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert_eq!(validate_metric(&int_matrix(&[&[0]])), Ok(()));
        let err = validate_metric(&int_matrix(&[&[0, 1], &[2, 0]])).unwrap_err();
        assert_eq!(err.to_string(), "symmetry at (0,1)");
        let err = validate_metric(&int_matrix(&[&[0, 1, 5], &[1, 0, 1], &[5, 1, 0]])).unwrap_err();
        assert_eq!(err.to_string(), "triangle (0,1,2)");
    }

    #[test]
    fn validate_malformed() {
        let err = validate_metric(&int_matrix(&[&[0, 1], &[1]])).unwrap_err();
        assert!(matches!(err, MetricError::NotSquare { row: 1, .. }));
        assert!(!err.is_axiom_violation());
        let err = validate_metric(&int_matrix(&[&[0, -1], &[-1, 0]])).unwrap_err();
        assert_eq!(err, MetricError::NegativeEntry(0, 1));
        let err = validate_metric(&int_matrix(&[&[1, 1], &[1, 0]])).unwrap_err();
        assert_eq!(err.to_string(), "diagonal at (0,0)");
        let err = validate_metric(&int_matrix(&[&[0, 0], &[0, 0]])).unwrap_err();
        assert_eq!(err.to_string(), "positivity at (0,1)");
    }

    #[test]
    fn grid_examples() {
        let g1 = grid_interval(1).unwrap();
        assert_eq!(g1.labels(), ["0", "1"]);
        assert_eq!(g1.distance(0, 1), Rational::ONE);
        let g2 = grid_interval(2).unwrap();
        assert_eq!(g2.labels(), ["0", "1/2", "1"]);
        assert_eq!(g2.distance(0, 1), q(1, 2));
        let g98 = grid_interval(98).unwrap();
        assert_eq!(g98.index_of("1/7"), Some(14));
        assert_eq!(g98.index_of("1/49"), Some(2));
        assert_eq!(g98.grid_size(), Some(98));
        assert!(grid_interval(0).is_err());
    }

    #[test]
    fn hausdorff_examples() {
        let g2 = grid_interval(2).unwrap();
        assert_eq!(g2.hausdorff(&set(&[0]), &set(&[0, 2])), Rational::ONE);
        let d3 = FiniteMetricSpace::discrete_n(3).unwrap();
        assert_eq!(d3.hausdorff(&set(&[1, 2]), &set(&[0, 1, 2])), Rational::ONE);
        assert_eq!(d3.hausdorff(&set(&[1, 2]), &set(&[1, 2])), Rational::ZERO);
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(FiniteMetricSpace::discrete_n(1).unwrap().diameter(), Rational::ZERO);
        assert_eq!(grid_interval(4).unwrap().diameter(), Rational::ONE);
        assert_eq!(FiniteMetricSpace::discrete_n(3).unwrap().diameter(), Rational::ONE);
    }

    #[test]
    fn compact_set_basics() {
        assert!(CompactSet::new(Vec::new()).is_err());
        let s = set(&[3, 1, 3]);
        assert_eq!(s.members(), [1, 3]);
        assert_eq!(s.to_string(), "{1,3}");
        assert_eq!(CompactSet::from_mask(s.to_mask()), s);
        let space = FiniteMetricSpace::discrete_n(3).unwrap();
        assert!(matches!(
            space.check_set(&s),
            Err(Error::IndexOutOfRange { index: 3, size: 3 })
        ));
    }

    #[test]
    fn critical_values_are_sorted_positive_distances() {
        let g = grid_interval(4).unwrap();
        assert_eq!(g.critical_values(), vec![q(1, 4), q(1, 2), q(3, 4), Rational::ONE]);
    }

    // Points on a line with integer coordinates give a valid metric.
    fn line_space() -> impl Strategy<Value = FiniteMetricSpace> {
        proptest::collection::btree_set(0i64..40, 1..7).prop_map(|pts| {
            let pts: Vec<i64> = pts.into_iter().collect();
            let labels = pts.iter().map(|p| p.to_string()).collect();
            let dist = pts
                .iter()
                .map(|a| pts.iter().map(|b| q((a - b).abs(), 7)).collect())
                .collect();
            FiniteMetricSpace::new(labels, dist).unwrap()
        })
    }

    fn subset_of(n: usize) -> impl Strategy<Value = CompactSet> {
        proptest::collection::btree_set(0..n, 1..=n).prop_map(|s| CompactSet::new(s).unwrap())
    }

    proptest! {
        #[test]
        fn hausdorff_is_a_metric(
            (space, a, b, c) in line_space().prop_flat_map(|s| {
                let n = s.len();
                (Just(s), subset_of(n), subset_of(n), subset_of(n))
            })
        ) {
            let dab = space.hausdorff(&a, &b);
            prop_assert_eq!(dab, space.hausdorff(&b, &a));
            prop_assert_eq!(dab.is_zero(), a == b);
            prop_assert!(dab <= space.hausdorff(&a, &c) + space.hausdorff(&c, &b));
            prop_assert!(dab <= space.diameter());
        }

        #[test]
        fn singletons_recover_the_metric(space in line_space(), i in 0usize..7, j in 0usize..7) {
            let n = space.len();
            let (i, j) = (i % n, j % n);
            prop_assert_eq!(
                space.hausdorff(&CompactSet::singleton(i), &CompactSet::singleton(j)),
                space.distance(i, j)
            );
        }
    }
}
