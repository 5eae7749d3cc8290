//! Transitivity, weak mixing and mixing of a multiple mapping.
//!
//! Every metric on a finite set induces the discrete topology, and so does
//! the Hausdorff metric on `Ran(F)`. The open-set quantifiers therefore
//! reduce to single points `u` and single range elements `A`, and each
//! property becomes a statement about the hit times `{n >= 1 : F^n(u) = A}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::multimap::{MultiMap, OrbitTrace};
use crate::space::CompactSet;

/// Hit times of `A` along the orbit of `u`, for `n >= 1`.
///
/// For `n >= transient`, `n` hits iff `transient + (n - transient) % period`
/// is listed in `periodic`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HitTimes {
    pub u: usize,
    pub target: CompactSet,
    pub transient: usize,
    pub period: usize,
    pub pre: Vec<usize>,
    pub periodic: Vec<usize>,
}

impl HitTimes {
    fn from_trace(u: usize, target: &CompactSet, trace: &OrbitTrace) -> HitTimes {
        let t = trace.transient;
        let p = trace.period;
        HitTimes {
            u,
            target: target.clone(),
            transient: t,
            period: p,
            pre: (1..t).filter(|&n| &trace.sets[n] == target).collect(),
            periodic: (t..t + p).filter(|&k| &trace.sets[k] == target).collect(),
        }
    }

    pub fn contains(&self, n: usize) -> bool {
        if n == 0 {
            return false;
        }
        if n < self.transient {
            self.pre.binary_search(&n).is_ok()
        } else {
            let k = self.transient + (n - self.transient) % self.period;
            self.periodic.binary_search(&k).is_ok()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pre.is_empty() && self.periodic.is_empty()
    }

    pub fn is_cofinite(&self) -> bool {
        self.periodic.len() == self.period
    }

    pub fn first(&self) -> Option<usize> {
        self.pre.first().copied().or_else(|| {
            self.periodic
                .first()
                .map(|&k| if k == 0 { self.period } else { k })
        })
    }
}

pub fn hit_times(f: &MultiMap, u: usize, target: &CompactSet) -> Result<HitTimes> {
    if u >= f.points() {
        return Err(Error::IndexOutOfRange { index: u, size: f.points() });
    }
    let trace = f.orbit(&CompactSet::singleton(u));
    Ok(HitTimes::from_trace(u, target, &trace))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairWitness {
    pub u: usize,
    pub target: CompactSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MixingFailure {
    /// `F^n(u)` never equals `target` for `n >= 1` (or, for mixing, not for
    /// all large `n`).
    Pair { u: usize, target: CompactSet },
    /// The two hit-time sets are both nonempty but disjoint.
    Pairs { first: PairWitness, second: PairWitness },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MixingVerdict {
    pub holds: bool,
    pub failure: Option<MixingFailure>,
    /// Human-readable reason attached to failures.
    pub note: Option<String>,
}

impl MixingVerdict {
    fn ok() -> Self {
        MixingVerdict { holds: true, failure: None, note: None }
    }
}

fn all_hit_times(f: &MultiMap) -> Vec<HitTimes> {
    let range = f.ran();
    let traces: Vec<OrbitTrace> =
        (0..f.points()).map(|u| f.orbit(&CompactSet::singleton(u))).collect();
    traces
        .iter()
        .enumerate()
        .flat_map(|(u, trace)| range.iter().map(move |a| HitTimes::from_trace(u, a, trace)))
        .collect()
}

pub fn is_transitive(f: &MultiMap) -> MixingVerdict {
    match all_hit_times(f).into_iter().find(HitTimes::is_empty) {
        Some(h) => MixingVerdict {
            holds: false,
            note: Some(format!("the orbit of {} never reaches {}", h.u, h.target)),
            failure: Some(MixingFailure::Pair { u: h.u, target: h.target }),
        },
        None => MixingVerdict::ok(),
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Last time that must be searched for a common hit: past
/// `max(transients) + lcm(periods)` both patterns repeat with the lcm.
pub fn common_hit_bound(a: &HitTimes, b: &HitTimes) -> usize {
    let lcm = a.period / gcd(a.period, b.period) * b.period;
    a.transient.max(b.transient).max(1) + lcm
}

pub fn first_common_hit(a: &HitTimes, b: &HitTimes) -> Option<usize> {
    (1..=common_hit_bound(a, b)).find(|&n| a.contains(n) && b.contains(n))
}

pub fn is_weakly_mixing(f: &MultiMap) -> MixingVerdict {
    let hits = all_hit_times(f);
    if let Some(h) = hits.iter().find(|h| h.is_empty()) {
        return MixingVerdict {
            holds: false,
            note: Some(format!("the orbit of {} never reaches {}", h.u, h.target)),
            failure: Some(MixingFailure::Pair { u: h.u, target: h.target.clone() }),
        };
    }
    for (i, a) in hits.iter().enumerate() {
        for b in &hits[i..] {
            if first_common_hit(a, b).is_none() {
                return MixingVerdict {
                    holds: false,
                    note: Some(format!(
                        "no n >= 1 has F^n({}) = {} and F^n({}) = {}",
                        a.u, a.target, b.u, b.target
                    )),
                    failure: Some(MixingFailure::Pairs {
                        first: PairWitness { u: a.u, target: a.target.clone() },
                        second: PairWitness { u: b.u, target: b.target.clone() },
                    }),
                };
            }
        }
    }
    MixingVerdict::ok()
}

/// Orbits are deterministic, so a cofinite hit set means the orbit of `u`
/// ends in a fixed point equal to `A`. Mixing therefore holds iff `Ran(F)`
/// is a single set that every orbit settles on.
pub fn is_mixing(f: &MultiMap) -> MixingVerdict {
    let range_size = f.ran().len();
    match all_hit_times(f).into_iter().find(|h| !h.is_cofinite()) {
        Some(h) => MixingVerdict {
            holds: false,
            note: Some(format!(
                "|Ran(F)| = {range_size}; the orbit of {} does not settle on {}",
                h.u, h.target
            )),
            failure: Some(MixingFailure::Pair { u: h.u, target: h.target }),
        },
        None => MixingVerdict::ok(),
    }
}
