use proptest::prelude::*;

use super::*;
use crate::multimap::MultiMap;
use crate::rational::q;
use crate::space::FiniteMetricSpace;

fn perm3() -> (FiniteMetricSpace, MultiMap) {
    let s = FiniteMetricSpace::discrete_n(3).unwrap();
    let f = MultiMap::new(3, vec![vec![1, 2, 0], vec![2, 0, 1]]).unwrap();
    (s, f)
}

fn const_ab() -> (FiniteMetricSpace, MultiMap) {
    let s = FiniteMetricSpace::discrete_n(3).unwrap();
    let f = MultiMap::new(3, vec![vec![0; 3], vec![1; 3]]).unwrap();
    (s, f)
}

fn line(coords: &[i64]) -> FiniteMetricSpace {
    let labels = (0..coords.len()).map(|i| format!("p{i}")).collect();
    let dist = coords
        .iter()
        .map(|a| coords.iter().map(|b| Rational::integer((a - b).abs())).collect())
        .collect();
    FiniteMetricSpace::new(labels, dist).unwrap()
}

fn system() -> impl Strategy<Value = (FiniteMetricSpace, MultiMap)> {
    (1usize..=4).prop_flat_map(|n| {
        (
            proptest::sample::subsequence((0i64..8).collect::<Vec<_>>(), n).prop_shuffle(),
            proptest::collection::vec(proptest::collection::vec(0..n, n), 1..=2),
        )
            .prop_map(move |(coords, maps)| (line(&coords), MultiMap::new(n, maps).unwrap()))
    })
}

/// Depth-bounded search, straight from the definition: a finite live path
/// from a singleton along which every orbit drifts ε away at some step.
fn bounded_failure(hs: &Hyperspace<'_>, eps: Rational, delta: Rational, depth: usize) -> bool {
    let graph = hs.graph(delta);
    let live = graph.live_nodes();
    let n = hs.points();
    let orbits: Vec<Vec<Mask>> = (0..n)
        .map(|y| {
            std::iter::successors(Some(1 << y as Mask), |&m| Some(hs.image(m)))
                .take(depth + 1)
                .collect()
        })
        .collect();
    fn walk(
        hs: &Hyperspace<'_>,
        graph: &HyperGraph,
        live: &[bool],
        orbits: &[Vec<Mask>],
        eps: Rational,
        path: &mut Vec<Mask>,
        alive: Vec<usize>,
        depth: usize,
    ) -> bool {
        let i = path.len() - 1;
        let a = path[i];
        let alive: Vec<usize> =
            alive.into_iter().filter(|&y| hs.hausdorff(orbits[y][i], a) < eps).collect();
        if alive.is_empty() {
            return true;
        }
        if i == depth {
            return false;
        }
        for &b in graph.successors(a) {
            if live[b as usize] {
                path.push(b);
                if walk(hs, graph, live, orbits, eps, path, alive.clone(), depth) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }
    (0..n).filter(|&x| live[1 << x]).any(|x| {
        walk(hs, &graph, &live, &orbits, eps, &mut vec![1 << x], (0..n).collect(), depth)
    })
}

fn check_failure(hs: &Hyperspace<'_>, v: &ShadowingVerdict) {
    let fail = v.failure.as_ref().unwrap();
    let masks: Vec<Mask> = fail.prefix.iter().map(|s| s.to_mask()).collect();
    assert_eq!(masks[0], 1 << fail.start);
    let graph = hs.graph(v.delta);
    let live = graph.live_nodes();
    assert!(masks.iter().all(|&m| live[m as usize]));
    for w in masks.windows(2) {
        assert!(hs.hausdorff(hs.image(w[0]), w[1]) <= v.delta);
    }
    for y in 0..hs.points() {
        let mut orbit: Mask = 1 << y;
        let mut drifted = false;
        for &a in &masks {
            drifted |= hs.hausdorff(orbit, a) >= v.epsilon;
            orbit = hs.image(orbit);
        }
        assert!(drifted, "point {y} follows the reported prefix");
    }
}

#[test]
fn perm3_fails_at_full_delta() {
    let (s, f) = perm3();
    let hs = Hyperspace::new(&s, &f).unwrap();
    let v = shadowing_holds(&hs, q(1, 1), q(1, 1)).unwrap();
    assert!(!v.holds);
    check_failure(&hs, &v);
    // below the only positive distance every pseudo-orbit is a true orbit
    let v = shadowing_holds(&hs, q(1, 1), q(1, 2)).unwrap();
    assert!(v.holds);
    assert!(v.starts.iter().all(|w| w.uniform_shadow == Some(w.start)));
}

#[test]
fn const_pair_shadows_at_half_epsilon() {
    let (s, f) = const_ab();
    let hs = Hyperspace::new(&s, &f).unwrap();
    for eps in s.critical_values() {
        assert!(shadowing_holds(&hs, eps, eps / Rational::integer(2)).unwrap().holds);
    }
    let summary = has_shadowing(&hs);
    assert!(summary.holds);
    assert_eq!(summary.moduli.len(), 1);
}

#[test]
fn every_finite_system_has_shadowing() {
    let (s, f) = perm3();
    let hs = Hyperspace::new(&s, &f).unwrap();
    let summary = has_shadowing(&hs);
    assert!(summary.holds);
    let m = summary.modulus(q(1, 1)).unwrap();
    assert_eq!(m.delta, Some(Rational::ZERO));
    assert_eq!(m.delta_limit, Some(q(1, 1)));
}

#[test]
fn rejects_bad_parameters() {
    let (s, f) = perm3();
    let hs = Hyperspace::new(&s, &f).unwrap();
    assert!(shadowing_holds(&hs, q(0, 1), q(1, 2)).is_err());
    assert!(shadowing_holds(&hs, q(1, 2), q(-1, 2)).is_err());
    assert!(simulation_relation(&hs, q(-1, 1), q(0, 1)).is_err());
}

#[test]
fn pointwise_choice_can_beat_uniform_choice() {
    // 0 and 1 swap under f1 and sit still under f2; from {0} a δ=1 pseudo-orbit
    // may follow either branch, so no single y shadows every path, yet each
    // path is an orbit-compatible choice for some y.
    let s = line(&[0, 1, 5]);
    let f = MultiMap::new(3, vec![vec![1, 0, 2], vec![0, 1, 2]]).unwrap();
    let hs = Hyperspace::new(&s, &f).unwrap();
    let rel = simulation_relation(&hs, q(2, 1), q(1, 1)).unwrap();
    let v = shadowing_holds(&hs, q(2, 1), q(1, 1)).unwrap();
    for w in &v.starts {
        if let Some(y) = w.uniform_shadow {
            assert!(rel.contains(&CompactSet::singleton(w.start), &CompactSet::singleton(y)));
        }
    }
    assert_eq!(v.holds, !bounded_failure(&hs, q(2, 1), q(1, 1), 8));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn decider_matches_bounded_search((s, f) in system(), ei in 0usize..4, di in 0usize..4) {
        let hs = Hyperspace::new(&s, &f).unwrap();
        let levels = hs.levels().to_vec();
        let eps = levels[ei.min(levels.len() - 1)].max(q(1, 2));
        let delta = levels[di.min(levels.len() - 1)];
        let v = shadowing_holds(&hs, eps, delta).unwrap();
        if v.holds {
            prop_assert!(!bounded_failure(&hs, eps, delta, 6));
        } else {
            check_failure(&hs, &v);
            prop_assert!(bounded_failure(&hs, eps, delta, v.failure.as_ref().unwrap().prefix.len()));
        }
    }

    #[test]
    fn uniform_shadows_follow_random_walks((s, f) in system(), di in 0usize..4, seed in any::<u64>()) {
        let hs = Hyperspace::new(&s, &f).unwrap();
        let levels = hs.levels().to_vec();
        let delta = levels[di.min(levels.len() - 1)];
        let eps = *levels.last().unwrap();
        let eps = if eps.is_zero() { q(1, 1) } else { eps };
        let v = shadowing_holds(&hs, eps, delta).unwrap();
        let graph = hs.graph(delta);
        let live = graph.live_nodes();
        let mut state = seed;
        for w in &v.starts {
            let Some(y) = w.uniform_shadow else { continue };
            for _ in 0..8 {
                let (mut a, mut b): (Mask, Mask) = (1 << w.start, 1 << y);
                for _ in 0..30 {
                    prop_assert!(hs.hausdorff(a, b) < eps);
                    let next: Vec<Mask> = graph.successors(a).iter().copied()
                        .filter(|&c| live[c as usize]).collect();
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    a = next[(state >> 33) as usize % next.len()];
                    b = hs.image(b);
                }
            }
        }
        // a uniform shadow for every live start already proves the property
        if v.starts.iter().all(|w| !w.live || w.uniform_shadow.is_some()) {
            prop_assert!(v.holds);
        }
    }

    #[test]
    fn verdicts_are_monotone((s, f) in system()) {
        let hs = Hyperspace::new(&s, &f).unwrap();
        let levels = hs.levels().to_vec();
        let mut eps_values: Vec<Rational> = levels.iter().copied().filter(|l| l.is_positive()).collect();
        eps_values.push(*levels.last().unwrap() + q(1, 1));
        for &eps in &eps_values {
            let verdicts: Vec<bool> = levels.iter()
                .map(|&d| shadowing_holds(&hs, eps, d).unwrap().holds)
                .collect();
            prop_assert!(verdicts[0]);
            prop_assert!(verdicts.windows(2).all(|w| w[0] || !w[1]));
        }
        prop_assert!(has_shadowing(&hs).holds);
    }
}

#[test]
fn point_shadowing_examples() {
    // identity on two points at distance 1: jumping is a 1-pseudo-orbit no orbit follows
    let s = line(&[0, 1]);
    let fail = point_shadowing_failure(&s, &[0, 1], q(1, 1), q(1, 1)).unwrap().unwrap();
    assert_eq!(fail.len(), 2);
    assert_ne!(fail[0], fail[1]);
    assert!(point_shadowing_failure(&s, &[0, 1], q(1, 1), q(1, 2)).unwrap().is_none());
    assert!(point_shadowing_failure(&s, &[0, 1], q(2, 1), q(1, 1)).unwrap().is_none());
    assert!(point_shadowing_failure(&s, &[0, 2], q(1, 1), q(1, 2)).is_err());
}
