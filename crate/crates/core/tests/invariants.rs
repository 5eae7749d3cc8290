use proptest::prelude::*;

use setdyn::chains::{find_chain, is_chain_transitive_at};
use setdyn::hyperspace::Hyperspace;
use setdyn::mixing::{hit_times, is_transitive};
use setdyn::rational::Rational;
use setdyn::shadowing::{block_average_orbit, has_shadowing, shadowing_holds};
use setdyn::space::CompactSet;
use setdyn::suite::{random_system, SystemSpec};

fn system(max_points: usize) -> impl Strategy<Value = SystemSpec> {
    (any::<u64>(), 1..=max_points, 1usize..=3).prop_map(|(seed, n, m)| random_system(seed, n, m).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn image_is_monotone(s in system(6), a in 1u32..64, b in 1u32..64) {
        let n = s.space.len();
        let full = (1u32 << n) - 1;
        let (a, b) = (a & full, b & full);
        prop_assume!(a != 0);
        let small = CompactSet::from_mask(a);
        let big = CompactSet::from_mask(a | b);
        prop_assert!(s.mmap.image(&small).is_subset(&s.mmap.image(&big)));
    }

    #[test]
    fn powers_sample_the_orbit(s in system(5), k in 1usize..=3) {
        let fk = s.mmap.compose_power(k).unwrap();
        for x in 0..s.space.len() {
            for n in 0..6 {
                prop_assert_eq!(fk.power_image(x, n), s.mmap.power_image(x, n * k));
            }
        }
        let ran = s.mmap.ran();
        prop_assert!(fk.ran().iter().all(|set| ran.contains(set)));
    }

    #[test]
    fn orbits_cycle_within_hyperspace_size(s in system(6), start in 1u32..64) {
        let n = s.space.len();
        let a = CompactSet::from_mask(start & ((1 << n) - 1) | 1);
        let trace = s.mmap.orbit(&a);
        // at most 2^n - 1 distinct sets before the first repeat
        prop_assert!(trace.transient + trace.period < 1 << n);
        for i in 0..trace.sets.len() {
            prop_assert_eq!(trace.at(i + 1), &s.mmap.image(trace.at(i)));
        }
    }

    #[test]
    fn hit_times_match_enumeration(s in system(5)) {
        let bound = 1 << s.space.len();
        for target in s.mmap.ran().iter() {
            for u in 0..s.space.len() {
                let hits = hit_times(&s.mmap, u, target).unwrap();
                for n in 0..2 * bound {
                    prop_assert_eq!(hits.contains(n), n >= 1 && &s.mmap.power_image(u, n) == target);
                }
            }
        }
        let direct = s.mmap.ran().iter().all(|a| {
            (0..s.space.len()).all(|u| (1..2 * bound).any(|n| &s.mmap.power_image(u, n) == a))
        });
        prop_assert_eq!(is_transitive(&s.mmap).holds, direct);
    }

    #[test]
    fn chain_witnesses_revalidate(s in system(4), pick in 0usize..8) {
        let hs = Hyperspace::new(&s.space, &s.mmap).unwrap();
        let critical = s.space.critical_values();
        let delta = if critical.is_empty() { Rational::ZERO } else { critical[pick % critical.len()] };
        let v = is_chain_transitive_at(&hs, delta);
        for x in 0..s.space.len() {
            for target in s.mmap.ran().iter() {
                let chain = find_chain(&hs, delta, x, target).unwrap();
                if let Some(c) = &chain {
                    prop_assert!(c.is_valid(&hs));
                    prop_assert_eq!(c.sets.last().unwrap(), target);
                }
                if let Some(fail) = &v.failure {
                    if fail.x == x && &fail.target == target {
                        prop_assert!(chain.is_none());
                    }
                }
            }
        }
    }

    #[test]
    fn moduli_are_sound(s in system(4)) {
        let hs = Hyperspace::new(&s.space, &s.mmap).unwrap();
        let summary = has_shadowing(&hs);
        prop_assert!(summary.holds);
        for m in &summary.moduli {
            let delta = m.delta.unwrap();
            prop_assert!(shadowing_holds(&hs, m.epsilon, delta).unwrap().holds);
        }
    }

    #[test]
    fn block_orbits_are_valid(s in system(5), target_pick in 0usize..16, block in 2usize..12) {
        let ran: Vec<CompactSet> = s.mmap.ran().iter().cloned().collect();
        let target = &ran[target_pick % ran.len()];
        for x in 0..s.space.len() {
            let pseudo = block_average_orbit(&s.space, &s.mmap, x, target, block).unwrap();
            prop_assert!(pseudo.is_valid(&s.space, &s.mmap));
            prop_assert!(pseudo.first().is_singleton());
        }
    }
}
