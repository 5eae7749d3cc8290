//! Transitivity, weak mixing and mixing from exact hit times.
//!
//! ```bash
//! cargo run --example mixing
//! ```

use setdyn::mixing::{hit_times, is_mixing, is_transitive, is_weakly_mixing};
use setdyn::multimap::MultiMap;
use setdyn::space::CompactSet;

fn report(name: &str, f: &MultiMap) {
    println!("{name}");
    for (prop, v) in [
        ("transitive", is_transitive(f)),
        ("weakly mixing", is_weakly_mixing(f)),
        ("mixing", is_mixing(f)),
    ] {
        match v.note {
            Some(note) if !v.holds => println!("  {prop}: false ({note})"),
            _ => println!("  {prop}: {}", v.holds),
        }
    }
}

fn main() -> setdyn::error::Result<()> {
    let perm3 = MultiMap::new(3, vec![vec![1, 2, 0], vec![2, 0, 1]])?;
    report("two rotations of 3 points", &perm3);
    report("the rotation by one alone", &perm3.component(0));
    report("two constant maps", &MultiMap::new(2, vec![vec![0, 0], vec![1, 1]])?);

    let hits = hit_times(&perm3.component(0), 0, &CompactSet::singleton(1))?;
    println!("{{1}} is hit from 0 at n = 1, 4, 7, ...: {:?}", (1..10).filter(|&n| hits.contains(n)).collect::<Vec<_>>());
    Ok(())
}
