//! Searching for average pseudo-orbits that no orbit follows on average.
//!
//! ```bash
//! cargo run --example average_refutation
//! ```

use setdyn::multimap::MultiMap;
use setdyn::rational::q;
use setdyn::shadowing::{block_average_orbit, limit_average_distance, refute_average_shadowing};
use setdyn::space::{CompactSet, FiniteMetricSpace};

fn main() -> setdyn::error::Result<()> {
    // two points far apart, one fixed point each: no orbit ever travels
    let space = FiniteMetricSpace::discrete_n(2)?;
    let f = MultiMap::identity(2);
    let pseudo = block_average_orbit(&space, &f, 0, &CompactSet::singleton(1), 8)?;
    println!("block orbit: {} prefix sets, cycle of {}", pseudo.prefix.len(), pseudo.cycle.len());
    for y in 0..2 {
        println!("  limit average distance from orbit of {y}: {}", limit_average_distance(&space, &f, y, &pseudo)?);
    }

    let schedule = [q(1, 2), q(1, 4), q(1, 8)];
    match refute_average_shadowing(&space, &f, q(1, 4), &schedule)? {
        Some(r) => {
            for e in &r.per_delta {
                println!("δ = {}: block {} from {} to {}, every orbit stays {} away", e.delta, e.block, e.start, e.target, e.min_limit_average);
            }
        }
        None => println!("no refutation"),
    }

    // the two rotations of 3 points: every average pseudo-orbit is followed
    let perm3 = MultiMap::new(3, vec![vec![1, 2, 0], vec![2, 0, 1]])?;
    let space3 = FiniteMetricSpace::discrete_n(3)?;
    let found = refute_average_shadowing(&space3, &perm3, q(1, 4), &schedule)?;
    println!("two rotations, ε = 1/4: refuted = {}", found.is_some());
    Ok(())
}
