//! Chain transitivity and chain mixing of two rotations on three points.
//!
//! ```bash
//! cargo run --example chain_transitivity
//! ```

use setdyn::chains::{chain_length_spectrum, find_chain, is_chain_mixing, is_chain_transitive};
use setdyn::hyperspace::Hyperspace;
use setdyn::multimap::MultiMap;
use setdyn::rational::q;
use setdyn::space::{CompactSet, FiniteMetricSpace};

fn main() -> setdyn::error::Result<()> {
    let space = FiniteMetricSpace::discrete_n(3)?;
    let f = MultiMap::new(3, vec![vec![1, 2, 0], vec![2, 0, 1]])?;
    let hs = Hyperspace::new(&space, &f)?;

    println!("Ran(F):");
    for set in f.ran().iter() {
        println!("  {set}");
    }

    let v = is_chain_transitive(&hs);
    println!("chain transitive: {}", v.holds);
    if let Some(fail) = &v.failure {
        println!("  no small chain from {{{}}} to {}", fail.x, fail.target);
    }
    println!("chain mixing: {}", is_chain_mixing(&hs).holds);

    // with δ = 1 every jump is allowed
    let target = CompactSet::new([0, 2])?;
    let chain = find_chain(&hs, q(1, 1), 0, &target)?.expect("δ = 1 reaches every set");
    println!("a 1-chain of length {}:", chain.len());
    for set in &chain.sets {
        println!("  {set}");
    }
    let spectrum = chain_length_spectrum(&hs, q(1, 1), 0, &target)?;
    println!("achievable lengths from 0 to {target}: {spectrum:?}");
    Ok(())
}
