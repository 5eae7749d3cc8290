//! Deciding shadowing at fixed (ε, δ) and computing a δ for every ε.
//!
//! ```bash
//! cargo run --example shadowing
//! ```

use setdyn::hyperspace::Hyperspace;
use setdyn::multimap::MultiMap;
use setdyn::rational::{q, Rational};
use setdyn::shadowing::{has_shadowing, shadowing_holds, simulation_relation};
use setdyn::space::FiniteMetricSpace;

fn main() -> setdyn::error::Result<()> {
    let space = FiniteMetricSpace::discrete_n(3)?;
    let f = MultiMap::new(3, vec![vec![1, 2, 0], vec![2, 0, 1]])?;
    let hs = Hyperspace::new(&space, &f)?;

    for delta in [q(1, 1), q(1, 2)] {
        let v = shadowing_holds(&hs, q(1, 1), delta)?;
        print!("ε = 1, δ = {delta}: {}", if v.holds { "shadowed" } else { "not shadowed" });
        match &v.failure {
            Some(fail) => {
                let sets: Vec<String> = fail.prefix.iter().map(|s| s.to_string()).collect();
                println!(", no orbit follows {}", sets.join(" -> "));
            }
            None => println!(),
        }
    }

    let rel = simulation_relation(&hs, q(1, 1), Rational::ZERO)?;
    println!("simulation relation at δ = 0 has {} pairs", rel.len());

    let summary = has_shadowing(&hs);
    println!("has shadowing: {}", summary.holds);
    for m in &summary.moduli {
        match m.delta {
            Some(d) => println!("  ε = {}: δ = {d} works", m.epsilon),
            None => println!("  ε = {}: no δ found", m.epsilon),
        }
    }
    Ok(())
}
