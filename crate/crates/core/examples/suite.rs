//! Seeded random search for counterexamples to the set-valued implications.
//!
//! ```bash
//! cargo run --release --example suite -- 42 100
//! ```

use setdyn::suite::run_suite;

fn main() -> setdyn::error::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let count = args.next().and_then(|s| s.parse().ok()).unwrap_or(50);
    for r in run_suite(seed, count, 5)? {
        println!(
            "{:<36} {:>4} systems  {} counterexamples  {} flags",
            r.theorem.code(),
            r.systems_tested,
            r.counterexamples.len(),
            r.flags.len()
        );
        for c in &r.counterexamples {
            println!("    {}: {}", c.system.name, c.details);
        }
    }
    Ok(())
}
