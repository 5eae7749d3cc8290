//! The zero + tent pair on the grid of step 1/98: a δ-pseudo-orbit that
//! every grid orbit leaves.
//!
//! ```bash
//! cargo run --release --example tent
//! ```

use setdyn::rational::q;
use setdyn::shadowing::tent_counterexample_check;

fn main() -> setdyn::error::Result<()> {
    let r = tent_counterexample_check(98, q(1, 49), q(1, 98))?;
    println!("pseudo-orbit valid: {} (largest defect {})", r.pseudo_orbit_valid, r.max_defect);
    println!("prefix {} + cycle {}", r.prefix_len, r.cycle_len);
    println!("F^n(z) = {{0, tent^n(z)}} for all z: {}", r.orbit_shape_holds);
    for (z, i) in r.failing_index.iter().enumerate().step_by(14) {
        println!("  z = {z}/98 leaves at step {i:?}");
    }
    println!("not shadowable: {}", r.not_shadowable);
    println!("best long-run average distance: {}", r.min_limit_average);
    Ok(())
}
