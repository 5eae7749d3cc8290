//! Loading a system file and inspecting it.
//!
//! ```bash
//! cargo run --example load_system -- crates/core/examples/data/const_pair_line.json
//! ```

use std::path::PathBuf;

use setdyn::cli::{fingerprint, load_system};

fn main() -> setdyn::error::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/const_pair_line.json")));
    let sys = load_system(&path)?;
    println!("{}: {} points, {} maps", sys.name, sys.space.len(), sys.mmap.len());
    println!("fingerprint {}", fingerprint(&sys));
    println!("diameter {}", sys.space.diameter());
    println!("critical values {:?}", sys.space.critical_values().iter().map(|c| c.to_string()).collect::<Vec<_>>());
    for set in sys.mmap.ran().iter() {
        let labels: Vec<&str> = set.iter().map(|i| sys.space.label(i)).collect();
        println!("  range set {{{}}}", labels.join(", "));
    }
    if let Some(c) = sys.constant_fixed_pair() {
        println!("f1 is constant at {}, fixed by f2", sys.space.label(c));
    }
    Ok(())
}
