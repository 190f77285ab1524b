//! Non-adaptive Hamilton cycle: predetermined block lists, one pass of the
//! process, then certificate extraction and an independent re-check.
//!
//! ```bash
//! cargo run --release --example nonadaptive_hamilton
//! ```

use semirand::nonadaptive::{hamilton_lists, recommended_budget, BudgetKind, ListBuilder, StopRule};
use semirand::process::{run, RunOptions};
use semirand::verify::extract_hamilton;

fn main() {
    let n = 2048;
    let (family, partition) = hamilton_lists(n);
    println!(
        "{} blocks of size {}..{}",
        partition.k(),
        partition.min_size(),
        partition.max_size()
    );
    let budget = recommended_budget(BudgetKind::Hamilton, n);
    let mut builder = ListBuilder::new(family, StopRule::Never);
    let out = run(&mut builder, n, budget, 123, &RunOptions::default()).expect("engine runs");
    println!("played {} rounds, built {} edges", out.rounds_used, out.graph.edge_count());

    match extract_hamilton(&out.graph, &partition) {
        Ok(cert) => {
            cert.check(&out.graph).expect("certificate re-check");
            println!("hamilton cycle extracted and re-verified ({} vertices)", cert.cycle.len());
        }
        Err(e) => println!("no cycle extracted: {e}"),
    }
}
