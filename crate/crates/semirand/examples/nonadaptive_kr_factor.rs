//! Non-adaptive triangle factor: own-block-first lists, then per-block
//! exact clique partitioning.
//!
//! ```bash
//! cargo run --release --example nonadaptive_kr_factor
//! ```

use semirand::nonadaptive::{kr_factor_lists, recommended_budget, BudgetKind, ListBuilder, StopRule};
use semirand::process::{run, RunOptions};
use semirand::verify::extract_kr_factor;

fn main() {
    let n = 2046; // divisible by 3
    let r = 3;
    let (family, partition) = kr_factor_lists(n, r).expect("r divides n");
    println!(
        "{} blocks, sizes {}..{} (all multiples of {r})",
        partition.k(),
        partition.min_size(),
        partition.max_size()
    );
    let budget = recommended_budget(BudgetKind::KrFactor(r), n);
    let mut builder = ListBuilder::new(family, StopRule::Never);
    let out = run(&mut builder, n, budget, 31, &RunOptions::default()).expect("engine runs");
    println!("played {} rounds, built {} edges", out.rounds_used, out.graph.edge_count());

    match extract_kr_factor(&out.graph, &partition, r) {
        Ok(cert) => {
            cert.check(&out.graph).expect("certificate re-check");
            println!("clique factor extracted and re-verified ({} parts)", cert.parts.len());
        }
        Err(e) => println!("no factor extracted: {e}"),
    }
}
