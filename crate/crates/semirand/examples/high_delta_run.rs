//! Fill out-neighborhoods with the single-stage strategy in the regime
//! where the target degree dwarfs `log n`.
//!
//! ```bash
//! cargo run --release --example high_delta_run
//! ```

use semirand::adaptive::high_delta_strategy;
use semirand::graph::{generate, TargetKind, TargetSpec};
use semirand::process::{run, RunOptions};
use semirand::verify::is_embedding;

fn main() {
    // clique blocks of size 41: degree 40 versus ln(164) ~ 5.1
    let n = 164;
    let spec = TargetSpec { kind: TargetKind::KrFactor { r: 41 }, n };
    let h = generate(&spec, 0).expect("target generates");

    let mut builder = high_delta_strategy(&h, 0.9);
    let budget = builder.recommended_budget();
    println!("budget: {budget} rounds for {} edges", h.edge_count());

    let out = run(&mut builder, n, budget, 11, &RunOptions::default()).expect("engine runs");
    println!("success: {} after {} rounds", out.success, out.rounds_used);
    if out.success {
        let ok = is_embedding(&out.graph, builder.phi(), &h);
        println!("independent embedding check: {}", if ok { "ok" } else { "FAILED" });
    }
}
