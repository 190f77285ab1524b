//! Embed a star forest with the two-phase forest strategy: greedy growth
//! of the forest minus a low-degree reserve, then role switching for the
//! reserve.
//!
//! ```bash
//! cargo run --release --example forest_run
//! ```

use semirand::adaptive::forest_strategy;
use semirand::graph::{generate, TargetKind, TargetSpec};
use semirand::process::{run, RunOptions};
use semirand::verify::is_embedding;

fn main() {
    let n = 900;
    let delta = 8;
    let spec = TargetSpec { kind: TargetKind::StarForest { delta }, n };
    let t = generate(&spec, 0).expect("target generates");
    let alpha = 1.0 / 64.0;

    let mut builder = forest_strategy(t.clone(), alpha).expect("forest strategy builds");
    println!(
        "reserve: {} low-degree vertices; greedy budget {} rounds for {} roles",
        builder.reserve().len(),
        builder.greedy_budget(),
        builder.greedy_roles()
    );

    let out = run(&mut builder, n, 12 * n as u64, 4242, &RunOptions::default()).expect("engine runs");
    println!("success: {} after {} rounds", out.success, out.rounds_used);
    for (phase, rounds) in &out.per_phase_rounds {
        println!("  {phase}: {rounds} rounds");
    }
    if out.success {
        let ok = is_embedding(&out.graph, &builder.phi(), &t);
        println!("independent embedding check: {}", if ok { "ok" } else { "FAILED" });
    } else if let Some(reason) = builder.failure() {
        println!("failure: {reason}");
    }
}
