//! Grow a random forest greedily: every fresh offer embeds the next role,
//! so the embedding completes exactly when the last role's vertex shows up.
//!
//! ```bash
//! cargo run --release --example greedy_forest_run
//! ```

use semirand::adaptive::{greedy_forest_budget, greedy_forest_strategy};
use semirand::graph::{generate, TargetKind, TargetSpec};
use semirand::process::{run, RunOptions};
use semirand::verify::is_embedding;

fn main() {
    let n = 500;
    let spec = TargetSpec { kind: TargetKind::RandomForest { delta: 5 }, n };
    let t = generate(&spec, 3).expect("target generates");

    let mut builder = greedy_forest_strategy(&t).expect("target is a forest");
    let budget = greedy_forest_budget(n);
    let opts = RunOptions { record_transcript: true, ..Default::default() };
    let out = run(&mut builder, n, budget, 17, &opts).expect("engine runs");

    println!("success: {} after {} rounds (budget {budget})", out.success, out.rounds_used);
    let transcript = out.transcript.expect("recorded");
    let mut seen = std::collections::HashSet::new();
    let distinct_at_end = transcript.rounds.iter().map(|r| seen.insert(r.offered)).filter(|&b| b).count();
    println!("distinct vertices offered: {distinct_at_end} of {n}");
    if out.success {
        let ok = is_embedding(&out.graph, &builder.assembled_phi(), &t);
        println!("independent embedding check: {}", if ok { "ok" } else { "FAILED" });
    }
}
