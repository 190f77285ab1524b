//! Build a random regular spanning target with the two-stage strategy and
//! verify the final embedding edge by edge.
//!
//! ```bash
//! cargo run --release --example spanning_run
//! ```

use semirand::adaptive::{spanning_strategy, PhaseSchedule};
use semirand::graph::{generate, TargetKind, TargetSpec};
use semirand::process::{run, RunOptions};
use semirand::verify::is_embedding;

fn main() {
    let n = 1000;
    let delta = 6;
    let spec = TargetSpec { kind: TargetKind::RandomRegular { delta }, n };
    let h = generate(&spec, 7).expect("target generates");
    let schedule = PhaseSchedule::defaults(n, delta, delta);
    println!(
        "schedule: fill {} rounds, first switching phase {} rounds",
        schedule.ell0, schedule.ell1
    );

    let mut builder = spanning_strategy(h.clone(), schedule);
    let budget = 10 * delta as u64 * n as u64;
    let out = run(&mut builder, n, budget, 99, &RunOptions::default()).expect("engine runs");

    println!("success: {} after {} rounds (budget {budget})", out.success, out.rounds_used);
    for (phase, rounds) in &out.per_phase_rounds {
        println!("  {phase}: {rounds} rounds");
    }
    println!("switches performed: {}", builder.events().len());
    if out.success {
        let ok = is_embedding(&out.graph, builder.phi(), &h);
        println!("independent embedding check: {}", if ok { "ok" } else { "FAILED" });
    } else if let Some(reason) = builder.failure() {
        println!("failure: {reason}");
    }
}
