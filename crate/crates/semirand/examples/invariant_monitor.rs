//! Audit a spanning run from the outside: a shadow graph plus full
//! re-checks of the embedding invariants after every round.
//!
//! ```bash
//! cargo run --release --example invariant_monitor
//! ```

use semirand::adaptive::{spanning_strategy, PhaseSchedule};
use semirand::graph::{generate, TargetKind, TargetSpec};
use semirand::monitor::SpanningMonitor;
use semirand::process::{run, RunOptions};

fn main() {
    let n = 400;
    let delta = 4;
    let spec = TargetSpec { kind: TargetKind::RandomRegular { delta }, n };
    let h = generate(&spec, 15).expect("target generates");

    // a deliberately short filling stage leaves real work for the
    // switching phases, so the audit sees switches happen
    let mut schedule = PhaseSchedule::defaults(n, delta, delta);
    schedule.ell0 = 9 * n as u64;

    let mut monitor = SpanningMonitor::new(spanning_strategy(h, schedule));
    let out = run(&mut monitor, n, 80 * n as u64, 5150, &RunOptions::default()).expect("engine runs");
    println!("success: {} after {} rounds", out.success, out.rounds_used);

    let report = monitor.into_report();
    println!(
        "audited {} rounds, {} switches, {} switching phases",
        report.rounds, report.switches, report.phases_audited
    );
    match report.ok() {
        true => println!("all invariants held"),
        false => {
            for v in &report.violations {
                println!("violation: {v}");
            }
        }
    }
}
