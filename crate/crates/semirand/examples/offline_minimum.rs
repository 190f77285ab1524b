//! Offline solver: with the whole offer sequence known in advance, find
//! the least prefix that covers the orientation demands of the target.
//! Cross-checked against the brute-force oracle on a small instance.
//!
//! ```bash
//! cargo run --release --example offline_minimum
//! ```

use semirand::adaptive::offline_min_rounds;
use semirand::graph::{generate, TargetKind, TargetSpec};
use semirand::process::draw_sequence;
use semirand::verify::brute_force_offline;

fn main() {
    // small instance: solver and oracle must agree exactly
    let small = generate(&TargetSpec { kind: TargetKind::Cycle, n: 6 }, 0).unwrap();
    let seq = draw_sequence(6, 60, 5);
    let fast = offline_min_rounds(&small, &seq);
    let exact = brute_force_offline(&small, &seq).expect("n is small enough");
    println!("6-cycle: solver = {fast:?}, oracle = {exact:?}");
    assert_eq!(fast, exact);

    // a larger solve
    let n = 10_000;
    let delta = 8;
    let spec = TargetSpec { kind: TargetKind::RandomRegular { delta }, n };
    let h = generate(&spec, 1).expect("target generates");
    let seq = draw_sequence(n, 12 * n, 2);
    match offline_min_rounds(&h, &seq) {
        Some(m) => println!(
            "{delta}-regular on {n}: offline minimum {m} rounds ({:.3} per vertex, {} edges)",
            m as f64 / n as f64,
            h.edge_count()
        ),
        None => println!("sequence too short to cover the demands"),
    }
}
