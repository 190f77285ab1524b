//! Orient a bounded-degree graph so that out-degrees stay at most
//! `floor(delta/2) + 1` while a large vertex set keeps out-degree zero.
//!
//! ```bash
//! cargo run --example balanced_orientation
//! ```

use semirand::graph::{generate, TargetKind, TargetSpec};
use semirand::orient::balanced_orientation;

fn main() {
    let n = 200;
    let delta = 8;
    let spec = TargetSpec { kind: TargetKind::RandomRegular { delta }, n };
    let h = generate(&spec, 42).expect("target generates");
    let (orientation, sinks) = balanced_orientation(&h);

    let cap = delta / 2 + 1;
    let mut histogram = vec![0usize; cap + 1];
    for v in 0..n as u32 {
        histogram[orientation.out_degree(v)] += 1;
    }

    println!("graph: {}-regular on {} vertices ({} edges)", delta, n, h.edge_count());
    println!("out-degree cap: {cap}");
    for (d, count) in histogram.iter().enumerate() {
        println!("  out-degree {d}: {count} vertices");
    }
    println!(
        "sinks: {} (guarantee: at least n / (delta^2 + 1) = {})",
        sinks.len(),
        n / (delta * delta + 1)
    );
    assert!(orientation.arc_count() == h.edge_count());
    println!("every edge oriented exactly once: ok");
}
