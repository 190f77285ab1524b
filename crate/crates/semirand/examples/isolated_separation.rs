//! Adaptive versus non-adaptive: rounds to eliminate every isolated
//! vertex. The adaptive baseline never needs more than n rounds; the list
//! strategy's rounds-per-n grows with n.
//!
//! ```bash
//! cargo run --release --example isolated_separation
//! ```

use semirand::experiments::isolated_vertex_experiment;

fn main() {
    let n_values = [1 << 10, 1 << 12, 1 << 14];
    let sweep = isolated_vertex_experiment(&n_values, 15, 2024).expect("sweep runs");
    println!("{:>8} {:>14} {:>14} {:>10}", "n", "nonadaptive/n", "adaptive/n", "ratio");
    for p in &sweep.points {
        println!(
            "{:>8} {:>14.3} {:>14.3} {:>10.2}",
            p.axis_value,
            p.extras["nonadaptive_rounds_per_n"],
            p.extras["adaptive_rounds_per_n"],
            p.extras["nonadaptive_over_adaptive"],
        );
    }
}
