//! Offline lower-bound study: star forests force the offline solver to pay
//! on the order of n ln(delta) rounds.
//!
//! ```bash
//! cargo run --release --example star_forest_threshold
//! ```

use semirand::experiments::star_forest_threshold_experiment;

fn main() {
    let deltas = [2, 4, 8, 16];
    let n = 2000;
    let sweep = star_forest_threshold_experiment(&deltas, n, 20, 5).expect("sweep runs");
    println!("{:>6} {:>18} {:>18}", "delta", "median m/(n ln d)", "above 0.1 n ln d");
    for p in &sweep.points {
        println!(
            "{:>6} {:>18.3} {:>17.0}%",
            p.axis_value,
            p.extras["median_ratio_to_n_ln_delta"],
            100.0 * p.extras["frac_above_threshold"],
        );
    }
}
