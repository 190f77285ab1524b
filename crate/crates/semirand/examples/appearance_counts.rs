//! Appearance statistic: after a sized budget of rounds, how many vertices
//! were offered at most d times? The budget is chosen so that fewer than
//! alpha * n under-offered vertices remain in almost every trial.
//!
//! ```bash
//! cargo run --release --example appearance_counts
//! ```

use semirand::experiments::appearance_count_experiment;

fn main() {
    let (d, alpha, n) = (20, 0.05, 10_000);
    let sweep = appearance_count_experiment(d, alpha, n, 50, 7).expect("sweep runs");
    let p = &sweep.points[0];
    println!(
        "budget {} rounds ({:.2} per vertex)",
        p.extras["budget_rounds"], p.extras["budget_per_n"]
    );
    println!(
        "mean under-offered vertices: {:.2} (allowed: {})",
        p.extras["mean_under_offered"], p.extras["allowed_under_offered"]
    );
    println!("trials within the allowance: {}/{}", p.successes, p.trials);
}
