//! Record a run as a JSON-lines transcript, write it out, read it back,
//! and rebuild the identical graph from the records alone.
//!
//! ```bash
//! cargo run --release --example replay_transcript
//! ```

use semirand::adaptive::{spanning_strategy, PhaseSchedule};
use semirand::graph::{generate, TargetKind, TargetSpec};
use semirand::process::{run, RunOptions, Transcript};

fn main() {
    let n = 300;
    let spec = TargetSpec { kind: TargetKind::PerfectMatching, n };
    let h = generate(&spec, 0).expect("target generates");
    let mut builder = spanning_strategy(h, PhaseSchedule::defaults(n, 1, 1));
    let opts = RunOptions { record_transcript: true, ..Default::default() };
    let out = run(&mut builder, n, 10 * n as u64, 63, &opts).expect("engine runs");
    let transcript = out.transcript.expect("recorded");

    let path = std::env::temp_dir().join("semirand_replay_example.jsonl");
    transcript.write_jsonl(&path).expect("transcript writes");
    println!("wrote {} rounds to {}", transcript.rounds.len(), path.display());

    let loaded = Transcript::read_jsonl(&path).expect("transcript reads");
    let replayed = loaded.replay().expect("records are consistent");
    assert_eq!(replayed, out.graph);
    println!(
        "replayed graph matches the original: {} vertices, {} edges",
        replayed.n(),
        replayed.edge_count()
    );
}
