//! The round loop of the semi-random process.
//!
//! Each round the engine draws a uniformly random vertex, asks the builder
//! for the second endpoint, inserts the edge (skipping duplicates), and
//! optionally records the round in a replayable transcript.

use crate::graph::Graph;
use crate::rng::DetRng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

/// Deterministic stream of uniform vertex offers.
#[derive(Clone, Debug)]
pub struct VertexStream {
    rng: DetRng,
    n: u64,
    round: u64,
}

impl VertexStream {
    pub fn new(n: usize, seed: u64) -> Self {
        assert!(n > 0, "vertex stream needs n >= 1");
        Self {
            rng: DetRng::new(seed),
            n: n as u64,
            round: 0,
        }
    }

    /// Draws the next offer; rounds are 1-based after the draw.
    #[inline]
    pub fn next_offer(&mut self) -> u32 {
        self.round += 1;
        self.rng.below(self.n) as u32
    }

    pub fn round(&self) -> u64 {
        self.round
    }
}

/// The exact offer sequence `run` would draw for the same `(n, seed)`.
pub fn draw_sequence(n: usize, length: usize, seed: u64) -> Vec<u32> {
    let mut stream = VertexStream::new(n, seed);
    (0..length).map(|_| stream.next_offer()).collect()
}

/// Read-only view of the process handed to the builder each round.
pub struct ProcessView<'a> {
    pub graph: &'a Graph,
    /// Rounds completed so far (the current round index during `on_offer`).
    pub round: u64,
    /// Number of degree-zero vertices, maintained incrementally.
    pub isolated: usize,
}

/// A builder strategy: decides the second endpoint of each round's edge.
pub trait Builder {
    /// Must return a vertex different from `offered`.
    fn on_offer(&mut self, offered: u32, view: &ProcessView<'_>) -> u32;

    fn is_done(&self, view: &ProcessView<'_>) -> bool;

    /// Tag recorded per round in transcripts and per-phase statistics.
    fn phase(&self) -> &str {
        ""
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub offered: u32,
    pub chosen: u32,
    pub phase: String,
    /// False when the chosen edge already existed and the graph was left
    /// unchanged.
    pub effective: bool,
}

/// Full replayable record of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub seed: u64,
    pub n: usize,
    pub strategy_config: serde_json::Value,
    pub rounds: Vec<RoundRecord>,
}

#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("round {0}: {1}")]
    Inconsistent(usize, String),
    #[error("missing header line")]
    MissingHeader,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
struct TranscriptHeader {
    seed: u64,
    n: usize,
    strategy_config: serde_json::Value,
}

impl Transcript {
    /// JSON-lines form: one header line, then one line per round.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let header = TranscriptHeader {
            seed: self.seed,
            n: self.n,
            strategy_config: self.strategy_config.clone(),
        };
        out.push_str(&serde_json::to_string(&header).expect("header serializes"));
        out.push('\n');
        for rec in &self.rounds {
            out.push_str(&serde_json::to_string(rec).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, TranscriptError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or(TranscriptError::MissingHeader)?;
        let header: TranscriptHeader = serde_json::from_str(first)
            .map_err(|e| TranscriptError::Parse(1, e.to_string()))?;
        let mut rounds = Vec::new();
        for (idx, line) in lines {
            let rec: RoundRecord = serde_json::from_str(line)
                .map_err(|e| TranscriptError::Parse(idx + 1, e.to_string()))?;
            rounds.push(rec);
        }
        Ok(Self {
            seed: header.seed,
            n: header.n,
            strategy_config: header.strategy_config,
            rounds,
        })
    }

    pub fn write_jsonl<P: AsRef<Path>>(&self, path: P) -> Result<(), TranscriptError> {
        std::fs::write(path, self.to_jsonl())?;
        Ok(())
    }

    pub fn read_jsonl<P: AsRef<Path>>(path: P) -> Result<Self, TranscriptError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_jsonl(&text)
    }

    /// Rebuilds the builder graph from the recorded rounds, checking each
    /// record against the process rules (including the effective flag).
    pub fn replay(&self) -> Result<Graph, TranscriptError> {
        let mut g = Graph::empty(self.n);
        for (i, rec) in self.rounds.iter().enumerate() {
            let round = i + 1;
            if rec.offered as usize >= self.n || rec.chosen as usize >= self.n {
                return Err(TranscriptError::Inconsistent(round, "vertex out of range".into()));
            }
            if rec.offered == rec.chosen {
                return Err(TranscriptError::Inconsistent(round, "chosen equals offered".into()));
            }
            let inserted = g.add_edge(rec.offered, rec.chosen);
            if inserted != rec.effective {
                return Err(TranscriptError::Inconsistent(
                    round,
                    format!(
                        "effective flag is {} but edge {} already present",
                        rec.effective,
                        if inserted { "was not" } else { "was" }
                    ),
                ));
            }
        }
        Ok(g)
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("builder chose the offered vertex {vertex} in round {round}")]
    ChoseOffered { round: u64, vertex: u32 },
    #[error("builder chose out-of-range vertex {vertex} in round {round}")]
    ChoseOutOfRange { round: u64, vertex: u32 },
    #[error("the process needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Stop as soon as the builder reports done (default). When false the
    /// run consumes the whole budget and `first_done_round` still records
    /// the earliest success.
    pub stop_on_done: bool,
    pub record_transcript: bool,
    /// Stored in the transcript header.
    pub strategy_config: serde_json::Value,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            stop_on_done: true,
            record_transcript: false,
            strategy_config: serde_json::Value::Null,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub graph: Graph,
    pub rounds_used: u64,
    pub success: bool,
    /// Earliest round at which the builder reported done (0 when done
    /// before any round).
    pub first_done_round: Option<u64>,
    pub per_phase_rounds: BTreeMap<String, u64>,
    pub transcript: Option<Transcript>,
}

/// Runs the process for at most `budget` rounds.
pub fn run(
    builder: &mut dyn Builder,
    n: usize,
    budget: u64,
    seed: u64,
    opts: &RunOptions,
) -> Result<RunOutcome, EngineError> {
    if n < 2 {
        return Err(EngineError::TooFewVertices(n));
    }
    let mut graph = Graph::empty(n);
    let mut isolated = n;
    let mut stream = VertexStream::new(n, seed);
    let mut per_phase: BTreeMap<String, u64> = BTreeMap::new();
    let mut records = Vec::new();
    let mut first_done_round = None;
    let mut rounds_used = 0u64;

    let done0 = builder.is_done(&ProcessView { graph: &graph, round: 0, isolated });
    if done0 {
        first_done_round = Some(0);
    }
    if !(done0 && opts.stop_on_done) {
        for round in 1..=budget {
            let offered = stream.next_offer();
            // the tag of the phase that plays this round, read before any
            // transition the step itself may trigger
            let mut phase_tag: Option<String> = None;
            {
                let phase = builder.phase();
                match per_phase.get_mut(phase) {
                    Some(c) => *c += 1,
                    None => {
                        per_phase.insert(phase.to_owned(), 1);
                    }
                }
                if opts.record_transcript {
                    phase_tag = Some(phase.to_owned());
                }
            }
            let chosen = {
                let view = ProcessView { graph: &graph, round, isolated };
                builder.on_offer(offered, &view)
            };
            if chosen == offered {
                return Err(EngineError::ChoseOffered { round, vertex: chosen });
            }
            if chosen as usize >= n {
                return Err(EngineError::ChoseOutOfRange { round, vertex: chosen });
            }
            let was_isolated =
                (graph.degree(offered) == 0) as usize + (graph.degree(chosen) == 0) as usize;
            let effective = graph.add_edge(offered, chosen);
            if effective {
                isolated -= was_isolated;
            }
            rounds_used = round;

            if let Some(phase) = phase_tag {
                records.push(RoundRecord { offered, chosen, phase, effective });
            }

            let view = ProcessView { graph: &graph, round, isolated };
            if builder.is_done(&view) {
                if first_done_round.is_none() {
                    first_done_round = Some(round);
                }
                if opts.stop_on_done {
                    break;
                }
            }
        }
    }

    let success = {
        let view = ProcessView { graph: &graph, round: rounds_used, isolated };
        builder.is_done(&view)
    };
    let transcript = opts.record_transcript.then(|| Transcript {
        seed,
        n,
        strategy_config: opts.strategy_config.clone(),
        rounds: records,
    });
    Ok(RunOutcome {
        graph,
        rounds_used,
        success,
        first_done_round,
        per_phase_rounds: per_phase,
        transcript,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Connects the offer to the next vertex cyclically.
    struct NextVertexBuilder {
        n: u32,
        target_edges: usize,
    }

    impl Builder for NextVertexBuilder {
        fn on_offer(&mut self, offered: u32, _view: &ProcessView<'_>) -> u32 {
            (offered + 1) % self.n
        }
        fn is_done(&self, view: &ProcessView<'_>) -> bool {
            view.graph.edge_count() >= self.target_edges
        }
    }

    struct NeverDone;
    impl Builder for NeverDone {
        fn on_offer(&mut self, offered: u32, view: &ProcessView<'_>) -> u32 {
            if offered == 0 {
                (view.graph.n() - 1) as u32
            } else {
                offered - 1
            }
        }
        fn is_done(&self, _view: &ProcessView<'_>) -> bool {
            false
        }
    }

    #[test]
    fn zero_budget_leaves_empty_graph() {
        let mut b = NextVertexBuilder { n: 5, target_edges: 0 };
        let out = run(&mut b, 5, 0, 1, &RunOptions::default()).unwrap();
        assert_eq!(out.graph.edge_count(), 0);
        assert_eq!(out.rounds_used, 0);
        assert!(out.success); // target already satisfied
        assert_eq!(out.first_done_round, Some(0));

        let mut b = NextVertexBuilder { n: 5, target_edges: 1 };
        let out = run(&mut b, 5, 0, 1, &RunOptions::default()).unwrap();
        assert!(!out.success);
    }

    #[test]
    fn triangle_after_three_distinct_offers() {
        // find a seed whose stream starts 0, 1, 2, then hand-check the run
        let seed = (0..20_000u64)
            .find(|&s| draw_sequence(3, 3, s) == vec![0, 1, 2])
            .expect("some small seed starts 0,1,2");
        let mut b = NextVertexBuilder { n: 3, target_edges: 3 };
        let out = run(&mut b, 3, 3, seed, &RunOptions::default()).unwrap();
        assert!(out.success);
        assert_eq!(out.graph.edge_count(), 3);
        for (u, v) in [(0, 1), (1, 2), (0, 2)] {
            assert!(out.graph.has_edge(u, v));
        }
    }

    #[test]
    fn draw_sequence_matches_run_offers() {
        let mut b = NeverDone;
        let opts = RunOptions { record_transcript: true, ..Default::default() };
        let out = run(&mut b, 10, 200, 42, &opts).unwrap();
        let offers: Vec<u32> = out.transcript.as_ref().unwrap().rounds.iter().map(|r| r.offered).collect();
        assert_eq!(offers, draw_sequence(10, 200, 42));
    }

    #[test]
    fn replay_reproduces_graph_and_flags() {
        let mut b = NeverDone;
        let opts = RunOptions { record_transcript: true, ..Default::default() };
        let out = run(&mut b, 8, 300, 7, &opts).unwrap();
        let transcript = out.transcript.unwrap();
        let replayed = transcript.replay().unwrap();
        assert_eq!(replayed, out.graph);

        let text = transcript.to_jsonl();
        let parsed = Transcript::from_jsonl(&text).unwrap();
        assert_eq!(parsed, transcript);
        assert_eq!(parsed.replay().unwrap(), out.graph);

        // tampering with an effective flag is caught
        let mut bad = parsed;
        if let Some(rec) = bad.rounds.iter_mut().find(|r| r.effective) {
            rec.effective = false;
        }
        assert!(bad.replay().is_err());
    }

    #[test]
    fn rejects_choosing_the_offered_vertex() {
        struct Echo;
        impl Builder for Echo {
            fn on_offer(&mut self, offered: u32, _v: &ProcessView<'_>) -> u32 {
                offered
            }
            fn is_done(&self, _v: &ProcessView<'_>) -> bool {
                false
            }
        }
        let err = run(&mut Echo, 4, 5, 0, &RunOptions::default()).unwrap_err();
        assert!(matches!(err, EngineError::ChoseOffered { .. }));
    }

    #[test]
    fn rounds_and_edges_bounded_by_budget() {
        for seed in 0..20 {
            let mut b = NeverDone;
            let out = run(&mut b, 6, 50, seed, &RunOptions::default()).unwrap();
            assert!(out.rounds_used <= 50);
            assert!(out.graph.edge_count() <= out.rounds_used as usize);
            assert_eq!(out.per_phase_rounds.values().sum::<u64>(), out.rounds_used);
        }
    }

    #[test]
    fn determinism_per_seed() {
        let run_once = |seed| {
            let mut b = NeverDone;
            let opts = RunOptions { record_transcript: true, ..Default::default() };
            run(&mut b, 12, 400, seed, &opts).unwrap()
        };
        let a = run_once(5);
        let b = run_once(5);
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.transcript, b.transcript);
        let c = run_once(6);
        assert_ne!(a.transcript, c.transcript);
    }

    #[test]
    fn isolated_count_is_tracked() {
        struct StopWhenCovered;
        impl Builder for StopWhenCovered {
            fn on_offer(&mut self, offered: u32, _v: &ProcessView<'_>) -> u32 {
                if offered == 0 {
                    1
                } else {
                    0
                }
            }
            fn is_done(&self, view: &ProcessView<'_>) -> bool {
                view.isolated == 0
            }
        }
        let out = run(&mut StopWhenCovered, 6, 10_000, 3, &RunOptions::default()).unwrap();
        assert!(out.success);
        assert_eq!(
            (0..6u32).filter(|&v| out.graph.degree(v) == 0).count(),
            0
        );
    }

    #[test]
    fn offer_frequencies_concentrate() {
        // n = 1000, one million draws: ~99% of vertices within 1000 +- 200
        let n = 1000;
        let draws = draw_sequence(n, 1_000_000, 2024);
        let mut counts = vec![0u32; n];
        for v in draws {
            counts[v as usize] += 1;
        }
        let within = counts.iter().filter(|&&c| (800..=1200).contains(&c)).count();
        assert!(within >= 990, "only {within} of 1000 vertices in band");
    }

    #[test]
    fn chi_square_uniformity() {
        // T = 100n offers; statistic against the chi-square critical value
        // at significance 1e-3 with n-1 degrees of freedom, via the
        // Wilson-Hilferty cube approximation.
        let n = 1000usize;
        let t = 100 * n;
        let draws = draw_sequence(n, t, 77);
        let mut counts = vec![0u64; n];
        for v in draws {
            counts[v as usize] += 1;
        }
        let expected = t as f64 / n as f64;
        let stat: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        let df = (n - 1) as f64;
        let z = 3.090_232_306_167_813; // upper 1e-3 normal quantile
        let crit = df * (1.0 - 2.0 / (9.0 * df) + z * (2.0 / (9.0 * df)).sqrt()).powi(3);
        assert!(
            stat < crit,
            "chi-square statistic {stat:.1} exceeds critical value {crit:.1}"
        );
    }
}
