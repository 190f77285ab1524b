//! Simulation engine and strategy library for the semi-random graph
//! process: in each round a uniformly random vertex is offered, and a
//! builder strategy immediately picks the second endpoint of a new edge.
//!
//! The crate provides:
//!
//! - [`graph`]: simple graphs, target generators, and structural helpers;
//! - [`orient`]: balanced edge orientations with a large sink set;
//! - [`process`]: the round loop, deterministic offer streams, transcripts
//!   and replay;
//! - [`adaptive`]: the embedding strategies (initial out-neighbor filling,
//!   role switching, greedy forest embedding, the offline solver);
//! - [`nonadaptive`]: predetermined per-vertex adjacency lists and the
//!   block constructions for Hamilton cycles and clique factors;
//! - [`verify`]: independent structure checkers and certificates;
//! - [`experiments`]: the Monte Carlo harness, sweeps and exporters;
//! - [`monitor`]: a wrapper that audits the embedding invariants of a run
//!   from the outside, round by round.
//!
//! Every run is reproducible from a single `u64` seed; see `examples/` for
//! one runnable program per capability and the `semirand` binary for the
//! command-line front door.

pub mod adaptive;
pub mod experiments;
pub mod graph;
pub mod monitor;
pub mod nonadaptive;
pub mod orient;
pub mod process;
pub mod rng;
pub mod verify;
