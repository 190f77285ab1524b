//! Adaptive builder strategies.

pub mod embedding;
pub mod forest;
pub mod offline;
pub mod schedule;
pub mod spanning;

pub use embedding::{
    claim_candidate_count, extract_good_set, fallback_choice, initial_step, EmbeddingState,
    SetupReport, SwitchEvent, SwitchSetupError,
};
pub use forest::{
    forest_ordering, forest_strategy, greedy_forest_budget, greedy_forest_strategy, ForestBuilder,
    ForestError, GreedyForestBuilder,
};
pub use offline::offline_min_rounds;
pub use schedule::PhaseSchedule;
pub use spanning::{high_delta_strategy, spanning_strategy, HighDeltaBuilder, SpanningBuilder};
