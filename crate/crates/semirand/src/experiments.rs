//! Monte Carlo harness: seeded trials, parameter sweeps, the empirical
//! studies (isolated-vertex separation, star-forest offline threshold,
//! appearance counts), and CSV/JSON/SVG export.
//!
//! Determinism contract: trial `i` is seeded by `derive_seed(base, i)`, so
//! results depend only on `(config, base_seed)`; parallel and serial
//! execution aggregate identically because trials are independent and
//! collected in index order.

use crate::adaptive::{
    fallback_choice, forest_strategy, greedy_forest_budget, greedy_forest_strategy,
    high_delta_strategy, offline_min_rounds, spanning_strategy, PhaseSchedule,
};
use crate::adaptive::schedule::default_alpha;
use crate::graph::{generate, Graph, TargetKind, TargetSpec};
use crate::nonadaptive::{
    hamilton_lists, kr_factor_lists, recommended_budget, BlockPartition, BudgetKind, ListBuilder,
    StopRule,
};
use crate::process::{run, Builder, ProcessView, RunOptions, Transcript};
use crate::rng::derive_seed;
use crate::verify::{
    count_isolated, extract_hamilton, extract_kr_factor, is_embedding, Certificate,
    EmbeddingCertificate,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;
use thiserror::Error;

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Spanning,
    HighDelta,
    Forest,
    GreedyForest,
    Offline,
    Hamilton,
    KrFactor,
    IsolatedAdaptive,
}

impl StrategyKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s.replace('-', "_").as_str() {
            "spanning" => Some(Self::Spanning),
            "high_delta" => Some(Self::HighDelta),
            "forest" => Some(Self::Forest),
            "greedy_forest" => Some(Self::GreedyForest),
            "offline" => Some(Self::Offline),
            "hamilton" => Some(Self::Hamilton),
            "kr_factor" => Some(Self::KrFactor),
            "isolated_adaptive" => Some(Self::IsolatedAdaptive),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell0: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell1: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_phase2_iterations: Option<usize>,
}

/// Strategy selection plus the optional knobs, one flat JSON object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub strategy: StrategyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degeneracy: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budgets: Option<BudgetOverrides>,
}

impl StrategyConfig {
    pub fn new(strategy: StrategyKind) -> Self {
        Self {
            strategy,
            alpha: None,
            epsilon: None,
            degeneracy: None,
            r: None,
            budgets: None,
        }
    }
}

/// Round budget: a fixed cap, a multiple of `n`, or the strategy default.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Budget {
    Auto,
    Absolute(u64),
    TimesN(f64),
}

impl Budget {
    pub fn resolve(&self, n: usize, auto: u64) -> u64 {
        match self {
            Budget::Auto => auto,
            Budget::Absolute(b) => *b,
            Budget::TimesN(x) => (x * n as f64).ceil() as u64,
        }
    }
}

impl std::str::FromStr for Budget {
    type Err = String;

    /// Accepts `auto`, a plain integer, or an `Nx` multiplier such as `10x`.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Budget::Auto);
        }
        if let Some(head) = s.strip_suffix(['x', 'X']) {
            let mult: f64 = head.parse().map_err(|_| format!("bad budget multiplier '{s}'"))?;
            if mult <= 0.0 {
                return Err(format!("budget multiplier must be positive, got '{s}'"));
            }
            return Ok(Budget::TimesN(mult));
        }
        let abs: u64 = s.parse().map_err(|_| format!("bad budget '{s}'"))?;
        Ok(Budget::Absolute(abs))
    }
}

impl std::fmt::Display for Budget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Budget::Auto => write!(f, "auto"),
            Budget::Absolute(b) => write!(f, "{b}"),
            Budget::TimesN(x) => write!(f, "{x}x"),
        }
    }
}

impl Serialize for Budget {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            Budget::Absolute(b) => ser.serialize_u64(*b),
            other => ser.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Budget {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let v = serde_json::Value::deserialize(de)?;
        match v {
            serde_json::Value::Number(num) => num
                .as_u64()
                .map(Budget::Absolute)
                .ok_or_else(|| D::Error::custom("budget must be a non-negative integer")),
            serde_json::Value::String(s) => s.parse().map_err(D::Error::custom),
            _ => Err(D::Error::custom("budget must be a number or string")),
        }
    }
}

/// One repeatable unit of work for the harness.
#[derive(Clone, Debug)]
pub struct TrialConfig {
    pub target: TargetSpec,
    pub strategy: StrategyConfig,
    pub budget: Budget,
    pub record_transcript: bool,
}

// ---------------------------------------------------------------------------
// Trial statistics
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub seed: u64,
    pub success: bool,
    /// Result of the independent re-verification, when one applies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verified: Option<bool>,
    pub rounds_to_success: Option<u64>,
    pub rounds_used: u64,
    pub per_phase_rounds: BTreeMap<String, u64>,
    pub final_isolated: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub wall_time_secs: f64,
}

/// Everything a single run produces beyond the bare statistics.
#[derive(Clone, Debug)]
pub struct SingleRun {
    pub stats: TrialStats,
    pub n: usize,
    pub budget: u64,
    pub edge_count: usize,
    pub certificate: Option<Certificate>,
    pub partition: Option<BlockPartition>,
    pub transcript: Option<Transcript>,
    pub graph: Option<Graph>,
}

fn failed_run(seed: u64, n: usize, msg: String) -> SingleRun {
    SingleRun {
        stats: TrialStats {
            seed,
            success: false,
            verified: None,
            rounds_to_success: None,
            rounds_used: 0,
            per_phase_rounds: BTreeMap::new(),
            final_isolated: n,
            error: Some(msg),
            wall_time_secs: 0.0,
        },
        n,
        budget: 0,
        edge_count: 0,
        certificate: None,
        partition: None,
        transcript: None,
        graph: None,
    }
}

/// Adaptive baseline for the isolated-vertex study: connect each offer to
/// the lowest-index vertex that is still isolated. Never needs more than
/// `n` rounds, because every round covers at least one isolated vertex.
pub struct IsolatedCoverBuilder {
    pending: std::collections::BTreeSet<u32>,
}

impl IsolatedCoverBuilder {
    pub fn new(n: usize) -> Self {
        Self {
            pending: (0..n as u32).collect(),
        }
    }
}

impl Builder for IsolatedCoverBuilder {
    fn on_offer(&mut self, offered: u32, view: &ProcessView<'_>) -> u32 {
        let g = view.graph;
        let mut pick = None;
        let mut stale = Vec::new();
        for &v in self.pending.iter() {
            if g.degree(v) > 0 {
                stale.push(v);
                continue;
            }
            if v != offered {
                pick = Some(v);
                break;
            }
        }
        for v in stale {
            self.pending.remove(&v);
        }
        pick.unwrap_or_else(|| fallback_choice(offered, g))
    }

    fn is_done(&self, view: &ProcessView<'_>) -> bool {
        view.isolated == 0
    }

    fn phase(&self) -> &str {
        "cover"
    }
}

/// Sequence length that comfortably covers the offline demands of a
/// degree-`delta` target on `n` vertices.
pub fn offline_auto_length(n: usize, delta: usize) -> usize {
    let d = delta as f64 / 2.0 + 1.0;
    let nf = n as f64;
    ((d + (6.0 * d * nf.max(2.0).ln()).sqrt() + 2.0) * nf).ceil() as usize
}

/// Runs one seeded trial and returns its full report.
///
/// The target and the offer stream get independent sub-seeds, so the trial
/// is reproducible from its single seed.
pub fn run_single(cfg: &TrialConfig, seed: u64) -> SingleRun {
    let start = Instant::now();
    let target_seed = derive_seed(seed, 1);
    let stream_seed = derive_seed(seed, 2);
    let h = match generate(&cfg.target, target_seed) {
        Ok(h) => h,
        Err(e) => return failed_run(seed, cfg.target.n, e.to_string()),
    };
    let n = h.n();
    let delta = h.max_degree();
    let strat = &cfg.strategy;
    let overrides = strat.budgets.clone().unwrap_or_default();

    let header = serde_json::json!({
        "target": cfg.target,
        "strategy": strat,
        "budget": cfg.budget.to_string(),
    });
    let opts = RunOptions {
        stop_on_done: true,
        record_transcript: cfg.record_transcript,
        strategy_config: header,
    };
    let embedding_certificate = |phi: &crate::graph::Bijection| {
        Certificate::Embedding(EmbeddingCertificate {
            target: cfg.target.clone(),
            target_seed,
            phi: phi.forward().to_vec(),
        })
    };

    let mut single = match strat.strategy {
        StrategyKind::Offline => {
            let length = cfg.budget.resolve(n, offline_auto_length(n, delta) as u64) as usize;
            let seq = crate::process::draw_sequence(n, length, stream_seed);
            let min_rounds = offline_min_rounds(&h, &seq);
            let stats = TrialStats {
                seed,
                success: min_rounds.is_some(),
                verified: None,
                rounds_to_success: min_rounds.map(|m| m as u64),
                rounds_used: length as u64,
                per_phase_rounds: BTreeMap::new(),
                final_isolated: n,
                error: min_rounds
                    .is_none()
                    .then(|| "demands not covered by the drawn sequence".to_owned()),
                wall_time_secs: 0.0,
            };
            SingleRun {
                stats,
                n,
                budget: length as u64,
                edge_count: 0,
                certificate: None,
                partition: None,
                transcript: None,
                graph: None,
            }
        }
        StrategyKind::Spanning => {
            let mut schedule = PhaseSchedule::new(
                n,
                delta,
                strat.degeneracy.unwrap_or(delta.max(1)),
                strat.alpha.unwrap_or_else(|| default_alpha(n, delta)),
            );
            if let Some(e0) = overrides.ell0 {
                schedule.ell0 = e0;
            }
            if let Some(e1) = overrides.ell1 {
                schedule.ell1 = e1;
            }
            if let Some(cap) = overrides.max_phase2_iterations {
                schedule.max_phase2_iterations = cap;
            }
            let auto = schedule.ell0
                + schedule.ell1
                + schedule.max_phase2_iterations as u64 * n as u64;
            let budget = cfg.budget.resolve(n, auto);
            let mut builder = spanning_strategy(h.clone(), schedule);
            match run(&mut builder, n, budget, stream_seed, &opts) {
                Ok(out) => {
                    let verified = out.success.then(|| is_embedding(&out.graph, builder.phi(), &h));
                    let cert =
                        (verified == Some(true)).then(|| embedding_certificate(builder.phi()));
                    finish_engine_run(seed, n, budget, out, verified, cert, None, || {
                        builder.failure().map(str::to_owned)
                    })
                }
                Err(e) => failed_run(seed, n, e.to_string()),
            }
        }
        StrategyKind::HighDelta => {
            let mut builder = high_delta_strategy(&h, strat.epsilon.unwrap_or(0.5));
            let budget = cfg.budget.resolve(n, builder.recommended_budget());
            match run(&mut builder, n, budget, stream_seed, &opts) {
                Ok(out) => {
                    let verified = out.success.then(|| is_embedding(&out.graph, builder.phi(), &h));
                    let cert =
                        (verified == Some(true)).then(|| embedding_certificate(builder.phi()));
                    finish_engine_run(seed, n, budget, out, verified, cert, None, || None)
                }
                Err(e) => failed_run(seed, n, e.to_string()),
            }
        }
        StrategyKind::Forest => {
            let alpha = strat.alpha.unwrap_or_else(|| default_alpha(n, delta));
            let mut builder = match forest_strategy(h.clone(), alpha) {
                Ok(b) => b,
                Err(e) => return failed_run(seed, n, e.to_string()),
            };
            let auto = builder.greedy_budget()
                + builder.schedule().ell1
                + builder.schedule().max_phase2_iterations as u64 * n as u64;
            let budget = cfg.budget.resolve(n, auto);
            match run(&mut builder, n, budget, stream_seed, &opts) {
                Ok(out) => {
                    let phi = builder.phi();
                    let verified = out.success.then(|| is_embedding(&out.graph, &phi, &h));
                    let cert = (verified == Some(true)).then(|| embedding_certificate(&phi));
                    finish_engine_run(seed, n, budget, out, verified, cert, None, || {
                        builder.failure().map(str::to_owned)
                    })
                }
                Err(e) => failed_run(seed, n, e.to_string()),
            }
        }
        StrategyKind::GreedyForest => {
            let mut builder = match greedy_forest_strategy(&h) {
                Ok(b) => b,
                Err(e) => return failed_run(seed, n, e.to_string()),
            };
            let budget = cfg.budget.resolve(n, greedy_forest_budget(n));
            match run(&mut builder, n, budget, stream_seed, &opts) {
                Ok(out) => {
                    let phi = builder.assembled_phi();
                    let verified = out.success.then(|| is_embedding(&out.graph, &phi, &h));
                    let cert = (verified == Some(true)).then(|| embedding_certificate(&phi));
                    finish_engine_run(seed, n, budget, out, verified, cert, None, || None)
                }
                Err(e) => failed_run(seed, n, e.to_string()),
            }
        }
        StrategyKind::Hamilton => {
            let (family, partition) = hamilton_lists(n);
            let budget = cfg.budget.resolve(n, recommended_budget(BudgetKind::Hamilton, n));
            let mut builder = ListBuilder::new(family, StopRule::Never);
            match run(&mut builder, n, budget, stream_seed, &opts) {
                Ok(out) => {
                    let extraction = extract_hamilton(&out.graph, &partition);
                    let (success, verified, cert, err) = match extraction {
                        Ok(c) => {
                            let ok = c.check(&out.graph).is_ok();
                            (ok, Some(ok), Some(Certificate::Hamilton(c)), None)
                        }
                        Err(e) => (false, Some(false), None, Some(e.to_string())),
                    };
                    let mut single = finish_engine_run(
                        seed,
                        n,
                        budget,
                        out,
                        verified,
                        cert,
                        Some(partition),
                        || err,
                    );
                    single.stats.success = success;
                    single.stats.rounds_to_success = success.then_some(single.stats.rounds_used);
                    single
                }
                Err(e) => failed_run(seed, n, e.to_string()),
            }
        }
        StrategyKind::KrFactor => {
            let r = strat.r.or(match cfg.target.kind {
                TargetKind::KrFactor { r } => Some(r),
                _ => None,
            });
            let Some(r) = r else {
                return failed_run(seed, n, "kr_factor strategy needs r".into());
            };
            let (family, partition) = match kr_factor_lists(n, r) {
                Ok(fp) => fp,
                Err(e) => return failed_run(seed, n, e.to_string()),
            };
            let budget = cfg
                .budget
                .resolve(n, recommended_budget(BudgetKind::KrFactor(r), n));
            let mut builder = ListBuilder::new(family, StopRule::Never);
            match run(&mut builder, n, budget, stream_seed, &opts) {
                Ok(out) => {
                    let extraction = extract_kr_factor(&out.graph, &partition, r);
                    let (success, verified, cert, err) = match extraction {
                        Ok(c) => {
                            let ok = c.check(&out.graph).is_ok();
                            (ok, Some(ok), Some(Certificate::KrFactor(c)), None)
                        }
                        Err(e) => (false, Some(false), None, Some(e.to_string())),
                    };
                    let mut single = finish_engine_run(
                        seed,
                        n,
                        budget,
                        out,
                        verified,
                        cert,
                        Some(partition),
                        || err,
                    );
                    single.stats.success = success;
                    single.stats.rounds_to_success = success.then_some(single.stats.rounds_used);
                    single
                }
                Err(e) => failed_run(seed, n, e.to_string()),
            }
        }
        StrategyKind::IsolatedAdaptive => {
            let budget = cfg.budget.resolve(n, n as u64);
            let mut builder = IsolatedCoverBuilder::new(n);
            match run(&mut builder, n, budget, stream_seed, &opts) {
                Ok(out) => {
                    let verified = out.success.then(|| count_isolated(&out.graph) == 0);
                    finish_engine_run(seed, n, budget, out, verified, None, None, || None)
                }
                Err(e) => failed_run(seed, n, e.to_string()),
            }
        }
    };
    single.stats.wall_time_secs = start.elapsed().as_secs_f64();
    single
}

#[allow(clippy::too_many_arguments)]
fn finish_engine_run(
    seed: u64,
    n: usize,
    budget: u64,
    out: crate::process::RunOutcome,
    verified: Option<bool>,
    certificate: Option<Certificate>,
    partition: Option<BlockPartition>,
    failure: impl FnOnce() -> Option<String>,
) -> SingleRun {
    let stats = TrialStats {
        seed,
        success: out.success,
        verified,
        rounds_to_success: out.success.then(|| out.first_done_round.unwrap_or(out.rounds_used)),
        rounds_used: out.rounds_used,
        per_phase_rounds: out.per_phase_rounds,
        final_isolated: count_isolated(&out.graph),
        error: if out.success { None } else { failure() },
        wall_time_secs: 0.0,
    };
    SingleRun {
        stats,
        n,
        budget,
        edge_count: out.graph.edge_count(),
        certificate,
        partition,
        transcript: out.transcript,
        graph: Some(out.graph),
    }
}

/// Runs `trials` seeded trials; trial `i` uses `derive_seed(base_seed, i)`.
/// `SEMIRAND_WORKERS` caps the worker count (1 forces serial execution).
pub fn run_trials(cfg: &TrialConfig, trials: usize, base_seed: u64) -> Vec<TrialStats> {
    let body = || {
        (0..trials)
            .into_par_iter()
            .map(|i| run_single(cfg, derive_seed(base_seed, i as u64)).stats)
            .collect()
    };
    match std::env::var("SEMIRAND_WORKERS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&w| w >= 1)
    {
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("worker pool")
            .install(body),
        None => body(),
    }
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub axis_value: f64,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Wilson 95% interval for the success probability.
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub median_rounds: Option<f64>,
    pub mean_rounds: Option<f64>,
    pub p95_rounds: Option<f64>,
    /// Named study-specific aggregates.
    pub extras: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: String,
    pub points: Vec<SweepPoint>,
}

fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let margin = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (((center - margin) / denom).max(0.0), ((center + margin) / denom).min(1.0))
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Aggregates one sweep point. Round quantiles are over the full per-trial
/// list, with failed trials contributing their consumed rounds.
pub fn aggregate_point(axis_value: f64, stats: &[TrialStats]) -> SweepPoint {
    let trials = stats.len();
    let successes = stats.iter().filter(|s| s.success).count();
    let (lo, hi) = wilson_interval(successes, trials);
    let mut rounds: Vec<f64> = stats
        .iter()
        .map(|s| s.rounds_to_success.unwrap_or(s.rounds_used) as f64)
        .collect();
    rounds.sort_by(f64::total_cmp);
    let (median_rounds, mean_rounds, p95_rounds) = if rounds.is_empty() {
        (None, None, None)
    } else {
        let mean = rounds.iter().sum::<f64>() / rounds.len() as f64;
        let p95_idx = ((rounds.len() as f64 * 0.95).ceil() as usize).clamp(1, rounds.len()) - 1;
        (Some(median(&rounds)), Some(mean), Some(rounds[p95_idx]))
    };
    SweepPoint {
        axis_value,
        trials,
        successes,
        success_rate: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
        ci95_low: lo,
        ci95_high: hi,
        median_rounds,
        mean_rounds,
        p95_rounds,
        extras: BTreeMap::new(),
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Rounds to cover every vertex: the block-list strategy against the
/// lowest-isolated adaptive baseline, per vertex count.
///
/// Point aggregates describe the non-adaptive runs; the adaptive baseline
/// and the medians-per-n land in `extras`.
pub fn isolated_vertex_experiment(
    n_values: &[usize],
    trials: usize,
    base_seed: u64,
) -> Result<SweepResult, ExperimentError> {
    if n_values.is_empty() || n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ExperimentError::InvalidParams(
            "n values must be non-empty and ascending".into(),
        ));
    }
    if trials == 0 {
        return Err(ExperimentError::InvalidParams("trials must be >= 1".into()));
    }
    let mut points = Vec::new();
    for (pi, &n) in n_values.iter().enumerate() {
        if n < 2 {
            return Err(ExperimentError::InvalidParams(format!("n = {n} too small")));
        }
        let point_seed = derive_seed(base_seed, pi as u64);
        let budget = recommended_budget(BudgetKind::Isolated, n);
        let list_runs: Vec<TrialStats> = with_worker_pool(|| {
            (0..trials)
                .into_par_iter()
                .map(|t| {
                    let seed = derive_seed(point_seed, 2 * t as u64);
                    let mut builder =
                        ListBuilder::new(isolated_list_family(n), StopRule::NoIsolated);
                    engine_trial(&mut builder, n, budget, seed)
                })
                .collect()
        });
        let cover_runs: Vec<TrialStats> = with_worker_pool(|| {
            (0..trials)
                .into_par_iter()
                .map(|t| {
                    let seed = derive_seed(point_seed, 2 * t as u64 + 1);
                    let mut builder = IsolatedCoverBuilder::new(n);
                    engine_trial(&mut builder, n, n as u64, seed)
                })
                .collect()
        });
        let mut point = aggregate_point(n as f64, &list_runs);
        let adaptive = aggregate_point(n as f64, &cover_runs);
        let nf = n as f64;
        let list_median = point.median_rounds.unwrap_or(f64::MAX);
        let cover_median = adaptive.median_rounds.unwrap_or(f64::MAX);
        point.extras.insert("adaptive_median_rounds".into(), cover_median);
        point.extras.insert("adaptive_success_rate".into(), adaptive.success_rate);
        point.extras.insert("adaptive_rounds_per_n".into(), cover_median / nf);
        point.extras.insert("nonadaptive_rounds_per_n".into(), list_median / nf);
        point.extras.insert(
            "nonadaptive_over_adaptive".into(),
            if cover_median > 0.0 { list_median / cover_median } else { f64::MAX },
        );
        points.push(point);
    }
    Ok(SweepResult { axis: "n".into(), points })
}

/// List family for the isolated-vertex study: the block construction for
/// n >= 3, and the unique two-vertex family below that.
fn isolated_list_family(n: usize) -> crate::nonadaptive::ListFamily {
    if n >= 3 {
        hamilton_lists(n).0
    } else {
        crate::nonadaptive::ListFamily::explicit(vec![vec![1], vec![0]])
            .expect("two-vertex family")
    }
}

fn engine_trial(builder: &mut dyn Builder, n: usize, budget: u64, seed: u64) -> TrialStats {
    let start = Instant::now();
    match run(builder, n, budget, seed, &RunOptions::default()) {
        Ok(out) => TrialStats {
            seed,
            success: out.success,
            verified: None,
            rounds_to_success: out.success.then(|| out.first_done_round.unwrap_or(out.rounds_used)),
            rounds_used: out.rounds_used,
            per_phase_rounds: out.per_phase_rounds,
            final_isolated: count_isolated(&out.graph),
            error: None,
            wall_time_secs: start.elapsed().as_secs_f64(),
        },
        Err(e) => failed_run(seed, n, e.to_string()).stats,
    }
}

fn with_worker_pool<T: Send>(body: impl FnOnce() -> T + Send) -> T {
    match std::env::var("SEMIRAND_WORKERS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&w| w >= 1)
    {
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("worker pool")
            .install(body),
        None => body(),
    }
}

/// Offline rounds needed for star forests, as a multiple of `n ln(delta)`,
/// per maximum degree.
pub fn star_forest_threshold_experiment(
    delta_values: &[usize],
    n: usize,
    trials: usize,
    base_seed: u64,
) -> Result<SweepResult, ExperimentError> {
    if delta_values.iter().any(|&d| d < 2) {
        return Err(ExperimentError::InvalidParams(
            "delta values start at 2 (ln 1 = 0 degenerates the ratio)".into(),
        ));
    }
    if trials == 0 || delta_values.is_empty() {
        return Err(ExperimentError::InvalidParams("need deltas and trials".into()));
    }
    if let Some(&dmax) = delta_values.iter().max() {
        if n < (dmax + 1) * (dmax + 1) {
            return Err(ExperimentError::InvalidParams(format!(
                "n = {n} too small for delta = {dmax} (need (delta+1)^2)"
            )));
        }
    }
    let mut points = Vec::new();
    for (pi, &delta) in delta_values.iter().enumerate() {
        let spec = TargetSpec { kind: TargetKind::StarForest { delta }, n };
        let target = generate(&spec, 0).expect("star forest generates");
        let point_seed = derive_seed(base_seed, pi as u64);
        let seq_len = (3.0 * n as f64 * ((delta + 1) as f64).ln()).ceil() as usize;
        let threshold = 0.1 * n as f64 * (delta as f64).ln();
        // every star needs its center or nearly all leaves offered
        let structural_floor = n as isize - (n / (delta + 1)) as isize - delta as isize;
        let outcomes: Vec<(Option<usize>, TrialStats)> = with_worker_pool(|| {
            (0..trials)
                .into_par_iter()
                .map(|t| {
                    let seed = derive_seed(point_seed, t as u64);
                    let start = Instant::now();
                    let seq = crate::process::draw_sequence(n, seq_len, seed);
                    let min_rounds = offline_min_rounds(&target, &seq);
                    if let Some(m) = min_rounds {
                        assert!(
                            m as isize >= structural_floor,
                            "offline minimum {m} beats the structural floor {structural_floor}"
                        );
                    }
                    let above = min_rounds.map_or(true, |m| m as f64 > threshold);
                    let stats = TrialStats {
                        seed,
                        success: above,
                        verified: None,
                        rounds_to_success: min_rounds.map(|m| m as u64),
                        rounds_used: seq_len as u64,
                        per_phase_rounds: BTreeMap::new(),
                        final_isolated: 0,
                        error: None,
                        wall_time_secs: start.elapsed().as_secs_f64(),
                    };
                    (min_rounds, stats)
                })
                .collect()
        });
        let stats: Vec<TrialStats> = outcomes.iter().map(|(_, s)| s.clone()).collect();
        let mut point = aggregate_point(delta as f64, &stats);
        let mut ratios: Vec<f64> = outcomes
            .iter()
            .map(|(m, _)| m.map_or(f64::MAX, |m| m as f64 / (n as f64 * (delta as f64).ln())))
            .collect();
        ratios.sort_by(f64::total_cmp);
        point.extras.insert("median_ratio_to_n_ln_delta".into(), median(&ratios));
        point.extras.insert("threshold_rounds".into(), threshold);
        point.extras.insert(
            "frac_above_threshold".into(),
            stats.iter().filter(|s| s.success).count() as f64 / trials as f64,
        );
        points.push(point);
    }
    Ok(SweepResult { axis: "delta".into(), points })
}

/// Counts vertices offered at most `d` times within the sized budget; a
/// trial succeeds when fewer than `alpha * n` vertices are under-offered.
pub fn appearance_count_experiment(
    d: usize,
    alpha: f64,
    n: usize,
    trials: usize,
    base_seed: u64,
) -> Result<SweepResult, ExperimentError> {
    if d < 1 {
        return Err(ExperimentError::InvalidParams("d must be >= 1".into()));
    }
    if !(alpha > 0.0 && alpha < 0.1) {
        return Err(ExperimentError::InvalidParams("alpha must be in (0, 0.1)".into()));
    }
    if n == 0 || trials == 0 {
        return Err(ExperimentError::InvalidParams("need n and trials".into()));
    }
    let df = d as f64;
    let budget = ((df + (6.0 * df * (1.0 / alpha).ln()).sqrt()) * n as f64).ceil() as u64;
    let under_counts: Vec<(usize, TrialStats)> = with_worker_pool(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let seed = derive_seed(base_seed, t as u64);
                let start = Instant::now();
                let seq = crate::process::draw_sequence(n, budget as usize, seed);
                let mut counts = vec![0u64; n];
                for v in seq {
                    counts[v as usize] += 1;
                }
                let under = counts.iter().filter(|&&c| c <= d as u64).count();
                let stats = TrialStats {
                    seed,
                    success: (under as f64) < alpha * n as f64,
                    verified: None,
                    rounds_to_success: None,
                    rounds_used: budget,
                    per_phase_rounds: BTreeMap::new(),
                    final_isolated: under,
                    error: None,
                    wall_time_secs: start.elapsed().as_secs_f64(),
                };
                (under, stats)
            })
            .collect()
    });
    let stats: Vec<TrialStats> = under_counts.iter().map(|(_, s)| s.clone()).collect();
    let mut point = aggregate_point(d as f64, &stats);
    point.extras.insert(
        "mean_under_offered".into(),
        under_counts.iter().map(|(u, _)| *u as f64).sum::<f64>() / trials as f64,
    );
    point.extras.insert("budget_rounds".into(), budget as f64);
    point.extras.insert("budget_per_n".into(), budget as f64 / n as f64);
    point.extras.insert("allowed_under_offered".into(), alpha * n as f64);
    Ok(SweepResult {
        axis: "d".into(),
        points: vec![point],
    })
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub enum EmitFormat {
    Csv,
    Json,
    /// Single line plot of one aggregate against the sweep axis.
    SvgLineplot { metric: String },
}

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("empty sweep: nothing to emit")]
    Empty,
    #[error("unknown metric '{0}'")]
    UnknownMetric(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn metric_value(point: &SweepPoint, metric: &str) -> Option<f64> {
    match metric {
        "success_rate" => Some(point.success_rate),
        "median_rounds" => point.median_rounds,
        "mean_rounds" => point.mean_rounds,
        "p95_rounds" => point.p95_rounds,
        other => point.extras.get(other).copied(),
    }
}

/// Renders a sweep as CSV (fixed column order), pretty JSON, or a
/// self-contained SVG line plot with a 960x540 view box.
pub fn emit(results: &SweepResult, format: &EmitFormat, path: &Path) -> Result<(), EmitError> {
    if results.points.is_empty() {
        return Err(EmitError::Empty);
    }
    let text = match format {
        EmitFormat::Json => serde_json::to_string_pretty(results).expect("sweep serializes") + "\n",
        EmitFormat::Csv => render_csv(results),
        EmitFormat::SvgLineplot { metric } => render_svg(results, metric)?,
    };
    std::fs::write(path, text)?;
    Ok(())
}

fn render_csv(results: &SweepResult) -> String {
    let mut extra_keys: Vec<String> = results
        .points
        .iter()
        .flat_map(|p| p.extras.keys().cloned())
        .collect();
    extra_keys.sort();
    extra_keys.dedup();
    let mut out = String::from("axis,axis_value,trials,successes,success_rate,ci95_low,ci95_high,median_rounds,mean_rounds,p95_rounds");
    for k in &extra_keys {
        out.push(',');
        out.push_str(k);
    }
    out.push('\n');
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for p in &results.points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}",
            results.axis,
            p.axis_value,
            p.trials,
            p.successes,
            p.success_rate,
            p.ci95_low,
            p.ci95_high,
            opt(p.median_rounds),
            opt(p.mean_rounds),
            opt(p.p95_rounds),
        ));
        for k in &extra_keys {
            out.push(',');
            out.push_str(&opt(p.extras.get(k).copied()));
        }
        out.push('\n');
    }
    out
}

fn render_svg(results: &SweepResult, metric: &str) -> Result<String, EmitError> {
    let series: Vec<(f64, f64)> = results
        .points
        .iter()
        .filter_map(|p| metric_value(p, metric).map(|y| (p.axis_value, y)))
        .collect();
    if series.is_empty() {
        return Err(EmitError::UnknownMetric(metric.to_owned()));
    }
    const W: f64 = 960.0;
    const H: f64 = 540.0;
    const ML: f64 = 70.0;
    const MR: f64 = 20.0;
    const MT: f64 = 30.0;
    const MB: f64 = 50.0;
    let (x_min, x_max) = series
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), &(x, _)| (lo.min(x), hi.max(x)));
    let (y_min, y_max) = series
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), &(_, y)| (lo.min(y), hi.max(y)));
    let x_span = (x_max - x_min).max(f64::MIN_POSITIVE);
    let y_span = (y_max - y_min).max(f64::MIN_POSITIVE);
    let sx = |x: f64| ML + (x - x_min) / x_span * (W - ML - MR);
    let sy = |y: f64| H - MB - (y - y_min) / y_span * (H - MT - MB);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <line x1=\"{ML}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{y0}\" stroke=\"black\"/>\n",
        y0 = H - MB,
        x1 = W - MR,
    );
    for &(x, y) in &series {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"steelblue\"/>\n",
            sx(x),
            sy(y)
        ));
    }
    let path: Vec<String> = series
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
        .collect();
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n",
        path.join(" ")
    ));
    svg.push_str(&format!(
        "<text x=\"{ML}\" y=\"{}\" font-size=\"13\">{} = {:.4} .. {:.4}</text>\n",
        H - MB + 30.0,
        results.axis,
        x_min,
        x_max
    ));
    svg.push_str(&format!(
        "<text x=\"8\" y=\"{MT}\" font-size=\"13\">{metric} = {y_min:.4} .. {y_max:.4}</text>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"18\" font-size=\"14\" text-anchor=\"middle\">{} by {}</text>\n",
        W / 2.0,
        metric,
        results.axis
    ));
    svg.push_str("</svg>\n");
    Ok(svg)
}
