//! Command-line front door: generate targets, run single trials, sweep
//! experiments, compute offline minima, verify certificates, and replay
//! transcripts. All heavy lifting lives in the library; this binary only
//! wires flags to calls and prints JSON.

use clap::{Args, Parser, Subcommand};
use semirand::experiments::{
    appearance_count_experiment, emit, isolated_vertex_experiment, run_single,
    star_forest_threshold_experiment, Budget, EmitFormat, StrategyConfig, StrategyKind,
    SweepResult, TrialConfig,
};
use semirand::graph::{generate, Graph, TargetSpec};
use semirand::nonadaptive::BlockPartition;
use semirand::process::Transcript;
use semirand::verify::{count_isolated, Certificate};
use serde::Serialize;
use std::hash::{BuildHasher, Hasher};
use std::path::PathBuf;
use std::process::ExitCode;

/// Simulation engine for the semi-random graph process.
#[derive(Parser)]
#[command(name = "semirand", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TargetArgs {
    /// Target kind: cycle, path, perfect_matching, kr_factor, star_forest,
    /// random_regular, random_forest, from_file.
    #[arg(long = "target", value_name = "KIND")]
    target: String,
    /// Vertex count (may be omitted for from_file targets).
    #[arg(long, default_value_t = 0)]
    n: usize,
    /// Maximum degree, for the degree-parameterized kinds.
    #[arg(long)]
    delta: Option<usize>,
    /// Clique size for kr_factor targets.
    #[arg(long)]
    r: Option<usize>,
    /// Edge-list file for from_file targets.
    #[arg(long = "target-file", value_name = "PATH")]
    target_file: Option<PathBuf>,
}

impl TargetArgs {
    fn to_spec(&self) -> Result<TargetSpec, String> {
        TargetSpec::from_parts(
            &self.target,
            self.n,
            self.delta,
            self.r,
            self.target_file.as_ref().and_then(|p| p.to_str()),
        )
        .map_err(|e| e.to_string())
    }
}

#[derive(Args)]
struct SeedArg {
    /// Seed for all randomness; omitted, one is drawn from entropy and
    /// printed to stderr.
    #[arg(long)]
    seed: Option<u64>,
}

impl SeedArg {
    fn resolve(&self) -> u64 {
        self.seed.unwrap_or_else(|| {
            let seed = std::collections::hash_map::RandomState::new()
                .build_hasher()
                .finish();
            eprintln!("seed: {seed}");
            seed
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a target graph and write it as an edge-list file.
    Generate {
        #[command(flatten)]
        target: TargetArgs,
        #[command(flatten)]
        seed: SeedArg,
        /// Output path for the edge list.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Run a single trial and print the result JSON.
    Run {
        #[command(flatten)]
        target: TargetArgs,
        /// Strategy: spanning, high_delta, forest, greedy_forest, offline,
        /// hamilton, kr_factor, isolated_adaptive.
        #[arg(long)]
        strategy: String,
        /// Round budget: integer, `Nx` multiplier of n, or `auto`.
        #[arg(long, default_value = "auto")]
        budget: String,
        /// Bad-fraction knob for spanning/forest.
        #[arg(long)]
        alpha: Option<f64>,
        /// Budget slack for high_delta.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Degeneracy bound used by the switching schedule.
        #[arg(long)]
        degeneracy: Option<usize>,
        #[command(flatten)]
        seed: SeedArg,
        /// Write the result JSON here instead of stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Record the full transcript to this JSON-lines file.
        #[arg(long, value_name = "PATH")]
        transcript: Option<PathBuf>,
        /// Write the final builder graph as an edge-list file.
        #[arg(long, value_name = "PATH")]
        graph_out: Option<PathBuf>,
    },
    /// Run one of the measurement sweeps and export the table.
    Sweep {
        /// Which study: isolated, star_forest, appearance.
        #[arg(long)]
        experiment: String,
        /// Trials per sweep point.
        #[arg(long, default_value_t = 30)]
        trials: usize,
        #[command(flatten)]
        seed: SeedArg,
        /// Comma-separated n values (isolated study).
        #[arg(long, value_name = "LIST", value_delimiter = ',')]
        n_values: Vec<usize>,
        /// Comma-separated maximum degrees (star_forest study).
        #[arg(long, value_name = "LIST", value_delimiter = ',')]
        deltas: Vec<usize>,
        /// Vertex count (star_forest and appearance studies).
        #[arg(long)]
        n: Option<usize>,
        /// Appearance threshold d.
        #[arg(long)]
        d: Option<usize>,
        /// Allowed under-offered fraction (appearance study).
        #[arg(long)]
        alpha: Option<f64>,
        /// Allow points with n >= 65536; they are skipped otherwise.
        #[arg(long)]
        large: bool,
        /// Output file.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        /// Output format: csv, json, svg.
        #[arg(long, default_value = "json")]
        format: String,
        /// Aggregate plotted by the svg format.
        #[arg(long, default_value = "median_rounds")]
        metric: String,
    },
    /// Compute the offline minimum rounds for a target and a drawn
    /// sequence.
    Offline {
        #[command(flatten)]
        target: TargetArgs,
        #[command(flatten)]
        seed: SeedArg,
        /// Sequence length; strategy default when omitted.
        #[arg(long)]
        length: Option<usize>,
    },
    /// Re-check a certificate against an edge-list graph.
    Verify {
        /// Edge-list file of the graph to certify.
        #[arg(long, value_name = "PATH")]
        graph: PathBuf,
        /// Certificate JSON produced by `run`.
        #[arg(long, value_name = "PATH")]
        certificate: PathBuf,
    },
    /// Rebuild a graph from a transcript and re-check it.
    Replay {
        /// Transcript JSON-lines file.
        #[arg(long, value_name = "PATH")]
        transcript: PathBuf,
        /// Optional certificate to re-check against the replayed graph.
        #[arg(long, value_name = "PATH")]
        certificate: Option<PathBuf>,
        /// Optional edge-list file the replayed graph must equal.
        #[arg(long, value_name = "PATH")]
        expect_graph: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct RunReport {
    seed: u64,
    n: usize,
    target: TargetSpec,
    strategy: StrategyConfig,
    budget: u64,
    success: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    verified: Option<bool>,
    rounds_used: u64,
    rounds_to_success: Option<u64>,
    per_phase_rounds: std::collections::BTreeMap<String, u64>,
    edge_count: usize,
    final_isolated: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    partition: Option<BlockPartition>,
    wall_time_secs: f64,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Generate { target, seed, out } => {
            let spec = target.to_spec()?;
            let seed = seed.resolve();
            let g = generate(&spec, seed).map_err(|e| e.to_string())?;
            g.write_edge_list(&out).map_err(|e| e.to_string())?;
            eprintln!("wrote {} vertices, {} edges to {}", g.n(), g.edge_count(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Run {
            target,
            strategy,
            budget,
            alpha,
            epsilon,
            degeneracy,
            seed,
            out,
            transcript,
            graph_out,
        } => {
            let spec = target.to_spec()?;
            let kind = StrategyKind::parse(&strategy)
                .ok_or_else(|| format!("unknown strategy '{strategy}'"))?;
            let budget: Budget = budget.parse()?;
            let mut strategy = StrategyConfig::new(kind);
            strategy.alpha = alpha;
            strategy.epsilon = epsilon;
            strategy.degeneracy = degeneracy;
            strategy.r = target.r;
            let cfg = TrialConfig {
                target: spec.clone(),
                strategy: strategy.clone(),
                budget,
                record_transcript: transcript.is_some(),
            };
            let seed = seed.resolve();
            let single = run_single(&cfg, seed);
            if let (Some(path), Some(t)) = (&transcript, &single.transcript) {
                t.write_jsonl(path).map_err(|e| e.to_string())?;
            }
            if let (Some(path), Some(g)) = (&graph_out, &single.graph) {
                g.write_edge_list(path).map_err(|e| e.to_string())?;
            }
            let report = RunReport {
                seed,
                n: single.n,
                target: spec,
                strategy,
                budget: single.budget,
                success: single.stats.success,
                verified: single.stats.verified,
                rounds_used: single.stats.rounds_used,
                rounds_to_success: single.stats.rounds_to_success,
                per_phase_rounds: single.stats.per_phase_rounds.clone(),
                edge_count: single.edge_count,
                final_isolated: single.stats.final_isolated,
                error: single.stats.error.clone(),
                certificate: single.certificate.clone(),
                partition: single.partition.clone(),
                wall_time_secs: single.stats.wall_time_secs,
            };
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            match out {
                Some(path) => std::fs::write(path, text + "\n").map_err(|e| e.to_string())?,
                None => println!("{text}"),
            }
            Ok(if single.stats.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Sweep {
            experiment,
            trials,
            seed,
            n_values,
            deltas,
            n,
            d,
            alpha,
            large,
            out,
            format,
            metric,
        } => {
            let seed = seed.resolve();
            const LARGE_N: usize = 1 << 16;
            let sweep: SweepResult = match experiment.replace('-', "_").as_str() {
                "isolated" => {
                    let mut values = n_values;
                    if values.is_empty() {
                        return Err("isolated sweep needs --n-values".into());
                    }
                    if !large {
                        let before = values.len();
                        values.retain(|&v| v < LARGE_N);
                        if values.len() < before {
                            eprintln!("skipping n >= {LARGE_N} points (pass --large to keep them)");
                        }
                    }
                    isolated_vertex_experiment(&values, trials, seed).map_err(|e| e.to_string())?
                }
                "star_forest" => {
                    let n = n.ok_or("star_forest sweep needs --n")?;
                    if n >= LARGE_N && !large {
                        return Err(format!("n = {n} needs --large"));
                    }
                    star_forest_threshold_experiment(&deltas, n, trials, seed)
                        .map_err(|e| e.to_string())?
                }
                "appearance" => {
                    let n = n.ok_or("appearance sweep needs --n")?;
                    if n >= LARGE_N && !large {
                        return Err(format!("n = {n} needs --large"));
                    }
                    let d = d.ok_or("appearance sweep needs --d")?;
                    let alpha = alpha.ok_or("appearance sweep needs --alpha")?;
                    appearance_count_experiment(d, alpha, n, trials, seed)
                        .map_err(|e| e.to_string())?
                }
                other => return Err(format!("unknown experiment '{other}'")),
            };
            let format = match format.as_str() {
                "csv" => EmitFormat::Csv,
                "json" => EmitFormat::Json,
                "svg" => EmitFormat::SvgLineplot { metric },
                other => return Err(format!("unknown format '{other}'")),
            };
            emit(&sweep, &format, &out).map_err(|e| e.to_string())?;
            eprintln!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Offline { target, seed, length } => {
            let spec = target.to_spec()?;
            let seed = seed.resolve();
            let mut strategy = StrategyConfig::new(StrategyKind::Offline);
            strategy.r = target.r;
            let cfg = TrialConfig {
                target: spec.clone(),
                strategy,
                budget: match length {
                    Some(len) => Budget::Absolute(len as u64),
                    None => Budget::Auto,
                },
                record_transcript: false,
            };
            let single = run_single(&cfg, seed);
            let report = serde_json::json!({
                "seed": seed,
                "target": spec,
                "sequence_length": single.budget,
                "feasible": single.stats.success,
                "min_rounds": single.stats.rounds_to_success,
            });
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            Ok(if single.stats.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Verify { graph, certificate } => {
            let g = Graph::read_edge_list(&graph).map_err(|e| e.to_string())?;
            let cert: Certificate = serde_json::from_str(
                &std::fs::read_to_string(&certificate).map_err(|e| e.to_string())?,
            )
            .map_err(|e| format!("bad certificate: {e}"))?;
            match cert.check(&g) {
                Ok(()) => {
                    println!("certificate holds");
                    Ok(ExitCode::SUCCESS)
                }
                Err(reason) => {
                    println!("certificate rejected: {reason}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Replay { transcript, certificate, expect_graph } => {
            let t = Transcript::read_jsonl(&transcript).map_err(|e| e.to_string())?;
            let g = t.replay().map_err(|e| e.to_string())?;
            let mut ok = true;
            let mut checks = Vec::new();
            if let Some(path) = expect_graph {
                let expect = Graph::read_edge_list(&path).map_err(|e| e.to_string())?;
                let same = expect == g;
                checks.push(serde_json::json!({"check": "graph_matches", "ok": same}));
                ok &= same;
            }
            if let Some(path) = certificate {
                let cert: Certificate = serde_json::from_str(
                    &std::fs::read_to_string(&path).map_err(|e| e.to_string())?,
                )
                .map_err(|e| format!("bad certificate: {e}"))?;
                let result = cert.check(&g);
                checks.push(serde_json::json!({
                    "check": "certificate",
                    "ok": result.is_ok(),
                    "detail": result.err(),
                }));
                ok &= checks.last().unwrap()["ok"].as_bool().unwrap();
            }
            let report = serde_json::json!({
                "seed": t.seed,
                "n": t.n,
                "rounds": t.rounds.len(),
                "edge_count": g.edge_count(),
                "final_isolated": count_isolated(&g),
                "checks": checks,
            });
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}
