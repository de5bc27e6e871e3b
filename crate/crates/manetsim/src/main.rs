//! `manetsim`: seeded multipath-routing experiments from the command line.
//!
//! Subcommands: `simulate` runs a scenario config and writes result and
//! summary CSVs, `tune` optimizes the solver constants over a generated
//! suite, `solve` reports solver-versus-oracle selections for one instance
//! file, and `discover` dumps one snapshot's route cache.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime error.

// Validation predicates use `!(x >= 0.0)` so NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use manet_multipath::experiment::pick_endpoints;
use manet_multipath::fmt::sig9;
use manet_multipath::{
    build_link_snapshot_with_horizon, discover_paths, generate_suite, init_waypoint_state,
    rows_to_csv, run_scenario, seeds, solve_instance_file, summarize, summary_to_csv, tune,
    tuning_bounds, DisjointnessMode, HnnParams, MobilityConfig, NodeId, PsoConfig, ScenarioConfig,
    SuiteGenConfig,
};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "manetsim",
    version,
    about = "Reliability-driven disjoint multipath routing experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    NodeDisjoint,
    LinkDisjoint,
}

impl From<ModeArg> for DisjointnessMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::NodeDisjoint => DisjointnessMode::NodeDisjoint,
            ModeArg::LinkDisjoint => DisjointnessMode::LinkDisjoint,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario configuration and write result CSVs.
    Simulate {
        /// Scenario file (.toml or .json) mirroring ScenarioConfig.
        #[arg(long)]
        config: PathBuf,
        /// Output CSV of per-replication rows.
        #[arg(long)]
        out: PathBuf,
        /// Summary CSV; defaults to `<out>` with a `.summary.csv` suffix.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Tune the solver constants by particle swarm over a generated suite.
    Tune {
        /// Tuning file (.toml or .json) with a `suite` table and an
        /// optional `pso` table.
        #[arg(long)]
        config: PathBuf,
        /// Output JSON report (tuned parameters, fitness, seeds).
        #[arg(long)]
        out: PathBuf,
        /// Iteration trace CSV; defaults to `<out>` with a `.trace.csv`
        /// suffix.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Solve one path-set instance file and print the report.
    Solve {
        /// Instance JSON file.
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::LinkDisjoint)]
        mode: ModeArg,
        /// Solver parameter JSON file; defaults to the tuned constants.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Discover one snapshot's route cache and dump it as an instance file.
    Discover {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Transmission range in meters.
        #[arg(long)]
        range: f64,
        #[arg(long, default_value_t = 30)]
        nodes: usize,
        #[arg(long, default_value_t = 1000.0)]
        area_width: f64,
        #[arg(long, default_value_t = 500.0)]
        area_height: f64,
        #[arg(long, default_value_t = 0.0)]
        speed_min: f64,
        #[arg(long, default_value_t = 20.0)]
        speed_max: f64,
        #[arg(long, default_value_t = 5.0)]
        pause: f64,
        /// Seconds of waypoint motion before the snapshot.
        #[arg(long, default_value_t = 100.0)]
        warmup: f64,
        /// LET prediction horizon for link probabilities.
        #[arg(long, default_value_t = manet_multipath::DEFAULT_LET_HORIZON)]
        let_horizon: f64,
        #[arg(long, default_value_t = 3)]
        ttl: usize,
        #[arg(long, default_value_t = 64)]
        cap: usize,
        /// Source node id; picked from the seed stream when omitted.
        #[arg(long)]
        source: Option<u32>,
        /// Destination node id; picked from the seed stream when omitted.
        #[arg(long)]
        dest: Option<u32>,
        /// Output instance JSON; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    fn config(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }
    fn runtime(e: impl std::fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("runtime error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            summary,
        } => simulate(&config, &out, summary.as_deref()),
        Command::Tune { config, out, trace } => run_tune(&config, &out, trace.as_deref()),
        Command::Solve {
            instance,
            mode,
            params,
            seed,
        } => run_solve(&instance, mode.into(), params.as_deref(), seed),
        Command::Discover {
            seed,
            range,
            nodes,
            area_width,
            area_height,
            speed_min,
            speed_max,
            pause,
            warmup,
            let_horizon,
            ttl,
            cap,
            source,
            dest,
            out,
        } => run_discover(DiscoverArgs {
            seed,
            range,
            nodes,
            area_width,
            area_height,
            speed_min,
            speed_max,
            pause,
            warmup,
            let_horizon,
            ttl,
            cap,
            source,
            dest,
            out,
        }),
    }
}

/// Parses a config file as TOML or JSON depending on its extension.
fn load_config<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let is_json = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("json"))
        .unwrap_or(false);
    if is_json {
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    } else {
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn derived_path(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    name.push_str(suffix);
    out.with_file_name(name)
}

fn simulate(config: &Path, out: &Path, summary: Option<&Path>) -> Result<(), CliError> {
    let scenario: ScenarioConfig = load_config(config)?;
    scenario.validate().map_err(CliError::config)?;
    let rows = run_scenario(&scenario).map_err(CliError::runtime)?;
    write_file(out, &rows_to_csv(&scenario, &rows))?;
    let summary_path = summary
        .map(Path::to_path_buf)
        .unwrap_or_else(|| derived_path(out, ".summary.csv"));
    let agg = summarize(&scenario, &rows);
    write_file(&summary_path, &summary_to_csv(&scenario, &agg))?;
    println!(
        "wrote {} rows to {} and {} summary rows to {}",
        rows.len(),
        out.display(),
        agg.len(),
        summary_path.display()
    );
    Ok(())
}

/// On-disk tuning configuration: the suite recipe plus optional swarm
/// overrides.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TuneFile {
    suite: SuiteGenConfig,
    #[serde(default)]
    pso: PsoOverrides,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PsoOverrides {
    max_iterations: Option<usize>,
    population: Option<usize>,
    v_max: Option<Vec<f64>>,
    inertia_start: Option<f64>,
    inertia_end: Option<f64>,
    accel_cognitive: Option<f64>,
    accel_social: Option<f64>,
    min_error_gradient: Option<f64>,
    stall_window: Option<usize>,
    bounds: Option<Vec<(f64, f64)>>,
    seed: Option<u64>,
}

impl PsoOverrides {
    fn apply(self, mut config: PsoConfig) -> PsoConfig {
        if let Some(v) = self.max_iterations {
            config.max_iterations = v;
        }
        if let Some(v) = self.population {
            config.population = v;
        }
        if let Some(v) = self.v_max {
            config.v_max = v;
        }
        if let Some(v) = self.inertia_start {
            config.inertia_start = v;
        }
        if let Some(v) = self.inertia_end {
            config.inertia_end = v;
        }
        if let Some(v) = self.accel_cognitive {
            config.accel_cognitive = v;
        }
        if let Some(v) = self.accel_social {
            config.accel_social = v;
        }
        if let Some(v) = self.min_error_gradient {
            config.min_error_gradient = v;
        }
        if let Some(v) = self.stall_window {
            config.stall_window = v;
        }
        if let Some(v) = self.bounds {
            config.bounds = v;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        config
    }
}

fn run_tune(config: &Path, out: &Path, trace: Option<&Path>) -> Result<(), CliError> {
    let file: TuneFile = load_config(config)?;
    let pso_seed = seeds::mix(file.suite.base_seed, 0x9_50);
    let pso = file.pso.apply(PsoConfig::new(tuning_bounds(), pso_seed));
    pso.validate().map_err(CliError::config)?;
    if pso.bounds.len() != 5 {
        return Err(CliError::Config(format!(
            "tuning bounds must have 5 dimensions, got {}",
            pso.bounds.len()
        )));
    }
    let suite = generate_suite(&file.suite).map_err(CliError::config)?;
    let outcome = tune(&suite, &pso).map_err(CliError::runtime)?;

    let report = serde_json::to_string_pretty(&outcome).map_err(CliError::runtime)? + "\n";
    write_file(out, &report)?;

    let trace_path = trace
        .map(Path::to_path_buf)
        .unwrap_or_else(|| derived_path(out, ".trace.csv"));
    let mut trace_csv = String::from("iteration,global_best_fitness\n");
    for (i, v) in outcome.trace.iter().enumerate() {
        trace_csv.push_str(&format!("{},{}\n", i, sig9(*v)));
    }
    write_file(&trace_path, &trace_csv)?;
    println!(
        "tuned fitness {} (reference {}) after {} swarm iterations; report {} trace {}",
        sig9(outcome.fitness),
        sig9(outcome.reference_fitness),
        outcome.pso_iterations,
        out.display(),
        trace_path.display()
    );
    Ok(())
}

fn run_solve(
    instance: &Path,
    mode: DisjointnessMode,
    params: Option<&Path>,
    seed: u64,
) -> Result<(), CliError> {
    let params: HnnParams = match params {
        Some(p) => {
            let loaded: HnnParams = load_config(p)?;
            loaded.validate().map_err(CliError::config)?;
            loaded
        }
        None => HnnParams::tuned(),
    };
    if !instance.exists() {
        return Err(CliError::Config(format!(
            "instance file {} does not exist",
            instance.display()
        )));
    }
    let report = solve_instance_file(instance, &params, mode, seed).map_err(|e| {
        // Malformed input data is a configuration problem; solver and
        // enumeration failures are runtime problems.
        match e {
            manet_multipath::Error::Json(_) | manet_multipath::Error::Model(_) => {
                CliError::config(e)
            }
            other => CliError::runtime(other),
        }
    })?;
    print!("{}", report.render());
    Ok(())
}

struct DiscoverArgs {
    seed: u64,
    range: f64,
    nodes: usize,
    area_width: f64,
    area_height: f64,
    speed_min: f64,
    speed_max: f64,
    pause: f64,
    warmup: f64,
    let_horizon: f64,
    ttl: usize,
    cap: usize,
    source: Option<u32>,
    dest: Option<u32>,
    out: Option<PathBuf>,
}

fn run_discover(args: DiscoverArgs) -> Result<(), CliError> {
    let mobility = MobilityConfig {
        area_width: args.area_width,
        area_height: args.area_height,
        node_count: args.nodes,
        speed_min: args.speed_min,
        speed_max: args.speed_max,
        pause_time: args.pause,
        seed: seeds::mix(args.seed, 0),
    };
    mobility.validate().map_err(CliError::config)?;
    if args.nodes < 2 {
        return Err(CliError::Config(
            "discovery needs at least two nodes".into(),
        ));
    }
    if !(args.warmup >= 0.0) {
        return Err(CliError::Config("warmup must be non-negative".into()));
    }
    let mut state = init_waypoint_state(&mobility).map_err(CliError::config)?;
    state.advance(args.warmup);
    let snapshot = build_link_snapshot_with_horizon(
        &state.snapshot_kinematics(),
        args.range,
        args.let_horizon,
    )
    .map_err(CliError::config)?
    .at_time(state.time());

    let (source, dest) = match (args.source, args.dest) {
        (Some(s), Some(d)) => (NodeId(s), NodeId(d)),
        (None, None) => pick_endpoints(seeds::mix(args.seed, 1), args.nodes),
        _ => {
            return Err(CliError::Config(
                "give both --source and --dest, or neither".into(),
            ))
        }
    };
    if source.0 as usize >= args.nodes || dest.0 as usize >= args.nodes {
        return Err(CliError::Config(format!(
            "source {source} / destination {dest} out of range for {} nodes",
            args.nodes
        )));
    }
    let cache =
        discover_paths(&snapshot, source, dest, args.ttl, args.cap).map_err(CliError::config)?;
    let json = cache.to_instance_file().to_json() + "\n";
    match &args.out {
        Some(path) => {
            write_file(path, &json)?;
            println!(
                "{} paths from {source} to {dest} at range {} m (truncated: {}); wrote {}",
                cache.paths.len(),
                sig9(args.range),
                cache.truncated,
                path.display()
            );
        }
        None => print!("{json}"),
    }
    Ok(())
}
