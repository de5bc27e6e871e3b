//! Scenario configuration, seeded experiment execution, and result
//! rendering.
//!
//! A scenario sweeps either the transmission range (fixed node count) or
//! the node count (fixed range). Every replication derives its own seed
//! from the base seed and the sweep point, so any row of the output can be
//! reproduced in isolation.

use crate::baselines::{brute_force_optimum, greedy_backup_select, shortest_path, SelectorKind};
use crate::discovery::discover_paths;
use crate::error::Error;
use crate::fmt::sig9;
use crate::hnn::{build_network, energy, solve, solve_network, HnnError, HnnParams, HnnSolution};
use crate::link::build_link_snapshot_with_horizon;
use crate::metrics::{lifetime, pathset_reliability, PathSetResult};
use crate::mobility::{init_waypoint_state, MobilityConfig};
use crate::model::{DisjointnessMode, InstanceFile, NodeId, Path, PathSetInstance};
use crate::seeds;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

fn default_ttl() -> usize {
    3
}
fn default_path_cap() -> usize {
    16
}
fn default_replications() -> usize {
    20
}
fn default_warmup() -> f64 {
    100.0
}
fn default_lifetime_dt() -> f64 {
    0.1
}
fn default_lifetime_horizon() -> f64 {
    600.0
}
fn default_let_horizon() -> f64 {
    crate::link::DEFAULT_LET_HORIZON
}
fn default_selectors() -> Vec<SelectorKind> {
    vec![
        SelectorKind::Hnn,
        SelectorKind::Oracle,
        SelectorKind::Greedy,
        SelectorKind::ShortestPath,
    ]
}
fn default_mode() -> DisjointnessMode {
    DisjointnessMode::LinkDisjoint
}
fn default_scenario_id() -> String {
    "scenario".to_string()
}

/// One experiment: a sweep axis, replication count, and solver settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(default = "default_scenario_id")]
    pub scenario_id: String,
    #[serde(default)]
    pub mobility: MobilityConfig,
    /// Transmission-range sweep in meters; a single entry fixes the range.
    pub transmission_ranges: Vec<f64>,
    /// Node-count sweep; a single entry fixes the population.
    pub node_counts: Vec<usize>,
    #[serde(default = "default_ttl")]
    pub ttl: usize,
    #[serde(default = "default_path_cap")]
    pub path_cap: usize,
    #[serde(default = "default_mode")]
    pub mode: DisjointnessMode,
    #[serde(default = "default_selectors")]
    pub selectors: Vec<SelectorKind>,
    #[serde(default = "HnnParams::tuned")]
    pub hnn_params: HnnParams,
    #[serde(default = "default_replications")]
    pub replications: usize,
    pub base_seed: u64,
    #[serde(default = "default_warmup")]
    pub warmup_s: f64,
    #[serde(default = "default_lifetime_dt")]
    pub lifetime_dt_sim_s: f64,
    #[serde(default = "default_lifetime_horizon")]
    pub lifetime_horizon_s: f64,
    /// LET prediction horizon used when normalizing link probabilities.
    #[serde(default = "default_let_horizon")]
    pub let_horizon_s: f64,
}

impl ScenarioConfig {
    /// Range sweep at the default 30-node network.
    pub fn range_sweep(base_seed: u64) -> Self {
        ScenarioConfig {
            scenario_id: "scenario1".to_string(),
            mobility: MobilityConfig::default(),
            transmission_ranges: vec![150.0, 200.0, 250.0, 300.0],
            node_counts: vec![30],
            ttl: default_ttl(),
            path_cap: default_path_cap(),
            mode: default_mode(),
            selectors: default_selectors(),
            hnn_params: HnnParams::tuned(),
            replications: default_replications(),
            base_seed,
            warmup_s: default_warmup(),
            lifetime_dt_sim_s: default_lifetime_dt(),
            lifetime_horizon_s: default_lifetime_horizon(),
            let_horizon_s: default_let_horizon(),
        }
    }

    /// Node-count sweep at a fixed 250 m transmission range.
    pub fn node_sweep(base_seed: u64) -> Self {
        ScenarioConfig {
            scenario_id: "scenario2".to_string(),
            transmission_ranges: vec![250.0],
            node_counts: vec![10, 20, 30, 40, 50],
            ..ScenarioConfig::range_sweep(base_seed)
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let config = |m: String| Err(Error::Config(m));
        if self.replications == 0 {
            return config("replications must be at least 1".into());
        }
        if self.transmission_ranges.is_empty() || self.node_counts.is_empty() {
            return config("sweeps must be non-empty".into());
        }
        if self.transmission_ranges.len() > 1 && self.node_counts.len() > 1 {
            return config(
                "exactly one sweep axis may vary: fix either the range or the node count".into(),
            );
        }
        if self.transmission_ranges.iter().any(|r| !(*r > 0.0)) {
            return config("transmission ranges must be positive".into());
        }
        if self.node_counts.iter().any(|n| *n < 2) {
            return config("node counts must be at least 2".into());
        }
        if self.selectors.is_empty() {
            return config("at least one selector is required".into());
        }
        if self.selectors.contains(&SelectorKind::Oracle)
            && self.path_cap > crate::baselines::ORACLE_MAX_PATHS
        {
            return config(format!(
                "path_cap {} exceeds the oracle enumeration guard {}",
                self.path_cap,
                crate::baselines::ORACLE_MAX_PATHS
            ));
        }
        if self.ttl == 0 || self.path_cap == 0 {
            return config("ttl and path_cap must be at least 1".into());
        }
        if !(self.lifetime_dt_sim_s > 0.0) || !(self.lifetime_horizon_s > 0.0) {
            return config("lifetime step and horizon must be positive".into());
        }
        if !(self.let_horizon_s > 0.0) {
            return config("let_horizon_s must be positive".into());
        }
        if !(self.warmup_s >= 0.0) {
            return config("warmup must be non-negative".into());
        }
        self.mobility.validate().map_err(Error::from)?;
        self.hnn_params.validate().map_err(Error::from)?;
        Ok(())
    }

    /// Sweep points as `(range_m, node_count)` pairs.
    pub fn sweep_points(&self) -> Vec<(f64, usize)> {
        if self.transmission_ranges.len() > 1 {
            let nodes = self.node_counts[0];
            self.transmission_ranges
                .iter()
                .map(|&r| (r, nodes))
                .collect()
        } else {
            let r = self.transmission_ranges[0];
            self.node_counts.iter().map(|&n| (r, n)).collect()
        }
    }

    /// Rows a run will emit: sweep points x replications x selectors.
    pub fn expected_rows(&self) -> usize {
        self.sweep_points().len() * self.replications * self.selectors.len()
    }
}

/// One measurement: a selector's outcome at a sweep point and replication.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub scenario_id: String,
    pub replication: usize,
    pub seed: u64,
    pub r_m: f64,
    pub node_count: usize,
    pub mode: DisjointnessMode,
    pub selector: SelectorKind,
    pub set_reliability: f64,
    pub num_paths: usize,
    pub lifetime_s: f64,
    pub iterations: usize,
    pub truncated: bool,
}

pub const RESULT_CSV_HEADER: &str =
    "scenario_id,replication,seed,r_m,node_count,mode,selector,set_reliability,num_paths,lifetime_s,iterations,truncated";

impl ResultRow {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.scenario_id,
            self.replication,
            self.seed,
            sig9(self.r_m),
            self.node_count,
            self.mode,
            self.selector,
            sig9(self.set_reliability),
            self.num_paths,
            sig9(self.lifetime_s),
            self.iterations,
            self.truncated,
        )
    }
}

/// Draws a uniformly random ordered pair of distinct node ids.
pub fn pick_endpoints(seed: u64, node_count: usize) -> (NodeId, NodeId) {
    assert!(node_count >= 2, "need at least two nodes to pick a pair");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let source = rng.gen_range(0..node_count);
    let mut dest = rng.gen_range(0..node_count - 1);
    if dest >= source {
        dest += 1;
    }
    (NodeId(source as u32), NodeId(dest as u32))
}

/// Runs the scenario and returns rows in `(sweep point, replication,
/// selector)` order regardless of execution schedule.
pub fn run_scenario(config: &ScenarioConfig) -> Result<Vec<ResultRow>, Error> {
    config.validate()?;
    let tasks: Vec<(f64, usize, usize)> = config
        .sweep_points()
        .into_iter()
        .flat_map(|(r, n)| (0..config.replications).map(move |rep| (r, n, rep)))
        .collect();
    let nested: Result<Vec<Vec<ResultRow>>, Error> = tasks
        .par_iter()
        .map(|&(r, node_count, rep)| run_replication(config, r, node_count, rep))
        .collect();
    Ok(nested?.into_iter().flatten().collect())
}

fn run_replication(
    config: &ScenarioConfig,
    r: f64,
    node_count: usize,
    replication: usize,
) -> Result<Vec<ResultRow>, Error> {
    let seed = seeds::replication_seed(
        config.base_seed,
        r.to_bits(),
        node_count as u64,
        replication as u64,
    );
    let mobility = MobilityConfig {
        node_count,
        seed: seeds::mix(seed, 0),
        ..config.mobility.clone()
    };
    let mut state = init_waypoint_state(&mobility)?;
    state.advance(config.warmup_s);
    let snapshot =
        build_link_snapshot_with_horizon(&state.snapshot_kinematics(), r, config.let_horizon_s)?
            .at_time(state.time());

    let (source, dest) = pick_endpoints(seeds::mix(seed, 1), node_count);
    let cache = discover_paths(&snapshot, source, dest, config.ttl, config.path_cap)?;

    let row_shell = |selector: SelectorKind| ResultRow {
        scenario_id: config.scenario_id.clone(),
        replication,
        seed,
        r_m: r,
        node_count,
        mode: config.mode,
        selector,
        set_reliability: 0.0,
        num_paths: 0,
        lifetime_s: 0.0,
        iterations: 0,
        truncated: cache.truncated,
    };

    if cache.paths.is_empty() {
        // Disconnected pair: record the zero-path outcome for each selector.
        return Ok(config.selectors.iter().map(|&s| row_shell(s)).collect());
    }

    let instance = PathSetInstance::from_paths(cache.paths.clone(), config.mode)?;
    let hnn_seed = seeds::mix(seed, 2);
    let mut rows = Vec::with_capacity(config.selectors.len());
    for &selector in &config.selectors {
        let (selected, iterations) = match selector {
            SelectorKind::Hnn => match solve(&instance, &config.hnn_params, hnn_seed) {
                Ok(sol) => (sol.selected, sol.iterations),
                Err(HnnError::DegenerateInstance) => {
                    log::warn!("all-zero reliabilities at seed {seed}; empty selection");
                    (Vec::new(), 0)
                }
                Err(e) => return Err(e.into()),
            },
            SelectorKind::Oracle => (brute_force_optimum(&instance)?.selected, 0),
            SelectorKind::Greedy => (greedy_backup_select(&instance)?.selected, 0),
            SelectorKind::ShortestPath => {
                let sp = shortest_path(&cache)?;
                let index = cache
                    .paths
                    .iter()
                    .position(|p| p == sp)
                    .expect("shortest path comes from the cache");
                (vec![index], 0)
            }
        };
        let reliabilities = instance.selected_reliabilities(&selected)?;
        let set_reliability = pathset_reliability(&reliabilities)?;
        let selected_paths: Vec<Path> = selected
            .iter()
            .map(|&i| instance.paths()[i].clone())
            .collect();
        let lifetime_s = lifetime(
            &selected_paths,
            state.clone(),
            r,
            config.lifetime_dt_sim_s,
            config.lifetime_horizon_s,
        );
        let mut row = row_shell(selector);
        row.set_reliability = set_reliability;
        row.num_paths = selected.len();
        row.lifetime_s = lifetime_s;
        row.iterations = iterations;
        rows.push(row);
    }
    Ok(rows)
}

/// Renders result rows as CSV. The first line is a `#` comment echoing the
/// configuration, so outputs are self-describing and reruns byte-compare.
pub fn rows_to_csv(config: &ScenarioConfig, rows: &[ResultRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# {}\n",
        serde_json::to_string(config).expect("config serializes")
    ));
    out.push_str(RESULT_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_row());
        out.push('\n');
    }
    out
}

/// Per sweep point and selector: replication count, means, and sample
/// standard deviations.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub scenario_id: String,
    pub r_m: f64,
    pub node_count: usize,
    pub mode: DisjointnessMode,
    pub selector: SelectorKind,
    pub replications: usize,
    pub mean_set_reliability: f64,
    pub std_set_reliability: f64,
    pub mean_num_paths: f64,
    pub std_num_paths: f64,
    pub mean_lifetime_s: f64,
    pub std_lifetime_s: f64,
    pub mean_iterations: f64,
    pub std_iterations: f64,
}

pub const SUMMARY_CSV_HEADER: &str = "scenario_id,r_m,node_count,mode,selector,replications,mean_set_reliability,std_set_reliability,mean_num_paths,std_num_paths,mean_lifetime_s,std_lifetime_s,mean_iterations,std_iterations";

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    (mean, var.sqrt())
}

/// Aggregates rows per `(sweep point, selector)` in their emission order.
pub fn summarize(config: &ScenarioConfig, rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut out = Vec::new();
    for (r, node_count) in config.sweep_points() {
        for &selector in &config.selectors {
            let group: Vec<&ResultRow> = rows
                .iter()
                .filter(|row| {
                    row.r_m == r && row.node_count == node_count && row.selector == selector
                })
                .collect();
            if group.is_empty() {
                continue;
            }
            let col = |f: &dyn Fn(&ResultRow) -> f64| -> Vec<f64> {
                group.iter().map(|row| f(row)).collect()
            };
            let (mean_rel, std_rel) = mean_std(&col(&|r| r.set_reliability));
            let (mean_paths, std_paths) = mean_std(&col(&|r| r.num_paths as f64));
            let (mean_life, std_life) = mean_std(&col(&|r| r.lifetime_s));
            let (mean_iter, std_iter) = mean_std(&col(&|r| r.iterations as f64));
            out.push(SummaryRow {
                scenario_id: config.scenario_id.clone(),
                r_m: r,
                node_count,
                mode: config.mode,
                selector,
                replications: group.len(),
                mean_set_reliability: mean_rel,
                std_set_reliability: std_rel,
                mean_num_paths: mean_paths,
                std_num_paths: std_paths,
                mean_lifetime_s: mean_life,
                std_lifetime_s: std_life,
                mean_iterations: mean_iter,
                std_iterations: std_iter,
            });
        }
    }
    out
}

pub fn summary_to_csv(config: &ScenarioConfig, summary: &[SummaryRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# {}\n",
        serde_json::to_string(config).expect("config serializes")
    ));
    out.push_str(SUMMARY_CSV_HEADER);
    out.push('\n');
    for s in summary {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            s.scenario_id,
            sig9(s.r_m),
            s.node_count,
            s.mode,
            s.selector,
            s.replications,
            sig9(s.mean_set_reliability),
            sig9(s.std_set_reliability),
            sig9(s.mean_num_paths),
            sig9(s.std_num_paths),
            sig9(s.mean_lifetime_s),
            sig9(s.std_lifetime_s),
            sig9(s.mean_iterations),
            sig9(s.std_iterations),
        ));
    }
    out
}

/// Reads a path-set instance file (JSON) from disk.
pub fn read_instance_file(path: &std::path::Path) -> Result<InstanceFile, Error> {
    let text = std::fs::read_to_string(path)?;
    Ok(InstanceFile::from_json(&text)?)
}

/// Solver-versus-oracle report for one instance file.
#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub n_paths: usize,
    pub mode: DisjointnessMode,
    pub hnn_selected: Vec<usize>,
    pub hnn_reliability: f64,
    pub hnn_disjoint: bool,
    pub hnn_iterations: usize,
    pub hnn_converged: bool,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub oracle_selected: Vec<usize>,
    pub oracle_reliability: f64,
    pub oracle_disjoint: bool,
}

impl SolveReport {
    pub fn render(&self) -> String {
        if self.n_paths == 0 {
            return "no route: the instance has no paths (set reliability 0)\n".to_string();
        }
        let list = |v: &[usize]| {
            if v.is_empty() {
                "(none)".to_string()
            } else {
                v.iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            }
        };
        let mut out = String::new();
        out.push_str(&format!("paths: {} ({} mode)\n", self.n_paths, self.mode));
        out.push_str(&format!(
            "hnn: selected [{}] reliability {} disjoint {} iterations {} converged {}\n",
            list(&self.hnn_selected),
            sig9(self.hnn_reliability),
            self.hnn_disjoint,
            self.hnn_iterations,
            self.hnn_converged,
        ));
        out.push_str(&format!(
            "energy: initial {} final {}\n",
            sig9(self.initial_energy),
            sig9(self.final_energy),
        ));
        out.push_str(&format!(
            "oracle: selected [{}] reliability {} disjoint {}\n",
            list(&self.oracle_selected),
            sig9(self.oracle_reliability),
            self.oracle_disjoint,
        ));
        out
    }
}

/// Loads an instance file, runs the solver and the exhaustive oracle, and
/// reports both selections with reliabilities and disjointness verdicts.
pub fn solve_instance_file(
    path: &std::path::Path,
    params: &HnnParams,
    mode: DisjointnessMode,
    seed: u64,
) -> Result<SolveReport, Error> {
    let file = read_instance_file(path)?;
    let instance = file.into_instance(mode)?;
    solve_instance(&instance, params, seed)
}

/// [`solve_instance_file`] over an already-parsed instance.
pub fn solve_instance(
    instance: &PathSetInstance,
    params: &HnnParams,
    seed: u64,
) -> Result<SolveReport, Error> {
    if instance.is_empty() {
        return Ok(SolveReport {
            n_paths: 0,
            mode: instance.mode(),
            hnn_selected: vec![],
            hnn_reliability: 0.0,
            hnn_disjoint: true,
            hnn_iterations: 0,
            hnn_converged: true,
            initial_energy: 0.0,
            final_energy: 0.0,
            oracle_selected: vec![],
            oracle_reliability: 0.0,
            oracle_disjoint: true,
        });
    }
    let network = build_network(instance, params, seed)?;
    let initial_energy = energy(&network, params);
    let solution: HnnSolution = solve_network(network, params)?;
    let hnn_result = PathSetResult::from_selection(instance, solution.selected.clone())?;
    let oracle = brute_force_optimum(instance)?;
    Ok(SolveReport {
        n_paths: instance.len(),
        mode: instance.mode(),
        hnn_disjoint: instance.conflict().is_disjoint_set(&solution.selected)?,
        hnn_selected: solution.selected,
        hnn_reliability: hnn_result.set_reliability,
        hnn_iterations: solution.iterations,
        hnn_converged: solution.converged,
        initial_energy,
        final_energy: solution.final_energy,
        oracle_disjoint: instance.conflict().is_disjoint_set(&oracle.selected)?,
        oracle_selected: oracle.selected.clone(),
        oracle_reliability: oracle.set_reliability,
    })
}
