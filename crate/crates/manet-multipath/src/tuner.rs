//! Swarm tuning of the five solver constants {mu1, mu2, gain, dt, v_th}.
//!
//! Fitness of a candidate is its error rate over a fixed batch of solver
//! runs: a run errs when the rounded selection is not disjoint or its exact
//! set reliability falls below what the reference parameter set achieves on
//! the identical instance and seed.

use crate::error::Error;
use crate::hnn::{solve, HnnParams};
use crate::metrics::pathset_reliability;
use crate::model::PathSetInstance;
use crate::pso::{pso_minimize, PsoConfig};
use crate::seeds;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Lower clamp applied when repairing candidate dimensions.
pub const REPAIR_EPS: f64 = 1.0e-6;

/// Search box for the five tunable dimensions.
pub fn tuning_bounds() -> Vec<(f64, f64)> {
    vec![
        (0.0, 50.0),
        (0.0, 50.0),
        (0.0, 100.0),
        (0.0, 1.0),
        (0.0, 1.0),
    ]
}

/// Projects a raw particle position onto the feasible region: weights are
/// swapped into `mu1 >= mu2` order, and every dimension that must be
/// positive (or a proper threshold) is clamped away from its boundary.
pub fn repair_dims(dims: &[f64; 5]) -> [f64; 5] {
    let (mut mu1, mut mu2) = (dims[0], dims[1]);
    if mu1 < mu2 {
        std::mem::swap(&mut mu1, &mut mu2);
    }
    mu2 = mu2.max(REPAIR_EPS);
    mu1 = mu1.max(mu2);
    let lambda = dims[2].max(REPAIR_EPS);
    let dt = dims[3].max(REPAIR_EPS);
    let v_th = dims[4].clamp(REPAIR_EPS, 1.0 - REPAIR_EPS);
    [mu1, mu2, lambda, dt, v_th]
}

/// Fixed batch of instances, per-run seeds, and precomputed reference
/// outcomes used as the fitness baseline.
#[derive(Clone, Debug)]
pub struct TuningSuite {
    instances: Vec<PathSetInstance>,
    runs_per_eval: usize,
    reference_params: HnnParams,
    /// Run-control template for candidates; the five tuned dimensions get
    /// overwritten per evaluation.
    solver_base: HnnParams,
    seed: u64,
    run_seeds: Vec<u64>,
    /// Reference set reliability per run index.
    reference_reliability: Vec<f64>,
}

impl TuningSuite {
    /// Builds a suite over `instances`, deriving one seed per run and
    /// precomputing the reference outcomes.
    pub fn new(
        instances: Vec<PathSetInstance>,
        runs_per_eval: usize,
        reference_params: HnnParams,
        solver_base: HnnParams,
        seed: u64,
    ) -> Result<Self, Error> {
        if runs_per_eval == 0 {
            return Err(Error::Config("runs_per_eval must be at least 1".into()));
        }
        if instances.is_empty() {
            return Err(Error::Config("the tuning suite needs instances".into()));
        }
        reference_params.validate()?;
        solver_base.validate()?;
        let run_seeds: Vec<u64> = (0..runs_per_eval)
            .map(|i| seeds::mix(seed, i as u64))
            .collect();
        let reference_reliability = run_seeds
            .par_iter()
            .enumerate()
            .map(|(run, &run_seed)| {
                let instance = &instances[run % instances.len()];
                reference_reliability_for(instance, &reference_params, run_seed)
            })
            .collect();
        Ok(TuningSuite {
            instances,
            runs_per_eval,
            reference_params,
            solver_base,
            seed,
            run_seeds,
            reference_reliability,
        })
    }

    pub fn instances(&self) -> &[PathSetInstance] {
        &self.instances
    }

    pub fn runs_per_eval(&self) -> usize {
        self.runs_per_eval
    }

    pub fn reference_params(&self) -> &HnnParams {
        &self.reference_params
    }

    pub fn solver_base(&self) -> &HnnParams {
        &self.solver_base
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn run_seeds(&self) -> &[u64] {
        &self.run_seeds
    }

    /// Candidate parameters assembled from tuned dimensions and the
    /// suite's run-control template.
    pub fn candidate_params(&self, dims: &[f64; 5]) -> HnnParams {
        self.solver_base.with_tuned_dims(dims)
    }
}

fn reference_reliability_for(instance: &PathSetInstance, params: &HnnParams, seed: u64) -> f64 {
    match solve(instance, params, seed) {
        Ok(sol) => set_reliability_of(instance, &sol.selected),
        // A failing reference run sets the bar at zero.
        Err(_) => 0.0,
    }
}

fn set_reliability_of(instance: &PathSetInstance, selected: &[usize]) -> f64 {
    instance
        .selected_reliabilities(selected)
        .ok()
        .and_then(|rels| pathset_reliability(&rels).ok())
        .unwrap_or(0.0)
}

/// Error rate of `candidate` over the suite, in `[0, 1]`.
///
/// Run `i` uses instance `i mod |instances|` with the suite's `i`-th seed;
/// candidate and reference therefore share identical initial perturbations.
pub fn hnn_fitness(candidate: &HnnParams, suite: &TuningSuite) -> f64 {
    let errors: usize = suite
        .run_seeds
        .par_iter()
        .enumerate()
        .map(|(run, &run_seed)| {
            let instance = &suite.instances[run % suite.instances.len()];
            let errored = match solve(instance, candidate, run_seed) {
                Ok(sol) => {
                    let disjoint = instance
                        .conflict()
                        .is_disjoint_set(&sol.selected)
                        .unwrap_or(false);
                    let reliability = set_reliability_of(instance, &sol.selected);
                    !disjoint || reliability < suite.reference_reliability[run]
                }
                Err(_) => true,
            };
            usize::from(errored)
        })
        .sum();
    errors as f64 / suite.runs_per_eval as f64
}

/// The standard fitness batch size.
pub fn default_runs_per_eval() -> usize {
    500
}

fn default_suite_instance_count() -> usize {
    20
}
fn default_suite_ranges() -> Vec<f64> {
    vec![150.0, 200.0, 250.0, 300.0]
}
fn default_warmup() -> f64 {
    100.0
}
fn default_ttl() -> usize {
    3
}
fn default_path_cap() -> usize {
    16
}
fn default_min_paths() -> usize {
    2
}
fn default_let_horizon() -> f64 {
    crate::link::DEFAULT_LET_HORIZON
}

/// Recipe for generating a reproducible tuning suite from seeded mobility
/// snapshots and route discovery.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteGenConfig {
    #[serde(default = "default_suite_instance_count")]
    pub instance_count: usize,
    /// Transmission ranges cycled across instances.
    #[serde(default = "default_suite_ranges")]
    pub transmission_ranges: Vec<f64>,
    #[serde(default)]
    pub mobility: crate::mobility::MobilityConfig,
    #[serde(default = "default_warmup")]
    pub warmup_s: f64,
    #[serde(default = "default_ttl")]
    pub ttl: usize,
    #[serde(default = "default_path_cap")]
    pub path_cap: usize,
    /// Smallest acceptable route cache; sparser draws are retried.
    #[serde(default = "default_min_paths")]
    pub min_paths: usize,
    /// LET prediction horizon for link probabilities.
    #[serde(default = "default_let_horizon")]
    pub let_horizon_s: f64,
    #[serde(default = "default_runs_per_eval")]
    pub runs_per_eval: usize,
    pub base_seed: u64,
    #[serde(default = "HnnParams::reference")]
    pub reference_params: HnnParams,
    #[serde(default = "HnnParams::tuned")]
    pub solver_base: HnnParams,
}

impl SuiteGenConfig {
    pub fn new(base_seed: u64) -> Self {
        SuiteGenConfig {
            instance_count: default_suite_instance_count(),
            transmission_ranges: default_suite_ranges(),
            mobility: crate::mobility::MobilityConfig::default(),
            warmup_s: default_warmup(),
            ttl: default_ttl(),
            path_cap: default_path_cap(),
            min_paths: default_min_paths(),
            let_horizon_s: default_let_horizon(),
            runs_per_eval: default_runs_per_eval(),
            base_seed,
            reference_params: HnnParams::reference(),
            solver_base: HnnParams::tuned(),
        }
    }
}

/// Generates a tuning suite per `config`: each instance is a route cache
/// discovered on a warmed-up waypoint snapshot, alternating between
/// link-disjoint and node-disjoint modes across the ranges.
pub fn generate_suite(config: &SuiteGenConfig) -> Result<TuningSuite, Error> {
    use crate::model::DisjointnessMode;
    if config.instance_count == 0 {
        return Err(Error::Config("instance_count must be at least 1".into()));
    }
    if config.transmission_ranges.is_empty() {
        return Err(Error::Config(
            "transmission_ranges must not be empty".into(),
        ));
    }
    config.mobility.validate()?;
    let mut instances = Vec::with_capacity(config.instance_count);
    for i in 0..config.instance_count {
        let r = config.transmission_ranges[i % config.transmission_ranges.len()];
        let mode = if i % 2 == 0 {
            DisjointnessMode::LinkDisjoint
        } else {
            DisjointnessMode::NodeDisjoint
        };
        instances.push(generate_instance(config, i as u64, r, mode)?);
    }
    TuningSuite::new(
        instances,
        config.runs_per_eval,
        config.reference_params.clone(),
        config.solver_base.clone(),
        seeds::mix(config.base_seed, 0x5017e),
    )
}

fn generate_instance(
    config: &SuiteGenConfig,
    index: u64,
    r: f64,
    mode: crate::model::DisjointnessMode,
) -> Result<PathSetInstance, Error> {
    use crate::discovery::discover_paths;
    use crate::experiment::pick_endpoints;
    use crate::link::build_link_snapshot_with_horizon;
    use crate::mobility::init_waypoint_state;

    for attempt in 0..512u64 {
        let seed = seeds::replication_seed(config.base_seed, r.to_bits(), index, attempt);
        let mobility = crate::mobility::MobilityConfig {
            seed: seeds::mix(seed, 0),
            ..config.mobility.clone()
        };
        let mut state = init_waypoint_state(&mobility)?;
        state.advance(config.warmup_s);
        let snapshot = build_link_snapshot_with_horizon(
            &state.snapshot_kinematics(),
            r,
            config.let_horizon_s,
        )?;
        let (source, dest) = pick_endpoints(seeds::mix(seed, 1), mobility.node_count);
        let cache = discover_paths(&snapshot, source, dest, config.ttl, config.path_cap)?;
        if cache.paths.len() >= config.min_paths
            && cache.paths.iter().any(|p| p.reliability() > 0.0)
        {
            return PathSetInstance::from_paths(cache.paths, mode).map_err(Into::into);
        }
    }
    Err(Error::Config(format!(
        "could not generate a tuning instance with >= {} paths at range {r} m",
        config.min_paths
    )))
}

/// Result of a tuning run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TuningOutcome {
    pub params: HnnParams,
    /// Error rate of `params` on the suite.
    pub fitness: f64,
    /// Error rate of the reference dimensions under the same run-control
    /// template; `fitness <= reference_fitness` by construction.
    pub reference_fitness: f64,
    pub pso_iterations: usize,
    pub evaluations: usize,
    /// Global best fitness after the initial evaluation and each iteration.
    pub trace: Vec<f64>,
    pub suite_seed: u64,
    pub pso_seed: u64,
}

/// Runs the swarm over the tuning box and returns the best parameters.
///
/// The reference dimensions are seeded into the initial swarm, so the tuned
/// result never scores worse than the reference configuration.
pub fn tune(suite: &TuningSuite, config: &PsoConfig) -> Result<TuningOutcome, Error> {
    assert_eq!(
        config.bounds.len(),
        5,
        "tuning runs over the five solver dimensions"
    );
    let mut config = config.clone();
    let reference_dims = suite.reference_params.tuned_dims();
    config.initial_guesses.insert(0, reference_dims.to_vec());

    let objective = |x: &[f64]| {
        let dims = repair_dims(&[x[0], x[1], x[2], x[3], x[4]]);
        hnn_fitness(&suite.candidate_params(&dims), suite)
    };
    let outcome = pso_minimize(objective, &config)?;
    let dims = repair_dims(&[
        outcome.best_position[0],
        outcome.best_position[1],
        outcome.best_position[2],
        outcome.best_position[3],
        outcome.best_position[4],
    ]);
    let params = suite.candidate_params(&dims);
    let reference_fitness = hnn_fitness(
        &suite.candidate_params(&repair_dims(&reference_dims)),
        suite,
    );
    Ok(TuningOutcome {
        params,
        fitness: outcome.best_value,
        reference_fitness,
        pso_iterations: outcome.iterations,
        evaluations: outcome.evaluations,
        trace: outcome.trace,
        suite_seed: suite.seed,
        pso_seed: config.seed,
    })
}
