//! Reliability-driven disjoint multipath selection for mobile ad-hoc
//! networks.
//!
//! The crate is a desk-scale laboratory for one pipeline:
//!
//! 1. [`mobility`] walks nodes through a field with the random-waypoint
//!    model.
//! 2. [`link`] predicts each link's expiration time from the node
//!    kinematics and normalizes it into an operation probability.
//! 3. [`discovery`] floods TTL-bounded route requests over a link snapshot
//!    and caches every simple source-destination path with its reliability.
//! 4. [`hnn`] maps the cached paths onto a continuous Hopfield network
//!    whose relaxed state selects a reliable node- or link-disjoint path
//!    set; [`pso`] and [`tuner`] tune its five constants by particle swarm.
//! 5. [`baselines`], [`metrics`], and [`experiment`] provide exhaustive
//!    and greedy selectors, set-reliability and lifetime measurements, and
//!    seeded end-to-end experiments with CSV output.
//!
//! ```
//! use manet_multipath::{
//!     solve, brute_force_optimum, DisjointnessMode, HnnParams, Path, PathSetInstance,
//! };
//!
//! // Three candidate routes; the two best share an intermediate node.
//! let paths = vec![
//!     Path::from_ids(&[0, 2, 9, 1], 0.60).unwrap(),
//!     Path::from_ids(&[0, 3, 9, 1], 0.54).unwrap(),
//!     Path::from_ids(&[0, 4, 1], 0.48).unwrap(),
//! ];
//! let instance = PathSetInstance::from_paths(paths, DisjointnessMode::NodeDisjoint).unwrap();
//!
//! let solution = solve(&instance, &HnnParams::tuned(), 7).unwrap();
//! let optimum = brute_force_optimum(&instance).unwrap();
//! assert_eq!(solution.selected, optimum.selected);
//! assert_eq!(solution.selected, vec![0, 2]);
//! ```
//!
//! The `book/` directory of the repository walks through each stage; its
//! code snippets compile and run as doc-tests of this crate.

// Validation predicates use `!(x > 0.0)` so NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod discovery;
mod error;
pub mod experiment;
pub mod fmt;
pub mod hnn;
pub mod link;
pub mod metrics;
pub mod mobility;
pub mod model;
pub mod pso;
pub mod seeds;
pub mod tuner;

pub use baselines::{
    brute_force_optimum, greedy_backup_select, shortest_path, BaselineError, SelectorKind,
    ORACLE_MAX_PATHS,
};
pub use discovery::{discover_paths, path_reliability, DiscoveryError, RouteCache, Rreq};
pub use error::Error;
pub use experiment::{
    rows_to_csv, run_scenario, solve_instance, solve_instance_file, summarize, summary_to_csv,
    ResultRow, ScenarioConfig, SolveReport, SummaryRow,
};
pub use hnn::{
    build_network, energy, output_energy, quadratic_energy, solve, solve_network, step, HnnError,
    HnnNetwork, HnnParams, HnnSolution,
};
pub use link::{
    build_link_snapshot, build_link_snapshot_with_horizon, link_expiration_time, link_probability,
    LinkError, LinkEstimate, LinkSnapshot, DEFAULT_LET_HORIZON,
};
pub use metrics::{
    lifetime, pathset_reliability, pathset_reliability_sum_approx, MetricsError, PathSetResult,
};
pub use mobility::{
    init_waypoint_state, kinematics_csv, Kinematics, MobilityConfig, MobilityError, MobilityState,
};
pub use model::{
    build_conflict_matrix, ConflictMatrix, DisjointnessMode, InstanceFile, ModelError, NodeId,
    Path, PathSetInstance,
};
pub use pso::{pso_minimize, velocity_update, Particle, PsoConfig, PsoError, PsoOutcome};
pub use tuner::{
    generate_suite, hnn_fitness, repair_dims, tune, tuning_bounds, SuiteGenConfig, TuningOutcome,
    TuningSuite,
};

// The guide chapters double as doc-tests so the book never drifts from the
// API. Only compiled while rustdoc collects tests.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }
    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(mobility, "../../../book/src/mobility.md");
    chapter!(link_model, "../../../book/src/link-model.md");
    chapter!(route_discovery, "../../../book/src/route-discovery.md");
    chapter!(path_sets, "../../../book/src/path-sets.md");
    chapter!(hopfield_solver, "../../../book/src/hopfield-solver.md");
    chapter!(pso_tuning, "../../../book/src/pso-tuning.md");
    chapter!(experiments, "../../../book/src/experiments.md");
}
