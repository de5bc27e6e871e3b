//! Continuous Hopfield network for disjoint path-set selection.
//!
//! One neuron per candidate path. Conflicting pairs inhibit each other
//! through the couplings, each neuron is biased by its path's normalized
//! reliability, and the forward-Euler dynamics descend the energy
//!
//! ```text
//! E = (mu1 / 2) * sum_ij rho_ij V_i V_j  -  mu2 * sum_i C_i V_i
//! ```
//!
//! so the stable states favor large, reliable, conflict-free selections.
//! With `mu1 >= mu2 > 0`, adding a conflicting path to a disjoint set
//! raises the energy, so penalties always dominate rewards.

use crate::model::{ConflictMatrix, PathSetInstance};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HnnError {
    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate instance: no path has positive reliability")]
    DegenerateInstance,
    #[error("empty instance: the network needs at least one neuron")]
    EmptyInstance,
    #[error("numeric divergence with mu1={mu1} mu2={mu2} lambda={lambda} dt={dt} v_th={v_th}")]
    NumericDivergence {
        mu1: f64,
        mu2: f64,
        lambda: f64,
        dt: f64,
        v_th: f64,
    },
}

/// Solver constants: energy weights, sigmoid gain, Euler step, rounding
/// threshold, and run-control settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HnnParams {
    /// Conflict penalty weight.
    pub mu1: f64,
    /// Reliability reward weight.
    pub mu2: f64,
    /// Sigmoid gain.
    pub lambda_gain: f64,
    /// Euler integration step.
    pub dt: f64,
    /// Output rounding threshold; outputs at or above it select the path.
    pub v_th: f64,
    /// Neuron time constant.
    #[serde(default = "default_tau")]
    pub tau: f64,
    /// Half-width of the uniform perturbation applied to initial inputs.
    #[serde(default = "default_u_init_half_width")]
    pub u_init_half_width: f64,
    /// Convergence threshold on the max per-step output change.
    #[serde(default = "default_conv_eps")]
    pub conv_eps: f64,
    /// Iteration cap.
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
}

fn default_tau() -> f64 {
    1.0
}
fn default_u_init_half_width() -> f64 {
    5.0e-4
}
fn default_conv_eps() -> f64 {
    1.0e-6
}
fn default_max_iters() -> usize {
    200_000
}

impl HnnParams {
    /// Hand-set reference values; the baseline the tuner competes against.
    pub fn reference() -> Self {
        HnnParams {
            mu1: 1.0,
            mu2: 1.0,
            lambda_gain: 50.0,
            dt: 1.0e-5,
            v_th: 0.1,
            tau: default_tau(),
            u_init_half_width: default_u_init_half_width(),
            conv_eps: default_conv_eps(),
            max_iters: default_max_iters(),
        }
    }

    /// Swarm-tuned values; the recommended defaults.
    pub fn tuned() -> Self {
        HnnParams {
            mu1: 32.0,
            mu2: 27.0,
            lambda_gain: 0.45,
            dt: 1.0e-3,
            v_th: 0.23,
            tau: default_tau(),
            u_init_half_width: default_u_init_half_width(),
            conv_eps: default_conv_eps(),
            max_iters: default_max_iters(),
        }
    }

    pub fn validate(&self) -> Result<(), HnnError> {
        let fail = |msg: String| Err(HnnError::InvalidParams(msg));
        if !(self.mu2 > 0.0 && self.mu1 >= self.mu2) {
            return fail(format!(
                "need mu1 >= mu2 > 0, got mu1={} mu2={}",
                self.mu1, self.mu2
            ));
        }
        if !(self.lambda_gain > 0.0) {
            return fail(format!("gain must be positive, got {}", self.lambda_gain));
        }
        if !(self.dt > 0.0) {
            return fail(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.v_th > 0.0 && self.v_th < 1.0) {
            return fail(format!("v_th must lie in (0, 1), got {}", self.v_th));
        }
        if !(self.tau > 0.0) {
            return fail(format!("tau must be positive, got {}", self.tau));
        }
        if !(self.u_init_half_width >= 0.0) {
            return fail(format!(
                "u_init_half_width must be >= 0, got {}",
                self.u_init_half_width
            ));
        }
        if !(self.conv_eps > 0.0) {
            return fail(format!("conv_eps must be positive, got {}", self.conv_eps));
        }
        if self.max_iters == 0 {
            return fail("max_iters must be at least 1".to_string());
        }
        Ok(())
    }

    /// The five tunable dimensions, in tuner order.
    pub fn tuned_dims(&self) -> [f64; 5] {
        [self.mu1, self.mu2, self.lambda_gain, self.dt, self.v_th]
    }

    /// Replaces the five tunable dimensions, keeping run-control fields.
    pub fn with_tuned_dims(&self, dims: &[f64; 5]) -> Self {
        HnnParams {
            mu1: dims[0],
            mu2: dims[1],
            lambda_gain: dims[2],
            dt: dims[3],
            v_th: dims[4],
            ..self.clone()
        }
    }
}

/// A built network: couplings, biases, and the evolving neuron state.
#[derive(Clone, Debug)]
pub struct HnnNetwork {
    n: usize,
    /// Row-major couplings `T`, symmetric with zero diagonal.
    weights: Vec<f64>,
    /// Per-neuron bias currents `I`.
    biases: Vec<f64>,
    /// Internal inputs `U`.
    u: Vec<f64>,
    /// Outputs `V = g(U)`, each in (0, 1).
    v: Vec<f64>,
    /// Normalized reliabilities `C` (1 for the most reliable path).
    normalized_reliability: Vec<f64>,
    conflict: ConflictMatrix,
}

impl HnnNetwork {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn outputs(&self) -> &[f64] {
        &self.v
    }

    pub fn inputs(&self) -> &[f64] {
        &self.u
    }

    pub fn normalized_reliability(&self) -> &[f64] {
        &self.normalized_reliability
    }

    pub fn conflict(&self) -> &ConflictMatrix {
        &self.conflict
    }

    /// Outputs rounded at the threshold: indices with `V_i >= v_th`.
    pub fn rounded_selection(&self, v_th: f64) -> Vec<usize> {
        (0..self.n).filter(|&i| self.v[i] >= v_th).collect()
    }
}

fn sigmoid(lambda: f64, u: f64) -> f64 {
    1.0 / (1.0 + (-lambda * u).exp())
}

/// Maps an instance onto a network: couplings `-mu1 * rho`, biases
/// `mu2 * C`, and inputs perturbed uniformly around zero.
pub fn build_network(
    instance: &PathSetInstance,
    params: &HnnParams,
    seed: u64,
) -> Result<HnnNetwork, HnnError> {
    params.validate()?;
    let n = instance.len();
    if n == 0 {
        return Err(HnnError::EmptyInstance);
    }
    let reliabilities = instance.reliabilities();
    let max_rel = reliabilities
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if !(max_rel > 0.0) {
        return Err(HnnError::DegenerateInstance);
    }
    let normalized: Vec<f64> = reliabilities.iter().map(|r| r / max_rel).collect();
    let conflict = instance.conflict().clone();
    let mut weights = vec![0.0; n * n];
    for j in 0..n {
        for k in 0..n {
            weights[j * n + k] = -params.mu1 * f64::from(conflict.get(j, k));
        }
    }
    let biases: Vec<f64> = normalized.iter().map(|c| params.mu2 * c).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hw = params.u_init_half_width;
    let u: Vec<f64> = (0..n)
        .map(|_| {
            if hw > 0.0 {
                rng.gen_range(-hw..hw)
            } else {
                0.0
            }
        })
        .collect();
    let v = u
        .iter()
        .map(|&ui| sigmoid(params.lambda_gain, ui))
        .collect();
    Ok(HnnNetwork {
        n,
        weights,
        biases,
        u,
        v,
        normalized_reliability: normalized,
        conflict,
    })
}

/// One synchronous forward-Euler step; returns the max output change.
///
/// All neurons are updated from the same previous state:
/// `U += dt * (T V - U / tau + I)`, then `V = g(U)`.
pub fn step(network: &mut HnnNetwork, params: &HnnParams) -> Result<f64, HnnError> {
    let n = network.n;
    let mut max_delta = 0.0f64;
    let mut new_u = Vec::with_capacity(n);
    for i in 0..n {
        let mut drive = network.biases[i] - network.u[i] / params.tau;
        let row = &network.weights[i * n..(i + 1) * n];
        for (w, v) in row.iter().zip(network.v.iter()) {
            drive += w * v;
        }
        new_u.push(network.u[i] + params.dt * drive);
    }
    for i in 0..n {
        let v = sigmoid(params.lambda_gain, new_u[i]);
        max_delta = max_delta.max((v - network.v[i]).abs());
        network.u[i] = new_u[i];
        network.v[i] = v;
    }
    if !max_delta.is_finite() || network.u.iter().any(|u| !u.is_finite()) {
        return Err(HnnError::NumericDivergence {
            mu1: params.mu1,
            mu2: params.mu2,
            lambda: params.lambda_gain,
            dt: params.dt,
            v_th: params.v_th,
        });
    }
    Ok(max_delta)
}

/// Energy of the network's current outputs.
pub fn energy(network: &HnnNetwork, params: &HnnParams) -> f64 {
    output_energy(
        &network.conflict,
        &network.normalized_reliability,
        params.mu1,
        params.mu2,
        &network.v,
    )
}

/// Penalty-minus-reward energy of an arbitrary output vector:
/// `(mu1 / 2) * sum_ij rho_ij V_i V_j - mu2 * sum_i C_i V_i`.
pub fn output_energy(conflict: &ConflictMatrix, c: &[f64], mu1: f64, mu2: f64, v: &[f64]) -> f64 {
    let n = conflict.dim();
    assert_eq!(c.len(), n);
    assert_eq!(v.len(), n);
    let mut penalty = 0.0;
    for i in 0..n {
        for j in 0..n {
            if conflict.conflicts(i, j) {
                penalty += v[i] * v[j];
            }
        }
    }
    let reward: f64 = c.iter().zip(v).map(|(ci, vi)| ci * vi).sum();
    0.5 * mu1 * penalty - mu2 * reward
}

/// Generic quadratic Hopfield energy `-1/2 V^T T V - I^T V` over explicit
/// couplings and biases. Kept separate from [`output_energy`] so the two
/// formulations can check each other.
pub fn quadratic_energy(weights: &[f64], biases: &[f64], v: &[f64]) -> f64 {
    let n = biases.len();
    assert_eq!(weights.len(), n * n);
    assert_eq!(v.len(), n);
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += weights[i * n + j] * v[i] * v[j];
        }
    }
    let lin: f64 = biases.iter().zip(v).map(|(b, vi)| b * vi).sum();
    -0.5 * quad - lin
}

/// Outcome of one solver run.
#[derive(Clone, Debug, PartialEq)]
pub struct HnnSolution {
    /// Selected path indices (ascending) after rounding the outputs.
    pub selected: Vec<usize>,
    /// Euler steps executed.
    pub iterations: usize,
    /// Whether the output change fell below `conv_eps` before `max_iters`.
    pub converged: bool,
    /// Energy of the rounded 0/1 output vector.
    pub final_energy: f64,
}

/// Builds the network for `instance` and relaxes it to a selection.
pub fn solve(
    instance: &PathSetInstance,
    params: &HnnParams,
    seed: u64,
) -> Result<HnnSolution, HnnError> {
    let network = build_network(instance, params, seed)?;
    solve_network(network, params)
}

/// Relaxes an already-built network: steps until the outputs settle (max
/// change below `conv_eps`) or the iteration cap, then rounds at `v_th`.
pub fn solve_network(mut network: HnnNetwork, params: &HnnParams) -> Result<HnnSolution, HnnError> {
    params.validate()?;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iters {
        let delta = step(&mut network, params)?;
        iterations += 1;
        if delta < params.conv_eps {
            converged = true;
            break;
        }
    }
    let selected = network.rounded_selection(params.v_th);
    let rounded: Vec<f64> = (0..network.n)
        .map(|i| if selected.contains(&i) { 1.0 } else { 0.0 })
        .collect();
    let final_energy = output_energy(
        &network.conflict,
        &network.normalized_reliability,
        params.mu1,
        params.mu2,
        &rounded,
    );
    Ok(HnnSolution {
        selected,
        iterations,
        converged,
        final_energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DisjointnessMode, Path, PathSetInstance};
    use approx::assert_relative_eq;

    /// Instance with controlled reliabilities and conflicts, built from
    /// synthetic endpoint-sharing paths.
    pub(crate) fn synthetic_instance(
        reliabilities: &[f64],
        conflicts: &[(usize, usize)],
    ) -> PathSetInstance {
        // Paths 0 -> 1 with unique intermediate nodes; a conflict (j, k) is
        // realized by a shared extra intermediate node.
        let n = reliabilities.len();
        let mut next_shared = 1000u32;
        let mut mids: Vec<Vec<u32>> = (0..n).map(|i| vec![2 + i as u32]).collect();
        for &(j, k) in conflicts {
            assert!(j < n && k < n && j != k);
            mids[j].push(next_shared);
            mids[k].push(next_shared);
            next_shared += 1;
        }
        let paths: Vec<Path> = (0..n)
            .map(|i| {
                let mut ids = vec![0u32];
                ids.extend(&mids[i]);
                ids.push(1);
                Path::from_ids(&ids, reliabilities[i]).unwrap()
            })
            .collect();
        PathSetInstance::from_paths(paths, DisjointnessMode::NodeDisjoint).unwrap()
    }

    #[test]
    fn build_maps_conflicts_and_reliabilities() {
        let inst = synthetic_instance(&[0.8, 0.4], &[(0, 1)]);
        let params = HnnParams::tuned();
        let net = build_network(&inst, &params, 1).unwrap();
        assert_eq!(net.normalized_reliability(), &[1.0, 0.5]);
        // Row-major 2x2: off-diagonal couplings carry -mu1, diagonal zero.
        assert_eq!(net.weights()[1], -32.0);
        assert_eq!(net.weights()[2], -32.0);
        assert_eq!(net.weights()[0], 0.0);
        assert_eq!(net.weights()[3], 0.0);
        assert_eq!(net.biases(), &[27.0, 13.5]);
        for (u, v) in net.inputs().iter().zip(net.outputs()) {
            assert!(u.abs() < 5.0e-4);
            assert_relative_eq!(*v, sigmoid(params.lambda_gain, *u));
        }
    }

    #[test]
    fn all_zero_reliability_is_degenerate() {
        let inst = synthetic_instance(&[0.0, 0.0], &[]);
        assert_eq!(
            build_network(&inst, &HnnParams::tuned(), 1).unwrap_err(),
            HnnError::DegenerateInstance
        );
    }

    #[test]
    fn invalid_params_rejected() {
        let mut p = HnnParams::tuned();
        p.mu2 = p.mu1 + 1.0;
        assert!(matches!(p.validate(), Err(HnnError::InvalidParams(_))));
        let mut p = HnnParams::tuned();
        p.v_th = 1.0;
        assert!(p.validate().is_err());
        let mut p = HnnParams::tuned();
        p.dt = 0.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn quiescent_network_is_a_fixed_point() {
        let inst = synthetic_instance(&[1.0], &[]);
        let mut params = HnnParams::tuned();
        params.u_init_half_width = 0.0;
        params.mu2 = f64::MIN_POSITIVE;
        params.mu1 = f64::MIN_POSITIVE;
        let mut net = build_network(&inst, &params, 0).unwrap();
        // Zero couplings, zero-ish bias, zero input: nothing moves.
        net.biases[0] = 0.0;
        net.weights[0] = 0.0;
        let delta = step(&mut net, &params).unwrap();
        assert_eq!(delta, 0.0);
        assert_eq!(net.outputs()[0], 0.5);
        assert_eq!(net.inputs()[0], 0.0);
    }

    #[test]
    fn scalar_network_follows_the_closed_form_rise() {
        // Single unconflicted neuron: dU/dt = -U + mu2, so
        // U(t) = mu2 * (1 - exp(-t)).
        let inst = synthetic_instance(&[0.9], &[]);
        let mut params = HnnParams::tuned();
        params.u_init_half_width = 0.0;
        let mut net = build_network(&inst, &params, 0).unwrap();
        let mut prev = net.inputs()[0];
        let steps = 3000;
        for _ in 0..steps {
            step(&mut net, &params).unwrap();
            assert!(net.inputs()[0] > prev, "U must rise monotonically");
            prev = net.inputs()[0];
        }
        let t = steps as f64 * params.dt;
        let closed_form = params.mu2 * (1.0 - (-t).exp());
        assert_relative_eq!(net.inputs()[0], closed_form, max_relative = 5e-3);
        assert!(net.outputs()[0] > 0.5, "output heads toward g(27)");
    }

    #[test]
    fn one_step_from_rest_moves_by_dt_times_bias() {
        let inst = synthetic_instance(&[1.0, 0.5], &[]);
        let mut params = HnnParams::tuned();
        params.u_init_half_width = 0.0;
        let mut net = build_network(&inst, &params, 0).unwrap();
        step(&mut net, &params).unwrap();
        assert_eq!(net.inputs()[0], params.dt * 27.0);
        assert_eq!(net.inputs()[1], params.dt * 13.5);
    }

    #[test]
    fn energy_worked_examples() {
        let inst = synthetic_instance(&[1.0, 0.9, 0.8], &[(0, 1)]);
        let net = build_network(&inst, &HnnParams::tuned(), 0).unwrap();
        let on_off_on = vec![1.0, 0.0, 1.0];
        let e = output_energy(
            net.conflict(),
            net.normalized_reliability(),
            32.0,
            27.0,
            &on_off_on,
        );
        assert_relative_eq!(e, -48.6, max_relative = 1e-12);
        let on_on_off = vec![1.0, 1.0, 0.0];
        let e2 = output_energy(
            net.conflict(),
            net.normalized_reliability(),
            32.0,
            27.0,
            &on_on_off,
        );
        assert_relative_eq!(e2, 32.0 - 51.3, max_relative = 1e-12);
        assert!(e2 > e, "conflicting selection must cost more");
        let zeros = vec![0.0; 3];
        assert_eq!(
            output_energy(
                net.conflict(),
                net.normalized_reliability(),
                32.0,
                27.0,
                &zeros
            ),
            0.0
        );
    }

    #[test]
    fn solver_examples() {
        // Lone path: selected.
        let inst = synthetic_instance(&[0.9], &[]);
        let sol = solve(&inst, &HnnParams::tuned(), 7).unwrap();
        assert_eq!(sol.selected, vec![0]);
        assert!(sol.converged);

        // Conflict only between the two most reliable paths: keep the best
        // and the untouched third.
        let inst = synthetic_instance(&[0.6, 0.54, 0.48], &[(0, 1)]);
        let sol = solve(&inst, &HnnParams::tuned(), 7).unwrap();
        assert_eq!(sol.selected, vec![0, 2]);

        // Complete conflict graph: only the most reliable survives.
        let inst = synthetic_instance(&[0.6, 0.5, 0.4], &[(0, 1), (0, 2), (1, 2)]);
        let sol = solve(&inst, &HnnParams::tuned(), 7).unwrap();
        assert_eq!(sol.selected, vec![0]);
    }

    #[test]
    fn determinism() {
        let inst = synthetic_instance(&[0.7, 0.6, 0.5, 0.4], &[(0, 2), (1, 3)]);
        let a = solve(&inst, &HnnParams::tuned(), 99).unwrap();
        let b = solve(&inst, &HnnParams::tuned(), 99).unwrap();
        assert_eq!(a, b);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_instance() -> impl Strategy<Value = PathSetInstance> {
            (2usize..8, proptest::num::u64::ANY).prop_map(|(n, seed)| {
                use rand::Rng;
                use rand_chacha::rand_core::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let rels: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
                let mut conflicts = Vec::new();
                for j in 0..n {
                    for k in (j + 1)..n {
                        if rng.gen_bool(0.3) {
                            conflicts.push((j, k));
                        }
                    }
                }
                synthetic_instance(&rels, &conflicts)
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn both_energy_routes_agree(inst in arb_instance(), seed in proptest::num::u64::ANY) {
                let params = HnnParams::tuned();
                let net = build_network(&inst, &params, seed).unwrap();
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
                use rand::Rng;
                let v: Vec<f64> = (0..inst.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
                let direct = output_energy(net.conflict(), net.normalized_reliability(), params.mu1, params.mu2, &v);
                let generic = quadratic_energy(net.weights(), net.biases(), &v);
                prop_assert!((direct - generic).abs() <= 1e-12 * direct.abs().max(1.0));
            }

            #[test]
            fn weights_symmetric_zero_diagonal(inst in arb_instance(), seed in proptest::num::u64::ANY) {
                let net = build_network(&inst, &HnnParams::tuned(), seed).unwrap();
                let n = inst.len();
                for i in 0..n {
                    prop_assert_eq!(net.weights()[i * n + i], 0.0);
                    for j in 0..n {
                        prop_assert_eq!(net.weights()[i * n + j], net.weights()[j * n + i]);
                    }
                }
            }

            #[test]
            fn converged_energy_not_above_initial(inst in arb_instance(), seed in proptest::num::u64::ANY) {
                let params = HnnParams::tuned();
                let net = build_network(&inst, &params, seed).unwrap();
                let initial = energy(&net, &params);
                let sol = solve_network(net, &params).unwrap();
                prop_assert!(sol.final_energy <= initial + 1e-9, "final {} vs initial {}", sol.final_energy, initial);
            }
        }
    }
}
