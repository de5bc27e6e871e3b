//! Bounded continuous particle swarm optimization.
//!
//! Velocities blend an inertia term with cognitive (personal-best) and
//! social (global-best) attraction; the inertia weight anneals linearly
//! over the run. Positions are clipped to the search box and velocity
//! components clamped per dimension.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PsoError {
    #[error("invalid swarm configuration: {0}")]
    InvalidConfig(String),
}

/// Swarm settings. `bounds` fixes the search box and its length sets the
/// problem dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsoConfig {
    pub max_iterations: usize,
    pub population: usize,
    /// Per-dimension velocity clamp.
    pub v_max: Vec<f64>,
    pub inertia_start: f64,
    pub inertia_end: f64,
    pub accel_cognitive: f64,
    pub accel_social: f64,
    /// Stop once the global best improves by less than this over the stall
    /// window.
    pub min_error_gradient: f64,
    /// Iterations the stall check looks back over.
    #[serde(default = "default_stall_window")]
    pub stall_window: usize,
    /// Per-dimension `(min, max)` search box.
    pub bounds: Vec<(f64, f64)>,
    pub seed: u64,
    /// Positions seeded into the first particles before random fill.
    #[serde(default)]
    pub initial_guesses: Vec<Vec<f64>>,
}

fn default_stall_window() -> usize {
    20
}

impl PsoConfig {
    /// Standard settings: 300 iterations, 20 particles, velocity clamp 4,
    /// inertia 0.9 -> 0.2, accelerations 2.0, stall gradient 1e-5.
    pub fn new(bounds: Vec<(f64, f64)>, seed: u64) -> Self {
        let dims = bounds.len();
        PsoConfig {
            max_iterations: 300,
            population: 20,
            v_max: vec![4.0; dims],
            inertia_start: 0.9,
            inertia_end: 0.2,
            accel_cognitive: 2.0,
            accel_social: 2.0,
            min_error_gradient: 1.0e-5,
            stall_window: default_stall_window(),
            bounds,
            seed,
            initial_guesses: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), PsoError> {
        let fail = |m: String| Err(PsoError::InvalidConfig(m));
        if self.bounds.is_empty() {
            return fail("bounds must define at least one dimension".into());
        }
        if self.population < 2 {
            return fail(format!("population must be >= 2, got {}", self.population));
        }
        if self.max_iterations == 0 {
            return fail("max_iterations must be >= 1".into());
        }
        if self.v_max.len() != self.bounds.len() {
            return fail(format!(
                "v_max has {} entries for {} dimensions",
                self.v_max.len(),
                self.bounds.len()
            ));
        }
        for (i, &(lo, hi)) in self.bounds.iter().enumerate() {
            if !(lo < hi) {
                return fail(format!("bounds[{i}] = ({lo}, {hi}) is not well ordered"));
            }
        }
        if !(self.inertia_start > 0.0 && self.inertia_end > 0.0) {
            return fail("inertia weights must be positive".into());
        }
        if self.stall_window == 0 {
            return fail("stall_window must be >= 1".into());
        }
        Ok(())
    }

    fn inertia(&self, iteration: usize) -> f64 {
        if self.max_iterations <= 1 {
            return self.inertia_start;
        }
        let frac = iteration as f64 / (self.max_iterations - 1) as f64;
        self.inertia_start + (self.inertia_end - self.inertia_start) * frac.min(1.0)
    }
}

/// One swarm member.
#[derive(Clone, Debug)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_value: f64,
}

/// Result of a swarm run.
#[derive(Clone, Debug)]
pub struct PsoOutcome {
    pub best_position: Vec<f64>,
    pub best_value: f64,
    /// Velocity-update iterations executed (the initial evaluation is
    /// iteration 0 of the trace but not counted here).
    pub iterations: usize,
    /// Global best value after the initial evaluation and after each
    /// iteration.
    pub trace: Vec<f64>,
    pub evaluations: usize,
}

/// One velocity update: `inertia * v + a1 * g1 * (p - x) + a2 * g2 * (g - x)`.
#[allow(clippy::too_many_arguments)]
pub fn velocity_update(
    velocity: &[f64],
    position: &[f64],
    personal_best: &[f64],
    global_best: &[f64],
    inertia: f64,
    accel_cognitive: f64,
    accel_social: f64,
    gamma_cognitive: f64,
    gamma_social: f64,
) -> Vec<f64> {
    velocity
        .iter()
        .enumerate()
        .map(|(d, &v)| {
            inertia * v
                + accel_cognitive * gamma_cognitive * (personal_best[d] - position[d])
                + accel_social * gamma_social * (global_best[d] - position[d])
        })
        .collect()
}

/// Minimizes `objective` over the configured box.
///
/// Non-finite objective values are treated as worst-possible fitness and
/// logged. Particle evaluations may run in parallel; results are reduced in
/// particle order, so the outcome is independent of thread scheduling.
pub fn pso_minimize<F>(objective: F, config: &PsoConfig) -> Result<PsoOutcome, PsoError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    let dims = config.bounds.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let evaluate = |positions: &[Vec<f64>]| -> Vec<f64> {
        positions
            .par_iter()
            .map(|x| {
                let value = objective(x);
                if value.is_finite() {
                    value
                } else {
                    log::warn!("discarding non-finite objective value {value} at {x:?}");
                    f64::INFINITY
                }
            })
            .collect()
    };

    let mut particles: Vec<Particle> = (0..config.population)
        .map(|i| {
            let position: Vec<f64> = if let Some(guess) = config.initial_guesses.get(i) {
                config
                    .bounds
                    .iter()
                    .enumerate()
                    .map(|(d, &(lo, hi))| guess.get(d).copied().unwrap_or(lo).clamp(lo, hi))
                    .collect()
            } else {
                config
                    .bounds
                    .iter()
                    .map(|&(lo, hi)| rng.gen_range(lo..=hi))
                    .collect()
            };
            // Random initial velocities keep the swarm exploring; an
            // all-zero start collapses onto the first global best.
            let velocity: Vec<f64> = (0..dims)
                .map(|d| rng.gen_range(-config.v_max[d]..=config.v_max[d]))
                .collect();
            Particle {
                velocity,
                best_position: position.clone(),
                best_value: f64::INFINITY,
                position,
            }
        })
        .collect();

    let positions: Vec<Vec<f64>> = particles.iter().map(|p| p.position.clone()).collect();
    let values = evaluate(&positions);
    let mut evaluations = config.population;
    for (p, &val) in particles.iter_mut().zip(&values) {
        p.best_value = val;
        p.best_position = p.position.clone();
    }
    let (mut best_value, mut best_position) = global_best(&particles);
    let mut trace = vec![best_value];

    let mut iterations = 0;
    for k in 0..config.max_iterations {
        let inertia = config.inertia(k);
        for p in particles.iter_mut() {
            let g1: f64 = rng.gen_range(0.0..=1.0);
            let g2: f64 = rng.gen_range(0.0..=1.0);
            let mut v = velocity_update(
                &p.velocity,
                &p.position,
                &p.best_position,
                &best_position,
                inertia,
                config.accel_cognitive,
                config.accel_social,
                g1,
                g2,
            );
            for (d, vd) in v.iter_mut().enumerate() {
                *vd = vd.clamp(-config.v_max[d], config.v_max[d]);
            }
            for d in 0..dims {
                let (lo, hi) = config.bounds[d];
                p.position[d] = (p.position[d] + v[d]).clamp(lo, hi);
            }
            p.velocity = v;
        }

        let positions: Vec<Vec<f64>> = particles.iter().map(|p| p.position.clone()).collect();
        let values = evaluate(&positions);
        evaluations += config.population;
        for (p, &val) in particles.iter_mut().zip(&values) {
            if val < p.best_value {
                p.best_value = val;
                p.best_position = p.position.clone();
            }
        }
        let (candidate_value, candidate_position) = global_best(&particles);
        if candidate_value < best_value {
            best_value = candidate_value;
            best_position = candidate_position;
        }
        trace.push(best_value);
        iterations = k + 1;

        if trace.len() > config.stall_window {
            let before = trace[trace.len() - 1 - config.stall_window];
            if before - best_value < config.min_error_gradient {
                break;
            }
        }
    }

    Ok(PsoOutcome {
        best_position,
        best_value,
        iterations,
        trace,
        evaluations,
    })
}

fn global_best(particles: &[Particle]) -> (f64, Vec<f64>) {
    let mut best_idx = 0;
    for (i, p) in particles.iter().enumerate() {
        if p.best_value < particles[best_idx].best_value {
            best_idx = i;
        }
    }
    (
        particles[best_idx].best_value,
        particles[best_idx].best_position.clone(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    fn box5() -> Vec<(f64, f64)> {
        vec![(-5.0, 5.0); 5]
    }

    #[test]
    fn constant_objective_stops_on_stall() {
        let config = PsoConfig::new(box5(), 1);
        let out = pso_minimize(|_| 3.25, &config).unwrap();
        assert_eq!(out.best_value, 3.25);
        assert!(out.iterations < config.max_iterations, "stall rule fires");
        assert_eq!(out.iterations, config.stall_window);
    }

    #[test]
    fn velocity_update_reduces_to_inertia_when_centered() {
        let x = vec![1.0, -2.0, 0.5];
        let v = vec![0.2, -0.4, 0.8];
        let out = velocity_update(&v, &x, &x, &x, 0.7, 2.0, 2.0, 0.913, 0.402);
        for (o, vi) in out.iter().zip(&v) {
            assert_eq!(*o, 0.7 * vi);
        }
    }

    #[test]
    fn sphere_converges_for_most_seeds() {
        let mut hits = 0;
        for seed in 0..10 {
            let config = PsoConfig::new(box5(), seed);
            let out = pso_minimize(sphere, &config).unwrap();
            if out.best_value < 1.0e-3 {
                hits += 1;
            }
        }
        assert!(hits >= 9, "sphere solved for {hits}/10 seeds");
    }

    #[test]
    fn evaluated_positions_stay_in_bounds() {
        use std::sync::Mutex;
        let seen = Mutex::new(Vec::new());
        let config = PsoConfig {
            max_iterations: 40,
            ..PsoConfig::new(vec![(-2.0, 3.0), (0.5, 1.5)], 11)
        };
        let out = pso_minimize(
            |x| {
                seen.lock().unwrap().push(x.to_vec());
                sphere(x)
            },
            &config,
        )
        .unwrap();
        for x in seen.lock().unwrap().iter() {
            assert!((-2.0..=3.0).contains(&x[0]));
            assert!((0.5..=1.5).contains(&x[1]));
        }
        assert!((0.5..=1.5).contains(&out.best_position[1]));
    }

    #[test]
    fn global_best_trace_is_non_increasing() {
        let config = PsoConfig::new(box5(), 5);
        let out = pso_minimize(sphere, &config).unwrap();
        for w in out.trace.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn initial_guess_is_respected_and_never_regressed() {
        let mut config = PsoConfig::new(box5(), 3);
        config.initial_guesses = vec![vec![0.01, 0.0, 0.0, 0.0, 0.0]];
        let out = pso_minimize(sphere, &config).unwrap();
        assert!(out.best_value <= sphere(&[0.01, 0.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn non_finite_objective_is_discarded() {
        let config = PsoConfig::new(vec![(-1.0, 1.0)], 8);
        let out = pso_minimize(
            |x| {
                if x[0] < 0.0 {
                    f64::NAN
                } else {
                    x[0]
                }
            },
            &config,
        )
        .unwrap();
        assert!(out.best_value.is_finite());
        assert!(out.best_position[0] >= 0.0);
    }

    #[test]
    fn determinism_same_seed_same_outcome() {
        let config = PsoConfig::new(box5(), 77);
        let a = pso_minimize(sphere, &config).unwrap();
        let b = pso_minimize(sphere, &config).unwrap();
        assert_eq!(a.best_position, b.best_position);
        assert_eq!(a.best_value, b.best_value);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut c = PsoConfig::new(box5(), 0);
        c.population = 1;
        assert!(pso_minimize(sphere, &c).is_err());
        let mut c = PsoConfig::new(box5(), 0);
        c.bounds[2] = (1.0, 1.0);
        assert!(pso_minimize(sphere, &c).is_err());
        let mut c = PsoConfig::new(box5(), 0);
        c.v_max.pop();
        assert!(pso_minimize(sphere, &c).is_err());
    }
}
