//! Random-waypoint mobility: each node walks to a uniformly drawn waypoint
//! at a per-leg speed, pauses, and repeats.

use crate::fmt::sig9;
use crate::seeds;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

/// Nodes slower than this are considered stuck; per-leg speeds are raised to
/// it so every leg terminates.
pub const MIN_LEG_SPEED: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MobilityError {
    #[error("area must be positive, got {width} x {height}")]
    InvalidArea { width: f64, height: f64 },
    #[error("need 0 <= speed_min <= speed_max, got [{min}, {max}]")]
    InvalidSpeedRange { min: f64, max: f64 },
    #[error("pause time must be >= 0, got {0}")]
    InvalidPause(f64),
    #[error("node_count must be at least 1")]
    NoNodes,
}

/// Parameters of the waypoint walk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobilityConfig {
    #[serde(default = "default_width")]
    pub area_width: f64,
    #[serde(default = "default_height")]
    pub area_height: f64,
    #[serde(default = "default_node_count")]
    pub node_count: usize,
    #[serde(default)]
    pub speed_min: f64,
    #[serde(default = "default_speed_max")]
    pub speed_max: f64,
    #[serde(default = "default_pause")]
    pub pause_time: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_width() -> f64 {
    1000.0
}
fn default_height() -> f64 {
    500.0
}
fn default_node_count() -> usize {
    30
}
fn default_speed_max() -> f64 {
    20.0
}
fn default_pause() -> f64 {
    5.0
}

impl Default for MobilityConfig {
    /// 30 nodes in a 1000 x 500 m field, speeds 0-20 m/s, 5 s pauses.
    fn default() -> Self {
        MobilityConfig {
            area_width: default_width(),
            area_height: default_height(),
            node_count: default_node_count(),
            speed_min: 0.0,
            speed_max: default_speed_max(),
            pause_time: default_pause(),
            seed: 0,
        }
    }
}

impl MobilityConfig {
    pub fn validate(&self) -> Result<(), MobilityError> {
        if !(self.area_width > 0.0 && self.area_height > 0.0) {
            return Err(MobilityError::InvalidArea {
                width: self.area_width,
                height: self.area_height,
            });
        }
        if !(0.0 <= self.speed_min && self.speed_min <= self.speed_max) {
            return Err(MobilityError::InvalidSpeedRange {
                min: self.speed_min,
                max: self.speed_max,
            });
        }
        if !(self.pause_time >= 0.0) {
            return Err(MobilityError::InvalidPause(self.pause_time));
        }
        if self.node_count == 0 {
            return Err(MobilityError::NoNodes);
        }
        Ok(())
    }
}

/// Instantaneous motion of one node: position, speed, and heading.
///
/// A paused node reports speed 0; its heading is then irrelevant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kinematics {
    pub position: (f64, f64),
    pub speed: f64,
    /// Radians in `[0, 2pi)`.
    pub heading: f64,
}

#[derive(Clone, Debug)]
struct NodeMotion {
    pos: (f64, f64),
    waypoint: (f64, f64),
    speed: f64,
    pause_left: f64,
    rng: ChaCha8Rng,
}

impl NodeMotion {
    fn draw_leg(&mut self, cfg: &MobilityConfig) {
        self.waypoint = (
            self.rng.gen_range(0.0..=cfg.area_width),
            self.rng.gen_range(0.0..=cfg.area_height),
        );
        self.speed = self
            .rng
            .gen_range(cfg.speed_min..=cfg.speed_max)
            .max(MIN_LEG_SPEED);
    }
}

/// Positions and walk state of all nodes at one simulated time.
///
/// Each node owns an independent ChaCha stream keyed from the config seed
/// and its index, so a trajectory is a pure function of `(config, time)`
/// regardless of how `advance` calls split the timeline.
#[derive(Clone, Debug)]
pub struct MobilityState {
    config: MobilityConfig,
    time: f64,
    nodes: Vec<NodeMotion>,
}

/// Places nodes uniformly in the area, each moving toward a fresh waypoint.
pub fn init_waypoint_state(config: &MobilityConfig) -> Result<MobilityState, MobilityError> {
    config.validate()?;
    let nodes = (0..config.node_count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seeds::mix(config.seed, i as u64));
            let pos = (
                rng.gen_range(0.0..=config.area_width),
                rng.gen_range(0.0..=config.area_height),
            );
            let mut node = NodeMotion {
                pos,
                waypoint: pos,
                speed: MIN_LEG_SPEED,
                pause_left: 0.0,
                rng,
            };
            node.draw_leg(config);
            node
        })
        .collect();
    Ok(MobilityState {
        config: config.clone(),
        time: 0.0,
        nodes,
    })
}

impl MobilityState {
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn config(&self) -> &MobilityConfig {
        &self.config
    }

    /// Advances every node by `dt` seconds, splitting the step at waypoint
    /// arrivals and pause expirations so intermediate events land at their
    /// exact instants.
    pub fn advance(&mut self, dt: f64) {
        assert!(dt >= 0.0, "dt must be non-negative, got {dt}");
        if dt == 0.0 {
            return;
        }
        let config = self.config.clone();
        for node in &mut self.nodes {
            advance_node(node, dt, &config);
        }
        self.time += dt;
    }

    /// Read-only per-node motion snapshot; paused nodes report speed 0.
    pub fn snapshot_kinematics(&self) -> Vec<Kinematics> {
        self.nodes
            .iter()
            .map(|n| {
                let dx = n.waypoint.0 - n.pos.0;
                let dy = n.waypoint.1 - n.pos.1;
                let dist = dx.hypot(dy);
                let heading = if dist < 1e-12 {
                    0.0
                } else {
                    let mut h = dy.atan2(dx);
                    if h < 0.0 {
                        h += TAU;
                    }
                    if h >= TAU {
                        h = 0.0;
                    }
                    h
                };
                let speed = if n.pause_left > 0.0 { 0.0 } else { n.speed };
                Kinematics {
                    position: n.pos,
                    speed,
                    heading,
                }
            })
            .collect()
    }
}

#[cfg(test)]
impl MobilityState {
    /// Test hook: overwrite one node's walk state for scripted motion.
    pub(crate) fn testing_place_node(
        &mut self,
        node: usize,
        pos: (f64, f64),
        waypoint: (f64, f64),
        speed: f64,
        pause: f64,
    ) {
        let n = &mut self.nodes[node];
        n.pos = pos;
        n.waypoint = waypoint;
        n.speed = speed;
        n.pause_left = pause;
    }
}

fn advance_node(node: &mut NodeMotion, dt: f64, cfg: &MobilityConfig) {
    let mut rem = dt;
    while rem > 0.0 {
        if node.pause_left > 0.0 {
            let step = rem.min(node.pause_left);
            node.pause_left -= step;
            rem -= step;
            if node.pause_left <= 0.0 {
                node.pause_left = 0.0;
                node.draw_leg(cfg);
            }
        } else {
            let dx = node.waypoint.0 - node.pos.0;
            let dy = node.waypoint.1 - node.pos.1;
            let dist = dx.hypot(dy);
            let time_to_arrive = dist / node.speed;
            if time_to_arrive <= rem {
                node.pos = node.waypoint;
                rem -= time_to_arrive;
                node.pause_left = cfg.pause_time;
                if cfg.pause_time <= 0.0 {
                    node.draw_leg(cfg);
                }
            } else {
                let step = node.speed * rem;
                node.pos.0 += dx / dist * step;
                node.pos.1 += dy / dist * step;
                rem = 0.0;
            }
        }
    }
    node.pos.0 = node.pos.0.clamp(0.0, cfg.area_width);
    node.pos.1 = node.pos.1.clamp(0.0, cfg.area_height);
}

/// Renders one kinematics snapshot as `time,node,x,y,speed,heading` CSV rows.
pub fn kinematics_csv(time: f64, kinematics: &[Kinematics]) -> String {
    let mut out = String::from("time,node,x,y,speed,heading\n");
    for (i, k) in kinematics.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            sig9(time),
            i,
            sig9(k.position.0),
            sig9(k.position.1),
            sig9(k.speed),
            sig9(k.heading),
        ));
    }
    out
}
