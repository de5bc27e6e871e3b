//! Link lifetime prediction and instantaneous link snapshots.
//!
//! Two nodes moving on straight lines stay connected until their distance
//! first exceeds the transmission range; that crossing time is the link
//! expiration time (LET). Normalizing each LET by the largest LET in the
//! network yields a per-link operation probability.
//!
//! Straight-line predictions are only meaningful on the waypoint-leg
//! timescale, and a single near-parallel slow pair would otherwise blow up
//! the normalizer and collapse every other probability toward zero, so
//! LETs are clamped to a prediction horizon before normalization. Links
//! predicted to outlive the horizon (including never-breaking ones) count
//! as fully reliable.

use crate::fmt::sig9;
use crate::mobility::Kinematics;
use crate::model::NodeId;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default LET prediction horizon in seconds, on the order of one
/// waypoint leg.
pub const DEFAULT_LET_HORIZON: f64 = 60.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinkError {
    #[error("nodes are {distance:.3} m apart, outside range {range} m; LET undefined")]
    OutOfRange { distance: f64, range: f64 },
    #[error("degenerate snapshot: maximum link expiration time {let_max} is not positive")]
    DegenerateSnapshot { let_max: f64 },
    #[error("transmission range must be positive, got {0}")]
    InvalidRange(f64),
    #[error("LET horizon must be positive, got {0}")]
    InvalidHorizon(f64),
}

/// One radio link with its predicted expiration time and operation
/// probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkEstimate {
    /// Endpoints in canonical (low, high) id order.
    pub a: NodeId,
    pub b: NodeId,
    pub distance: f64,
    /// Seconds until the link breaks; `f64::INFINITY` when the relative
    /// velocity is zero.
    pub let_s: f64,
    pub prob: f64,
}

/// All in-range links at one instant, with probabilities normalized by the
/// snapshot-wide maximum horizon-clamped LET.
#[derive(Clone, Debug)]
pub struct LinkSnapshot {
    pub time: f64,
    pub transmission_range: f64,
    pub links: Vec<LinkEstimate>,
    /// The normalizer: the largest horizon-clamped LET, 0 when there are no
    /// links.
    pub let_max: f64,
    /// Prediction horizon the probabilities were normalized under.
    pub let_horizon: f64,
    node_count: usize,
    adjacency: Vec<Vec<(u32, f64)>>,
}

/// Seconds until two nodes on straight-line courses drift out of range.
///
/// Returns `f64::INFINITY` when the relative velocity is zero. The nodes
/// must currently be within range `r` of each other.
pub fn link_expiration_time(ki: &Kinematics, kj: &Kinematics, r: f64) -> Result<f64, LinkError> {
    let b = ki.position.0 - kj.position.0;
    let d = ki.position.1 - kj.position.1;
    let distance = b.hypot(d);
    if distance > r {
        return Err(LinkError::OutOfRange { distance, range: r });
    }
    let a = ki.speed * ki.heading.cos() - kj.speed * kj.heading.cos();
    let c = ki.speed * ki.heading.sin() - kj.speed * kj.heading.sin();
    let speed_sq = a * a + c * c;
    if speed_sq == 0.0 {
        return Ok(f64::INFINITY);
    }
    // Rounding can push the discriminant slightly negative for tangent
    // geometries; clamp before the root.
    let disc = (speed_sq * r * r - (a * d - b * c).powi(2)).max(0.0);
    Ok(((-(a * b + c * d) + disc.sqrt()) / speed_sq).max(0.0))
}

/// Normalizes a LET into an operation probability.
///
/// An infinite LET (a link that never breaks) maps to probability 1.
pub fn link_probability(let_s: f64, let_max: f64) -> Result<f64, LinkError> {
    if !(let_max > 0.0) {
        return Err(LinkError::DegenerateSnapshot { let_max });
    }
    if let_s.is_infinite() {
        return Ok(1.0);
    }
    Ok((let_s / let_max).clamp(0.0, 1.0))
}

/// Builds the link set over all node pairs within range `r`, normalizing
/// probabilities under [`DEFAULT_LET_HORIZON`].
///
/// The snapshot time is 0; use [`LinkSnapshot::at_time`] to stamp it.
pub fn build_link_snapshot(kinematics: &[Kinematics], r: f64) -> Result<LinkSnapshot, LinkError> {
    build_link_snapshot_with_horizon(kinematics, r, DEFAULT_LET_HORIZON)
}

/// [`build_link_snapshot`] with an explicit prediction horizon.
///
/// Each link's effective LET is `min(let, horizon)`; the normalizer is the
/// largest effective LET. An infinite horizon recovers plain
/// largest-finite-LET normalization with never-breaking links pinned at
/// probability 1.
pub fn build_link_snapshot_with_horizon(
    kinematics: &[Kinematics],
    r: f64,
    let_horizon: f64,
) -> Result<LinkSnapshot, LinkError> {
    if !(r > 0.0) {
        return Err(LinkError::InvalidRange(r));
    }
    if !(let_horizon > 0.0) {
        return Err(LinkError::InvalidHorizon(let_horizon));
    }
    let n = kinematics.len();
    let mut links = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = kinematics[i].position.0 - kinematics[j].position.0;
            let dy = kinematics[i].position.1 - kinematics[j].position.1;
            let distance = dx.hypot(dy);
            if distance <= r {
                let let_s = link_expiration_time(&kinematics[i], &kinematics[j], r)
                    .expect("pair checked in range");
                links.push(LinkEstimate {
                    a: NodeId(i as u32),
                    b: NodeId(j as u32),
                    distance,
                    let_s,
                    prob: 0.0,
                });
            }
        }
    }
    let clamped_max = links
        .iter()
        .map(|l| l.let_s.min(let_horizon))
        .filter(|t| t.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let let_max = if links.is_empty() {
        0.0
    } else if clamped_max.is_finite() {
        clamped_max
    } else {
        // Only reachable with an infinite horizon and all-infinite LETs.
        f64::INFINITY
    };
    for l in &mut links {
        let clamped = l.let_s.min(let_horizon);
        l.prob = if clamped.is_infinite() {
            1.0
        } else if let_max > 0.0 && let_max.is_finite() {
            link_probability(clamped, let_max).expect("normalizer checked positive")
        } else {
            // All effective LETs are zero: every such link is about to
            // break.
            0.0
        };
    }
    let mut adjacency = vec![Vec::new(); n];
    for l in &links {
        adjacency[l.a.0 as usize].push((l.b.0, l.prob));
        adjacency[l.b.0 as usize].push((l.a.0, l.prob));
    }
    for nbrs in &mut adjacency {
        nbrs.sort_unstable_by_key(|&(id, _)| id);
    }
    Ok(LinkSnapshot {
        time: 0.0,
        transmission_range: r,
        links,
        let_max,
        let_horizon,
        node_count: n,
        adjacency,
    })
}

impl LinkSnapshot {
    pub fn at_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Neighbors of `node` with per-link probabilities, ordered by id.
    pub fn neighbors(&self, node: NodeId) -> &[(u32, f64)] {
        self.adjacency
            .get(node.0 as usize)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Operation probability of link `(i, j)`, if the link exists.
    pub fn link_prob(&self, i: NodeId, j: NodeId) -> Option<f64> {
        self.neighbors(i)
            .iter()
            .find(|&&(id, _)| id == j.0)
            .map(|&(_, p)| p)
    }

    /// Renders the link set as `time,i,j,distance,let,p` CSV rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,i,j,distance,let,p\n");
        for l in &self.links {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                sig9(self.time),
                l.a,
                l.b,
                sig9(l.distance),
                sig9(l.let_s),
                sig9(l.prob),
            ));
        }
        out
    }
}
