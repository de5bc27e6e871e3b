//! Shared domain types: nodes, paths, disjointness modes, and the pairwise
//! conflict matrix that drives path-set selection.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use thiserror::Error;

/// Identifier of one network node, unique within a simulation run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(id: u32) -> Self {
        NodeId(id)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("a path needs at least two nodes, got {len}")]
    PathTooShort { len: usize },
    #[error("path repeats node {node}")]
    RepeatedNode { node: NodeId },
    #[error("reliability {value} is outside [0, 1]")]
    ReliabilityOutOfRange { value: f64 },
    #[error(
        "path {index} runs {found_src}->{found_dst} but the set is {expected_src}->{expected_dst}"
    )]
    EndpointMismatch {
        index: usize,
        expected_src: NodeId,
        expected_dst: NodeId,
        found_src: NodeId,
        found_dst: NodeId,
    },
    #[error("path index {index} out of range for {len} paths")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("{paths} paths but {reliabilities} reliabilities")]
    LengthMismatch { paths: usize, reliabilities: usize },
}

/// A simple source-to-destination route with its operation probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Path {
    nodes: Vec<NodeId>,
    reliability: f64,
}

impl Path {
    /// Builds a path, enforcing that it is simple, has at least one link,
    /// and carries a probability in `[0, 1]`.
    pub fn new(nodes: Vec<NodeId>, reliability: f64) -> Result<Self, ModelError> {
        if nodes.len() < 2 {
            return Err(ModelError::PathTooShort { len: nodes.len() });
        }
        let mut seen = HashSet::with_capacity(nodes.len());
        for &n in &nodes {
            if !seen.insert(n) {
                return Err(ModelError::RepeatedNode { node: n });
            }
        }
        if !(0.0..=1.0).contains(&reliability) || reliability.is_nan() {
            return Err(ModelError::ReliabilityOutOfRange { value: reliability });
        }
        Ok(Path { nodes, reliability })
    }

    /// Convenience constructor from raw ids.
    pub fn from_ids(ids: &[u32], reliability: f64) -> Result<Self, ModelError> {
        Self::new(ids.iter().copied().map(NodeId).collect(), reliability)
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn reliability(&self) -> f64 {
        self.reliability
    }

    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn destination(&self) -> NodeId {
        *self.nodes.last().expect("path has >= 2 nodes")
    }

    /// Number of links (hops) in the path.
    pub fn link_count(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Intermediate nodes, excluding source and destination.
    pub fn intermediates(&self) -> &[NodeId] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    /// Undirected links as canonically ordered endpoint pairs.
    pub fn links(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes.windows(2).map(|w| {
            if w[0] <= w[1] {
                (w[0], w[1])
            } else {
                (w[1], w[0])
            }
        })
    }
}

/// Which overlaps between two paths count as a conflict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisjointnessMode {
    /// Paths may share only the source and destination nodes.
    NodeDisjoint,
    /// Paths may share nodes but no link.
    LinkDisjoint,
}

impl fmt::Display for DisjointnessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DisjointnessMode::NodeDisjoint => write!(f, "node_disjoint"),
            DisjointnessMode::LinkDisjoint => write!(f, "link_disjoint"),
        }
    }
}

/// Symmetric zero-diagonal binary matrix; entry `(j, k)` is 1 when paths
/// `j` and `k` violate the chosen disjointness mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ConflictMatrix {
    n: usize,
    rho: Vec<u8>,
}

impl ConflictMatrix {
    /// Zero matrix (no conflicts) of dimension `n`.
    pub fn zeros(n: usize) -> Self {
        ConflictMatrix {
            n,
            rho: vec![0; n * n],
        }
    }

    /// Builds a matrix from explicit conflicting index pairs; both `(j, k)`
    /// and `(k, j)` are set. Diagonal pairs are ignored.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut m = Self::zeros(n);
        for &(j, k) in pairs {
            assert!(j < n && k < n, "pair ({j}, {k}) out of range for n={n}");
            if j != k {
                m.rho[j * n + k] = 1;
                m.rho[k * n + j] = 1;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry as 0 or 1.
    pub fn get(&self, j: usize, k: usize) -> u8 {
        self.rho[j * self.n + k]
    }

    pub fn conflicts(&self, j: usize, k: usize) -> bool {
        self.get(j, k) != 0
    }

    /// True when no two distinct selected indices conflict.
    ///
    /// Empty and singleton selections are vacuously disjoint.
    pub fn is_disjoint_set(&self, selection: &[usize]) -> Result<bool, ModelError> {
        for &i in selection {
            if i >= self.n {
                return Err(ModelError::IndexOutOfRange {
                    index: i,
                    len: self.n,
                });
            }
        }
        for (a, &j) in selection.iter().enumerate() {
            for &k in &selection[a + 1..] {
                if j != k && self.conflicts(j, k) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Number of selected indices that conflict with path `l`.
    pub fn conflict_count(&self, l: usize, selection: &[usize]) -> usize {
        selection
            .iter()
            .filter(|&&j| j != l && self.conflicts(l, j))
            .count()
    }
}

/// Builds the conflict matrix for a path list under the given mode.
///
/// All paths must share one source and one destination. Node-disjointness
/// ignores those shared endpoints; link-disjointness compares undirected
/// links.
pub fn build_conflict_matrix(
    paths: &[Path],
    mode: DisjointnessMode,
) -> Result<ConflictMatrix, ModelError> {
    check_shared_endpoints(paths)?;
    let n = paths.len();
    let mut m = ConflictMatrix::zeros(n);
    for j in 0..n {
        for k in (j + 1)..n {
            let clash = match mode {
                DisjointnessMode::NodeDisjoint => share_intermediate_node(&paths[j], &paths[k]),
                DisjointnessMode::LinkDisjoint => share_link(&paths[j], &paths[k]),
            };
            if clash {
                m.rho[j * n + k] = 1;
                m.rho[k * n + j] = 1;
            }
        }
    }
    Ok(m)
}

fn check_shared_endpoints(paths: &[Path]) -> Result<(), ModelError> {
    let Some(first) = paths.first() else {
        return Ok(());
    };
    let (src, dst) = (first.source(), first.destination());
    for (index, p) in paths.iter().enumerate().skip(1) {
        if p.source() != src || p.destination() != dst {
            return Err(ModelError::EndpointMismatch {
                index,
                expected_src: src,
                expected_dst: dst,
                found_src: p.source(),
                found_dst: p.destination(),
            });
        }
    }
    Ok(())
}

fn share_intermediate_node(a: &Path, b: &Path) -> bool {
    let set: HashSet<NodeId> = a.intermediates().iter().copied().collect();
    b.intermediates().iter().any(|n| set.contains(n))
}

fn share_link(a: &Path, b: &Path) -> bool {
    let set: HashSet<(NodeId, NodeId)> = a.links().collect();
    b.links().any(|l| set.contains(&l))
}

/// A selection problem: candidate paths, their reliabilities, and the
/// conflict matrix for one disjointness mode.
#[derive(Clone, Debug)]
pub struct PathSetInstance {
    paths: Vec<Path>,
    reliabilities: Vec<f64>,
    conflict: ConflictMatrix,
    mode: DisjointnessMode,
}

impl PathSetInstance {
    /// Builds an instance from a path list, deriving the conflict matrix.
    pub fn from_paths(paths: Vec<Path>, mode: DisjointnessMode) -> Result<Self, ModelError> {
        let conflict = build_conflict_matrix(&paths, mode)?;
        let reliabilities = paths.iter().map(Path::reliability).collect();
        Ok(PathSetInstance {
            paths,
            reliabilities,
            conflict,
            mode,
        })
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn reliabilities(&self) -> &[f64] {
        &self.reliabilities
    }

    pub fn conflict(&self) -> &ConflictMatrix {
        &self.conflict
    }

    pub fn mode(&self) -> DisjointnessMode {
        self.mode
    }

    /// Reliabilities of the paths at `selection`, in selection order.
    pub fn selected_reliabilities(&self, selection: &[usize]) -> Result<Vec<f64>, ModelError> {
        selection
            .iter()
            .map(|&i| {
                self.reliabilities
                    .get(i)
                    .copied()
                    .ok_or(ModelError::IndexOutOfRange {
                        index: i,
                        len: self.paths.len(),
                    })
            })
            .collect()
    }
}

/// On-disk form of a path-set instance.
///
/// Conflict matrices are always derived from the paths, never stored.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct InstanceFile {
    pub source: u32,
    pub destination: u32,
    pub paths: Vec<Vec<u32>>,
    pub path_reliabilities: Vec<f64>,
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance file serializes")
    }

    /// Validates the file contents and builds a selection instance.
    pub fn into_instance(self, mode: DisjointnessMode) -> Result<PathSetInstance, ModelError> {
        if self.paths.len() != self.path_reliabilities.len() {
            return Err(ModelError::LengthMismatch {
                paths: self.paths.len(),
                reliabilities: self.path_reliabilities.len(),
            });
        }
        let mut paths = Vec::with_capacity(self.paths.len());
        for (index, (ids, rel)) in self
            .paths
            .into_iter()
            .zip(self.path_reliabilities)
            .enumerate()
        {
            let p = Path::from_ids(&ids, rel)?;
            if p.source() != NodeId(self.source) || p.destination() != NodeId(self.destination) {
                return Err(ModelError::EndpointMismatch {
                    index,
                    expected_src: NodeId(self.source),
                    expected_dst: NodeId(self.destination),
                    found_src: p.source(),
                    found_dst: p.destination(),
                });
            }
            paths.push(p);
        }
        PathSetInstance::from_paths(paths, mode)
    }
}
