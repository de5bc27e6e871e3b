//! Route discovery by TTL-bounded request flooding over a link snapshot.
//!
//! The source broadcasts a route request carrying the hop record, the
//! accumulated path probability, and a TTL. Each receiver decrements the
//! TTL, accepts the packet if it is the destination, discards it when the
//! TTL hits zero or its own id already appears in the record, and otherwise
//! appends itself and rebroadcasts. The destination never rebroadcasts, so
//! the cache holds exactly the simple paths of at most TTL links.

use crate::link::LinkSnapshot;
use crate::model::{ModelError, NodeId, Path};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiscoveryError {
    #[error("source and destination must differ, both are {0}")]
    SameEndpoints(NodeId),
    #[error("ttl must be at least 1")]
    ZeroTtl,
    #[error("path cap must be at least 1")]
    ZeroCap,
    #[error("link {a}-{b} is not in the snapshot; path is stale")]
    StalePath { a: NodeId, b: NodeId },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// An in-flight route request.
#[derive(Clone, Debug)]
pub struct Rreq {
    /// Hop sequence taken so far, starting at the source.
    pub record: Vec<NodeId>,
    /// Product of link probabilities along the record.
    pub prob: f64,
    /// Remaining hop budget as stamped by the last sender.
    pub ttl: usize,
}

/// Paths gathered at the destination, best-first.
#[derive(Clone, Debug)]
pub struct RouteCache {
    pub source: NodeId,
    pub destination: NodeId,
    /// Ordered by descending probability, then fewer links, then record.
    pub paths: Vec<Path>,
    /// True when more paths existed than the cap kept.
    pub truncated: bool,
}

/// Floods route requests from `source` and returns every simple path to
/// `destination` with at most `ttl` links, keeping the `cap` most reliable
/// when the full set is larger.
pub fn discover_paths(
    snapshot: &LinkSnapshot,
    source: NodeId,
    destination: NodeId,
    ttl: usize,
    cap: usize,
) -> Result<RouteCache, DiscoveryError> {
    if source == destination {
        return Err(DiscoveryError::SameEndpoints(source));
    }
    if ttl == 0 {
        return Err(DiscoveryError::ZeroTtl);
    }
    if cap == 0 {
        return Err(DiscoveryError::ZeroCap);
    }

    let mut arrived: Vec<(Vec<NodeId>, f64)> = Vec::new();
    let mut in_flight = vec![Rreq {
        record: vec![source],
        prob: 1.0,
        ttl,
    }];
    while let Some(pkt) = in_flight.pop() {
        let from = *pkt.record.last().expect("record is never empty");
        for &(nbr, link_p) in snapshot.neighbors(from) {
            let nbr = NodeId(nbr);
            let remaining = pkt.ttl - 1;
            if nbr == destination {
                let mut record = pkt.record.clone();
                record.push(nbr);
                arrived.push((record, pkt.prob * link_p));
            } else if remaining == 0 || pkt.record.contains(&nbr) {
                // Budget exhausted or a loop; drop the copy.
            } else {
                let mut record = pkt.record.clone();
                record.push(nbr);
                in_flight.push(Rreq {
                    record,
                    prob: pkt.prob * link_p,
                    ttl: remaining,
                });
            }
        }
    }

    arrived.sort_unstable_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then_with(|| a.0.len().cmp(&b.0.len()))
            .then_with(|| a.0.cmp(&b.0))
    });
    let truncated = arrived.len() > cap;
    arrived.truncate(cap);
    let paths = arrived
        .into_iter()
        .map(|(record, prob)| Path::new(record, prob.clamp(0.0, 1.0)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RouteCache {
        source,
        destination,
        paths,
        truncated,
    })
}

/// Product of link probabilities along a path, recomputed from the
/// snapshot. Fails if any hop is no longer a link.
pub fn path_reliability(path: &Path, snapshot: &LinkSnapshot) -> Result<f64, DiscoveryError> {
    let mut prob = 1.0;
    for w in path.nodes().windows(2) {
        let p = snapshot
            .link_prob(w[0], w[1])
            .ok_or(DiscoveryError::StalePath { a: w[0], b: w[1] })?;
        prob *= p;
    }
    Ok(prob)
}

impl RouteCache {
    /// Serializes the cache in the path-set instance file format.
    pub fn to_instance_file(&self) -> crate::model::InstanceFile {
        crate::model::InstanceFile {
            source: self.source.0,
            destination: self.destination.0,
            paths: self
                .paths
                .iter()
                .map(|p| p.nodes().iter().map(|n| n.0).collect())
                .collect(),
            path_reliabilities: self.paths.iter().map(Path::reliability).collect(),
        }
    }
}
