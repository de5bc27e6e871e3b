//! Comparison selectors: the exhaustive optimum, a greedy
//! reliability-ordered backup selector, and plain shortest path.

use crate::discovery::{DiscoveryError, RouteCache};
use crate::metrics::{MetricsError, PathSetResult};
use crate::model::{Path, PathSetInstance};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Hard cap on exhaustive enumeration: 2^25 subsets.
pub const ORACLE_MAX_PATHS: usize = 25;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaselineError {
    #[error("{n} paths exceed the enumeration guard of {max}", max = ORACLE_MAX_PATHS)]
    TooManyPaths { n: usize },
    #[error("route cache is empty; no route")]
    NoRoute,
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Discovery(#[from] DiscoveryError),
}

/// Which selection algorithm produced a result row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectorKind {
    Hnn,
    Oracle,
    Greedy,
    ShortestPath,
}

impl fmt::Display for SelectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectorKind::Hnn => write!(f, "hnn"),
            SelectorKind::Oracle => write!(f, "oracle"),
            SelectorKind::Greedy => write!(f, "greedy"),
            SelectorKind::ShortestPath => write!(f, "shortest_path"),
        }
    }
}

/// Exhaustive optimum: enumerates every subset, keeps the disjoint ones,
/// and maximizes the exact set reliability. Ties prefer fewer paths, then
/// the lexicographically smallest index set.
pub fn brute_force_optimum(instance: &PathSetInstance) -> Result<PathSetResult, BaselineError> {
    let n = instance.len();
    if n > ORACLE_MAX_PATHS {
        return Err(BaselineError::TooManyPaths { n });
    }
    let conflict = instance.conflict();
    let mut conflict_mask = vec![0u32; n];
    for i in 0..n {
        for j in 0..n {
            if conflict.conflicts(i, j) {
                conflict_mask[i] |= 1 << j;
            }
        }
    }
    let rels = instance.reliabilities();
    // Track the smallest failure product 'prod(1 - r_i)'.
    let mut best_mask = 0u32;
    let mut best_fail = 1.0f64;
    'subsets: for mask in 0u32..(1u32 << n) {
        let mut fail = 1.0;
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if mask & conflict_mask[i] != 0 {
                continue 'subsets;
            }
            fail *= 1.0 - rels[i];
        }
        if fail < best_fail
            || (fail == best_fail
                && (mask.count_ones() < best_mask.count_ones()
                    || (mask.count_ones() == best_mask.count_ones()
                        && lex_smaller(mask, best_mask))))
        {
            best_fail = fail;
            best_mask = mask;
        }
    }
    let selected: Vec<usize> = (0..n).filter(|&i| best_mask & (1 << i) != 0).collect();
    Ok(PathSetResult::from_selection(instance, selected)?)
}

/// True when `a`'s ascending index sequence precedes `b`'s
/// lexicographically. A proper prefix precedes its extensions.
fn lex_smaller(a: u32, b: u32) -> bool {
    let (mut a, mut b) = (a, b);
    while a != 0 && b != 0 {
        let (ia, ib) = (a.trailing_zeros(), b.trailing_zeros());
        if ia != ib {
            return ia < ib;
        }
        a &= a - 1;
        b &= b - 1;
    }
    a == 0 && b != 0
}

/// Greedy backup selection: repeatedly take the most reliable remaining
/// path and drop everything conflicting with it. Ties prefer fewer links,
/// then the lower index.
pub fn greedy_backup_select(instance: &PathSetInstance) -> Result<PathSetResult, BaselineError> {
    let n = instance.len();
    let rels = instance.reliabilities();
    let conflict = instance.conflict();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut selected = Vec::new();
    while !remaining.is_empty() {
        let &pick = remaining
            .iter()
            .min_by(|&&a, &&b| {
                rels[b]
                    .total_cmp(&rels[a])
                    .then_with(|| {
                        instance.paths()[a]
                            .link_count()
                            .cmp(&instance.paths()[b].link_count())
                    })
                    .then_with(|| a.cmp(&b))
            })
            .expect("remaining is non-empty");
        selected.push(pick);
        remaining.retain(|&i| i != pick && !conflict.conflicts(i, pick));
    }
    Ok(PathSetResult::from_selection(instance, selected)?)
}

/// The cached path with the fewest links; ties prefer higher reliability,
/// then the lexicographically smallest record.
pub fn shortest_path(cache: &RouteCache) -> Result<&Path, BaselineError> {
    cache
        .paths
        .iter()
        .min_by(|a, b| {
            a.link_count()
                .cmp(&b.link_count())
                .then_with(|| b.reliability().total_cmp(&a.reliability()))
                .then_with(|| a.nodes().cmp(b.nodes()))
        })
        .ok_or(BaselineError::NoRoute)
}
