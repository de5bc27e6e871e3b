//! Path-set reliability (exact product form and the additive
//! approximation) and lifetime measurement by trajectory replay.

use crate::mobility::MobilityState;
use crate::model::{ModelError, Path, PathSetInstance};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("reliability {value} is outside [0, 1]")]
    OutOfRange { value: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Probability that at least one path operates: `1 - prod(1 - r_i)`.
///
/// The empty set has reliability 0.
pub fn pathset_reliability(reliabilities: &[f64]) -> Result<f64, MetricsError> {
    let mut fail = 1.0;
    for &r in reliabilities {
        if !(0.0..=1.0).contains(&r) || r.is_nan() {
            return Err(MetricsError::OutOfRange { value: r });
        }
        fail *= 1.0 - r;
    }
    if reliabilities.is_empty() {
        Ok(0.0)
    } else {
        Ok(1.0 - fail)
    }
}

/// First-order approximation `sum(r_i)` of the set reliability.
///
/// Valid only for small per-path reliabilities; it can exceed 1 and is a
/// diagnostic, never a selection criterion.
pub fn pathset_reliability_sum_approx(reliabilities: &[f64]) -> Result<f64, MetricsError> {
    let mut sum = 0.0;
    for &r in reliabilities {
        if !(0.0..=1.0).contains(&r) || r.is_nan() {
            return Err(MetricsError::OutOfRange { value: r });
        }
        sum += r;
    }
    Ok(sum)
}

/// Metrics of one selected path set.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSetResult {
    /// Indices into the instance's path list, ascending.
    pub selected: Vec<usize>,
    pub set_reliability: f64,
    pub set_reliability_sum_approx: f64,
    /// Per selected path, `1 - reliability`.
    pub path_fail: Vec<f64>,
    pub lifetime_s: Option<f64>,
}

impl PathSetResult {
    pub fn from_selection(
        instance: &PathSetInstance,
        mut selected: Vec<usize>,
    ) -> Result<Self, MetricsError> {
        selected.sort_unstable();
        let rels = instance.selected_reliabilities(&selected)?;
        Ok(PathSetResult {
            set_reliability: pathset_reliability(&rels)?,
            set_reliability_sum_approx: pathset_reliability_sum_approx(&rels)?,
            path_fail: rels.iter().map(|r| 1.0 - r).collect(),
            selected,
            lifetime_s: None,
        })
    }
}

/// Time until every path in the set has at least one broken link.
///
/// The state is replayed in `dt_sim` steps; a link breaks when its endpoint
/// distance exceeds `r`, a broken path stays broken, and the horizon is
/// returned if any path survives it. The empty set is vacuously broken at 0.
pub fn lifetime(
    paths: &[Path],
    mut state: MobilityState,
    r: f64,
    dt_sim: f64,
    horizon: f64,
) -> f64 {
    assert!(dt_sim > 0.0, "dt_sim must be positive, got {dt_sim}");
    if paths.is_empty() {
        return 0.0;
    }
    let mut broken = vec![false; paths.len()];
    let all_broken = |broken: &[bool]| broken.iter().all(|&b| b);

    let check = |state: &MobilityState, broken: &mut Vec<bool>| {
        let kins = state.snapshot_kinematics();
        for (idx, path) in paths.iter().enumerate() {
            if broken[idx] {
                continue;
            }
            for w in path.nodes().windows(2) {
                let (pi, pj) = (
                    kins[w[0].0 as usize].position,
                    kins[w[1].0 as usize].position,
                );
                if (pi.0 - pj.0).hypot(pi.1 - pj.1) > r {
                    broken[idx] = true;
                    break;
                }
            }
        }
    };

    check(&state, &mut broken);
    if all_broken(&broken) {
        return 0.0;
    }
    let mut t = 0.0;
    while t < horizon {
        state.advance(dt_sim);
        t += dt_sim;
        check(&state, &mut broken);
        if all_broken(&broken) {
            return t.min(horizon);
        }
    }
    horizon
}
