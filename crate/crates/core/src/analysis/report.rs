use serde::Serialize;

use crate::analysis::{algebraic_connectivity, controllability, te_upper_bound_for_policy, Verdict};
use crate::dynamics::{ControlMode, ControlPolicy, PackConfig};
use crate::error::{Error, Result};
use crate::hypergraph::Topology;
use crate::scalar::Real;

/// Rank verdict, spectral gap and (when it applies) the equalization-time bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport<T> {
    #[serde(rename = "rank_C")]
    pub rank_c: usize,
    #[serde(rename = "rank_LDC")]
    pub rank_ldc: usize,
    pub controllable: Verdict,
    /// Always `n - 1`.
    #[serde(skip)]
    pub min_equalizers_needed: usize,
    pub lambda2: T,
    #[serde(rename = "te_bound_s")]
    pub te_bound_seconds: Option<T>,
}

/// Inputs for the optional bound in [`analyze`].
#[derive(Clone, Copy, Debug)]
pub struct BoundRequest<'a, T> {
    pub policy: &'a ControlPolicy<T>,
    pub x0: &'a [T],
    pub epsilon: T,
}

/// Full report. The bound is attached only for a proportional policy on a
/// topology where it is finite; otherwise `te_bound_seconds` is `None`.
pub fn analyze<T: Real>(
    pack: &PackConfig<T>,
    topology: &Topology,
    bound: Option<BoundRequest<'_, T>>,
) -> Result<AnalysisReport<T>> {
    let c = controllability(pack, topology)?;
    let lambda2 = algebraic_connectivity(topology)?;
    let te_bound_seconds = match bound {
        Some(b) if b.policy.mode() == ControlMode::Proportional => {
            match te_upper_bound_for_policy(pack, topology, b.policy, b.x0, b.epsilon) {
                Ok(v) => Some(v),
                Err(Error::AlreadyBalanced | Error::BoundUnavailable(_)) => None,
                Err(e) => return Err(e),
            }
        }
        _ => None,
    };
    Ok(AnalysisReport {
        rank_c: c.rank_c,
        rank_ldc: c.rank_ldc,
        controllable: c.verdict,
        min_equalizers_needed: topology.n() - 1,
        lambda2,
        te_bound_seconds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{make_topology, TopologyKind};

    #[test]
    fn json_shape() {
        let pack = PackConfig::uniform(8, 3.1, 1.0).unwrap();
        let t = make_topology(TopologyKind::Cpc, 8, 1, 0.5).unwrap().without_edges(&[7, 8]).unwrap();
        let r = analyze(&pack, &t, None).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["rank_C"], 6);
        assert_eq!(v["rank_LDC"], 6);
        assert_eq!(v["controllable"], false);
        assert!(v["te_bound_s"].is_null());
        assert_eq!(v.as_object().unwrap().len(), 5);
    }

    #[test]
    fn bound_attached_for_proportional() {
        let pack = PackConfig::uniform(4, 3.1, 1.0).unwrap();
        let t = make_topology(TopologyKind::SeriesCc, 4, 1, 0.5).unwrap();
        let p = ControlPolicy::uniform_proportional(1000.0, &pack, &t).unwrap();
        let x0 = [0.4, 0.5, 0.6, 0.7];
        let r = analyze(&pack, &t, Some(BoundRequest { policy: &p, x0: &x0, epsilon: 1e-3 })).unwrap();
        assert!(r.te_bound_seconds.unwrap() > 0.0);
        assert_eq!(r.min_equalizers_needed, 3);
        let r = analyze(&pack, &t, Some(BoundRequest { policy: &p, x0: &[0.5; 4], epsilon: 1e-3 })).unwrap();
        assert_eq!(r.te_bound_seconds, None);
    }
}
