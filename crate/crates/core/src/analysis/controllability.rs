use serde::{Serialize, Serializer};

use crate::dynamics::PackConfig;
use crate::error::{Error, Result};
use crate::hypergraph::Topology;
use crate::linalg::{rank_default, Matrix};
use crate::scalar::Real;

/// `(n-1) x n` matrix whose row `i` is `e_{i+1} - e_1`; `L x = 0` exactly
/// on the balanced manifold.
pub fn difference_matrix<T: Real>(n: usize) -> Result<Matrix<T>> {
    if n < 2 {
        return Err(Error::Dimension(format!("difference matrix needs n >= 2, got {n}")));
    }
    let mut l = Matrix::zeros(n - 1, n);
    for i in 0..n - 1 {
        l[(i, 0)] = -T::one();
        l[(i, i + 1)] = T::one();
    }
    Ok(l)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Controllable,
    Uncontrollable,
    /// Variable incidence matrix; the rank test does not apply.
    Switched,
}

impl Verdict {
    pub fn is_negative(self) -> bool {
        self == Verdict::Uncontrollable
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Verdict::Controllable => s.serialize_bool(true),
            Verdict::Uncontrollable => s.serialize_bool(false),
            Verdict::Switched => s.serialize_str("switched"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Controllability {
    pub rank_c: usize,
    pub rank_ldc: usize,
    pub verdict: Verdict,
}

/// Rank test on `L D C`: controllable iff its rank is `n - 1`.
///
/// Switched topologies report the ranks of their template column and the
/// [`Verdict::Switched`] verdict.
pub fn controllability<T: Real>(pack: &PackConfig<T>, topology: &Topology) -> Result<Controllability> {
    let n = topology.n();
    if pack.n() != n {
        return Err(Error::Dimension(format!("pack has {} cells, topology {n}", pack.n())));
    }
    let c = topology.template_matrix::<T>()?;
    let ldc = difference_matrix::<T>(n)?.matmul(&c.scale_rows(&pack.d_diag())?)?;
    let rank_c = rank_default(&c);
    let rank_ldc = rank_default(&ldc);
    let verdict = if topology.is_switched() {
        Verdict::Switched
    } else if rank_ldc == n - 1 {
        Verdict::Controllable
    } else {
        Verdict::Uncontrollable
    };
    Ok(Controllability { rank_c, rank_ldc, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{make_topology, TopologyKind};

    #[test]
    fn difference_matrix_shape() {
        assert_eq!(difference_matrix::<f64>(2).unwrap(), Matrix::from_rows(&[vec![-1.0, 1.0]]).unwrap());
        assert_eq!(
            difference_matrix::<f64>(3).unwrap(),
            Matrix::from_rows(&[vec![-1.0, 1.0, 0.0], vec![-1.0, 0.0, 1.0]]).unwrap()
        );
        assert!(difference_matrix::<f64>(1).is_err());
        for n in 2..10 {
            let l = difference_matrix::<f64>(n).unwrap();
            assert!(l.mul_vec(&vec![0.37; n]).unwrap().iter().all(|&v| v == 0.0));
            assert_eq!(rank_default(&l), n - 1);
        }
    }

    #[test]
    fn table_one_cases() {
        let pack = PackConfig::uniform(8, 3.1, 1.0).unwrap();
        let cpc = make_topology(TopologyKind::Cpc, 8, 1, 0.5).unwrap();
        let r = controllability(&pack, &cpc).unwrap();
        assert_eq!((r.rank_c, r.verdict), (7, Verdict::Controllable));
        let r = controllability(&pack, &cpc.without_edges(&[8]).unwrap()).unwrap();
        assert_eq!((r.rank_c, r.verdict), (7, Verdict::Controllable));
        let mcpc = make_topology(TopologyKind::ModuleCpc, 8, 2, 0.5).unwrap();
        let r = controllability(&pack, &mcpc.without_edges(&[1]).unwrap()).unwrap();
        assert_eq!((r.rank_c, r.rank_ldc, r.verdict), (6, 6, Verdict::Uncontrollable));
    }

    #[test]
    fn switched_bypasses_rank_test() {
        let pack = PackConfig::uniform(8, 3.1, 1.0).unwrap();
        let t = make_topology(TopologyKind::SwitchCpc, 8, 1, 0.5).unwrap();
        let r = controllability(&pack, &t).unwrap();
        assert_eq!(r.verdict, Verdict::Switched);
        assert_eq!(serde_json::to_string(&r.verdict).unwrap(), "\"switched\"");
        assert_eq!(serde_json::to_string(&Verdict::Controllable).unwrap(), "true");
    }
}
