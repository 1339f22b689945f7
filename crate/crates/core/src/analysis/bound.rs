use crate::analysis::algebraic_connectivity;
use crate::dynamics::{imbalance, ControlPolicy, PackConfig};
use crate::error::{Error, Result};
use crate::hypergraph::Topology;
use crate::scalar::Real;

/// Upper bound on the equalization time (seconds) under a proportional law
/// with smallest gain `min_gain`:
///
/// ```text
/// T_e <= T_0 (log||x0 - x̄0|| - log(n ε)) / -log(1 - d_s k_s λ₂(CCᵀ))
/// ```
///
/// with `d_s = η T_0 / (3600 max Q_i)`.
///
/// The equalization time is only observed at sampling instants, so the step
/// count on the right is rounded up to a whole step: the decay estimate
/// `(1 - d_s k_s λ₂)^k ||x0 - x̄0|| <= n ε` holds from the first integer `k`
/// past the real-valued ratio, not before it.
pub fn te_upper_bound<T: Real>(
    pack: &PackConfig<T>,
    topology: &Topology,
    min_gain: T,
    x0: &[T],
    epsilon: T,
) -> Result<T> {
    let n = topology.n();
    if x0.len() != n || pack.n() != n {
        return Err(Error::Dimension(format!(
            "pack of {} cells, topology of {n}, state of length {}",
            pack.n(),
            x0.len()
        )));
    }
    if epsilon.is_nan() || epsilon <= T::zero() {
        return Err(Error::InvalidArgument(format!("tolerance {epsilon} must be > 0")));
    }
    if imbalance(x0)? <= epsilon {
        return Err(Error::AlreadyBalanced);
    }
    let lambda2 = algebraic_connectivity::<T>(topology)?;
    if lambda2 <= T::zero() {
        return Err(Error::BoundUnavailable("second smallest eigenvalue of CC^T is 0; bound is infinite".into()));
    }
    let rate = pack.d_min() * min_gain * lambda2;
    if !(rate > T::zero() && rate < T::one()) {
        return Err(Error::BoundUnavailable(format!("d_s k_s lambda2 = {rate} must lie in (0, 1)")));
    }
    let nf = T::from_usize_lossy(n);
    let mean = x0.iter().copied().sum::<T>() / nf;
    let dev = x0.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>().sqrt();
    let steps = (dev.ln() - (nf * epsilon).ln()) / -(T::one() - rate).ln();
    Ok(whole_steps(steps) * pack.sample_period())
}

/// Ceiling that forgives rounding noise on values that are integers in exact
/// arithmetic (`log 4 / log 2` must give 2, not 3).
fn whole_steps<T: Real>(steps: T) -> T {
    let nearest = steps.round();
    if (steps - nearest).abs() <= T::lit(64.0) * T::epsilon() * nearest.abs().max(T::one()) {
        nearest
    } else {
        steps.ceil()
    }
}

/// [`te_upper_bound`] with `k_s` taken from a proportional policy.
/// Sign-constant policies are rejected.
pub fn te_upper_bound_for_policy<T: Real>(
    pack: &PackConfig<T>,
    topology: &Topology,
    policy: &ControlPolicy<T>,
    x0: &[T],
    epsilon: T,
) -> Result<T> {
    te_upper_bound(pack, topology, policy.min_gain()?, x0, epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{make_topology, TopologyKind};
    use approx::assert_relative_eq;

    #[test]
    fn two_cell_hand_example() {
        // lambda2(CC^T) = 2 for one CC edge; choose k so d k lambda2 = 1/2.
        let pack = PackConfig::uniform(2, 3.1, 1.0).unwrap();
        let t = make_topology(TopologyKind::SeriesCc, 2, 1, 0.5).unwrap();
        let d = pack.d_min();
        let k = 0.25 / d;
        let eps = 1e-3;
        // ||x0 - x̄0|| / (n eps) = 4  ->  |x1 - x2| / sqrt(2) = 8e-3
        let half = 4.0 * 2.0 * eps / 2f64.sqrt();
        let x0 = [0.5 + half, 0.5 - half];
        let b = te_upper_bound(&pack, &t, k, &x0, eps).unwrap();
        assert_relative_eq!(b, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn rounds_up_to_whole_steps() {
        assert_eq!(whole_steps(9.696), 10.0);
        assert_eq!(whole_steps(2.0 + 1e-15), 2.0);
        assert_eq!(whole_steps(3.0 - 1e-15), 3.0);
        assert_eq!(whole_steps(0.2), 1.0);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let pack = PackConfig::uniform(8, 3.1, 1.0).unwrap();
        let t = make_topology(TopologyKind::SeriesCc, 8, 1, 0.5).unwrap();
        assert_eq!(te_upper_bound(&pack, &t, 100.0, &[0.5; 8], 1e-3), Err(Error::AlreadyBalanced));
        let sw = make_topology(TopologyKind::SwitchCpc, 8, 1, 0.5).unwrap();
        let x0 = [0.4, 0.8, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5];
        assert!(matches!(te_upper_bound(&pack, &sw, 100.0, &x0, 1e-3), Err(Error::BoundUnavailable(_))));
        assert!(matches!(te_upper_bound(&pack, &t, 0.0, &x0, 1e-3), Err(Error::BoundUnavailable(_))));
        let sign = ControlPolicy::sign_constant_from(&t);
        assert!(matches!(te_upper_bound_for_policy(&pack, &t, &sign, &x0, 1e-3), Err(Error::InvalidPolicy(_))));
    }
}
