use crate::analysis::controllability;
use crate::dynamics::{imbalance_unchecked, ClosedLoop, ControlPolicy, ExternalCurrent, PackConfig};
use crate::error::{Error, Result};
use crate::hypergraph::Topology;
use crate::scalar::Real;

/// Step cap used when no better estimate is available.
pub const FALLBACK_MAX_STEPS: u64 = 10_000_000;

#[derive(Clone, Debug)]
pub struct SimOptions<T> {
    /// Pack current profile. Equalization-time runs use [`ExternalCurrent::Zero`].
    pub external: ExternalCurrent<T>,
    /// Record every `stride`-th step (and always the last one). `None`
    /// records nothing but the final state.
    pub record_stride: Option<u64>,
    /// Run even if the rank test says the pack cannot be balanced.
    pub force: bool,
}

impl<T: Real> Default for SimOptions<T> {
    fn default() -> Self {
        Self { external: ExternalCurrent::Zero, record_stride: None, force: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample<T> {
    pub step: u64,
    pub soc: Vec<T>,
    pub imbalance: T,
    /// Currents applied at this step; `None` for the terminal sample.
    pub controls: Option<Vec<T>>,
}

/// Outcome of one simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct SimRun<T> {
    pub samples: Vec<Sample<T>>,
    pub converged: bool,
    /// `k T_0` at the first step whose imbalance is within tolerance.
    pub te_seconds: Option<T>,
    pub steps: u64,
    pub final_soc: Vec<T>,
    pub final_imbalance: T,
    /// Some SOC left `[0, 1]` and was clamped at least once.
    pub clamped: bool,
}

/// Iterates the closed loop from `x0` until `(1/n)||x - x̄|| <= epsilon`
/// (first crossing) or `max_steps` steps have been taken.
///
/// Fixed topologies that fail the rank test are refused unless
/// `options.force` is set. Running out of steps is a result, not an error.
pub fn simulate_until_balanced<T: Real>(
    pack: &PackConfig<T>,
    topology: &Topology,
    policy: &ControlPolicy<T>,
    x0: &[T],
    epsilon: T,
    max_steps: u64,
    options: &SimOptions<T>,
) -> Result<SimRun<T>> {
    if epsilon.is_nan() || epsilon <= T::zero() {
        return Err(Error::InvalidArgument(format!("tolerance {epsilon} must be > 0")));
    }
    if max_steps == 0 {
        return Err(Error::InvalidArgument("max_steps must be >= 1".into()));
    }
    if x0.len() != pack.n() {
        return Err(Error::Dimension(format!("{} initial SOCs for {} cells", x0.len(), pack.n())));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("initial SOC".into()));
    }
    if !options.force && !topology.is_switched() {
        let c = controllability(pack, topology)?;
        if c.verdict.is_negative() {
            return Err(Error::Uncontrollable { rank_ldc: c.rank_ldc, required: topology.n() - 1 });
        }
    }
    let plant = ClosedLoop::new(pack, topology, policy)?;
    Ok(run(&plant, pack.sample_period(), x0, epsilon, max_steps, options))
}

pub(crate) fn run<T: Real>(
    plant: &ClosedLoop<T>,
    sample_period: T,
    x0: &[T],
    epsilon: T,
    max_steps: u64,
    options: &SimOptions<T>,
) -> SimRun<T> {
    let mut x = x0.to_vec();
    let mut u = Vec::new();
    let mut scratch = Vec::new();
    let mut samples = Vec::new();
    let mut clamped = false;
    let mut k = 0u64;
    let (converged, final_imbalance) = loop {
        let imb = imbalance_unchecked(&x);
        if imb <= epsilon {
            break (true, imb);
        }
        if k == max_steps {
            break (false, imb);
        }
        let head = plant.control_into(&x, &mut u);
        if let Some(stride) = options.record_stride {
            if k.is_multiple_of(stride.max(1)) {
                samples.push(Sample { step: k, soc: x.clone(), imbalance: imb, controls: Some(u.clone()) });
            }
        }
        clamped |= plant.apply_raw(&mut x, &u, head, options.external.at(k), &mut scratch);
        k += 1;
    };
    if options.record_stride.is_some() {
        samples.push(Sample { step: k, soc: x.clone(), imbalance: final_imbalance, controls: None });
    }
    if clamped {
        log::warn!("SOC clamped into [0, 1] during simulation");
    }
    SimRun {
        samples,
        converged,
        te_seconds: converged.then(|| T::from_u64(k).expect("step count representable") * sample_period),
        steps: k,
        final_soc: x,
        final_imbalance,
        clamped,
    }
}

/// `10 x bound / T_0` steps when an equalization-time bound is known,
/// otherwise [`FALLBACK_MAX_STEPS`].
pub fn default_max_steps<T: Real>(bound_seconds: Option<T>, sample_period: T) -> u64 {
    bound_seconds
        .filter(|b| b.is_finite() && *b > T::zero())
        .and_then(|b| (T::lit(10.0) * b / sample_period).ceil().to_u64())
        .map_or(FALLBACK_MAX_STEPS, |s| s.max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{make_topology, TopologyKind};

    fn setup(kind: TopologyKind) -> (PackConfig<f64>, Topology, ControlPolicy<f64>) {
        let pack = PackConfig::uniform(8, 3.1, 1.0).unwrap();
        let t = make_topology(kind, 8, 2, 0.5).unwrap();
        let p = ControlPolicy::sign_constant_from(&t);
        (pack, t, p)
    }

    #[test]
    fn balanced_start_takes_zero_time() {
        let (pack, t, p) = setup(TopologyKind::SeriesCc);
        let r = simulate_until_balanced(&pack, &t, &p, &[0.6; 8], 1e-3, 10, &SimOptions::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.te_seconds, Some(0.0));
        assert_eq!(r.steps, 0);
    }

    #[test]
    fn uncontrollable_is_refused_unless_forced() {
        let (pack, t, p) = setup(TopologyKind::Cpc);
        let t = t.without_edges(&[7, 8]).unwrap();
        let p = ControlPolicy::sign_constant(p.gains()[..6].to_vec()).unwrap();
        let x0 = [0.3337, 0.6573, 0.621, 0.6978, 0.2975, 0.7487, 0.641, 0.5395];
        let err = simulate_until_balanced(&pack, &t, &p, &x0, 1e-3, 1000, &SimOptions::default());
        assert!(matches!(err, Err(Error::Uncontrollable { rank_ldc: 6, required: 7 })));
        let opts = SimOptions { force: true, ..SimOptions::default() };
        let r = simulate_until_balanced(&pack, &t, &p, &x0, 1e-3, 1000, &opts).unwrap();
        assert!(!r.converged);
        assert_eq!(r.steps, 1000);
    }

    #[test]
    fn recording_stride() {
        let (pack, t, p) = setup(TopologyKind::LayerCc);
        let x0 = [0.45, 0.5, 0.55, 0.5, 0.52, 0.48, 0.5, 0.5];
        let opts = SimOptions { record_stride: Some(100), ..SimOptions::default() };
        let r = simulate_until_balanced(&pack, &t, &p, &x0, 1e-3, 1_000_000, &opts).unwrap();
        assert!(r.converged);
        let last = r.samples.last().unwrap();
        assert_eq!(last.step, r.steps);
        assert!(last.controls.is_none());
        assert!(r.samples[..r.samples.len() - 1].iter().all(|s| s.step % 100 == 0 && s.controls.is_some()));
    }

    #[test]
    fn argument_validation() {
        let (pack, t, p) = setup(TopologyKind::SeriesCc);
        let opts = SimOptions::default();
        assert!(simulate_until_balanced(&pack, &t, &p, &[0.5; 8], 0.0, 10, &opts).is_err());
        assert!(simulate_until_balanced(&pack, &t, &p, &[0.5; 8], 1e-3, 0, &opts).is_err());
        assert!(simulate_until_balanced(&pack, &t, &p, &[0.5; 7], 1e-3, 10, &opts).is_err());
    }

    #[test]
    fn max_steps_default() {
        assert_eq!(default_max_steps(Some(250.0), 1.0), 2500);
        assert_eq!(default_max_steps::<f64>(None, 1.0), FALLBACK_MAX_STEPS);
        assert_eq!(default_max_steps(Some(f64::INFINITY), 1.0), FALLBACK_MAX_STEPS);
    }
}
