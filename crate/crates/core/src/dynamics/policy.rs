use crate::dynamics::model::excitation_peak;
use crate::dynamics::PackConfig;
use crate::error::{Error, Result};
use crate::hypergraph::Topology;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControlMode {
    /// `u_l = sgn(c_lᵀx) Ī_l`, softened near balance (see [`ClosedLoop`](crate::dynamics::ClosedLoop)).
    SignConstant,
    /// `u_l = k_l c_lᵀx`.
    Proportional,
}

/// Balancing control law with one magnitude (A) or gain (A per unit SOC)
/// per equalizer.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlPolicy<T> {
    mode: ControlMode,
    gains: Vec<T>,
}

impl<T: Real> ControlPolicy<T> {
    pub fn sign_constant(currents: Vec<T>) -> Result<Self> {
        check_nonnegative(&currents, "current magnitude")?;
        Ok(Self { mode: ControlMode::SignConstant, gains: currents })
    }

    /// Sign-constant law using each equalizer's own current limit.
    pub fn sign_constant_from(topology: &Topology) -> Self {
        let gains = topology.current_limits().into_iter().map(T::lit).collect();
        Self { mode: ControlMode::SignConstant, gains }
    }

    /// Proportional law, checked for stability against `pack` and `topology`:
    /// the largest eigenvalue of `D^½ C K Cᵀ D^½` must be below 1.
    pub fn proportional(gains: Vec<T>, pack: &PackConfig<T>, topology: &Topology) -> Result<Self> {
        check_nonnegative(&gains, "gain")?;
        if gains.len() != topology.edge_count() {
            return Err(Error::Dimension(format!("{} gains for {} equalizers", gains.len(), topology.edge_count())));
        }
        let peak = excitation_peak(pack, topology, Some(&gains))?;
        if peak >= T::one() {
            return Err(Error::InvalidPolicy(format!(
                "unstable gains: max eigenvalue of D^1/2 C K C^T D^1/2 is {peak}, must be < 1"
            )));
        }
        Ok(Self { mode: ControlMode::Proportional, gains })
    }

    pub fn uniform_proportional(gain: T, pack: &PackConfig<T>, topology: &Topology) -> Result<Self> {
        Self::proportional(vec![gain; topology.edge_count()], pack, topology)
    }

    pub fn mode(&self) -> ControlMode {
        self.mode
    }

    pub fn gains(&self) -> &[T] {
        &self.gains
    }

    /// Smallest feedback gain `k_s`; only meaningful for the proportional law.
    pub fn min_gain(&self) -> Result<T> {
        match self.mode {
            ControlMode::Proportional => Ok(self.gains.iter().copied().fold(T::infinity(), T::min)),
            ControlMode::SignConstant => {
                Err(Error::InvalidPolicy("the smallest feedback gain is defined for the proportional law only".into()))
            }
        }
    }
}

fn check_nonnegative<T: Real>(values: &[T], what: &str) -> Result<()> {
    match values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= T::zero())) {
        Some((l, v)) => Err(Error::InvalidPolicy(format!("{what} of e_{} is {v}; must be >= 0", l + 1))),
        None => Ok(()),
    }
}
