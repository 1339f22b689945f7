//! Pack-level SOC dynamics under balancing control.

mod external;
mod model;
mod pack;
mod policy;

pub use external::ExternalCurrent;
pub use model::{Actuation, ClosedLoop};
pub use pack::{PackConfig, SocState};
pub use policy::{ControlMode, ControlPolicy};

use crate::error::{Error, Result};
use crate::hypergraph::Topology;
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Equalizer currents `u(k)` (amperes) for the given state.
pub fn control_step<T: Real>(
    policy: &ControlPolicy<T>,
    pack: &PackConfig<T>,
    topology: &Topology,
    state: &SocState<T>,
) -> Result<Vec<T>> {
    Ok(ClosedLoop::new(pack, topology, policy)?.control(&state.soc)?.currents)
}

/// Next SOC vector and whether clamping into `[0, 1]` occurred.
#[derive(Clone, Debug, PartialEq)]
pub struct StepResult<T> {
    pub soc: Vec<T>,
    pub clamped: bool,
}

/// One step of `x(k+1) = x(k) - D C u - D 1 I_s` for an explicit incidence
/// matrix `c` (already materialized for this step).
pub fn step<T: Real>(
    pack: &PackConfig<T>,
    c: &Matrix<T>,
    u: &[T],
    x: &[T],
    external_current: T,
) -> Result<StepResult<T>> {
    let n = pack.n();
    if c.nrows() != n || x.len() != n {
        return Err(Error::Dimension(format!(
            "pack of {n} cells, incidence with {} rows, state of length {}",
            c.nrows(),
            x.len()
        )));
    }
    let cu = c.mul_vec(u)?;
    let mut clamped = false;
    let soc = x
        .iter()
        .zip(pack.d_diag())
        .zip(cu)
        .map(|((&xi, di), ci)| {
            let v = xi - di * ci - di * external_current;
            let c = v.max(T::zero()).min(T::one());
            clamped |= c != v;
            c
        })
        .collect();
    if clamped {
        log::warn!("SOC clamped into [0, 1]");
    }
    Ok(StepResult { soc, clamped })
}

/// `(1/n) ||x - x̄||₂`, the imbalance measure used for convergence.
pub fn imbalance<T: Real>(soc: &[T]) -> Result<T> {
    if soc.is_empty() {
        return Err(Error::Dimension("empty SOC vector".into()));
    }
    Ok(imbalance_unchecked(soc))
}

pub(crate) fn imbalance_unchecked<T: Real>(soc: &[T]) -> T {
    let n = T::from_usize_lossy(soc.len());
    let mean = soc.iter().copied().sum::<T>() / n;
    soc.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>().sqrt() / n
}
