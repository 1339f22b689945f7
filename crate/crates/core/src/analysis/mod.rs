//! Rank-based controllability, equalization-time measurement and the
//! spectral bound on it.

mod bound;
mod controllability;
mod report;
mod simulate;

pub use bound::{te_upper_bound, te_upper_bound_for_policy};
pub use controllability::{controllability, difference_matrix, Controllability, Verdict};
pub use report::{analyze, AnalysisReport, BoundRequest};
pub(crate) use simulate::run;
pub use simulate::{default_max_steps, simulate_until_balanced, Sample, SimOptions, SimRun, FALLBACK_MAX_STEPS};

use crate::error::Result;
use crate::hypergraph::Topology;
use crate::linalg::{laplacian, second_smallest_eigenvalue};
use crate::scalar::Real;

/// `λ₂(CCᵀ)`. Switched topologies use their template column, which gives 0
/// for `n >= 3`.
pub fn algebraic_connectivity<T: Real>(topology: &Topology) -> Result<T> {
    second_smallest_eigenvalue(&laplacian(&topology.template_matrix::<T>()?)?)
}
