//! Hypergraph models of battery equalization systems: incidence matrices,
//! SOC dynamics, controllability and equalization-time analysis, and seeded
//! Monte Carlo comparison of topologies.
//!
//! The numerical core is generic over [`Real`] (`f32`/`f64`); incidence
//! weights are also available exactly as [`Weight`]/[`Exact`] rationals.
//! The aliases below fix the scalar to `f64` for everyday use.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod hypergraph;
pub mod linalg;
pub mod montecarlo;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Exact, IncidenceScalar, Real, Weight};

pub type Pack = dynamics::PackConfig<f64>;
pub type Policy = dynamics::ControlPolicy<f64>;
pub type State = dynamics::SocState<f64>;
pub type IncidenceMatrix = linalg::Matrix<f64>;
pub type ExactMatrix = linalg::Matrix<Exact>;
pub type Report = analysis::AnalysisReport<f64>;
pub type Run = analysis::SimRun<f64>;
