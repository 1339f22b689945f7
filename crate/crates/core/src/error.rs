use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("cell index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid hyperedge: {0}")]
    InvalidEdge(String),

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("operation requires a fixed incidence matrix; topology is switch-based")]
    SwitchedTopology,

    #[error("invalid pack configuration: {0}")]
    InvalidPack(String),

    #[error("invalid control policy: {0}")]
    InvalidPolicy(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("matrix is not symmetric (deviation {deviation:e})")]
    NotSymmetric { deviation: f64 },

    #[error("matrix is not positive semi-definite (eigenvalue {eigenvalue:e})")]
    NotPositiveSemidefinite { eigenvalue: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },

    #[error("the equalization cannot be achieved: rank(LDC) = {rank_ldc} < {required}")]
    Uncontrollable { rank_ldc: usize, required: usize },

    #[error("state already within tolerance")]
    AlreadyBalanced,

    #[error("equalization-time bound unavailable: {0}")]
    BoundUnavailable(String),

    #[error("invalid study: {0}")]
    InvalidStudy(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
