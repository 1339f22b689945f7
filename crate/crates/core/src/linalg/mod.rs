//! Small dense kernels: matrices, rank, symmetric eigenproblems, Laplacians.

mod eigen;
mod matrix;
mod rank;

pub use eigen::{
    eigen_symmetric, eigenvalues_symmetric, laplacian, largest_eigenvalue, psd_eigenvalues, second_smallest_eigenvalue,
    weighted_laplacian, SymmetricEigen, SymmetricMatrix,
};
pub use matrix::Matrix;
pub use rank::{default_rank_tolerance, rank, rank_default, rank_exact};
