//! Symmetric eigenproblems by cyclic Jacobi rotations.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Dense symmetric matrix. Symmetry is checked and then enforced by averaging.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix<T> {
    inner: Matrix<T>,
}

impl<T: Real> SymmetricMatrix<T> {
    /// Accepts `a` if `|a_ij - a_ji| <= 1e-12 * max|a|` (or a few ulps for `f32`).
    pub fn new(a: Matrix<T>) -> Result<Self> {
        let (r, c) = a.shape();
        if r != c {
            return Err(Error::Dimension(format!("symmetric matrix must be square, got {r}x{c}")));
        }
        if !a.is_finite() {
            return Err(Error::NonFinite("symmetric matrix entry".into()));
        }
        let tol = symmetry_tolerance::<T>() * a.max_abs();
        let mut inner = a;
        for i in 0..r {
            for j in (i + 1)..r {
                let (x, y) = (inner[(i, j)], inner[(j, i)]);
                let dev = (x - y).abs();
                if dev > tol {
                    return Err(Error::NotSymmetric { deviation: dev.to_f64_lossy() });
                }
                let avg = (x + y) / T::lit(2.0);
                inner[(i, j)] = avg;
                inner[(j, i)] = avg;
            }
        }
        Ok(Self { inner })
    }

    pub fn order(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.inner
    }
}

fn symmetry_tolerance<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(16.0))
}

fn offdiag_tolerance<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(8.0))
}

/// Window below zero inside which eigenvalues of a PSD matrix are clamped to 0.
fn clamp_window<T: Real>(norm: T) -> T {
    T::lit(1e-10).max(T::epsilon() * T::lit(64.0) * norm)
}

/// Eigen-decomposition with eigenvalues sorted ascending.
#[derive(Clone, Debug)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    /// Column `k` is the unit eigenvector for `values[k]`, when requested.
    pub vectors: Option<Matrix<T>>,
}

/// Cyclic Jacobi. Stops when the off-diagonal Frobenius norm drops to
/// `1e-12 * ||A||_F`; gives up after 100 sweeps.
pub fn eigen_symmetric<T: Real>(a: &SymmetricMatrix<T>, want_vectors: bool) -> Result<SymmetricEigen<T>> {
    let n = a.order();
    let mut m = a.as_matrix().clone();
    let mut v = want_vectors.then(|| Matrix::<T>::identity(n));
    let threshold = offdiag_tolerance::<T>() * m.frobenius_norm();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_norm(&m) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut m, v.as_mut(), p, q);
            }
        }
    }
    if !converged && off_norm(&m) > threshold {
        return Err(Error::EigenNoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = v.map(|v| v.select_columns(&order));
    Ok(SymmetricEigen { values, vectors })
}

fn off_norm<T: Real>(m: &Matrix<T>) -> T {
    let n = m.nrows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)] * m[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Annihilates `m[p][q]` with one plane rotation (Rutishauser's formulation).
fn rotate<T: Real>(m: &mut Matrix<T>, v: Option<&mut Matrix<T>>, p: usize, q: usize) {
    let apq = m[(p, q)];
    if apq == T::zero() {
        return;
    }
    let n = m.nrows();
    let (app, aqq) = (m[(p, p)], m[(q, q)]);
    let theta = (aqq - app) / (T::lit(2.0) * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let tau = s / (T::one() + c);

    m[(p, p)] = app - t * apq;
    m[(q, q)] = aqq + t * apq;
    m[(p, q)] = T::zero();
    m[(q, p)] = T::zero();
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let (arp, arq) = (m[(r, p)], m[(r, q)]);
        let new_rp = arp - s * (arq + tau * arp);
        let new_rq = arq + s * (arp - tau * arq);
        m[(r, p)] = new_rp;
        m[(p, r)] = new_rp;
        m[(r, q)] = new_rq;
        m[(q, r)] = new_rq;
    }
    if let Some(v) = v {
        for r in 0..n {
            let (vrp, vrq) = (v[(r, p)], v[(r, q)]);
            v[(r, p)] = vrp - s * (vrq + tau * vrp);
            v[(r, q)] = vrq + s * (vrp - tau * vrq);
        }
    }
}

/// All eigenvalues, ascending. No clamping.
pub fn eigenvalues_symmetric<T: Real>(a: &SymmetricMatrix<T>) -> Result<Vec<T>> {
    Ok(eigen_symmetric(a, false)?.values)
}

/// Eigenvalues of a matrix known to be positive semi-definite. Values within
/// `-1e-10` of zero are clamped to 0; anything more negative is an error.
pub fn psd_eigenvalues<T: Real>(a: &SymmetricMatrix<T>) -> Result<Vec<T>> {
    let window = clamp_window(a.as_matrix().frobenius_norm());
    eigenvalues_symmetric(a)?
        .into_iter()
        .map(|l| {
            if l >= T::zero() {
                Ok(l)
            } else if l >= -window {
                Ok(T::zero())
            } else {
                Err(Error::NotPositiveSemidefinite { eigenvalue: l.to_f64_lossy() })
            }
        })
        .collect()
}

/// Second smallest eigenvalue of a Laplacian (algebraic connectivity).
///
/// Ascending index 1; what the descending convention calls `λ_{n-1}`.
pub fn second_smallest_eigenvalue<T: Real>(a: &SymmetricMatrix<T>) -> Result<T> {
    if a.order() < 2 {
        return Err(Error::Dimension(format!("second smallest eigenvalue needs order >= 2, got {}", a.order())));
    }
    Ok(psd_eigenvalues(a)?[1])
}

pub fn largest_eigenvalue<T: Real>(a: &SymmetricMatrix<T>) -> Result<T> {
    Ok(eigenvalues_symmetric(a)?.last().copied().unwrap_or_else(T::zero))
}

/// `C Cᵀ` for an `n x n_e` incidence matrix.
pub fn laplacian<T: Real>(c: &Matrix<T>) -> Result<SymmetricMatrix<T>> {
    weighted_laplacian(c, None)
}

/// `C K Cᵀ` with `K = diag(gains)`; `None` means unit gains.
pub fn weighted_laplacian<T: Real>(c: &Matrix<T>, gains: Option<&[T]>) -> Result<SymmetricMatrix<T>> {
    let (n, ne) = c.shape();
    if n == 0 {
        return Err(Error::Dimension("incidence matrix has no rows".into()));
    }
    if let Some(g) = gains {
        if g.len() != ne {
            return Err(Error::Dimension(format!("{} gains for {ne} columns", g.len())));
        }
    }
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut s = T::zero();
            for l in 0..ne {
                let k = gains.map_or(T::one(), |g| g[l]);
                s += c[(i, l)] * k * c[(j, l)];
            }
            out[(i, j)] = s;
            out[(j, i)] = s;
        }
    }
    SymmetricMatrix::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sym(rows: &[Vec<f64>]) -> SymmetricMatrix<f64> {
        SymmetricMatrix::new(Matrix::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn two_by_two_laplacian() {
        let l = sym(&[vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let ev = eigenvalues_symmetric(&l).unwrap();
        assert_abs_diff_eq!(ev[0], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[1], 2.0, epsilon = 1e-14);
    }

    #[test]
    fn identity_spectrum() {
        let i4 = SymmetricMatrix::new(Matrix::<f64>::identity(4)).unwrap();
        assert_eq!(eigenvalues_symmetric(&i4).unwrap(), vec![1.0; 4]);
    }

    #[test]
    fn rejects_asymmetric_and_non_square() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(SymmetricMatrix::new(a), Err(Error::NotSymmetric { .. })));
        let b = Matrix::<f64>::zeros(2, 3);
        assert!(matches!(SymmetricMatrix::new(b), Err(Error::Dimension(_))));
    }

    #[test]
    fn tiny_asymmetry_is_averaged() {
        let a = Matrix::from_rows(&[vec![2.0, 1.0 + 1e-15], vec![1.0, 2.0]]).unwrap();
        let s = SymmetricMatrix::new(a).unwrap();
        assert_eq!(s.as_matrix()[(0, 1)], s.as_matrix()[(1, 0)]);
    }

    #[test]
    fn reconstruction_residual() {
        let a = sym(&[
            vec![1.0, 2.0, 3.0, 4.0, 5.0],
            vec![2.0, 3.0, 0.0, 2.0, 4.0],
            vec![3.0, 0.0, 2.0, 1.0, 3.0],
            vec![4.0, 2.0, 1.0, 1.0, 2.0],
            vec![5.0, 4.0, 3.0, 2.0, 1.0],
        ]);
        let eig = eigen_symmetric(&a, true).unwrap();
        let v = eig.vectors.unwrap();
        let mut lam = Matrix::zeros(5, 5);
        for k in 0..5 {
            lam[(k, k)] = eig.values[k];
        }
        let rec = v.matmul(&lam).unwrap().matmul(&v.transpose()).unwrap();
        let mut diff = 0.0_f64;
        for i in 0..5 {
            for j in 0..5 {
                diff += (rec[(i, j)] - a.as_matrix()[(i, j)]).powi(2);
            }
        }
        assert!(diff.sqrt() <= 1e-8 * a.as_matrix().frobenius_norm());
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        assert_abs_diff_eq!(eig.values[0], -4.861158430649138, epsilon = 1e-12);
        assert_abs_diff_eq!(eig.values[4], 12.44545682971212, epsilon = 1e-12);
    }

    #[test]
    fn psd_clamp_and_rejection() {
        let l = sym(&[vec![1.0, -1.0], vec![-1.0, 1.0]]);
        assert!(psd_eigenvalues(&l).unwrap()[0] >= 0.0);
        let neg = sym(&[vec![-1.0, 0.0], vec![0.0, 1.0]]);
        assert!(matches!(psd_eigenvalues(&neg), Err(Error::NotPositiveSemidefinite { .. })));
    }

    #[test]
    fn second_smallest_requires_order_two() {
        let one = sym(&[vec![3.0]]);
        assert!(second_smallest_eigenvalue(&one).is_err());
    }

    #[test]
    fn laplacian_of_single_edge_and_zero_columns() {
        let c = Matrix::from_rows(&[vec![1.0], vec![-1.0]]).unwrap();
        assert_eq!(
            laplacian(&c).unwrap().as_matrix(),
            &Matrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap()
        );
        let z = Matrix::<f64>::zeros(3, 0);
        assert_eq!(laplacian(&z).unwrap().as_matrix(), &Matrix::zeros(3, 3));
        assert!(laplacian(&Matrix::<f64>::zeros(0, 2)).is_err());
    }

    #[test]
    fn works_in_f32() {
        let l = SymmetricMatrix::new(
            Matrix::from_rows(&[vec![2.0f32, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]]).unwrap(),
        )
        .unwrap();
        let ev = eigenvalues_symmetric(&l).unwrap();
        let expect = [2.0 - 2f32.sqrt(), 2.0, 2.0 + 2f32.sqrt()];
        for (a, b) in ev.iter().zip(expect) {
            assert!((a - b).abs() < 1e-5);
        }
    }
}
