//! Matrix rank, numerically (complete-pivoting elimination) and exactly.

use num_traits::{Signed, Zero};

use crate::linalg::Matrix;
use crate::scalar::{Exact, Real};

/// `max(rows, cols) * eps * 64`.
pub fn default_rank_tolerance<T: Real>(rows: usize, cols: usize) -> T {
    T::from_usize_lossy(rows.max(cols).max(1)) * T::epsilon() * T::lit(64.0)
}

/// Number of elimination pivots exceeding `rel_tol` times the largest entry.
///
/// Gaussian elimination with complete pivoting; for the small, well-scaled
/// incidence matrices handled here the pivot magnitudes separate cleanly
/// into "structural" and "numerical zero".
pub fn rank<T: Real>(m: &Matrix<T>, rel_tol: T) -> usize {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let scale = a.max_abs();
    if scale == T::zero() || !scale.is_finite() {
        return 0;
    }
    let threshold = rel_tol * scale;
    let mut row_perm: Vec<usize> = (0..rows).collect();
    let mut col_perm: Vec<usize> = (0..cols).collect();
    let mut r = 0;
    while r < rows.min(cols) {
        let mut best = (r, r, T::zero());
        for i in r..rows {
            for j in r..cols {
                let v = a[(row_perm[i], col_perm[j])].abs();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 <= threshold {
            break;
        }
        row_perm.swap(r, best.0);
        col_perm.swap(r, best.1);
        let (pr, pc) = (row_perm[r], col_perm[r]);
        let pivot = a[(pr, pc)];
        for &ri in &row_perm[r + 1..] {
            let f = a[(ri, pc)] / pivot;
            if f == T::zero() {
                continue;
            }
            for &cj in &col_perm[r..] {
                let v = a[(ri, cj)] - f * a[(pr, cj)];
                a[(ri, cj)] = v;
            }
        }
        r += 1;
    }
    r
}

/// Rank with the default tolerance.
pub fn rank_default<T: Real>(m: &Matrix<T>) -> usize {
    rank(m, default_rank_tolerance(m.nrows(), m.ncols()))
}

/// Exact rank over the rationals.
pub fn rank_exact(m: &Matrix<Exact>) -> usize {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                let tmp = a[(p, j)].clone();
                a[(p, j)] = a[(r, j)].clone();
                a[(r, j)] = tmp;
            }
        }
        let pivot = a[(r, c)].clone();
        for i in (r + 1)..rows {
            if a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone() / pivot.clone();
            for j in c..cols {
                let v = a[(i, j)].clone() - f.clone() * a[(r, j)].clone();
                a[(i, j)] = v;
            }
        }
        debug_assert!(!a[(r, c)].abs().is_zero());
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::IncidenceScalar;

    #[test]
    fn zero_matrix_has_rank_zero() {
        assert_eq!(rank_default(&Matrix::<f64>::zeros(3, 3)), 0);
        assert_eq!(rank_exact(&Matrix::<Exact>::zeros(3, 3)), 0);
    }

    #[test]
    fn rank_of_dependent_rows() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![1.0, 0.0, 1.0]]).unwrap();
        assert_eq!(rank_default(&m), 2);
        let e = m.map(|&v| Exact::from_weight(crate::scalar::Weight::from_integer(v as i64)));
        assert_eq!(rank_exact(&e), 2);
    }

    #[test]
    fn tolerance_cuts_tiny_pivots() {
        let m = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1e-14]]).unwrap();
        assert_eq!(rank_default(&m), 1);
        assert_eq!(rank(&m, 1e-16), 2);
    }

    #[test]
    fn wide_and_tall() {
        let wide = Matrix::from_rows(&[vec![1.0, -1.0, 0.0, 0.0]]).unwrap();
        assert_eq!(rank_default(&wide), 1);
        assert_eq!(rank_default(&wide.transpose()), 1);
    }
}
