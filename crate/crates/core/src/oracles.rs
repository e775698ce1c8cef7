//! Named test matrices and exhaustive oracles.
//!
//! The oracles run on `f64` through `nalgebra`, so they share no code with
//! the kernels they are used to check.

use itertools::Itertools;
use nalgebra::DMatrix;
use num_traits::{Float, One};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{RealScalar, Scalar};

/// Largest number of subsets an oracle will enumerate.
pub const MAX_SUBSETS: u128 = 1_000_000;
/// Relative singular value cutoff of the oracle pseudoinverse.
pub const ORACLE_RCOND: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Optimal subset, ascending.
    pub best_indices: Vec<usize>,
    /// Optimal objective: an error for minimisation oracles, a volume for
    /// [`max_volume_bruteforce`].
    pub best_value: f64,
    /// Number of subsets examined, `C(N, r)`.
    pub enumerated: u64,
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn to_dense(a: &Matrix<f64>) -> DMatrix<f64> {
    DMatrix::from_column_slice(a.rows(), a.cols(), a.as_slice())
}

fn guard(n: usize, r: usize) -> Result<()> {
    if r == 0 || r > n {
        return Err(Error::InvalidRank { rank: r, max: n });
    }
    let count = binomial(n, r);
    if count > MAX_SUBSETS {
        return Err(Error::TooLarge(format!(
            "C({n}, {r}) = {count} subsets exceeds {MAX_SUBSETS}"
        )));
    }
    Ok(())
}

/// `||A - C C^+ A||_F` with the pseudoinverse taken from a full SVD of `C`.
pub fn projector_error_oracle(a: &DMatrix<f64>, c: &DMatrix<f64>) -> f64 {
    let svd = c.clone().svd(true, false);
    let u = svd.u.expect("left vectors requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| smax > 0.0 && svd.singular_values[i] > ORACLE_RCOND * smax)
        .collect();
    let q = u.select_columns(&keep);
    let proj = &q * (q.transpose() * a);
    (a - proj).norm()
}

/// Exhaustive minimiser of `||A - C C^+ A||_F` over `r`-column subsets.
///
/// Subsets are visited in lexicographic order; the first optimum found wins.
pub fn best_columns_bruteforce(a: &Matrix<f64>, r: usize) -> Result<OracleResult> {
    guard(a.cols(), r)?;
    let d = to_dense(a);
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut count = 0u64;
    for subset in (0..a.cols()).combinations(r) {
        count += 1;
        let e = projector_error_oracle(&d, &d.select_columns(&subset));
        if best.as_ref().is_none_or(|(_, b)| e < *b) {
            best = Some((subset, e));
        }
    }
    let (best_indices, best_value) = best.expect("at least one subset");
    Ok(OracleResult {
        best_indices,
        best_value,
        enumerated: count,
    })
}

/// Exhaustive maximiser of `|det V_hat|` over `r x r` column submatrices of
/// the `r x N` matrix `V`.
pub fn max_volume_bruteforce(v: &Matrix<f64>, r: usize) -> Result<OracleResult> {
    if v.rows() != r {
        return Err(Error::DimensionMismatch(format!(
            "volume oracle needs {r} rows, got {}",
            v.rows()
        )));
    }
    guard(v.cols(), r)?;
    let d = to_dense(v);
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut count = 0u64;
    for subset in (0..v.cols()).combinations(r) {
        count += 1;
        let vol = d.select_columns(&subset).determinant().abs();
        if best.as_ref().is_none_or(|(_, b)| vol > *b) {
            best = Some((subset, vol));
        }
    }
    let (best_indices, best_value) = best.expect("at least one subset");
    Ok(OracleResult {
        best_indices,
        best_value,
        enumerated: count,
    })
}

/// `(r+1) x (r+1)` Kahan matrix `diag(1, s, .., s^r) * T` with `T` unit upper
/// triangular with `-c` above the diagonal, `s = sqrt(1 - c^2)`.
pub fn kahan_matrix<T: Scalar>(n: usize, c: f64) -> Result<Matrix<T>> {
    if n == 0 {
        return Err(Error::EmptyMatrix { rows: 0, cols: 0 });
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidParameter(format!("Kahan parameter c = {c} not in (0, 1)")));
    }
    let c = T::Real::lit(c);
    let s = (T::Real::one() - c * c).sqrt();
    Ok(Matrix::from_fn(n, n, |i, j| {
        let d = s.powi(i as i32);
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => T::from_real(d),
            std::cmp::Ordering::Less => T::from_real(-c * d),
            std::cmp::Ordering::Greater => T::zero(),
        }
    }))
}

/// The 5x4 matrix on which greedy column selection misses the best pair.
pub fn example_5x4<T: Scalar>(eps: f64) -> Matrix<T> {
    let e = 1.0 + eps;
    let rows = [
        [1.0, 1.0, 1.0, 0.0],
        [1.0, 1.0, e, 0.0],
        [1.0, 0.0, 0.0, e],
        [1.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 0.0, 1.0],
    ];
    Matrix::from_fn(5, 4, |i, j| T::from_f64(rows[i][j]))
}

/// All-ones `n x n` matrix with `1 + eps` in the top-left corner.
pub fn ones_plus_eps<T: Scalar>(n: usize, eps: f64) -> Matrix<T> {
    Matrix::from_fn(n, n, |i, j| {
        if i == 0 && j == 0 {
            T::from_f64(1.0 + eps)
        } else {
            T::one()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_small() {
        let k: Matrix<f64> = kahan_matrix(2, 0.6).unwrap();
        assert_eq!(k.row(0), vec![1.0, -0.6]);
        assert!((k[(1, 1)] - 0.8).abs() < 1e-15 && k[(1, 0)] == 0.0);
        assert!(kahan_matrix::<f64>(3, 1.0).is_err());
    }

    #[test]
    fn kahan_columns_have_unit_norm() {
        let k: Matrix<f64> = kahan_matrix(12, 0.8).unwrap();
        for n in k.col_norms_sq() {
            assert!((n - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(40, 20), 137_846_528_820);
        assert_eq!(binomial(3, 4), 0);
    }

    #[test]
    fn oracle_guards() {
        let a = Matrix::<f64>::zeros(3, 40);
        assert!(matches!(best_columns_bruteforce(&a, 20), Err(Error::TooLarge(_))));
        assert!(best_columns_bruteforce(&a, 0).is_err());
    }

    #[test]
    fn identity_volume() {
        let v = Matrix::from_rows(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let o = max_volume_bruteforce(&v, 2).unwrap();
        assert_eq!(o.best_indices, vec![1, 2]);
        assert!((o.best_value - 1.0).abs() < 1e-15);
        assert_eq!(o.enumerated, 3);
    }
}
