//! Greedy search for a well-conditioned `r x r` submatrix of orthonormal rows.
//!
//! At step `k` the column minimising `(1 + l_j) / ||V_{k:r,j}||^2` joins the
//! selection, where `l_j = ||V_hat_1^{-1} V_{1,j}||^2` in the Householder
//! rotated frame. The matrix `X = V_hat_1^{-1} V_1` is carried along with a
//! rank-1 update per step, which keeps every `l_j` exact up to rounding.

use num_traits::{Float, One, Zero};
use serde::{Deserialize, Serialize};

use crate::bounds::{inverse_fro_sq_bound, inverse_spec_sq_bound, partial_inverse_bound, BoundReport};
use crate::error::{Error, Result};
use crate::linalg::{orthonormality_defect, singular_values, solve_upper_triangular, Reflector};
use crate::matrix::{norm_sq, Matrix};
use crate::scalar::{RealScalar, Scalar};

/// Above this orthonormality defect a warning is logged.
pub const WARN_DEFECT: f64 = 1e-10;
/// Above this orthonormality defect the input is rejected.
pub const MAX_DEFECT: f64 = 1e-8;
/// `X` and the trailing norms are rebuilt from scratch this often.
pub const REFRESH_PERIOD: usize = 64;
const DENOMINATOR_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmatrixSelection<R> {
    /// Selected columns in selection order.
    pub col_indices: Vec<usize>,
    /// `||V_hat^{-1}||_F`.
    pub inv_fro: R,
    /// `||V_hat^{-1}||_2`.
    pub inv_spec: R,
    /// `||V_hat^+||_F^2` after each step.
    pub trace: Vec<R>,
    /// `max |V V^* - I|` of the input.
    pub defect: R,
}

/// Accumulators after a step, exposed to instrumented runs.
#[derive(Debug)]
pub struct ScoreState<'a, T: Scalar> {
    /// Steps completed.
    pub k: usize,
    /// `l_j = ||V_hat_1^{-1} V_{1,j}||^2`, permuted like `v`.
    pub l: &'a [T::Real],
    /// Newly finalised row of the rotated `V` scaled by its diagonal entry.
    pub d: &'a [T],
    /// Rotated and permuted `V`.
    pub v: &'a Matrix<T>,
    /// `perm[j]`: original column now at position `j`.
    pub perm: &'a [usize],
}

fn validate<T: Scalar>(v: &Matrix<T>) -> Result<T::Real> {
    let (r, n) = v.shape();
    if r == 0 || n < r {
        return Err(Error::InvalidRank { rank: r, max: n });
    }
    v.check_finite()?;
    let defect = orthonormality_defect(v);
    if !(defect <= T::Real::tol(MAX_DEFECT)) {
        return Err(Error::NonOrthonormalV {
            defect: defect.as_f64(),
        });
    }
    if defect > T::Real::tol(WARN_DEFECT) {
        log::warn!(
            "rows are only approximately orthonormal (defect {:e}); bounds get extra slack",
            defect.as_f64()
        );
    }
    Ok(defect)
}

/// Selects `r` columns of `V` (`r x N`, orthonormal rows) whose square
/// submatrix has a small inverse.
pub fn select_submatrix<T: Scalar>(v: &Matrix<T>) -> Result<SubmatrixSelection<T::Real>> {
    select_submatrix_instrumented(v, |_| {})
}

/// [`select_submatrix`] calling `observe` after every step.
pub fn select_submatrix_instrumented<T: Scalar>(
    v_in: &Matrix<T>,
    mut observe: impl FnMut(&ScoreState<'_, T>),
) -> Result<SubmatrixSelection<T::Real>> {
    let defect = validate(v_in)?;
    let (r, n) = v_in.shape();
    let mut v = v_in.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut x = Matrix::<T>::zeros(r, n);
    let mut l = vec![T::Real::zero(); n];
    let mut den = v.col_norms_sq();
    let mut den_ref = den.clone();
    let drift = T::Real::epsilon().sqrt();
    let floor = T::Real::tol(DENOMINATOR_FLOOR);
    let mut mu = vec![T::zero(); n];
    let mut trace = Vec::with_capacity(r);
    let mut acc = T::Real::zero();

    for k in 0..r {
        if k > 0 && k % REFRESH_PERIOD == 0 {
            refresh(&v, k, &mut x, &mut l, &mut den)?;
            den_ref.copy_from_slice(&den);
        }
        let mut best: Option<(usize, T::Real)> = None;
        for j in k..n {
            if !(den[j] >= floor * floor) {
                continue;
            }
            let s = (T::Real::one() + l[j]) / den[j];
            if best.is_none_or(|(_, b)| s < b) {
                best = Some((j, s));
            }
        }
        let (p, score) = best.ok_or(Error::NoAdmissibleColumn { step: k })?;
        v.swap_cols(k, p);
        x.swap_cols(k, p);
        perm.swap(k, p);
        l.swap(k, p);
        den.swap(k, p);
        den_ref.swap(k, p);
        acc += score;
        trace.push(acc);

        let h = Reflector::from_slice(&v.col(k)[k..], k, T::Real::zero())
            .ok_or(Error::NoAdmissibleColumn { step: k })?;
        h.apply_from_col(&mut v, k);
        let pivot = v[(k, k)];

        // X <- [X - a mu^T; mu^T], a = old X_{:,k}, mu = V_{k,:} / V_kk
        let a: Vec<T> = (0..k).map(|i| x[(i, k)]).collect();
        for j in 0..n {
            mu[j] = if j < k { T::zero() } else { v[(k, j)] / pivot };
        }
        for j in k..n {
            let mut s = T::Real::zero();
            for (i, &ai) in a.iter().enumerate() {
                let e = x[(i, j)] - ai * mu[j];
                x[(i, j)] = e;
                s += e.modulus_sq();
            }
            x[(k, j)] = mu[j];
            l[j] = s + mu[j].modulus_sq();
        }
        for j in k + 1..n {
            let d = den[j] - v[(k, j)].modulus_sq();
            den[j] = if d <= drift * den_ref[j] {
                let fresh = norm_sq(&v.col(j)[k + 1..]);
                den_ref[j] = fresh;
                fresh
            } else {
                d
            };
        }
        observe(&ScoreState {
            k: k + 1,
            l: &l,
            d: &mu,
            v: &v,
            perm: &perm,
        });
    }

    let col_indices = perm[..r].to_vec();
    let (inv_fro, inv_spec) = inverse_norms(&v_in.select_columns(&col_indices))?;
    Ok(SubmatrixSelection {
        col_indices,
        inv_fro,
        inv_spec,
        trace,
        defect,
    })
}

/// Rebuilds `X = V_hat_1^{-1} V_1`, `l` and the trailing norms after `k` steps.
fn refresh<T: Scalar>(
    v: &Matrix<T>,
    k: usize,
    x: &mut Matrix<T>,
    l: &mut [T::Real],
    den: &mut [T::Real],
) -> Result<()> {
    let n = v.cols();
    let top = v.block(0, 0, k, n);
    let fresh = solve_upper_triangular(&top.block(0, 0, k, k), &top)?;
    for j in 0..n {
        for i in 0..k {
            x[(i, j)] = fresh[(i, j)];
        }
        l[j] = norm_sq(fresh.col(j));
        den[j] = norm_sq(&v.col(j)[k..]);
    }
    Ok(())
}

/// `(||S^{-1}||_F, ||S^{-1}||_2)` of a square matrix via its singular values.
fn inverse_norms<T: Scalar>(s: &Matrix<T>) -> Result<(T::Real, T::Real)> {
    let sv = singular_values(s)?;
    let max = sv[0];
    let min = *sv.last().expect("nonempty");
    if !(min > T::Real::tol(1e-13) * max) {
        let rcond = if max > T::Real::zero() { (min / max).as_f64() } else { 0.0 };
        return Err(Error::SingularSubmatrix { rcond });
    }
    let fro_sq = sv.iter().fold(T::Real::zero(), |acc, &x| acc + T::Real::one() / (x * x));
    Ok((fro_sq.sqrt(), T::Real::one() / min))
}

/// `||[V_hat V_j]^+||_F^2` for `V_hat = [V_hat_1; 0]` (`r x k`, `V_hat_1`
/// upper triangular) and a new column `V_j = [V_{1,j}; V_{2,j}]`:
///
/// `||V_hat_1^{-1}||_F^2 + (||V_hat_1^{-1} V_{1,j}||^2 + 1) / ||V_{2,j}||^2`.
pub fn pseudoinverse_extension_check<T: Scalar>(vhat: &Matrix<T>, vj: &[T]) -> Result<T::Real> {
    let (r, k) = vhat.shape();
    if vj.len() != r || k >= r {
        return Err(Error::DimensionMismatch(format!(
            "cannot extend a {r}x{k} block by a column of length {}",
            vj.len()
        )));
    }
    let tail = norm_sq(&vj[k..]);
    if !(tail.sqrt() >= T::Real::tol(DENOMINATOR_FLOOR)) {
        return Err(Error::ZeroTail {
            norm: tail.sqrt().as_f64(),
        });
    }
    if k == 0 {
        return Ok(T::Real::one() / tail);
    }
    let v1 = vhat.block(0, 0, k, k);
    let rhs = Matrix::column_vector(&vj[..k]);
    let mut cols = Matrix::identity(k).into_vec();
    cols.extend_from_slice(rhs.as_slice());
    let both = solve_upper_triangular(&v1, &Matrix::from_col_major(k, k + 1, cols)?)?;
    let inv_sq = norm_sq(&both.as_slice()[..k * k]);
    let proj = norm_sq(both.col(k));
    Ok(inv_sq + (proj + T::Real::one()) / tail)
}

/// Checks the achieved `||V_hat^{-1}||` against `r (N - r + 1)` and
/// `1 + r (N - r)` (squared norms).
pub fn verify_maxvol_bounds<T: Scalar>(v: &Matrix<T>, cols: &[usize]) -> Result<BoundReport> {
    let (r, n) = v.shape();
    if cols.len() != r || cols.iter().any(|&c| c >= n) {
        return Err(Error::DimensionMismatch(format!(
            "{} column indices for a {r}x{n} matrix",
            cols.len()
        )));
    }
    let defect = orthonormality_defect(v).as_f64();
    let (fro, spec) = inverse_norms(&v.select_columns(cols))?;
    let (fro, spec) = (fro.as_f64(), spec.as_f64());
    let rel = 1e-9_f64.max(100.0 * defect * n as f64);
    let mut rep = BoundReport::default();
    rep.value("inv_fro", fro);
    rep.value("inv_spec", spec);
    let fb = inverse_fro_sq_bound(r, n);
    let sb = inverse_spec_sq_bound(r, n);
    rep.check("inverse_fro_sq", fro * fro, fb, rel * fb);
    rep.check("inverse_spec_sq", spec * spec, sb, rel * sb + 1e-9 * (r * n) as f64);
    Ok(rep)
}

/// Per-step checks `||V_hat^+||_F^2 <= k (N - k + 1) / (r - k + 1)`.
pub fn verify_trace<R: RealScalar>(sel: &SubmatrixSelection<R>, n: usize) -> BoundReport {
    let r = sel.trace.len();
    let mut rep = BoundReport::default();
    for (i, &t) in sel.trace.iter().enumerate() {
        let b = partial_inverse_bound(i + 1, r, n);
        rep.check(format!("partial_inverse_{}", i + 1), t.as_f64(), b, 1e-9 * b);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padded_identity() {
        let v = Matrix::<f64>::from_fn(3, 5, |i, j| if i == j { 1.0 } else { 0.0 });
        let s = select_submatrix(&v).unwrap();
        let mut idx = s.col_indices.clone();
        idx.sort();
        assert_eq!(idx, vec![0, 1, 2]);
        assert!((s.inv_fro - 3f64.sqrt()).abs() < 1e-14);
        assert!((s.inv_spec - 1.0).abs() < 1e-14);
    }

    #[test]
    fn single_row_takes_largest_entry() {
        let v = Matrix::<f64>::from_rows(&[[0.5, -0.7, 0.1, 0.5]]).unwrap();
        let n = norm_sq(v.as_slice()).sqrt();
        let v = v.scaled(1.0 / n);
        let s = select_submatrix(&v).unwrap();
        assert_eq!(s.col_indices, vec![1]);
        assert!((s.inv_fro - n / 0.7).abs() < 1e-12);
    }

    #[test]
    fn extension_base_cases() {
        let e = Matrix::<f64>::zeros(3, 0);
        let x = pseudoinverse_extension_check(&e, &[0.0, 3.0, 4.0]).unwrap();
        assert!((x - 1.0 / 25.0).abs() < 1e-15);
        let i2 = Matrix::<f64>::from_fn(3, 2, |i, j| if i == j { 1.0 } else { 0.0 });
        let y = pseudoinverse_extension_check(&i2, &[0.0, 0.0, 1.0]).unwrap();
        assert!((y - 3.0).abs() < 1e-14);
        assert!(matches!(
            pseudoinverse_extension_check(&i2, &[1.0, 0.0, 0.0]),
            Err(Error::ZeroTail { .. })
        ));
    }

    #[test]
    fn rejects_non_orthonormal() {
        let v = Matrix::from_rows(&[[1.0, 1.0, 0.0]]).unwrap();
        assert!(matches!(select_submatrix(&v), Err(Error::NonOrthonormalV { .. })));
    }
}
