//! Column selection driven by the right singular rows of a rank-r surrogate.
//!
//! The driver keeps `A~ = A - A V^* V` and the rows `V`, and at step `k`
//! picks the column minimising `||A~_j|| / ||V_{k:r,j}||`, triangularises
//! `V` with a Householder reflection and removes the chosen column from the
//! residual by a rank-1 update. After `r` steps the residual equals `A - C W`
//! with `W = V_hat^{-1} V`.

use num_traits::{Float, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    householder_qr, projection_error, solve_upper_triangular, NormPair, QrOptions, Reflector,
};
use crate::matrix::{norm_sq, stable_norm, Matrix};
use crate::scalar::{RealScalar, Scalar};
use crate::surrogate::{check_orthonormal_rows, subtract_row_projection, Surrogate, SurrogateFactors};

/// Columns whose trailing `V` norm is below this are never picked.
pub const DENOMINATOR_FLOOR: f64 = 1e-14;
/// `|V_kk|` below this aborts with [`Error::PivotUnderflow`].
pub const PIVOT_FLOOR: f64 = 1e-14;
/// Trailing `V` norms are recomputed from scratch this often.
pub const RENORM_PERIOD: usize = 32;
/// Relative tie window of the pivoted-QR baseline.
pub const BASELINE_TIE_RTOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct ColumnSelection<T: Scalar> {
    /// Selected columns of `A` in selection order.
    pub indices: Vec<usize>,
    /// `W = V_hat^{-1} V`, `r x N`; row `i` belongs to `indices[i]`. `None`
    /// for the pivoted-QR baseline.
    pub weights: Option<Matrix<T>>,
    /// `||A - C W||`.
    pub err_cw: Option<NormPair<T::Real>>,
    /// `||A - C C^+ A||`.
    pub err_proj: NormPair<T::Real>,
    /// `||A - A V^* V||`, the best error attainable with rows in span(V).
    pub residual_err: Option<NormPair<T::Real>>,
    /// `||A - Z||` when `Z` is known.
    pub surrogate_err: Option<NormPair<T::Real>>,
}

impl<T: Scalar> ColumnSelection<T> {
    pub fn rank(&self) -> usize {
        self.indices.len()
    }

    /// Reference error of the bounds: `||A - Z||`, or `||A - A V^* V||`
    /// (which is not larger) when `Z` is implicit.
    pub fn reference_err(&self) -> Option<NormPair<T::Real>> {
        self.surrogate_err.or(self.residual_err)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep<R> {
    /// Original column index picked at this step.
    pub column: usize,
    /// `||A~_j|| / ||V_{k:r,j}||` of the winner.
    pub score: R,
    /// `||A~^{(k)}||_F` after the elimination.
    pub residual_fro: R,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace<R> {
    /// `||A~||_F` before the first step.
    pub initial_fro: R,
    pub steps: Vec<TraceStep<R>>,
}

impl<R: RealScalar> SelectionTrace<R> {
    /// Per-step `(achieved, bound)` for `||A~^{(k)}||_F^2 <= ||A~||_F^2 (1 + k/(r-k+1))`.
    pub fn growth_checks(&self) -> Vec<(R, R)> {
        let r = self.steps.len();
        let a0 = self.initial_fro * self.initial_fro;
        self.steps
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let k = i + 1;
                let factor = R::one() + R::lit(k as f64) / R::lit((r - k + 1) as f64);
                (s.residual_fro * s.residual_fro, a0 * factor)
            })
            .collect()
    }
}

/// `A~ = A - A V^* V` for orthonormal rows `V`.
pub fn residual_orthogonalize<T: Scalar>(a: &Matrix<T>, v: &Matrix<T>) -> Result<Matrix<T>> {
    if v.cols() != a.cols() || v.rows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "V is {}x{} but A has {} columns",
            v.rows(),
            v.cols(),
            a.cols()
        )));
    }
    check_orthonormal_rows(v)?;
    subtract_row_projection(a, v)
}

fn argmin_score<R: RealScalar>(num: &[R], den_sq: &[R], k: usize) -> Result<(usize, R)> {
    let floor = R::tol(DENOMINATOR_FLOOR);
    let floor_sq = floor * floor;
    let mut best: Option<(usize, R)> = None;
    for j in k..num.len() {
        if !(den_sq[j] >= floor_sq) {
            continue;
        }
        let s = num[j] / den_sq[j].sqrt();
        if best.is_none_or(|(_, b)| s < b) {
            best = Some((j, s));
        }
    }
    best.ok_or(Error::NoAdmissibleColumn { step: k })
}

/// `argmin_{j >= k} ||A~_j|| / ||V_{k:r,j}||` with ties to the smallest `j`.
pub fn pick_pivot<T: Scalar>(a_res: &Matrix<T>, v: &Matrix<T>, k: usize) -> Result<usize> {
    if v.cols() != a_res.cols() || k >= v.rows() {
        return Err(Error::DimensionMismatch(format!(
            "step {k} with V {}x{} and residual with {} columns",
            v.rows(),
            v.cols(),
            a_res.cols()
        )));
    }
    let n = v.cols();
    let num: Vec<T::Real> = (0..n).map(|j| stable_norm(a_res.col(j))).collect();
    let den: Vec<T::Real> = (0..n).map(|j| norm_sq(&v.col(j)[k..])).collect();
    argmin_score(&num, &den, k).map(|(j, _)| j)
}

fn eliminate<T: Scalar>(
    a_res: &mut Matrix<T>,
    v: &Matrix<T>,
    k: usize,
    num: &mut [T::Real],
) -> Result<T::Real> {
    let pivot = v[(k, k)];
    if !(pivot.modulus() >= T::Real::tol(PIVOT_FLOOR)) {
        return Err(Error::PivotUnderflow {
            step: k,
            value: pivot.modulus().as_f64(),
        });
    }
    let m = a_res.rows();
    let ak: Vec<T> = a_res.col(k).to_vec();
    for j in k + 1..a_res.cols() {
        let f = v[(k, j)] / pivot;
        if f != T::zero() {
            for (x, &y) in a_res.col_mut(j).iter_mut().zip(&ak) {
                *x -= y * f;
            }
        }
        num[j] = stable_norm(a_res.col(j));
    }
    a_res.col_mut(k).copy_from_slice(&vec![T::zero(); m]);
    num[k] = T::Real::zero();
    Ok(stable_norm(num))
}

/// Rank-1 elimination `A~ := A~ - A~_{:,k} V_{k,:} / V_kk`; returns `||A~||_F`.
///
/// Expects `V` already reflected at step `k`, so `V_{k,j} = 0` for `j < k`.
pub fn eliminate_step<T: Scalar>(a_res: &mut Matrix<T>, v: &Matrix<T>, k: usize) -> Result<T::Real> {
    if v.cols() != a_res.cols() || k >= v.rows() {
        return Err(Error::DimensionMismatch(format!(
            "step {k} with V {}x{} and residual with {} columns",
            v.rows(),
            v.cols(),
            a_res.cols()
        )));
    }
    let mut num: Vec<T::Real> = (0..a_res.cols()).map(|j| stable_norm(a_res.col(j))).collect();
    eliminate(a_res, v, k, &mut num)?;
    Ok(a_res.fro_norm())
}

/// Column selection with an explicit surrogate.
pub fn select_columns<T: Scalar>(
    a: &Matrix<T>,
    surrogate: &Surrogate<T>,
    r: usize,
) -> Result<(ColumnSelection<T>, SelectionTrace<T::Real>)> {
    let f = surrogate.factors(a, r)?;
    select_columns_with(a, &f)
}

/// Column selection on precomputed surrogate factors.
pub fn select_columns_with<T: Scalar>(
    a: &Matrix<T>,
    f: &SurrogateFactors<T>,
) -> Result<(ColumnSelection<T>, SelectionTrace<T::Real>)> {
    let (m, n) = a.shape();
    let r = f.rank();
    if r == 0 || r > m.min(n) {
        return Err(Error::InvalidRank {
            rank: r,
            max: m.min(n),
        });
    }
    if f.v.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "V has {} columns, A has {n}",
            f.v.cols()
        )));
    }

    let mut res = f.column_residual(a)?;
    let residual_err = res.norms();
    let mut v = f.v.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut num: Vec<T::Real> = (0..n).map(|j| stable_norm(res.col(j))).collect();
    let mut den: Vec<T::Real> = v.col_norms_sq();
    let mut den_ref = den.clone();
    let drift = T::Real::epsilon().sqrt();

    let mut trace = SelectionTrace {
        initial_fro: residual_err.fro,
        steps: Vec::with_capacity(r),
    };

    for k in 0..r {
        if k > 0 && k % RENORM_PERIOD == 0 {
            for j in k..n {
                den[j] = norm_sq(&v.col(j)[k..]);
            }
            den_ref.copy_from_slice(&den);
        }
        let (p, score) = argmin_score(&num, &den, k)?;
        res.swap_cols(k, p);
        v.swap_cols(k, p);
        perm.swap(k, p);
        num.swap(k, p);
        den.swap(k, p);
        den_ref.swap(k, p);

        let h = Reflector::from_slice(&v.col(k)[k..], k, T::Real::zero()).ok_or(
            Error::PivotUnderflow {
                step: k,
                value: 0.0,
            },
        )?;
        h.apply_from_col(&mut v, k);

        let fro = eliminate(&mut res, &v, k, &mut num)?;
        trace.steps.push(TraceStep {
            column: perm[k],
            score,
            residual_fro: fro,
        });

        // row k is final now; drop it from the trailing norms
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
    }

    let vhat = v.block(0, 0, r, r);
    let wp = solve_upper_triangular(&vhat, &v)?;
    let mut w = Matrix::zeros(r, n);
    for (j, &orig) in perm.iter().enumerate() {
        w.col_mut(orig).copy_from_slice(wp.col(j));
    }
    let indices = perm[..r].to_vec();
    let c = a.select_columns(&indices);
    let err_proj = projection_error(a, &c)?;
    let err_cw = res.norms();

    Ok((
        ColumnSelection {
            indices,
            weights: Some(w),
            err_cw: Some(err_cw),
            err_proj,
            residual_err: Some(residual_err),
            surrogate_err: f.surrogate_err,
        },
        trace,
    ))
}

/// Classic largest-residual-norm pivoted QR, kept as a comparison baseline.
///
/// Near-equal residual norms (within [`BASELINE_TIE_RTOL`]) go to the
/// smallest index.
pub fn greedy_pivoted_qr_baseline<T: Scalar>(a: &Matrix<T>, r: usize) -> Result<ColumnSelection<T>> {
    let p = a.rows().min(a.cols());
    if r == 0 || r > p {
        return Err(Error::InvalidRank { rank: r, max: p });
    }
    let mut opts = QrOptions::pivoted(r);
    opts.tie_rtol = T::Real::tol(BASELINE_TIE_RTOL);
    let qr = householder_qr(a, opts);
    let indices = qr.perm()[..r].to_vec();
    let err_proj = projection_error(a, &a.select_columns(&indices))?;
    Ok(ColumnSelection {
        indices,
        weights: None,
        err_cw: None,
        err_proj,
        residual_err: None,
        surrogate_err: None,
    })
}
