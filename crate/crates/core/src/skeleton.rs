//! Skeleton (CUR) approximations built from selected rows and columns.

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    cross_fro_factor, cross_spec_factor, projective_fro_factor, projective_spec_factor,
    spectral_skeleton_factor, BoundReport,
};
use crate::column_select::{select_columns_with, ColumnSelection};
use crate::error::{Error, Result};
use crate::linalg::{
    householder_qr, inverse_condition, projection_error, row_projection_error, singular_values,
    solve, svd, NormPair, QrOptions,
};
use crate::matrix::Matrix;
use crate::rrqr::{rrqr_select, RrqrParams};
use crate::scalar::{RealScalar, Scalar};
use crate::surrogate::{Surrogate, SurrogateFactors};

/// `sigma_min / sigma_max` below which `U_hat` or `A_hat` counts as singular.
pub const INVERTIBILITY_RCOND: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SkeletonMode {
    /// `C C^+ A R^+ R`.
    Projective,
    /// `C A_hat^{-1} R`.
    Cross,
}

#[derive(Debug, Clone)]
pub struct SkeletonSelection<T: Scalar> {
    pub row_indices: Vec<usize>,
    pub col_indices: Vec<usize>,
    pub mode: SkeletonMode,
    /// Norms of the reconstruction residual.
    pub err: NormPair<T::Real>,
    /// `||A - Z||` of the driving surrogate, if any.
    pub surrogate_err: Option<NormPair<T::Real>>,
    /// `rho` when the rows came from strong RRQR.
    pub rho: Option<f64>,
    /// `||C A_hat^{-1} R - C V_hat_Phi^{-1} V_Phi||_F` in cross mode.
    pub identity_gap: Option<T::Real>,
}

impl<T: Scalar> SkeletonSelection<T> {
    pub fn rank(&self) -> usize {
        self.row_indices.len()
    }
}

fn check_indices(idx: &[usize], bound: usize, what: &str) -> Result<()> {
    let mut seen = vec![false; bound];
    for &i in idx {
        if i >= bound || seen[i] {
            return Err(Error::DimensionMismatch(format!(
                "{what} index {i} is out of range or repeated (limit {bound})"
            )));
        }
        seen[i] = true;
    }
    Ok(())
}

fn rcond<T: Scalar>(m: &Matrix<T>) -> Result<T::Real> {
    inverse_condition(m)
}

/// `C A_hat^{-1} R`, failing with `SingularAhat` on an ill-conditioned core.
pub fn cross_reconstruction<T: Scalar>(
    a: &Matrix<T>,
    rows: &[usize],
    cols: &[usize],
) -> Result<Matrix<T>> {
    check_indices(rows, a.rows(), "row")?;
    check_indices(cols, a.cols(), "column")?;
    if rows.len() != cols.len() || rows.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "{} rows and {} columns do not form a square core",
            rows.len(),
            cols.len()
        )));
    }
    let ahat = a.select_rows(rows).select_columns(cols);
    let rc = rcond(&ahat)?;
    if !(rc > T::Real::tol(INVERTIBILITY_RCOND)) {
        return Err(Error::SingularAhat { rcond: rc.as_f64() });
    }
    let core_r = solve(&ahat, &a.select_rows(rows))?;
    a.select_columns(cols).matmul(&core_r)
}

/// Orthonormal basis (as columns) of the numerical range of `c`.
fn range_basis<T: Scalar>(c: &Matrix<T>) -> Matrix<T> {
    let mut opts = QrOptions::pivoted(c.cols());
    opts.rank_rtol = T::Real::epsilon() * T::Real::lit((4 * c.rows().max(c.cols())) as f64);
    let qr = householder_qr(c, opts);
    qr.q_columns(qr.rank())
}

/// `C C^+ A R^+ R`.
pub fn projective_reconstruction<T: Scalar>(
    a: &Matrix<T>,
    rows: &[usize],
    cols: &[usize],
) -> Result<Matrix<T>> {
    check_indices(rows, a.rows(), "row")?;
    check_indices(cols, a.cols(), "column")?;
    let qc = range_basis(&a.select_columns(cols));
    let qr = range_basis(&a.select_rows(rows).adjoint());
    let pca = qc.matmul(&qc.adjoint_matmul(a)?)?;
    pca.matmul(&qr)?.matmul(&qr.adjoint())
}

/// Skeleton for given indices; errors recomputed from scratch.
pub fn skeleton_from_indices<T: Scalar>(
    a: &Matrix<T>,
    rows: &[usize],
    cols: &[usize],
    mode: SkeletonMode,
) -> Result<SkeletonSelection<T>> {
    let recon = match mode {
        SkeletonMode::Cross => cross_reconstruction(a, rows, cols)?,
        SkeletonMode::Projective => projective_reconstruction(a, rows, cols)?,
    };
    Ok(SkeletonSelection {
        row_indices: rows.to_vec(),
        col_indices: cols.to_vec(),
        mode,
        err: a.sub(&recon)?.norms(),
        surrogate_err: None,
        rho: None,
        identity_gap: None,
    })
}

fn select_rows_with<T: Scalar>(a: &Matrix<T>, f: &SurrogateFactors<T>) -> Result<ColumnSelection<T>> {
    Ok(select_columns_with(&a.transpose(), &f.transposed()?)?.0)
}

/// Rows from the left factors of `Z`, columns from its right factors, and the
/// projective reconstruction `C C^+ A R^+ R`.
pub fn select_skeleton_projective<T: Scalar>(
    a: &Matrix<T>,
    surrogate: &Surrogate<T>,
    r: usize,
) -> Result<SkeletonSelection<T>> {
    let f = surrogate.factors(a, r)?;
    let (cols, _) = select_columns_with(a, &f)?;
    let rows = select_rows_with(a, &f)?;
    let mut sel = skeleton_from_indices(a, &rows.indices, &cols.indices, SkeletonMode::Projective)?;
    sel.surrogate_err = f.surrogate_err;
    Ok(sel)
}

/// `Phi = U U_hat^{-1} R`: the rank-r interpolant of `A` through the selected rows.
pub fn build_row_surrogate_phi<T: Scalar>(
    a: &Matrix<T>,
    u: &Matrix<T>,
    rows: &[usize],
) -> Result<Matrix<T>> {
    let (uhat_inv_r, _) = phi_core(a, u, rows)?;
    u.matmul(&uhat_inv_r)
}

/// `(U_hat^{-1} R, U_hat)` after the invertibility check.
fn phi_core<T: Scalar>(a: &Matrix<T>, u: &Matrix<T>, rows: &[usize]) -> Result<(Matrix<T>, Matrix<T>)> {
    check_indices(rows, a.rows(), "row")?;
    if u.rows() != a.rows() || u.cols() != rows.len() {
        return Err(Error::DimensionMismatch(format!(
            "U is {}x{}, expected {}x{}",
            u.rows(),
            u.cols(),
            a.rows(),
            rows.len()
        )));
    }
    let uhat = u.select_rows(rows);
    let rc = rcond(&uhat)?;
    if !(rc > T::Real::tol(INVERTIBILITY_RCOND)) {
        return Err(Error::SingularUhat { rcond: rc.as_f64() });
    }
    Ok((solve(&uhat, &a.select_rows(rows))?, uhat))
}

/// Columns chosen against the right singular rows of a row-interpolating
/// surrogate, plus the cross reconstruction and the weight identity check.
fn cross_from_rows<T: Scalar>(
    a: &Matrix<T>,
    rows: Vec<usize>,
    phi_factors: SurrogateFactors<T>,
) -> Result<SkeletonSelection<T>> {
    let (cols, _) = select_columns_with(a, &phi_factors)?;
    let col_indices = cols.indices;
    let recon = cross_reconstruction(a, &rows, &col_indices)?;
    let vphi = &phi_factors.v;
    let w = solve(&vphi.select_columns(&col_indices), vphi)?;
    let via_v = a.select_columns(&col_indices).matmul(&w)?;
    let gap = recon.sub(&via_v)?.fro_norm();
    Ok(SkeletonSelection {
        row_indices: rows,
        col_indices,
        mode: SkeletonMode::Cross,
        err: a.sub(&recon)?.norms(),
        surrogate_err: None,
        rho: None,
        identity_gap: Some(gap),
    })
}

/// Rows from the left factors of `Z`, then columns from the right singular
/// rows of `Phi = U U_hat^{-1} R`, reconstructed as `C A_hat^{-1} R`.
pub fn select_skeleton_cross<T: Scalar>(
    a: &Matrix<T>,
    surrogate: &Surrogate<T>,
    r: usize,
) -> Result<SkeletonSelection<T>> {
    let f = surrogate.factors(a, r)?;
    let rows = select_rows_with(a, &f)?.indices;
    let u = f.u.as_ref().expect("factors with left vectors");
    let (x, _) = phi_core(a, u, &rows)?;
    // U has orthonormal columns, so Phi = U X shares the right singular rows of X
    let sx = svd(&x)?;
    let t = sx.truncate(r);
    let phi = u.matmul(&t.u)?;
    let phi_full = {
        let mut us = phi.clone();
        for (j, &s) in t.sigma.iter().enumerate() {
            for e in us.col_mut(j) {
                *e = e.scale(s);
            }
        }
        us.matmul(&t.v)?
    };
    let factors = SurrogateFactors {
        u: Some(phi),
        v: t.v,
        tail: None,
        surrogate_err: Some(a.sub(&phi_full)?.norms()),
    };
    let mut sel = cross_from_rows(a, rows, factors)?;
    sel.surrogate_err = f.surrogate_err;
    Ok(sel)
}

/// Orthonormal rows spanning the rows of `r`.
fn row_space<T: Scalar>(rblock: &Matrix<T>) -> Result<Matrix<T>> {
    let k = rblock.rows();
    Ok(svd(rblock)?.truncate(k).v)
}

/// Strong RRQR picks the rows of the shorter dimension; the other index set
/// follows from column selection against the span of those rows.
pub fn select_skeleton_spectral<T: Scalar>(
    a: &Matrix<T>,
    r: usize,
    params: RrqrParams,
) -> Result<SkeletonSelection<T>> {
    let (m, n) = a.shape();
    if r == 0 || r > m.min(n) {
        return Err(Error::InvalidRank {
            rank: r,
            max: m.min(n),
        });
    }
    let mut sel = if m <= n {
        let rows = rrqr_select(&a.transpose(), r, params)?.indices;
        let factors = SurrogateFactors {
            u: None,
            v: row_space(&a.select_rows(&rows))?,
            tail: None,
            surrogate_err: None,
        };
        cross_from_rows(a, rows, factors)?
    } else {
        let at = a.transpose();
        let cols = rrqr_select(a, r, params)?.indices;
        let factors = SurrogateFactors {
            u: None,
            v: row_space(&at.select_rows(&cols))?,
            tail: None,
            surrogate_err: None,
        };
        let t = cross_from_rows(&at, cols, factors)?;
        SkeletonSelection {
            row_indices: t.col_indices,
            col_indices: t.row_indices,
            mode: SkeletonMode::Cross,
            err: t.err,
            surrogate_err: None,
            rho: None,
            identity_gap: t.identity_gap,
        }
    };
    sel.rho = Some(params.rho);
    Ok(sel)
}

/// `r + max(min(M, N - r), min(N, M - r))` when it exceeds `min(M, N)`.
///
/// The stated spectral factors use `min(M, N) - r` as the rank of the
/// residuals `A - A V^* V` and `A - U U^* A`, which only holds for `Z = A_r`
/// or square `A`; the `_rank` checks use the general rank bound instead.
fn rank_dim<T: Scalar>(a: &Matrix<T>, r: usize) -> Option<usize> {
    let (m, n) = a.shape();
    let q = m.min(n.saturating_sub(r)).max(n.min(m.saturating_sub(r))) + r;
    (q > m.min(n)).then_some(q)
}

/// Recomputes the residual of `sel` and checks it against every bound that
/// applies: the surrogate bounds when `surrogate_err` is known, the RRQR
/// bound (with `sigma_{r+1}` from a full SVD) when `rho` is set.
pub fn evaluate_skeleton<T: Scalar>(a: &Matrix<T>, sel: &SkeletonSelection<T>) -> Result<BoundReport> {
    let fresh = skeleton_from_indices(a, &sel.row_indices, &sel.col_indices, sel.mode)?;
    let r = sel.rank();
    let p = a.rows().min(a.cols());
    let scale = a.fro_norm().as_f64();
    let abs = 1e-10 * scale;
    let (ef, es) = (fresh.err.fro.as_f64(), fresh.err.spec.as_f64());
    let mut rep = BoundReport::default();
    rep.value("err_fro", ef);
    rep.value("err_spec", es);

    match sel.mode {
        SkeletonMode::Projective => {
            let c = a.select_columns(&sel.col_indices);
            let col = projection_error(a, &c)?.fro.as_f64();
            let row = row_projection_error(a, &a.select_rows(&sel.row_indices))?.fro.as_f64();
            rep.value("col_err_fro", col);
            rep.value("row_err_fro", row);
            rep.check("split_fro_sq", ef * ef, col * col + row * row, abs * (abs + 2.0 * ef));
            if let Some(z) = sel.surrogate_err {
                let (zf, zs) = (z.fro.as_f64(), z.spec.as_f64());
                rep.check("projective_fro", ef, projective_fro_factor(r) * zf, abs);
                rep.check("projective_spec", es, projective_spec_factor(r, p) * zs, abs);
                if let Some(q) = rank_dim(a, r) {
                    rep.check("projective_spec_rank", es, projective_spec_factor(r, q) * zs, abs);
                }
            }
        }
        SkeletonMode::Cross => {
            if let Some(z) = sel.surrogate_err {
                let (zf, zs) = (z.fro.as_f64(), z.spec.as_f64());
                rep.check("cross_fro", ef, cross_fro_factor(r) * zf, abs);
                rep.check("cross_spec", es, cross_spec_factor(r, p) * zs, abs);
                if let Some(q) = rank_dim(a, r) {
                    rep.check("cross_spec_rank", es, cross_spec_factor(r, q) * zs, abs);
                }
            }
            if let Some(gap) = sel.identity_gap {
                rep.check("cross_identity", gap.as_f64(), 1e-9 * scale, 0.0);
            }
            if let Some(rho) = sel.rho {
                let s = singular_values(a)?;
                let next = s.get(r).map_or(0.0, |x| x.as_f64());
                rep.value("sigma_next", next);
                rep.check("spectral_skeleton", es, spectral_skeleton_factor(r, p, rho) * next, abs);
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::truncated_svd;
    use crate::oracles::ones_plus_eps;

    fn sample() -> Matrix<f64> {
        Matrix::from_fn(7, 6, |i, j| {
            let x = (i * 7 + j * 3) as f64;
            (x * 0.37).sin() + if i == j { 2.0 } else { 0.0 }
        })
    }

    #[test]
    fn exact_rank_gives_zero_error() {
        let z = truncated_svd(&sample(), 2, None).unwrap().reconstruct();
        for sel in [
            select_skeleton_projective(&z, &Surrogate::BestRank, 2).unwrap(),
            select_skeleton_cross(&z, &Surrogate::BestRank, 2).unwrap(),
            select_skeleton_spectral(&z, 2, RrqrParams::default()).unwrap(),
        ] {
            assert!(sel.err.fro < 1e-10 * z.fro_norm(), "{:?}", sel.mode);
        }
    }

    #[test]
    fn phi_interpolates_rows() {
        let a = sample();
        let t = truncated_svd(&a, 3, None).unwrap();
        let rows = [0, 2, 5];
        let phi = build_row_surrogate_phi(&a, &t.u, &rows).unwrap();
        let diff = phi.select_rows(&rows).sub(&a.select_rows(&rows)).unwrap();
        assert!(diff.max_abs() < 1e-12);
        let bad = Matrix::from_rows(&[[1.0], [0.0], [0.0], [0.0], [0.0], [0.0], [0.0]]).unwrap();
        assert!(matches!(
            build_row_surrogate_phi(&a, &bad, &[3]),
            Err(Error::SingularUhat { .. })
        ));
    }

    #[test]
    fn ones_closed_forms() {
        let (n, eps) = (6usize, 1e-3);
        let a: Matrix<f64> = ones_plus_eps(n, eps);
        let e11 = skeleton_from_indices(&a, &[0], &[0], SkeletonMode::Cross).unwrap();
        let want = (n - 1) as f64 * (1.0 - 1.0 / (1.0 + eps));
        assert!((e11.err.spec - want).abs() < 1e-9 * want);
        let e22 = skeleton_from_indices(&a, &[1], &[1], SkeletonMode::Cross).unwrap();
        assert!((e22.err.spec - eps).abs() < 1e-9 * eps);
    }

    #[test]
    fn singular_core_is_reported() {
        let a = Matrix::from_rows(&[[0.0, 1.0], [1.0, 1.0]]).unwrap();
        assert!(matches!(
            skeleton_from_indices(&a, &[0], &[0], SkeletonMode::Cross),
            Err(Error::SingularAhat { .. })
        ));
    }

    #[test]
    fn evaluation_passes_on_sample() {
        let a = sample();
        let sel = select_skeleton_cross(&a, &Surrogate::BestRank, 2).unwrap();
        let rep = evaluate_skeleton(&a, &sel).unwrap();
        assert!(rep.all_passed(), "{:?}", rep);
        let sp = select_skeleton_spectral(&a, 2, RrqrParams::default()).unwrap();
        assert!(evaluate_skeleton(&a, &sp).unwrap().all_passed());
        let pr = select_skeleton_projective(&a, &Surrogate::BestRank, 2).unwrap();
        assert!(evaluate_skeleton(&a, &pr).unwrap().all_passed());
    }
}
