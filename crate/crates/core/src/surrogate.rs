//! Rank-r surrogates `Z` and the factors the selection drivers consume.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{orthonormality_defect, svd, NormPair, TruncatedSvd};
use crate::matrix::{stable_norm, Matrix};
use crate::scalar::{RealScalar, Scalar};

/// Relative cutoff below which `sigma_r(Z)` counts as zero.
pub const SURROGATE_RANK_RTOL: f64 = 1e-12;
/// Maximum tolerated `|V V^* - I|` for user supplied right rows.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// How the rank-r approximation `Z` of `A` is supplied.
#[derive(Debug, Clone)]
pub enum Surrogate<T: Scalar> {
    /// Explicit dense `M x N` matrix of rank `r`.
    Dense(Matrix<T>),
    /// `Z = U diag(sigma) V`.
    Factored(TruncatedSvd<T>),
    /// Only the orthonormal right rows `V` (`r x N`); `Z = A V^* V` implicitly.
    RightRows(Matrix<T>),
    /// The truncated SVD `A_r` of `A` itself.
    BestRank,
}

/// Factors of `Z` ready for the selection drivers.
#[derive(Debug, Clone)]
pub struct SurrogateFactors<T: Scalar> {
    /// Left singular vectors of `Z`, `M x r`, when known.
    pub u: Option<Matrix<T>>,
    /// Right singular rows of `Z`, `r x N`.
    pub v: Matrix<T>,
    /// `A - A_r` assembled from the discarded SVD triplets (only for
    /// [`Surrogate::BestRank`]); avoids cancellation in `A - A V^* V`.
    pub tail: Option<Matrix<T>>,
    /// `||A - Z||`, unknown for [`Surrogate::RightRows`].
    pub surrogate_err: Option<NormPair<T::Real>>,
}

fn check_rank<T: Scalar>(a: &Matrix<T>, r: usize) -> Result<()> {
    let p = a.rows().min(a.cols());
    if r == 0 || r > p {
        return Err(Error::InvalidRank { rank: r, max: p });
    }
    Ok(())
}

fn check_sigma<R: RealScalar>(sigma: &[R], r: usize) -> Result<()> {
    let s1 = sigma[0];
    let sr = sigma[r - 1];
    if s1 == R::zero() || sr < R::tol(SURROGATE_RANK_RTOL) * s1 {
        let ratio = if s1 == R::zero() { 0.0 } else { (sr / s1).as_f64() };
        return Err(Error::SurrogateRankTooLow { ratio });
    }
    Ok(())
}

pub(crate) fn check_orthonormal_rows<T: Scalar>(v: &Matrix<T>) -> Result<()> {
    let defect = orthonormality_defect(v);
    if !(defect <= T::Real::tol(ORTHONORMAL_TOL)) {
        return Err(Error::NonOrthonormalV {
            defect: defect.as_f64(),
        });
    }
    Ok(())
}

impl<T: Scalar> Surrogate<T> {
    /// Extracts the factors of `Z` for a rank-`r` selection on `A`.
    pub fn factors(&self, a: &Matrix<T>, r: usize) -> Result<SurrogateFactors<T>> {
        check_rank(a, r)?;
        match self {
            Surrogate::Dense(z) => {
                if z.shape() != a.shape() {
                    return Err(Error::DimensionMismatch(format!(
                        "surrogate is {}x{} but A is {}x{}",
                        z.rows(),
                        z.cols(),
                        a.rows(),
                        a.cols()
                    )));
                }
                z.check_finite()?;
                let full = svd(z)?;
                check_sigma(&full.sigma, r)?;
                if let Some(&next) = full.sigma.get(r) {
                    if next > T::Real::tol(1e-10) * full.sigma[0] {
                        return Err(Error::InvalidParameter(format!(
                            "surrogate has rank above {r} (sigma_{} / sigma_1 = {:e})",
                            r + 1,
                            (next / full.sigma[0]).as_f64()
                        )));
                    }
                }
                let t = full.truncate(r);
                Ok(SurrogateFactors {
                    u: Some(t.u),
                    v: t.v,
                    tail: None,
                    surrogate_err: Some(a.sub(z)?.norms()),
                })
            }
            Surrogate::Factored(t) => {
                if t.rank() != r || t.u.shape() != (a.rows(), r) || t.v.shape() != (r, a.cols()) {
                    return Err(Error::DimensionMismatch(format!(
                        "factored surrogate of rank {} ({}x{} and {}x{}) for rank {r} on {}x{}",
                        t.rank(),
                        t.u.rows(),
                        t.u.cols(),
                        t.v.rows(),
                        t.v.cols(),
                        a.rows(),
                        a.cols()
                    )));
                }
                let mut sorted = t.sigma.clone();
                sorted.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
                check_sigma(&sorted, r)?;
                check_orthonormal_rows(&t.v)?;
                check_orthonormal_rows(&t.u.adjoint())?;
                Ok(SurrogateFactors {
                    u: Some(t.u.clone()),
                    v: t.v.clone(),
                    tail: None,
                    surrogate_err: Some(a.sub(&t.reconstruct())?.norms()),
                })
            }
            Surrogate::RightRows(v) => {
                if v.shape() != (r, a.cols()) {
                    return Err(Error::DimensionMismatch(format!(
                        "V is {}x{}, expected {r}x{}",
                        v.rows(),
                        v.cols(),
                        a.cols()
                    )));
                }
                v.check_finite()?;
                check_orthonormal_rows(v)?;
                Ok(SurrogateFactors {
                    u: None,
                    v: v.clone(),
                    tail: None,
                    surrogate_err: None,
                })
            }
            Surrogate::BestRank => {
                let full = svd(a)?;
                check_sigma(&full.sigma, r)?;
                let rest = &full.sigma[r..];
                let err = NormPair {
                    fro: stable_norm(rest),
                    spec: rest.first().copied().unwrap_or_else(T::Real::zero),
                };
                let tail = full.tail(r);
                let t = full.truncate(r);
                Ok(SurrogateFactors {
                    u: Some(t.u),
                    v: t.v,
                    tail: Some(tail),
                    surrogate_err: Some(err),
                })
            }
        }
    }
}

impl<T: Scalar> SurrogateFactors<T> {
    pub fn rank(&self) -> usize {
        self.v.rows()
    }

    /// `A~ = A - A V^* V`.
    pub fn column_residual(&self, a: &Matrix<T>) -> Result<Matrix<T>> {
        if let Some(t) = &self.tail {
            return Ok(t.clone());
        }
        subtract_row_projection(a, &self.v)
    }

    /// Factors of `Z^T` for selecting rows of `A` as columns of `A^T`.
    pub fn transposed(&self) -> Result<SurrogateFactors<T>> {
        let u = self.u.as_ref().ok_or_else(|| {
            Error::InvalidParameter("row selection needs the left factors of the surrogate".into())
        })?;
        Ok(SurrogateFactors {
            u: Some(self.v.transpose()),
            v: u.transpose(),
            tail: self.tail.as_ref().map(Matrix::transpose),
            surrogate_err: self.surrogate_err,
        })
    }
}

/// `A - A V^* V` for `V` with orthonormal rows.
pub(crate) fn subtract_row_projection<T: Scalar>(a: &Matrix<T>, v: &Matrix<T>) -> Result<Matrix<T>> {
    let av = a.matmul(&v.adjoint())?;
    a.sub(&av.matmul(v)?)
}

/// Convenience: `A - Z` norms for an explicit `Z`.
pub fn surrogate_error<T: Scalar>(a: &Matrix<T>, z: &Matrix<T>) -> Result<NormPair<T::Real>> {
    Ok(a.sub(z)?.norms())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Matrix<f64> {
        Matrix::from_rows(&[
            [4.0, 1.0, 0.0, 2.0],
            [1.0, 3.0, 1.0, 0.0],
            [0.0, 1.0, 2.0, 1.0],
            [2.0, 0.0, 1.0, 5.0],
            [1.0, 1.0, 1.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn all_intakes_agree_on_v_span() {
        let a = sample();
        let best = Surrogate::BestRank.factors(&a, 2).unwrap();
        let t = crate::linalg::truncated_svd(&a, 2, None).unwrap();
        let z = t.reconstruct();
        let dense = Surrogate::Dense(z).factors(&a, 2).unwrap();
        let fact = Surrogate::Factored(t.clone()).factors(&a, 2).unwrap();
        let rows = Surrogate::RightRows(t.v.clone()).factors(&a, 2).unwrap();
        let r0 = best.column_residual(&a).unwrap();
        for f in [&dense, &fact, &rows] {
            let r = f.column_residual(&a).unwrap();
            assert!(r.sub(&r0).unwrap().fro_norm() < 1e-12);
        }
        let e = best.surrogate_err.unwrap();
        let d = dense.surrogate_err.unwrap();
        assert!((e.fro - d.fro).abs() < 1e-12 && (e.spec - d.spec).abs() < 1e-10);
        assert!(rows.surrogate_err.is_none());
    }

    #[test]
    fn rejects_bad_surrogates() {
        let a = sample();
        let z = Matrix::<f64>::zeros(5, 4);
        assert!(matches!(
            Surrogate::Dense(z).factors(&a, 1),
            Err(Error::SurrogateRankTooLow { .. })
        ));
        assert!(matches!(
            Surrogate::Dense(a.clone()).factors(&a, 2),
            Err(Error::InvalidParameter(_))
        ));
        let v = Matrix::from_rows(&[[1.0, 1.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(
            Surrogate::RightRows(v).factors(&a, 1),
            Err(Error::NonOrthonormalV { .. })
        ));
        assert!(matches!(
            Surrogate::<f64>::BestRank.factors(&a, 5),
            Err(Error::InvalidRank { .. })
        ));
        let rows = Surrogate::RightRows(Matrix::from_rows(&[[1.0, 0.0, 0.0, 0.0]]).unwrap())
            .factors(&a, 1)
            .unwrap();
        assert!(rows.transposed().is_err());
    }

    #[test]
    fn transposed_swaps_roles() {
        let a = sample();
        let f = Surrogate::BestRank.factors(&a, 2).unwrap();
        let t = f.transposed().unwrap();
        assert_eq!(t.v.shape(), (2, 5));
        let r = t.column_residual(&a.transpose()).unwrap();
        let direct = subtract_row_projection(&a.transpose(), &t.v).unwrap();
        assert!(r.sub(&direct).unwrap().fro_norm() < 1e-12);
    }

}
