//! Dense kernels: reflections, QR, SVD, norms, solves and least-squares projection.

pub mod householder;
pub mod norms;
pub mod qr;
pub mod solve;
pub mod svd;

pub use householder::{apply_reflector_rows, householder_from_column, Reflector};
pub use norms::{fro_norm, spectral_norm};
pub use qr::{householder_qr, orthonormal_complement, HouseholderQr, QrOptions};
pub use solve::{inverse, inverse_condition, lu, solve, solve_upper_triangular, Lu};
pub use svd::{singular_values, svd, truncated_svd, Svd, TruncatedSvd};

use num_traits::{Float, Zero};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{RealScalar, Scalar};

/// Frobenius and spectral norm of one residual.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NormPair<R> {
    pub fro: R,
    pub spec: R,
}

impl<T: Scalar> Matrix<T> {
    pub fn norms(&self) -> NormPair<T::Real> {
        NormPair {
            fro: self.fro_norm(),
            spec: spectral_norm(self),
        }
    }
}

fn projector_qr<T: Scalar>(a: &Matrix<T>, c: &Matrix<T>) -> Result<HouseholderQr<T>> {
    if c.rows() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "C has {} rows but A has {}",
            c.rows(),
            a.rows()
        )));
    }
    let mut opts = QrOptions::pivoted(c.cols());
    opts.rank_rtol = T::Real::epsilon() * T::Real::lit((4 * c.rows().max(c.cols())) as f64);
    Ok(householder_qr(c, opts))
}

/// `A - C C^+ A`, projecting onto the numerical column span of `C`.
pub fn orthogonal_projector_residual<T: Scalar>(a: &Matrix<T>, c: &Matrix<T>) -> Result<Matrix<T>> {
    let qr = projector_qr(a, c)?;
    let mut b = a.clone();
    qr.apply_qh(&mut b);
    for j in 0..b.cols() {
        for x in &mut b.col_mut(j)[..qr.rank()] {
            *x = T::zero();
        }
    }
    qr.apply_q(&mut b);
    Ok(b)
}

/// Norms of `A - C C^+ A`, read off the trailing rows of `Q^* A`.
///
/// Equal to the norms of [`orthogonal_projector_residual`] in exact
/// arithmetic, but free of the cancellation in `A - Q Q^* A`, which matters
/// when the residual is many orders of magnitude below `||A||`.
pub fn projection_error<T: Scalar>(a: &Matrix<T>, c: &Matrix<T>) -> Result<NormPair<T::Real>> {
    let qr = projector_qr(a, c)?;
    let mut b = a.clone();
    qr.apply_qh(&mut b);
    let k = qr.rank();
    if k == b.rows() {
        return Ok(NormPair {
            fro: T::Real::zero(),
            spec: T::Real::zero(),
        });
    }
    Ok(b.block(k, 0, b.rows() - k, b.cols()).norms())
}

/// `max |(V V^*)_{ij} - delta_ij|` for a matrix with (supposedly) orthonormal rows.
pub fn orthonormality_defect<T: Scalar>(v: &Matrix<T>) -> T::Real {
    let r = v.rows();
    let mut worst = T::Real::zero();
    for i in 0..r {
        for j in i..r {
            let mut g = T::zero();
            for c in 0..v.cols() {
                g += v[(i, c)] * v[(j, c)].conj();
            }
            if i == j {
                g -= T::one();
            }
            worst = worst.max(g.modulus());
        }
    }
    worst
}

/// Norms of `A - A R^+ R` for a row block `R`.
pub fn row_projection_error<T: Scalar>(a: &Matrix<T>, r: &Matrix<T>) -> Result<NormPair<T::Real>> {
    projection_error(&a.adjoint(), &r.adjoint())
}
