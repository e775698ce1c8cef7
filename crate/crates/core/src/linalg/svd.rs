//! Singular value decomposition by one-sided Jacobi on a pivoted-QR
//! preconditioned triangular factor.
//!
//! For `M >= N` the input is first reduced to `A P = Q R` with column
//! pivoting; Jacobi rotations then orthogonalise the columns of `R^*`. The
//! preconditioning keeps graded matrices (Kahan-type, row- or column-scaled)
//! accurate in the small singular values. Wide inputs are handled through
//! the adjoint. The whole procedure is deterministic.

use super::qr::{householder_qr, orthonormal_complement, QrOptions};
use num_traits::{Float, One, Zero};
use crate::error::{Error, Result};
use crate::matrix::{dot, norm_sq, stable_norm, Matrix};
use crate::scalar::{RealScalar, Scalar};

const MAX_SWEEPS: usize = 80;

/// Thin SVD `A = U diag(sigma) V` with `p = min(M, N)` triplets.
///
/// `v` holds the right singular vectors as rows.
#[derive(Debug, Clone)]
pub struct Svd<T: Scalar> {
    pub u: Matrix<T>,
    pub sigma: Vec<T::Real>,
    pub v: Matrix<T>,
}

/// Leading `r` singular triplets of a matrix.
#[derive(Debug, Clone)]
pub struct TruncatedSvd<T: Scalar> {
    /// `M x r`, orthonormal columns.
    pub u: Matrix<T>,
    /// Nonincreasing, nonnegative.
    pub sigma: Vec<T::Real>,
    /// `r x N`, orthonormal rows.
    pub v: Matrix<T>,
}

impl<T: Scalar> TruncatedSvd<T> {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// `U diag(sigma) V`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let mut us = self.u.clone();
        for (j, &s) in self.sigma.iter().enumerate() {
            for x in us.col_mut(j) {
                *x = x.scale(s);
            }
        }
        us.matmul(&self.v).expect("factor shapes agree")
    }
}

impl<T: Scalar> Svd<T> {
    pub fn truncate(&self, r: usize) -> TruncatedSvd<T> {
        let r = r.min(self.sigma.len());
        TruncatedSvd {
            u: self.u.block(0, 0, self.u.rows(), r),
            sigma: self.sigma[..r].to_vec(),
            v: self.v.block(0, 0, r, self.v.cols()),
        }
    }

    /// `sum_{i > r} sigma_i u_i v_i`, i.e. `A - A_r`, built from the
    /// discarded triplets rather than by subtraction.
    pub fn tail(&self, r: usize) -> Matrix<T> {
        let (m, n) = (self.u.rows(), self.v.cols());
        let mut out = Matrix::zeros(m, n);
        for k in r..self.sigma.len() {
            let s = self.sigma[k];
            if s == T::Real::zero() {
                continue;
            }
            for j in 0..n {
                let c = self.v[(k, j)].scale(s);
                if c == T::zero() {
                    continue;
                }
                let uk = self.u.col(k);
                for (o, &u) in out.col_mut(j).iter_mut().zip(uk) {
                    *o += u * c;
                }
            }
        }
        out
    }
}

/// Full thin SVD.
pub fn svd<T: Scalar>(a: &Matrix<T>) -> Result<Svd<T>> {
    if a.rows() >= a.cols() {
        svd_tall(a)
    } else {
        let s = svd_tall(&a.adjoint())?;
        Ok(Svd {
            u: s.v.adjoint(),
            sigma: s.sigma,
            v: s.u.adjoint(),
        })
    }
}

/// Singular values only.
pub fn singular_values<T: Scalar>(a: &Matrix<T>) -> Result<Vec<T::Real>> {
    Ok(svd(a)?.sigma)
}

/// Leading `r` singular triplets.
///
/// With `rank_tol = Some(t)` the call fails with [`Error::RankDeficient`]
/// when `sigma_r < t * sigma_1`.
pub fn truncated_svd<T: Scalar>(
    a: &Matrix<T>,
    r: usize,
    rank_tol: Option<T::Real>,
) -> Result<TruncatedSvd<T>> {
    let p = a.rows().min(a.cols());
    if r == 0 || r > p {
        return Err(Error::InvalidRank { rank: r, max: p });
    }
    let full = svd(a)?;
    if let Some(tol) = rank_tol {
        let threshold = tol * full.sigma[0];
        if full.sigma[r - 1] < threshold || full.sigma[0] == T::Real::zero() {
            return Err(Error::RankDeficient {
                index: r,
                sigma: full.sigma[r - 1].as_f64(),
                threshold: threshold.as_f64(),
            });
        }
    }
    Ok(full.truncate(r))
}

fn svd_tall<T: Scalar>(a: &Matrix<T>) -> Result<Svd<T>> {
    let (m, n) = a.shape();
    let qr = householder_qr(a, QrOptions::pivoted(n));
    let k = qr.rank();
    let perm = qr.perm().to_vec();

    // X = R^*, n x k; X J = Y with orthogonal columns.
    let r = qr.r_factor();
    let mut y = r.adjoint();
    // trailing rows of R can decay into the subnormal range, where the
    // rotations lose all precision; below eps^2 ||A|| they are zeros
    let eps = T::Real::epsilon();
    let floor = eps * eps * y.fro_norm();
    for i in 0..k {
        if !(stable_norm(y.col(i)) > floor) {
            y.col_mut(i).fill(T::zero());
        }
    }
    let mut jac = Matrix::<T>::identity(k);
    one_sided_jacobi(&mut y, &mut jac)?;

    let mut sigma: Vec<T::Real> = (0..k).map(|i| stable_norm(y.col(i))).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap().then(i.cmp(&j)));
    sigma = order.iter().map(|&i| sigma[i]).collect();

    // Left vectors: Q [J; 0], right vectors: normalised columns of Y.
    let mut u = Matrix::zeros(m, n);
    for (c, &i) in order.iter().enumerate() {
        u.col_mut(c)[..k].copy_from_slice(jac.col(i));
    }
    let mut v = Matrix::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        let s = sigma[c];
        let inv = if s > T::Real::zero() {
            T::Real::one() / s
        } else {
            T::Real::zero()
        };
        for (row, &orig) in perm.iter().enumerate() {
            v[(c, orig)] = y[(row, i)].conj().scale(inv);
        }
    }

    // Zero singular values: complete both bases.
    let nz = sigma.iter().take_while(|&&s| s > T::Real::zero()).count();
    if nz < n {
        let mut basis = Matrix::zeros(n, nz);
        for c in 0..nz {
            for j in 0..n {
                basis[(j, c)] = v[(c, j)].conj();
            }
        }
        let comp = orthonormal_complement(&basis);
        for c in nz..n {
            for j in 0..n {
                v[(c, j)] = comp[(j, c - nz)].conj();
            }
        }
        // U columns from k on are Q e_k (orthogonal to range(Q[:, ..k])).
        for c in k..n {
            u[(c, c)] = T::one();
        }
        sigma.resize(n, T::Real::zero());
    }
    qr.apply_q(&mut u);
    sigma.truncate(n);
    Ok(Svd { u, sigma, v })
}

/// Orthogonalises the columns of `y` in place, accumulating the unitary
/// transformation into `jac` (`y_in * jac = y_out`).
fn one_sided_jacobi<T: Scalar>(y: &mut Matrix<T>, jac: &mut Matrix<T>) -> Result<()> {
    let k = y.cols();
    // dot products of m-vectors are only accurate to about sqrt(m) eps
    let eps = T::Real::epsilon() * T::Real::lit((y.rows() as f64).sqrt().max(1.0));
    let two = T::Real::lit(2.0);
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..k {
            for j in i + 1..k {
                let alpha = norm_sq(y.col(i));
                let beta = norm_sq(y.col(j));
                if alpha == T::Real::zero() || beta == T::Real::zero() {
                    continue;
                }
                let gamma = dot(y.col(i), y.col(j));
                let g = gamma.modulus();
                if g <= eps * (alpha.sqrt() * beta.sqrt()) {
                    continue;
                }
                rotated = true;
                let ph = gamma.phase().conj();
                let zeta = (beta - alpha) / (two * g);
                let t = if zeta >= T::Real::zero() {
                    T::Real::one() / (zeta + (T::Real::one() + zeta * zeta).sqrt())
                } else {
                    -T::Real::one() / (-zeta + (T::Real::one() + zeta * zeta).sqrt())
                };
                let c = T::Real::one() / (T::Real::one() + t * t).sqrt();
                let s = c * t;
                rotate(y, i, j, ph, c, s);
                rotate(jac, i, j, ph, c, s);
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    Err(Error::NonConvergence { sweeps: MAX_SWEEPS })
}

#[inline]
fn rotate<T: Scalar>(m: &mut Matrix<T>, i: usize, j: usize, ph: T, c: T::Real, s: T::Real) {
    for r in 0..m.rows() {
        let xi = m[(r, i)];
        let xj = m[(r, j)] * ph;
        m[(r, i)] = xi.scale(c) - xj.scale(s);
        m[(r, j)] = xi.scale(s) + xj.scale(c);
    }
}
