//! Householder QR, optionally with greedy (largest residual norm) column pivoting.

use super::householder::Reflector;
use num_traits::{Float, One, Zero};
use crate::matrix::{norm_sq, Matrix};
use crate::scalar::{RealScalar, Scalar};

#[derive(Debug, Clone, Copy)]
pub struct QrOptions<R> {
    /// Pick the column of largest residual norm at every step.
    pub pivoting: bool,
    /// Upper bound on the number of eliminated columns.
    pub max_steps: usize,
    /// Stop pivoting once the largest residual column norm falls to
    /// `rank_rtol` times the initial largest column norm.
    pub rank_rtol: R,
    /// Residual norms within this relative distance of the maximum count as
    /// ties and resolve to the smallest column index.
    pub tie_rtol: R,
}

impl<R: RealScalar> QrOptions<R> {
    pub fn pivoted(max_steps: usize) -> Self {
        QrOptions {
            pivoting: true,
            max_steps,
            rank_rtol: R::zero(),
            tie_rtol: R::zero(),
        }
    }

    pub fn unpivoted(max_steps: usize) -> Self {
        QrOptions {
            pivoting: false,
            ..Self::pivoted(max_steps)
        }
    }
}

/// Partial QR factorisation `A P = Q [R11 R12; 0 R22]` after `rank()` steps.
#[derive(Debug, Clone)]
pub struct HouseholderQr<T: Scalar> {
    work: Matrix<T>,
    reflectors: Vec<Option<Reflector<T>>>,
    perm: Vec<usize>,
}

pub fn householder_qr<T: Scalar>(a: &Matrix<T>, opts: QrOptions<T::Real>) -> HouseholderQr<T> {
    let (m, n) = a.shape();
    let steps = opts.max_steps.min(m).min(n);
    let mut work = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut reflectors = Vec::with_capacity(steps);
    let mut first_max = None;

    for k in 0..steps {
        if opts.pivoting {
            let norms: Vec<T::Real> = (k..n)
                .map(|j| norm_sq(&work.col(j)[k..]).sqrt())
                .collect();
            let max = norms.iter().fold(T::Real::zero(), |a, &b| a.max(b));
            let first = *first_max.get_or_insert(max);
            if max == T::Real::zero() || max <= opts.rank_rtol * first {
                break;
            }
            let cutoff = max * (T::Real::one() - opts.tie_rtol);
            let p = k + norms.iter().position(|&x| x >= cutoff).unwrap_or(0);
            work.swap_cols(k, p);
            perm.swap(k, p);
        }
        let h = Reflector::from_slice(&work.col(k)[k..], k, T::Real::zero());
        if let Some(h) = &h {
            h.apply_from_col(&mut work, k);
            for x in &mut work.col_mut(k)[k + 1..] {
                *x = T::zero();
            }
        }
        reflectors.push(h);
    }

    HouseholderQr {
        work,
        reflectors,
        perm,
    }
}

impl<T: Scalar> HouseholderQr<T> {
    /// Number of eliminated columns.
    pub fn rank(&self) -> usize {
        self.reflectors.len()
    }

    /// `perm[k]` is the original index of the column in position `k`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// The reduced matrix `Q^* A P`; its leading `rank()` rows hold `[R11 R12]`.
    pub fn reduced(&self) -> &Matrix<T> {
        &self.work
    }

    /// `[R11 R12]`, `rank() x N`, columns in pivoted order.
    pub fn r_factor(&self) -> Matrix<T> {
        self.work.block(0, 0, self.rank(), self.work.cols())
    }

    /// Trailing block `R22` (rows and columns from `rank()` on).
    pub fn trailing(&self) -> Matrix<T> {
        let k = self.rank();
        let (m, n) = self.work.shape();
        self.work.block(k, k, m - k, n - k)
    }

    /// `B := Q^* B`.
    pub fn apply_qh(&self, b: &mut Matrix<T>) {
        for h in self.reflectors.iter().flatten() {
            h.apply_from_col(b, 0);
        }
    }

    /// `B := Q B`.
    pub fn apply_q(&self, b: &mut Matrix<T>) {
        for h in self.reflectors.iter().rev().flatten() {
            h.apply_from_col(b, 0);
        }
    }

    /// Leading `cols` columns of the full unitary factor.
    pub fn q_columns(&self, cols: usize) -> Matrix<T> {
        let m = self.work.rows();
        let mut q = Matrix::from_fn(m, cols, |i, j| if i == j { T::one() } else { T::zero() });
        self.apply_q(&mut q);
        q
    }
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal columns of `basis` (`n x k` input, `n x (n - k)` output).
pub fn orthonormal_complement<T: Scalar>(basis: &Matrix<T>) -> Matrix<T> {
    let (n, k) = basis.shape();
    let qr = householder_qr(basis, QrOptions::unpivoted(k));
    let mut e = Matrix::from_fn(n, n - k, |i, j| if i == j + k { T::one() } else { T::zero() });
    qr.apply_q(&mut e);
    e
}
