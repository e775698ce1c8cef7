//! Strong rank-revealing QR by local maximum volume column swaps.
//!
//! Greedy pivoted QR provides the starting set. Each round refactors the
//! columns as `[selected, rest]`, scores every exchange by the factor it
//! would multiply the leading `r x r` volume with,
//!
//! `|det'| / |det| = sqrt(|(R11^{-1} R12)_ij|^2 + (||R22_j|| ||e_i^T R11^{-1}||)^2)`,
//!
//! and performs the best exchange while that factor exceeds `rho`.

use num_traits::{Float, One};

use crate::error::{Error, Result};
use crate::linalg::{householder_qr, inverse, solve_upper_triangular, QrOptions};
use crate::matrix::{norm_sq, Matrix};
use crate::scalar::{RealScalar, Scalar};

/// Swap rounds before giving up (each accepted swap multiplies the volume
/// by more than `rho`, so this is never reached for `rho` well above 1).
pub const MAX_SWAPS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RrqrParams {
    pub rho: f64,
}

impl Default for RrqrParams {
    fn default() -> Self {
        RrqrParams { rho: 2.0 }
    }
}

impl RrqrParams {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho >= 1.0) || !rho.is_finite() {
            return Err(Error::InvalidParameter(format!("rho = {rho} must be >= 1")));
        }
        Ok(RrqrParams { rho })
    }
}

/// Result of [`rrqr_select`]: `A ~ Q R` with `Q` an orthonormal basis of the
/// selected columns and `R = Q^* A`.
#[derive(Debug, Clone)]
pub struct Rrqr<T: Scalar> {
    /// Selected columns, leading-block order.
    pub indices: Vec<usize>,
    /// `M x r`.
    pub q: Matrix<T>,
    /// `r x N`, columns in original order.
    pub r: Matrix<T>,
    /// Accepted exchanges.
    pub swaps: usize,
}

struct Blocks<T: Scalar> {
    r11: Matrix<T>,
    r12: Matrix<T>,
    tail_sq: Vec<T::Real>,
}

fn factor<T: Scalar>(a: &Matrix<T>, order: &[usize], r: usize) -> Blocks<T> {
    let qr = householder_qr(&a.select_columns(order), QrOptions::unpivoted(r));
    let red = qr.reduced();
    let n = order.len();
    let m = a.rows();
    Blocks {
        r11: red.block(0, 0, r, r),
        r12: red.block(0, r, r, n - r),
        tail_sq: (r..n).map(|j| norm_sq(&red.col(j)[r..m])).collect(),
    }
}

/// Largest single-exchange volume growth `(i, j, factor^2)` for the current
/// split, `i` indexing the selected block and `j` the rest. `None` when
/// `R11` is singular.
fn best_exchange<T: Scalar>(b: &Blocks<T>) -> Option<(usize, usize, T::Real)> {
    let r = b.r11.rows();
    if (0..r).any(|k| b.r11[(k, k)] == T::zero()) {
        return None;
    }
    let x = solve_upper_triangular(&b.r11, &b.r12).ok()?;
    let inv = inverse(&b.r11).ok()?;
    let omega: Vec<T::Real> = (0..r).map(|i| norm_sq(&inv.row(i))).collect();
    let mut best: Option<(usize, usize, T::Real)> = None;
    for j in 0..x.cols() {
        for i in 0..r {
            let g = x[(i, j)].modulus_sq() + b.tail_sq[j] * omega[i];
            if best.is_none_or(|(_, _, v)| g > v) {
                best = Some((i, j, g));
            }
        }
    }
    best
}

/// Strong rank-revealing column selection with threshold `rho`.
pub fn rrqr_select<T: Scalar>(a: &Matrix<T>, r: usize, params: RrqrParams) -> Result<Rrqr<T>> {
    let (m, n) = a.shape();
    if r == 0 || r > m.min(n) {
        return Err(Error::InvalidRank {
            rank: r,
            max: m.min(n),
        });
    }
    let params = RrqrParams::new(params.rho)?;
    let init = householder_qr(a, QrOptions::pivoted(r));
    let mut order = init.perm().to_vec();
    let threshold = {
        let rho = T::Real::lit(params.rho);
        rho * rho * (T::Real::one() + T::Real::tol(1e-12))
    };

    let mut swaps = 0;
    if r < n {
        while swaps < MAX_SWAPS {
            let b = factor(a, &order, r);
            match best_exchange(&b) {
                Some((i, j, g)) if g > threshold => {
                    order.swap(i, r + j);
                    swaps += 1;
                }
                _ => break,
            }
        }
        if swaps == MAX_SWAPS {
            log::warn!("rrqr stopped after {MAX_SWAPS} exchanges");
        }
    }

    let indices = order[..r].to_vec();
    let qr = householder_qr(&a.select_columns(&indices), QrOptions::unpivoted(r));
    let q = qr.q_columns(r);
    let rf = q.adjoint_matmul(a)?;
    Ok(Rrqr {
        indices,
        q,
        r: rf,
        swaps,
    })
}

/// Largest factor by which one exchange of a selected and an unselected
/// column would grow the leading volume; `None` if the selection is singular.
pub fn max_exchange_growth<T: Scalar>(a: &Matrix<T>, selected: &[usize]) -> Option<f64> {
    let r = selected.len();
    let mut order = selected.to_vec();
    order.extend((0..a.cols()).filter(|j| !selected.contains(j)));
    if r == a.cols() {
        return Some(1.0);
    }
    best_exchange(&factor(a, &order, r)).map(|(_, _, g)| g.sqrt().as_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::projection_error;
    use crate::oracles::kahan_matrix;

    #[test]
    fn orthogonal_columns_need_no_swaps() {
        let a = Matrix::from_rows(&[[3.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0]]).unwrap();
        let q = rrqr_select(&a, 2, RrqrParams::default()).unwrap();
        assert_eq!(q.swaps, 0);
        assert_eq!(q.indices, vec![0, 2]);
    }

    #[test]
    fn kahan_needs_swaps() {
        let a: Matrix<f64> = kahan_matrix(12, 0.8).unwrap();
        let q = rrqr_select(&a, 11, RrqrParams::default()).unwrap();
        assert!(q.swaps > 0);
        assert!(max_exchange_growth(&a, &q.indices).unwrap() <= 2.0 * (1.0 + 1e-9));
        let err = projection_error(&a, &a.select_columns(&q.indices)).unwrap().spec;
        let sigma = crate::linalg::singular_values(&a).unwrap();
        let bound = (1.0 + 4.0 * 11.0 * 1.0f64).sqrt() * sigma[11];
        assert!(err <= bound * (1.0 + 1e-8), "{err} > {bound}");
    }

    #[test]
    fn rejects_small_rho() {
        let a = Matrix::<f64>::identity(3);
        assert!(rrqr_select(&a, 1, RrqrParams { rho: 0.5 }).is_err());
    }
}
