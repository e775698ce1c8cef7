use super::svd::singular_values;
use num_traits::{Float, One, Zero};
use crate::matrix::{stable_norm, Matrix};
use crate::scalar::{RealScalar, Scalar};

const POWER_MAX_ITERS: usize = 2000;

/// Frobenius norm.
pub fn fro_norm<T: Scalar>(a: &Matrix<T>) -> T::Real {
    a.fro_norm()
}

/// Spectral norm by power iteration on `A^* A`, started from the column of
/// largest norm; falls back to the SVD if the iteration stalls.
pub fn spectral_norm<T: Scalar>(a: &Matrix<T>) -> T::Real {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return T::Real::zero();
    }
    let norms = a.col_norms_sq();
    let (start, &best) = norms
        .iter()
        .enumerate()
        .fold((0, &norms[0]), |acc, (j, v)| if *v > *acc.1 { (j, v) } else { acc });
    if best == T::Real::zero() {
        return T::Real::zero();
    }
    if m == 1 || n == 1 {
        return a.fro_norm();
    }
    let tol = T::Real::tol(1e-12);

    // y_0 = A e_start, i.e. the largest column; iterate y <- A A^* y.
    let mut y: Vec<T> = a.col(start).to_vec();
    let mut ny = stable_norm(&y);
    for x in &mut y {
        *x = x.scale(T::Real::one() / ny);
    }
    let mut x = vec![T::zero(); n];
    for _ in 0..POWER_MAX_ITERS {
        // x = A^* y, sigma ~ ||x||
        for (j, xj) in x.iter_mut().enumerate() {
            *xj = crate::matrix::dot(a.col(j), &y);
        }
        let sigma = stable_norm(&x);
        if sigma == T::Real::zero() {
            break;
        }
        let mut z = vec![T::zero(); m];
        for (j, &xj) in x.iter().enumerate() {
            for (zi, &aij) in z.iter_mut().zip(a.col(j)) {
                *zi += aij * xj;
            }
        }
        // residual of the eigen-equation A A^* y = sigma^2 y
        let lambda = sigma * sigma;
        let res = stable_norm(
            &z.iter()
                .zip(&y)
                .map(|(&zi, &yi)| zi - yi.scale(lambda))
                .collect::<Vec<_>>(),
        );
        ny = stable_norm(&z);
        if res <= tol * lambda {
            return sigma.max(ny / sigma);
        }
        for (yi, &zi) in y.iter_mut().zip(&z) {
            *yi = zi.scale(T::Real::one() / ny);
        }
    }
    log::debug!("power iteration stalled on a {m}x{n} matrix; using SVD");
    singular_values(a)
        .map(|s| s[0])
        .unwrap_or_else(|_| a.fro_norm())
}
