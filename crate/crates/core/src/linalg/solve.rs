//! Square solves: LU with partial pivoting and triangular substitution.

use super::svd::singular_values;
use num_traits::Zero;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct Lu<T: Scalar> {
    lu: Matrix<T>,
    piv: Vec<usize>,
    swaps: usize,
}

/// `P A = L U`; fails with `SingularSubmatrix` on an exactly zero pivot.
pub fn lu<T: Scalar>(a: &Matrix<T>) -> Result<Lu<T>> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "LU needs a square matrix, got {}x{}",
            n,
            a.cols()
        )));
    }
    let mut lu = a.clone();
    let mut piv: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| {
                lu[(i, k)]
                    .modulus()
                    .partial_cmp(&lu[(j, k)].modulus())
                    .unwrap()
                    .then(j.cmp(&i))
            })
            .unwrap();
        if lu[(p, k)] == T::zero() {
            return Err(Error::SingularSubmatrix { rcond: 0.0 });
        }
        if p != k {
            lu.swap_rows(p, k);
            piv.swap(p, k);
            swaps += 1;
        }
        let d = lu[(k, k)];
        for i in k + 1..n {
            lu[(i, k)] /= d;
        }
        for j in k + 1..n {
            let u = lu[(k, j)];
            if u == T::zero() {
                continue;
            }
            for i in k + 1..n {
                let l = lu[(i, k)];
                lu[(i, j)] -= l * u;
            }
        }
    }
    Ok(Lu { lu, piv, swaps })
}

impl<T: Scalar> Lu<T> {
    pub fn solve(&self, b: &Matrix<T>) -> Result<Matrix<T>> {
        let n = self.lu.rows();
        if b.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has {} rows, expected {n}",
                b.rows()
            )));
        }
        let mut x = b.select_rows(&self.piv);
        for c in 0..x.cols() {
            let col = x.col_mut(c);
            for k in 0..n {
                let v = col[k];
                for i in k + 1..n {
                    col[i] -= self.lu[(i, k)] * v;
                }
            }
            for k in (0..n).rev() {
                col[k] /= self.lu[(k, k)];
                let v = col[k];
                for i in 0..k {
                    col[i] -= self.lu[(i, k)] * v;
                }
            }
        }
        Ok(x)
    }

    pub fn determinant(&self) -> T {
        let mut d = if self.swaps.is_multiple_of(2) { T::one() } else { -T::one() };
        for k in 0..self.lu.rows() {
            d *= self.lu[(k, k)];
        }
        d
    }
}

pub fn solve<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    lu(a)?.solve(b)
}

pub fn inverse<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    solve(a, &Matrix::identity(a.rows()))
}

/// `sigma_min / sigma_max`, zero for a zero matrix.
pub fn inverse_condition<T: Scalar>(a: &Matrix<T>) -> Result<T::Real> {
    let s = singular_values(a)?;
    let max = s[0];
    let min = *s.last().unwrap();
    Ok(if max == T::Real::zero() {
        T::Real::zero()
    } else {
        min / max
    })
}

/// Solves `U X = B` for upper triangular `U` (only the upper triangle is read).
pub fn solve_upper_triangular<T: Scalar>(u: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    let n = u.rows();
    if u.cols() != n || b.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "triangular solve with {}x{} system and {} right-hand rows",
            n,
            u.cols(),
            b.rows()
        )));
    }
    if (0..n).any(|k| u[(k, k)] == T::zero()) {
        return Err(Error::SingularSubmatrix { rcond: 0.0 });
    }
    let mut x = b.clone();
    for c in 0..x.cols() {
        let col = x.col_mut(c);
        for k in (0..n).rev() {
            col[k] /= u[(k, k)];
            let v = col[k];
            for i in 0..k {
                col[i] -= u[(i, k)] * v;
            }
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_and_determinant() {
        let a = Matrix::<f64>::from_rows(&[[0.0, 2.0, 1.0], [1.0, 1.0, 0.0], [3.0, 0.0, 1.0]]).unwrap();
        let f = lu(&a).unwrap();
        assert!((f.determinant() - (-5.0)).abs() < 1e-14);
        let x = inverse(&a).unwrap();
        let p = a.matmul(&x).unwrap();
        assert!(p.sub(&Matrix::identity(3)).unwrap().fro_norm() < 1e-14);
    }

    #[test]
    fn singular_is_detected() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(matches!(lu(&a), Err(Error::SingularSubmatrix { .. })));
        assert!(inverse_condition(&a).unwrap() < 1e-15);
    }

    #[test]
    fn upper_triangular() {
        let u = Matrix::from_rows(&[[2.0, 1.0], [0.0, 4.0]]).unwrap();
        let b = Matrix::from_rows(&[[4.0], [8.0]]).unwrap();
        let x = solve_upper_triangular(&u, &b).unwrap();
        assert_eq!(x.col(0), &[1.0, 2.0]);
    }
}
