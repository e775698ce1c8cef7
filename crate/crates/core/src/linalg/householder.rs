//! Householder reflections `H = I - 2 v v^*` acting on a contiguous block of rows.

use num_traits::{Float, One, Zero};
use crate::error::{Error, Result};
use crate::matrix::{dot, stable_norm, Matrix};
use crate::scalar::Scalar;

/// Unit vector `v` and the first row `offset` on which `I - 2 v v^*` acts.
#[derive(Debug, Clone, PartialEq)]
pub struct Reflector<T: Scalar> {
    v: Vec<T>,
    offset: usize,
}

impl<T: Scalar> Reflector<T> {
    /// Reflector mapping `x` onto `-e^{i arg x_0} ||x|| e_1`.
    ///
    /// Returns `None` when `||x|| <= min_norm`.
    pub fn from_slice(x: &[T], offset: usize, min_norm: T::Real) -> Option<Self> {
        let alpha = stable_norm(x);
        if x.is_empty() || alpha <= min_norm || alpha == T::Real::zero() {
            return None;
        }
        let mut v = x.to_vec();
        v[0] += x[0].phase().scale(alpha);
        let nv = stable_norm(&v);
        let inv = T::Real::one() / nv;
        for e in &mut v {
            *e = e.scale(inv);
        }
        Some(Reflector { v, offset })
    }

    pub fn vector(&self) -> &[T] {
        &self.v
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// `x := (I - 2 v v^*) x` for a slice of exactly `len()` entries.
    #[inline]
    pub fn reflect(&self, x: &mut [T]) {
        debug_assert_eq!(x.len(), self.v.len());
        let w = dot(&self.v, x);
        let w2 = w + w;
        for (xi, &vi) in x.iter_mut().zip(&self.v) {
            *xi -= vi * w2;
        }
    }

    /// Applies the reflection to rows `offset..offset+len` of columns `from..` of `b`.
    pub fn apply_from_col(&self, b: &mut Matrix<T>, from: usize) {
        let end = self.offset + self.v.len();
        for j in from..b.cols() {
            self.reflect(&mut b.col_mut(j)[self.offset..end]);
        }
    }
}

/// Reflector built from rows `k..` of column `k`, annihilating entries
/// `(k+1.., k)` and leaving `-e^{i arg v_1} ||v||` on the diagonal.
pub fn householder_from_column<T: Scalar>(a: &Matrix<T>, k: usize) -> Result<Reflector<T>> {
    if k >= a.rows() || k >= a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "column {k} outside {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    Reflector::from_slice(&a.col(k)[k..], k, T::Real::epsilon())
        .ok_or(Error::ZeroColumn { row: k, col: k })
}

/// In-place `B[offset..offset+len, :] := (I - 2 v v^*) B[offset..offset+len, :]`.
pub fn apply_reflector_rows<T: Scalar>(h: &Reflector<T>, b: &mut Matrix<T>) -> Result<()> {
    if h.offset + h.len() > b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "reflector on rows {}..{} does not fit a {}-row matrix",
            h.offset,
            h.offset + h.len(),
            b.rows()
        )));
    }
    h.apply_from_col(b, 0);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn aligned_column_flips_sign() {
        let mut a = Matrix::from_rows(&[[1.0], [0.0], [0.0]]).unwrap();
        let h = householder_from_column(&a, 0).unwrap();
        apply_reflector_rows(&h, &mut a).unwrap();
        assert!((a[(0, 0)] + 1.0).abs() < 1e-15);
        assert!(a[(1, 0)].abs() < 1e-15 && a[(2, 0)].abs() < 1e-15);
    }

    #[test]
    fn three_four_five() {
        let mut a = Matrix::<f64>::from_rows(&[[3.0], [4.0]]).unwrap();
        let h = householder_from_column(&a, 0).unwrap();
        assert!((stable_norm(h.vector()) - 1.0).abs() < 1e-14);
        apply_reflector_rows(&h, &mut a).unwrap();
        assert!((a[(0, 0)].abs() - 5.0).abs() < 1e-14);
        assert!((a[(0, 0)] + 5.0).abs() < 1e-14);
        assert!(a[(1, 0)].abs() < 1e-14);
    }

    #[test]
    fn complex_diagonal_carries_negative_phase() {
        let x = [Complex64::new(0.0, 2.0), Complex64::new(1.0, -1.0)];
        let mut a = Matrix::from_col_major(2, 1, x.to_vec()).unwrap();
        let h = householder_from_column(&a, 0).unwrap();
        apply_reflector_rows(&h, &mut a).unwrap();
        let expected = -Complex64::new(0.0, 1.0) * 6f64.sqrt();
        assert!((a[(0, 0)] - expected).modulus() < 1e-14);
        assert!(a[(1, 0)].modulus() < 1e-14);
    }

    #[test]
    fn offset_leaves_other_rows() {
        let a = Matrix::from_rows(&[[7.0, 1.0], [1.0, 2.0], [2.0, 3.0]]).unwrap();
        let h = householder_from_column(&a, 1).unwrap();
        assert_eq!(h.offset(), 1);
        let mut b = a.clone();
        apply_reflector_rows(&h, &mut b).unwrap();
        assert_eq!(b.row(0), a.row(0));
        assert!(b[(2, 1)].abs() < 1e-14);
    }

    #[test]
    fn zero_column_and_bad_dims_are_rejected() {
        let a = Matrix::from_rows(&[[1.0, 0.0], [1.0, 0.0]]).unwrap();
        assert_eq!(
            householder_from_column(&a, 1),
            Err(Error::ZeroColumn { row: 1, col: 1 })
        );
        let h = householder_from_column(&Matrix::<f64>::identity(3), 0).unwrap();
        let mut small = Matrix::<f64>::zeros(2, 2);
        assert!(apply_reflector_rows(&h, &mut small).is_err());
    }
}
