//! Dense column-major matrix.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_traits::{Float, One, Zero};
use crate::error::{Error, Result};
use crate::scalar::{RealScalar, Scalar};

/// Dense `rows x cols` matrix stored column by column.
///
/// The checked constructors ([`Matrix::from_col_major`],
/// [`Matrix::from_row_major`], [`Matrix::from_rows`]) reject empty shapes and
/// non-finite entries. [`Matrix::zeros`] and the other internal builders
/// accept any shape so that intermediate results may be degenerate.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_col_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} values supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let m = Matrix { rows, cols, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_row_major(rows: usize, cols: usize, data: &[T]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} values supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let m = Self::from_fn(rows, cols, |i, j| data[i * cols + j]);
        Self::from_col_major(rows, cols, m.data)
    }

    /// Builds a matrix from a slice of equally long rows.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        if let Some(bad) = rows.iter().position(|r| r.as_ref().len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "row {bad} has {} entries, expected {n}",
                rows[bad].as_ref().len()
            )));
        }
        Self::from_col_major(m, n, Self::from_fn(m, n, |i, j| rows[i].as_ref()[j]).data)
    }

    /// Column vector from a slice.
    pub fn column_vector(v: &[T]) -> Self {
        Matrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|x| !x.finite()) {
            Some(p) => Err(Error::NonFinite {
                row: p % self.rows.max(1),
                col: p / self.rows.max(1),
            }),
            None => Ok(()),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        (0..self.cols).map(|j| self[(i, j)]).collect()
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let m = self.rows;
        let (head, tail) = self.data.split_at_mut(hi * m);
        head[lo * m..(lo + 1) * m].swap_with_slice(&mut tail[..m]);
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(j * self.rows + a, j * self.rows + b);
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scaled(&self, s: T) -> Self {
        self.map(|x| x * s)
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for &j in idx {
            data.extend_from_slice(self.col(j));
        }
        Matrix {
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |i, j| self[(idx[i], j)])
    }

    /// Contiguous block `[r0, r0 + nr) x [c0, c0 + nc)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            let oc = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for (p, &b) in rhs.col(j).iter().enumerate() {
                if b == T::zero() {
                    continue;
                }
                for (o, &a) in oc.iter_mut().zip(self.col(p)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self^H * rhs` without forming the adjoint.
    pub fn adjoint_matmul(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot form A^H B with A {}x{} and B {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self::from_fn(self.cols, rhs.cols, |i, j| {
            dot(self.col(i), rhs.col(j))
        }))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch(format!(
                "shapes {:?} and {:?} differ",
                self.shape(),
                rhs.shape()
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn col_norm_sq(&self, j: usize) -> T::Real {
        norm_sq(self.col(j))
    }

    pub fn col_norms_sq(&self) -> Vec<T::Real> {
        (0..self.cols).map(|j| self.col_norm_sq(j)).collect()
    }

    /// Frobenius norm, accumulated with scaling to avoid overflow.
    pub fn fro_norm(&self) -> T::Real {
        stable_norm(&self.data)
    }

    pub fn max_abs(&self) -> T::Real {
        self.data
            .iter()
            .fold(T::Real::zero(), |m, x| m.max(x.modulus()))
    }
}

/// `x^H y`.
#[inline]
pub fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter()
        .zip(y)
        .fold(T::zero(), |acc, (&a, &b)| acc + a.conj() * b)
}

#[inline]
pub fn norm_sq<T: Scalar>(x: &[T]) -> T::Real {
    x.iter().fold(T::Real::zero(), |acc, &a| acc + a.modulus_sq())
}

/// Euclidean norm with a scaled accumulation (LAPACK `nrm2` style).
pub fn stable_norm<T: Scalar>(x: &[T]) -> T::Real {
    let mut scale = T::Real::zero();
    let mut ssq = T::Real::one();
    let mut accumulate = |v: T::Real| {
        let a = v.abs();
        if a > T::Real::zero() {
            if scale < a {
                ssq = T::Real::one() + ssq * (scale / a) * (scale / a);
                scale = a;
            } else {
                ssq += (a / scale) * (a / scale);
            }
        }
    };
    for &v in x {
        accumulate(v.re());
        if T::IS_COMPLEX {
            accumulate(v.im());
        }
    }
    scale * ssq.sqrt()
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

impl<T: Scalar> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:>12.6} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<R: RealScalar> Matrix<R> {
    /// Lifts a real matrix into the complex field.
    pub fn to_complex(&self) -> Matrix<num_complex::Complex<R>>
    where
        num_complex::Complex<R>: Scalar<Real = R>,
    {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|&x| num_complex::Complex::new(x, R::zero()))
                .collect(),
        }
    }
}
