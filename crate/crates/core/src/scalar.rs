//! Scalar abstraction shared by every kernel.
//!
//! All algorithms are written against [`Scalar`], which covers real
//! (`f32`, `f64`) and complex (`Complex<f32>`, `Complex<f64>`) element types.
//! The associated [`Scalar::Real`] type carries norms, singular values and
//! tolerances.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::Neg;

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Field element usable by the dense kernels.
pub trait Scalar:
    Copy + Debug + Display + PartialEq + Send + Sync + NumAssign + Neg<Output = Self> + Sum + 'static
{
    /// Real type of moduli and norms.
    type Real: RealScalar;

    /// `true` for complex element types.
    const IS_COMPLEX: bool;

    fn from_real(x: Self::Real) -> Self;
    fn re(self) -> Self::Real;
    fn im(self) -> Self::Real;
    fn conj(self) -> Self;
    fn modulus(self) -> Self::Real;
    fn modulus_sq(self) -> Self::Real;
    /// `e^{i arg z}`; `1` for `z = 0` and `sign(z)` for reals.
    fn phase(self) -> Self;
    fn scale(self, r: Self::Real) -> Self;
    fn finite(self) -> bool;

    fn from_f64(x: f64) -> Self {
        Self::from_real(Self::Real::lit(x))
    }
}

/// Real element type: a [`Scalar`] that is its own real part.
pub trait RealScalar:
    Scalar<Real = Self> + Float + FromPrimitive + ToPrimitive + PartialOrd + Default
{
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self;

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance given in double precision units, rescaled to this type's
    /// machine epsilon. Returns `x` itself for `f64`.
    fn tol(x: f64) -> Self {
        Self::epsilon() * Self::lit(x / f64::EPSILON)
    }
}

macro_rules! real_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            type Real = $t;
            const IS_COMPLEX: bool = false;

            #[inline]
            fn from_real(x: $t) -> Self {
                x
            }
            #[inline]
            fn re(self) -> $t {
                self
            }
            #[inline]
            fn im(self) -> $t {
                0.0
            }
            #[inline]
            fn conj(self) -> Self {
                self
            }
            #[inline]
            fn modulus(self) -> $t {
                self.abs()
            }
            #[inline]
            fn modulus_sq(self) -> $t {
                self * self
            }
            #[inline]
            fn phase(self) -> Self {
                if self < 0.0 {
                    -1.0
                } else {
                    1.0
                }
            }
            #[inline]
            fn scale(self, r: $t) -> Self {
                self * r
            }
            #[inline]
            fn finite(self) -> bool {
                self.is_finite()
            }
        }

        impl RealScalar for $t {
            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }
        }
    };
}

macro_rules! complex_scalar {
    ($t:ty) => {
        impl Scalar for Complex<$t> {
            type Real = $t;
            const IS_COMPLEX: bool = true;

            #[inline]
            fn from_real(x: $t) -> Self {
                Complex::new(x, 0.0)
            }
            #[inline]
            fn re(self) -> $t {
                self.re
            }
            #[inline]
            fn im(self) -> $t {
                self.im
            }
            #[inline]
            fn conj(self) -> Self {
                Complex::new(self.re, -self.im)
            }
            #[inline]
            fn modulus(self) -> $t {
                self.re.hypot(self.im)
            }
            #[inline]
            fn modulus_sq(self) -> $t {
                self.re * self.re + self.im * self.im
            }
            #[inline]
            fn phase(self) -> Self {
                let m = self.re.hypot(self.im);
                if m == 0.0 {
                    Complex::new(1.0, 0.0)
                } else {
                    Complex::new(self.re / m, self.im / m)
                }
            }
            #[inline]
            fn scale(self, r: $t) -> Self {
                Complex::new(self.re * r, self.im * r)
            }
            #[inline]
            fn finite(self) -> bool {
                self.re.is_finite() && self.im.is_finite()
            }
        }
    };
}

real_scalar!(f32);
real_scalar!(f64);
complex_scalar!(f32);
complex_scalar!(f64);

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn phase_of_zero_is_one() {
        assert_eq!(0.0f64.phase(), 1.0);
        assert_eq!(Complex64::new(0.0, 0.0).phase(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn complex_phase_has_unit_modulus() {
        let z = Complex64::new(-3.0, 4.0);
        let p = z.phase();
        assert!((p.modulus() - 1.0).abs() < 1e-15);
        assert!((p.scale(5.0) - z).modulus() < 1e-14);
    }

    #[test]
    fn tolerance_rescales_with_epsilon() {
        assert!((f64::tol(1e-12) - 1e-12).abs() < 1e-27);
        let t32 = f32::tol(1e-12);
        assert!(t32 > 1e-6 && t32 < 1e-3);
    }
}
