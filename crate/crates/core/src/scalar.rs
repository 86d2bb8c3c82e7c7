//! Scalar abstraction shared by every solver in the crate.
//!
//! All numerics are written against [`Real`], which is implemented for `f32`
//! and `f64`. Complex amplitudes are `Complex<T>`; their modulus and phase are
//! taken through nalgebra's `ComplexField` so that no `Float` bound is needed.

use std::fmt;

use nalgebra::{ComplexField, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar type (`f32` or `f64`).
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Default + Send + Sync + fmt::Debug + fmt::Display
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal must be representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize must be representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Absolute value (disambiguates `Signed::abs` from `ComplexField::abs`).
    #[inline]
    fn mag(self) -> Self {
        <Self as ComplexField>::abs(self)
    }

    /// Machine epsilon of the concrete type.
    fn eps() -> Self;
}

impl Real for f32 {
    fn eps() -> Self {
        f32::EPSILON
    }
}

impl Real for f64 {
    fn eps() -> Self {
        f64::EPSILON
    }
}

/// `e^{iθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Modulus of a complex number.
#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

/// Argument of a complex number in `(-π, π]`.
#[inline]
pub fn carg<T: Real>(z: Complex<T>) -> T {
    z.im.atan2(z.re)
}

#[inline]
pub fn cplx<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Wraps an angle to `(-π, π]`.
pub fn wrap_angle<T: Real>(theta: T) -> T {
    let two_pi = <T as RealField>::two_pi();
    let pi = T::pi();
    let mut w = theta - two_pi * ((theta + pi) / two_pi).floor();
    // floor() maps +π onto -π; keep the half-open interval (-π, π].
    if w <= -pi {
        w += two_pi;
    }
    w
}

/// Distance from `theta` to the nearest integer multiple of `period`.
pub fn distance_to_multiple<T: Real>(theta: T, period: T) -> T {
    let k = (theta / period).round();
    (theta - k * period).mag()
}

/// Converts an ordinary frequency in MHz into an angular frequency in rad/µs.
#[inline]
pub fn angular<T: Real>(f_mhz: T) -> T {
    <T as RealField>::two_pi() * f_mhz
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wrap_is_half_open() {
        assert!((wrap_angle(PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!(wrap_angle(4.0 * PI).abs() < 1e-14);
        assert!((wrap_angle(0.25f32) - 0.25).abs() < 1e-7);
    }

    #[test]
    fn distance_to_pi_multiples() {
        assert!(distance_to_multiple(2.0 * PI + 1e-12, PI) < 1e-11);
        assert!((distance_to_multiple(PI / 2.0, PI) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn cis_unit_modulus() {
        let z = cis(0.3f64);
        assert!((z.norm() - 1.0).abs() < 1e-15);
    }
}
