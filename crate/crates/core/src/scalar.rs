//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All math is written against [`Real`], which is satisfied by `f32` and
//! `f64`. Complex quantities are `Complex<T>` over the same real type.

use std::fmt::{Display, LowerExp};

use nalgebra::RealField;
use num_traits::ToPrimitive;

pub use nalgebra::Complex;

/// Real scalar type the toolkit is generic over.
pub trait Real: RealField + Copy + ToPrimitive + LowerExp + Display {}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Converts an integer into `T`.
#[inline]
pub fn int<T: Real>(n: i64) -> T {
    nalgebra::convert(n as f64)
}

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn real<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// The imaginary unit.
#[inline]
pub fn imag_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `|z|` without going through `num_complex`'s `Float`-bounded inherent method.
#[inline]
pub fn modulus<T: Real>(z: Complex<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}

#[inline]
pub fn abs<T: Real>(x: T) -> T {
    if x < T::zero() {
        -x
    } else {
        x
    }
}

/// `base^exponent` for `base ≥ 0`, with `0^0 = 1` and `0^p = 0` for `p > 0`.
///
/// Evaluated in the log domain so large ratios do not overflow.
pub fn pow_nonneg<T: Real>(base: T, exponent: T) -> T {
    if exponent == T::zero() {
        T::one()
    } else if base == T::zero() {
        if exponent > T::zero() {
            T::zero()
        } else {
            lit(f64::INFINITY)
        }
    } else {
        (exponent * base.ln()).exp()
    }
}
