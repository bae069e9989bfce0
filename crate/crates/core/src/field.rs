//! Coefficient fields shared by the floating and the exact backend.
//!
//! Structural constructions (wedge tables, derivation and homomorphism
//! extensions) are written once against [`Field`] so that the same code
//! produces complex floating matrices and exact Gaussian-rational matrices.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Complex double precision scalar.
pub type C64 = Complex<f64>;

/// Exact element of `Q(i)`.
pub type GaussRational = Complex<BigRational>;

pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    fn conj(&self) -> Self;

    /// Exact embedding of a complex double. For rational fields every finite
    /// double is a dyadic rational, so no rounding happens.
    fn from_c64(z: C64) -> Self;

    /// Multiplicative inverse; callers guarantee `self != 0`.
    fn inv(&self) -> Self;

    fn to_c64(&self) -> C64;
}

impl Field for C64 {
    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn from_c64(z: C64) -> Self {
        z
    }

    fn inv(&self) -> Self {
        Complex::inv(self)
    }

    fn to_c64(&self) -> C64 {
        *self
    }
}

fn rational_from_f64(x: f64) -> BigRational {
    // Non-finite input never reaches here: model and family loaders reject it.
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

fn rational_to_f64(x: &BigRational) -> f64 {
    // Ratio<BigInt> -> f64 through a scaled integer division keeps ~53 bits.
    let (num, den) = (x.numer(), x.denom());
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let scaled: BigInt = if shift >= 0 {
        (num << shift as usize) / den
    } else {
        (num >> (-shift) as usize) / den
    };
    let (sign, digits) = scaled.to_u64_digits();
    let mut mag = 0.0f64;
    for (i, d) in digits.iter().enumerate() {
        mag += (*d as f64) * libm::ldexp(1.0, 64 * i as i32);
    }
    let value = libm::ldexp(mag, -(shift as i32));
    if sign == num_bigint::Sign::Minus {
        -value
    } else {
        value
    }
}

impl Field for GaussRational {
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    fn from_c64(z: C64) -> Self {
        Complex::new(rational_from_f64(z.re), rational_from_f64(z.im))
    }

    fn inv(&self) -> Self {
        let norm = self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone();
        Complex::new(self.re.clone() / norm.clone(), -self.im.clone() / norm)
    }

    fn to_c64(&self) -> C64 {
        Complex::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}
