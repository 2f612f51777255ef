//! Exact scalar fields.
//!
//! Everything in this crate is computed over an exact field.  The [`Field`]
//! trait is the num-traits numeric surface plus the handful of by-reference
//! helpers that the linear algebra needs to avoid cloning in inner loops.

use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{NumOps, One, Signed, Zero};

pub trait Field:
    Clone + PartialEq + fmt::Debug + fmt::Display + Zero + One + NumOps + Neg<Output = Self> + Send + Sync + 'static
{
    /// Embeds a rational number (the prime field) into `Self`.
    fn from_rational(q: &BigRational) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(&BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    fn add_ref(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self.clone() - other.clone()
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }

    fn div_ref(&self, other: &Self) -> Self {
        self.clone() / other.clone()
    }

    fn inv(&self) -> Self {
        Self::one().div_ref(self)
    }

    /// Rational value if the element lies in the prime field.
    fn to_rational(&self) -> Option<BigRational>;
}

impl Field for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn div_ref(&self, other: &Self) -> Self {
        self / other
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }
}

/// Shorthand for the rational `n / d`.
pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational the way the element grammar reads it back (`-3/4`).
pub fn fmt_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn is_negative_rational(x: &BigRational) -> bool {
    x.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_helpers() {
        assert_eq!(q(2, 4), q(1, 2));
        assert_eq!(fmt_rational(&q(-6, 4)), "-3/2");
        assert_eq!(fmt_rational(&q(8, 4)), "2");
        assert_eq!(BigRational::from_ratio(3, 9).inv(), q(3, 1));
    }
}
