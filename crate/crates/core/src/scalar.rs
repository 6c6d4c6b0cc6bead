//! Numeric abstraction used by the LP engine and the placement models.
//!
//! Floating types carry solver tolerances; the exact rational type uses zero
//! tolerances so that every comparison is decided exactly.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// Primal feasibility and duality tolerance.
    fn feas_tol() -> Self;
    /// Smallest magnitude accepted as a pivot element.
    fn pivot_tol() -> Self;
    /// Distance from an integer below which a value counts as integral.
    fn int_tol() -> Self;
    /// True for types whose arithmetic is exact.
    fn is_exact() -> bool;

    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn floor(&self) -> Self;
    fn ceil(&self) -> Self;

    fn from_i64(x: i64) -> Self {
        Self::from_f64(x as f64)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Nearest integer, ties away from zero.
    fn round(&self) -> Self {
        let half = Self::one() / (Self::one() + Self::one());
        if self.is_negative() {
            -((-self.clone()) + half).floor()
        } else {
            (self.clone() + half).floor()
        }
    }

    /// Distance to the nearest integer.
    fn fractionality(&self) -> Self {
        let down = self.clone() - self.floor();
        let up = self.ceil() - self.clone();
        down.min_of(up)
    }
}

impl Scalar for f64 {
    fn feas_tol() -> Self {
        1e-7
    }
    fn pivot_tol() -> Self {
        1e-7
    }
    fn int_tol() -> Self {
        1e-6
    }
    fn is_exact() -> bool {
        false
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn floor(&self) -> Self {
        f64::floor(*self)
    }
    fn ceil(&self) -> Self {
        f64::ceil(*self)
    }
    fn from_i64(x: i64) -> Self {
        x as f64
    }
}

impl Scalar for f32 {
    fn feas_tol() -> Self {
        1e-4
    }
    fn pivot_tol() -> Self {
        1e-6
    }
    fn int_tol() -> Self {
        1e-4
    }
    fn is_exact() -> bool {
        false
    }
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    fn to_f64(&self) -> f64 {
        *self as f64
    }
    fn floor(&self) -> Self {
        f32::floor(*self)
    }
    fn ceil(&self) -> Self {
        f32::ceil(*self)
    }
}

impl Scalar for BigRational {
    fn feas_tol() -> Self {
        Self::zero()
    }
    fn pivot_tol() -> Self {
        Self::zero()
    }
    fn int_tol() -> Self {
        Self::zero()
    }
    fn is_exact() -> bool {
        true
    }
    fn from_f64(x: f64) -> Self {
        // Every finite double is a dyadic rational, so this is lossless.
        BigRational::from_float(x).expect("finite value")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn floor(&self) -> Self {
        BigRational::floor(self)
    }
    fn ceil(&self) -> Self {
        BigRational::ceil(self)
    }
    fn from_i64(x: i64) -> Self {
        BigRational::from_integer(BigInt::from_i64(x).expect("i64 fits"))
    }
}
