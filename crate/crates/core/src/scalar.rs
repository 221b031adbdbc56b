//! Scalar abstractions.
//!
//! Floating-point numerics are written against [`Real`], implemented for
//! `f32` and `f64`. Exact algebra (polynomials, first-order coefficients)
//! only needs field operations and is written against [`Field`], which
//! covers both the float types and [`num_rational::BigRational`].

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, MulAssign, Neg, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive, Zero};

/// Floating-point scalar used by quadrature, diffusion and simulation code.
pub trait Real:
    Field
    + Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Every `Real` can represent (a rounding
    /// of) any finite `f64`.
    #[inline]
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 literal")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Exact (or exactly-treated) scalar supporting the four field operations.
pub trait Field:
    Clone + Num + Neg<Output = Self> + FromPrimitive + PartialOrd + Debug + Display + Send + Sync
{
    #[inline]
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer fits the field")
    }

    /// Whether `self` is zero up to the rounding of quantities of size
    /// `scale`. Exact fields compare with zero.
    fn negligible(&self, scale: &Self) -> bool;
}

macro_rules! float_field {
    ($t:ty) => {
        impl Field for $t {
            fn negligible(&self, scale: &Self) -> bool {
                self.abs() <= 64.0 * <$t>::EPSILON * scale.abs()
            }
        }
    };
}
float_field!(f32);
float_field!(f64);

macro_rules! exact_field {
    ($t:ty) => {
        impl Field for $t {
            fn negligible(&self, _scale: &Self) -> bool {
                self.is_zero()
            }
        }
    };
}
exact_field!(num_rational::BigRational);
exact_field!(num_rational::Rational64);

/// Binomial coefficient `C(n, k)` in any field.
pub fn binomial<F: Field>(n: u32, k: u32) -> F {
    if k > n {
        return F::zero();
    }
    let k = k.min(n - k);
    let mut acc = F::one();
    for i in 0..k {
        acc = acc * F::from_int((n - i) as i64) / F::from_int((i + 1) as i64);
    }
    acc
}
