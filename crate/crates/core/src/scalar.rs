//! Scalar abstractions.
//!
//! Two families of numeric types are used across the crate:
//!
//! * [`Real`]: floating point types (`f32`, `f64`). Everything that needs
//!   fractional powers, logarithms or root finding is generic over `Real`.
//! * [`Exact`]: ordered fields with exact ring arithmetic, including
//!   [`num_rational::BigRational`]. Checks that only need `+`, `*`, `/` and
//!   integer powers are written against `Exact` so they can run without
//!   rounding.
//!
//! `f32` and `f64` implement both traits. The traits are kept separate so
//! that method names shared by `Float` and `Signed` never collide inside
//! generic code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive};

/// Floating point scalar.
pub trait Real:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only if the literal is not
    /// representable at all (never for finite values).
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize is representable")
    }

    #[inline]
    fn from_u64_lossy(v: u64) -> Self {
        Self::from_u64(v).expect("u64 is representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Ordered field with exact (or at least deterministic) ring arithmetic.
pub trait Exact: Num + Signed + Clone + PartialOrd + Debug + Sum {
    fn from_f64_exact(v: f64) -> Option<Self>;

    fn to_f64_lossy(&self) -> f64;

    fn powu(&self, exp: u32) -> Self {
        num_traits::pow(self.clone(), exp as usize)
    }
}

impl Exact for f32 {
    fn from_f64_exact(v: f64) -> Option<Self> {
        let r = v as f32;
        (r as f64 == v).then_some(r)
    }

    fn to_f64_lossy(&self) -> f64 {
        *self as f64
    }
}

impl Exact for f64 {
    fn from_f64_exact(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Exact for BigRational {
    fn from_f64_exact(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Shorthand for building a rational `num / den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    pub fn add(&mut self, v: T) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry = self.carry + ((self.sum - t) + v);
        } else {
            self.carry = self.carry + ((v - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

/// Compensated sum of an iterator.
pub fn csum<T: Real>(it: impl IntoIterator<Item = T>) -> T {
    let mut acc = CompensatedSum::new();
    for v in it {
        acc.add(v);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_beats_naive() {
        let mut v = vec![1.0f64];
        v.extend(std::iter::repeat(1e-16).take(10_000));
        let naive: f64 = v.iter().sum();
        let comp = csum(v.iter().copied());
        assert_eq!(naive, 1.0);
        assert!((comp - (1.0 + 1e-12)).abs() < 1e-18);
    }

    #[test]
    fn exact_conversions() {
        assert_eq!(BigRational::from_f64_exact(0.5), Some(ratio(1, 2)));
        assert_eq!(f32::from_f64_exact(0.1), None);
        assert_eq!(ratio(1, 3).powu(2), ratio(1, 9));
    }
}
