//! Derivative-free inversion of increasing functions on `[0, ∞)`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Documented absolute tolerance on the returned abscissa. The bisection
/// runs to full working precision, which is well inside this bound for
/// roots of moderate size.
pub const ROOT_TOL: f64 = 1e-12;

const MAX_DOUBLINGS: usize = 2048;
const MAX_BISECTIONS: usize = 4096;

/// Solves `f(x) = y` for an increasing `f` with `f(0) = 0`.
///
/// The bracket starts at `[0, 1]` and its upper end is doubled until
/// `f(hi) >= y`; bisection then runs until the bracket can no longer be
/// split in the working precision.
pub fn invert_increasing<T: Real>(f: impl Fn(T) -> T, y: T) -> Result<T> {
    if y.is_nan() || y < T::zero() {
        return Err(Error::InvalidInput(format!(
            "cannot invert at negative or NaN value {y}"
        )));
    }
    if y.is_zero() {
        return Ok(T::zero());
    }
    let mut lo = T::zero();
    let mut hi = T::one();
    let mut doublings = 0;
    loop {
        let v = f(hi);
        if v >= y {
            break;
        }
        lo = hi;
        hi = hi + hi;
        doublings += 1;
        if doublings > MAX_DOUBLINGS || !hi.is_finite() || v.is_nan() {
            return Err(Error::Range {
                target: y.as_f64(),
                reached: lo.as_f64(),
            });
        }
    }
    let two = T::lit(2.0);
    for _ in 0..MAX_BISECTIONS {
        let mid = lo + (hi - lo) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Both ends bracket the root; return the one with the smaller residual.
    let rl = (f(lo) - y).abs();
    let rh = (f(hi) - y).abs();
    Ok(if rl < rh { lo } else { hi })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_root() {
        let x = invert_increasing(|x: f64| x * x, 2.0).unwrap();
        assert!((x - std::f64::consts::SQRT_2).abs() < ROOT_TOL);
    }

    #[test]
    fn zero_maps_to_zero() {
        assert_eq!(invert_increasing(|x: f64| x.exp() - 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn bounded_function_is_a_range_error() {
        let err = invert_increasing(|x: f64| x / (1.0 + x), 2.0).unwrap_err();
        assert!(matches!(err, Error::Range { .. }));
    }

    #[test]
    fn tiny_and_huge_targets() {
        let x = invert_increasing(|x: f64| 3.0 * x, 1e-200).unwrap();
        assert!((x / (1e-200 / 3.0) - 1.0).abs() < 1e-14);
        let x = invert_increasing(|x: f64| x * x, 1e200).unwrap();
        assert!((x / 1e100 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn works_in_f32() {
        let x = invert_increasing(|x: f32| x * x * x, 8.0).unwrap();
        assert!((x - 2.0).abs() < 1e-6);
    }
}
