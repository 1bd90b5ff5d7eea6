//! Scalar abstraction shared by every numerical module.
//!
//! All dynamics are written against [`Real`], which is implemented for `f32`
//! and `f64`. Exact rational input is only meaningful for continued-fraction
//! expansion and is handled by [`crate::arith::ExactValue`].

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// `f64` view of a scalar, for reporting.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(lit(re), lit(im))
}

/// `e^{2πi x}`.
#[inline]
pub fn cis_turns<T: Real>(x: T) -> Complex<T> {
    let a = T::TAU() * x;
    Complex::new(a.cos(), a.sin())
}

/// Argument of `z` in turns, in `(-1/2, 1/2]`.
#[inline]
pub fn arg_turns<T: Real>(z: Complex<T>) -> T {
    z.im.atan2(z.re) / T::TAU()
}

/// Fractional part in `[0, 1)`.
#[inline]
pub fn frac<T: Real>(x: T) -> T {
    let f = x - x.floor();
    if f >= T::one() {
        T::zero()
    } else {
        f
    }
}

/// Signed distance of `x` to the nearest integer, in `[-1/2, 1/2]`.
#[inline]
pub fn wrap_half<T: Real>(x: T) -> T {
    x - x.round()
}

/// Solves the dense system `a·x = b` in place by Gaussian elimination with
/// partial pivoting. Returns `None` for a numerically singular matrix.
pub fn solve_dense<T: Real, const N: usize>(mut a: [[T; N]; N], mut b: [T; N]) -> Option<[T; N]> {
    for col in 0..N {
        let pivot = (col..N).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if !(a[pivot][col].abs() > T::min_positive_value()) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..N {
            let f = a[row][col] / a[col][col];
            if f == T::zero() {
                continue;
            }
            for k in col..N {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = [T::zero(); N];
    for row in (0..N).rev() {
        let mut s = b[row];
        for k in row + 1..N {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
        if !x[row].is_finite() {
            return None;
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_solve_recovers_known_solution() {
        let a = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]];
        let x = [1.0, -2.0, 0.5];
        let mut b = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                b[i] += a[i][j] * x[j];
            }
        }
        let got = solve_dense(a, b).unwrap();
        for i in 0..3 {
            assert!((got[i] - x[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn dense_solve_rejects_singular() {
        let a = [[1.0f64, 2.0], [2.0, 4.0]];
        assert!(solve_dense(a, [1.0, 1.0]).is_none());
    }

    #[test]
    fn turn_helpers() {
        assert!((frac(-0.25f64) - 0.75).abs() < 1e-15);
        assert!((wrap_half(0.9f64) + 0.1).abs() < 1e-15);
        let z = cis_turns(0.25f64);
        assert!((arg_turns(z) - 0.25).abs() < 1e-15);
    }
}
