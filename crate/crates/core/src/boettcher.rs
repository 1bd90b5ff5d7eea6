//! Escape-side structure of the cubic family: Green's function, Böttcher
//! coordinate and the parameter map `Φ(s) = β_s(P^s(s))`.
//!
//! The Böttcher map is evaluated in log form,
//!
//! ```text
//! log β(z) = log z + ½ log(λ/3) + Σ_{n≥1} 3^{-n} Log( r(z_{n-1}) / (λ/3) ),
//! r(w) = P(w)/w³,
//! ```
//!
//! so the normalization `β(z)/z → √(λ/3)` is built in and the tail terms
//! decay superexponentially.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::RotationAngle;
use crate::cubic::{CubicPolynomial, ESCAPE_FACTOR};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Minimal Green's function level accepted by [`boettcher_map`].
pub const MIN_GREEN: f64 = 0.05;
/// Tail terms below this size end the sum.
pub const TERM_TOL: f64 = 1e-16;
/// A term whose argument lies within this distance of the cut is ambiguous.
const CUT_MARGIN: f64 = 0.05;
const CUT_JITTER: [f64; 3] = [0.0, 0.5, -0.5];

/// `P^s(z) = λz(1 − ½(s + 1/s)z + ⅓z²)`, with critical points `s` and `1/s`.
#[derive(Clone, Debug, Serialize)]
pub struct SCubic<T> {
    pub s: Complex<T>,
    pub lambda: Complex<T>,
    coeffs: [Complex<T>; 3],
}

impl<T: Real> SCubic<T> {
    pub fn new(theta: &RotationAngle, s: Complex<T>) -> Result<Self> {
        if !(s.norm() > T::zero()) || !s.re.is_finite() || !s.im.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "s must be finite and nonzero, got {s}"
            )));
        }
        let lambda = theta.multiplier::<T>();
        let a2 = -lambda * (s + s.inv()) * lit::<T>(0.5);
        let a3 = lambda / lit::<T>(3.0);
        Ok(SCubic {
            s,
            lambda,
            coeffs: [lambda, a2, a3],
        })
    }

    pub fn critical_points(&self) -> [Complex<T>; 2] {
        [self.s, self.s.inv()]
    }

    /// The critical value `P^s(s) = −(λ/6)s³ + (λ/2)s`.
    pub fn critical_value(&self) -> Complex<T> {
        self.eval(self.s)
    }
}

impl<T: Real> CubicPolynomial<T> for SCubic<T> {
    fn coefficients(&self) -> [Complex<T>; 3] {
        self.coeffs
    }

    /// `m_{s²}/|s|`, transported from `P_{s²}` by the dilation `z ↦ sz`.
    fn escape_radius(&self) -> T {
        let r = self.s.norm();
        lit::<T>(ESCAPE_FACTOR) * (r * r).max(T::one()) / r
    }
}

/// `G(z) = lim 3^{-n} log|P^n(z)|`, or 0 if the orbit stays within the
/// escape radius for `n` steps.
pub fn green_function<T: Real, P: CubicPolynomial<T>>(map: &P, z: Complex<T>, n: usize) -> T {
    let radius = map.escape_radius();
    let mut w = z;
    let mut k = 0;
    while !(w.norm() > radius) {
        if k == n {
            return T::zero();
        }
        w = map.eval(w);
        k += 1;
    }
    // Telescoped tail: 3^{-k}(log|w| + ½log|a₃| + Σ 3^{-m} log|r(w_{m-1})/a₃|).
    let a3 = map.coefficients()[2].norm();
    let third = lit::<T>(1.0 / 3.0);
    let mut scale = T::one();
    let mut g = w.norm().ln() + a3.ln() * lit::<T>(0.5);
    for _ in 0..200 {
        scale *= third;
        let term = scale * (map.cube_ratio(w).norm() / a3).ln();
        g += term;
        w = map.eval(w);
        let tiny = lit::<T>(TERM_TOL) * g.abs().max(T::one());
        if term.abs() < tiny || !(w.norm().is_finite()) {
            break;
        }
    }
    g * third.powi(k as i32)
}

fn log_with_cut<T: Real>(u: Complex<T>, cut: T) -> (Complex<T>, T) {
    let pi = T::PI();
    let mut a = u.im.atan2(u.re) - cut;
    while a > pi {
        a -= T::TAU();
    }
    while a <= -pi {
        a += T::TAU();
    }
    (Complex::new(u.norm().ln(), a + cut), pi - a.abs())
}

/// `log β(z)` with the logarithm cut rotated by `cut` radians away from
/// `λ/3`; `None` when a term falls within the ambiguity margin of the cut.
fn log_boettcher_with_cut<T: Real, P: CubicPolynomial<T>>(
    map: &P,
    z: Complex<T>,
    cut: T,
) -> Option<Complex<T>> {
    let a3 = map.coefficients()[2];
    let third = lit::<T>(1.0 / 3.0);
    let margin = lit::<T>(CUT_MARGIN);
    let mut acc = z.ln() + a3.ln() * lit::<T>(0.5);
    let mut w = z;
    let mut scale = T::one();
    for _ in 0..200 {
        scale *= third;
        let (log_r, clearance) = log_with_cut(map.cube_ratio(w) / a3, cut);
        if clearance < margin {
            return None;
        }
        let term = log_r * scale;
        acc += term;
        if term.norm() < lit::<T>(TERM_TOL) * acc.norm().max(T::one()) {
            break;
        }
        w = map.eval(w);
        if !(w.re.is_finite() && w.im.is_finite()) {
            break;
        }
    }
    Some(acc)
}

fn log_boettcher<T: Real, P: CubicPolynomial<T>>(map: &P, z: Complex<T>) -> Result<Complex<T>> {
    CUT_JITTER
        .iter()
        .find_map(|&j| log_boettcher_with_cut(map, z, lit::<T>(j)))
        .ok_or(Error::Branch)
}

/// The Böttcher coordinate `β(z)`, conjugating `P` to `w ↦ w³` near infinity
/// and normalized by `β(z)/z → √(λ/3)`.
///
/// Requires `G(z) ≥ 0.05`, measured with an iteration budget of `n`.
pub fn boettcher_map<T: Real, P: CubicPolynomial<T>>(
    map: &P,
    z: Complex<T>,
    n: usize,
) -> Result<Complex<T>> {
    let g = green_function(map, z, n);
    if g < lit(MIN_GREEN) {
        return Err(Error::SlowEscape(to_f64(g)));
    }
    Ok(log_boettcher(map, z)?.exp())
}

/// `Φ(s) = β_s(P^s(s))`.
///
/// When the critical value escapes slowly the orbit is pushed forward `k`
/// steps until `G ≥ 0.05`, and the `3^k`-th root is taken in log coordinates
/// on the branch nearest the direct log-sum estimate.
pub fn phi<T: Real>(theta: &RotationAngle, s: Complex<T>, budget: usize) -> Result<Complex<T>> {
    let map = SCubic::new(theta, s)?;
    let v = map.critical_value();
    let g = green_function(&map, v, budget);
    if g == T::zero() {
        return Err(Error::SlowEscape(0.0));
    }
    let direct = log_boettcher(&map, v);
    if g >= lit(MIN_GREEN) {
        return Ok(direct?.exp());
    }
    let mut k = 0;
    let mut w = v;
    let mut gk = g;
    while gk < lit(MIN_GREEN) {
        w = map.eval(w);
        gk *= lit(3.0);
        k += 1;
    }
    let pushed = log_boettcher(&map, w)?;
    let scale = lit::<T>(3.0).powi(k);
    let turns = match direct {
        Ok(d) => ((d * scale - pushed).im / T::TAU()).round(),
        Err(_) => T::zero(),
    };
    Ok(((pushed + Complex::new(T::zero(), turns * T::TAU())) / scale).exp())
}

/// Leading behaviour `√(λ/3)(−(λ/6)s³ + (λ/2)s)` of `Φ` at infinity.
pub fn phi_asymptotic<T: Real>(theta: &RotationAngle, s: Complex<T>) -> Complex<T> {
    let lambda = theta.multiplier::<T>();
    let root = (lambda / lit::<T>(3.0)).sqrt();
    root * (-(lambda / lit::<T>(6.0)) * s * s * s + lambda * s * lit::<T>(0.5))
}

/// Winding number of a closed sampled curve about the origin.
///
/// Consecutive samples must differ in argument by less than a quarter turn,
/// and the total increment must be within 0.1 of an integer number of turns.
pub fn winding_degree<T: Real>(samples: &[Complex<T>]) -> Result<i64> {
    if samples.is_empty() {
        return Err(Error::ZeroSample);
    }
    if samples.iter().any(|z| !(z.norm() > T::zero())) {
        return Err(Error::ZeroSample);
    }
    let mut total = T::zero();
    let n = samples.len();
    for i in 0..n {
        let a = samples[i];
        let b = samples[(i + 1) % n];
        let d = (b / a).arg();
        if d.abs() >= T::FRAC_PI_2() {
            return Err(Error::Resample(to_f64(d)));
        }
        total += d;
    }
    let turns = to_f64(total / T::TAU());
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.1 {
        return Err(Error::WindingResidue(turns - rounded));
    }
    Ok(rounded as i64)
}

/// Winding degree of `Φ` over the circle `|s| = radius`.
pub fn phi_winding(
    theta: &RotationAngle,
    radius: f64,
    samples: usize,
    budget: usize,
) -> Result<i64> {
    if samples < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 samples, got {samples}"
        )));
    }
    let values = (0..samples)
        .into_par_iter()
        .map(|k| {
            let s = Complex::from_polar(radius, std::f64::consts::TAU * k as f64 / samples as f64);
            phi(theta, s, budget)
        })
        .collect::<Result<Vec<_>>>()?;
    winding_degree(&values)
}
