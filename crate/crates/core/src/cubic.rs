//! The marked cubic family
//!
//! ```text
//! P_c(z) = λz (1 − ½(1 + 1/c) z + (1/(3c)) z²),   λ = e^{2πiθ},
//! ```
//!
//! with critical points at `c` and `1`, plus the quadratic reference map
//! `Q_θ(z) = λz + z²`.

use num_complex::Complex;
use serde::Serialize;

use crate::arith::RotationAngle;
use crate::error::{Error, Result};
use crate::scalar::{cis_turns, frac, lit, to_f64, Real};

/// Constant in the escape radius `m_c = 4.38·max(|c|, 1)`.
pub const ESCAPE_FACTOR: f64 = 4.38;

/// A cubic `a₁z + a₂z² + a₃z³` fixing the origin.
pub trait CubicPolynomial<T: Real> {
    /// `(a₁, a₂, a₃)`.
    fn coefficients(&self) -> [Complex<T>; 3];

    /// Radius outside of which every orbit escapes.
    fn escape_radius(&self) -> T;

    #[inline]
    fn eval(&self, z: Complex<T>) -> Complex<T> {
        let [a1, a2, a3] = self.coefficients();
        z * (a1 + z * (a2 + z * a3))
    }

    #[inline]
    fn derivative(&self, z: Complex<T>) -> Complex<T> {
        let [a1, a2, a3] = self.coefficients();
        a1 + z * (a2 * lit::<T>(2.0) + z * a3 * lit::<T>(3.0))
    }

    /// `P(w)/w³ = a₃ + a₂/w + a₁/w²`, evaluated without forming `w³`.
    #[inline]
    fn cube_ratio(&self, w: Complex<T>) -> Complex<T> {
        let [a1, a2, a3] = self.coefficients();
        let iw = w.inv();
        a3 + iw * (a2 + iw * a1)
    }
}

/// The critically marked cubic `P_c`.
#[derive(Clone, Debug, Serialize)]
pub struct CubicMap<T> {
    pub theta: RotationAngle,
    pub lambda: Complex<T>,
    pub c: Complex<T>,
    coeffs: [Complex<T>; 3],
}

impl<T: Real> CubicMap<T> {
    pub fn new(theta: &RotationAngle, c: Complex<T>) -> Result<Self> {
        if !(c.norm() > T::zero()) || !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "free critical point must be finite and nonzero, got {c}"
            )));
        }
        let lambda = theta.multiplier::<T>();
        let one = Complex::new(T::one(), T::zero());
        let a2 = -lambda * (one + c.inv()) * lit::<T>(0.5);
        let a3 = lambda / (c * lit::<T>(3.0));
        Ok(CubicMap {
            theta: theta.clone(),
            lambda,
            c,
            coeffs: [lambda, a2, a3],
        })
    }

    /// The same map with the critical markings exchanged, i.e. `P_{1/c}`.
    pub fn swapped(&self) -> Self {
        CubicMap::new(&self.theta, self.c.inv()).expect("inverse of a nonzero parameter")
    }
}

impl<T: Real> CubicPolynomial<T> for CubicMap<T> {
    fn coefficients(&self) -> [Complex<T>; 3] {
        self.coeffs
    }

    fn escape_radius(&self) -> T {
        escape_radius(self)
    }
}

/// `P_c(z)`.
pub fn cubic_eval<T: Real>(map: &CubicMap<T>, z: Complex<T>) -> Complex<T> {
    map.eval(z)
}

/// `m_c = 4.38·max(|c|, 1)`.
pub fn escape_radius<T: Real>(map: &CubicMap<T>) -> T {
    lit::<T>(ESCAPE_FACTOR) * map.c.norm().max(T::one())
}

/// `Q_θ(z) = e^{2πiθ}z + z²`.
pub fn quadratic_eval<T: Real>(theta: &RotationAngle, z: Complex<T>) -> Complex<T> {
    theta.multiplier::<T>() * z + z * z
}

/// The quadratic reference map as a reusable object.
#[derive(Clone, Debug)]
pub struct QuadraticMap<T> {
    pub lambda: Complex<T>,
}

impl<T: Real> QuadraticMap<T> {
    pub const ESCAPE_RADIUS: f64 = 2.0;

    pub fn new(theta: &RotationAngle) -> Self {
        QuadraticMap {
            lambda: theta.multiplier(),
        }
    }

    #[inline]
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        z * (self.lambda + z)
    }

    pub fn critical_point(&self) -> Complex<T> {
        -self.lambda * lit::<T>(0.5)
    }
}

/// Which critical point an outcome refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CriticalPoint {
    /// The free critical point `c`.
    Free,
    /// The critical point `1`.
    One,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum OrbitTag {
    /// The orbit of `c` leaves the disk of radius `m_c`.
    ExteriorEscape,
    /// The orbit of `1` leaves the disk of radius `m_c`.
    InteriorEscape,
    /// A critical orbit converges to an attracting cycle.
    HyperbolicLike {
        period: usize,
        multiplier: Complex<f64>,
        point: CriticalPoint,
    },
    /// A critical orbit lands in the Siegel disk at `entry_index`.
    Capture {
        entry_index: usize,
        point: CriticalPoint,
    },
    InLocusUnresolved,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrbitClass {
    pub tag: OrbitTag,
    pub iterations_used: usize,
}

impl OrbitClass {
    pub fn in_locus(&self) -> bool {
        !matches!(
            self.tag,
            OrbitTag::ExteriorEscape | OrbitTag::InteriorEscape
        )
    }
}

/// Thresholds of the in-locus heuristics.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClassifyOptions {
    /// Near-recurrence threshold `|z_{n+p} − z_n|`.
    pub recurrence_tol: f64,
    pub max_period: usize,
    /// Accept a cycle when `|multiplier| < 1 − margin`.
    pub multiplier_margin: f64,
    /// Run the Siegel-disk capture probe on unresolved parameters.
    pub capture: bool,
    pub linearizer_order: usize,
    /// Orbit prefix scanned for capture.
    pub capture_scan: usize,
    /// Cap on full capture probes per critical orbit.
    pub capture_candidates: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            recurrence_tol: 1e-9,
            max_period: 64,
            multiplier_margin: 1e-6,
            capture: true,
            linearizer_order: 256,
            capture_scan: 200,
            capture_candidates: 24,
        }
    }
}

/// Looks for an attracting cycle through `z`, a point far along a bounded
/// orbit. Returns `(period, multiplier)`.
fn attracting_cycle<T: Real, P: CubicPolynomial<T>>(
    map: &P,
    z: Complex<T>,
    opts: &ClassifyOptions,
) -> Option<(usize, Complex<T>)> {
    let tol: T = lit(opts.recurrence_tol);
    let mut w = z;
    for period in 1..=opts.max_period {
        w = map.eval(w);
        if (w - z).norm() < tol {
            let mut mult = Complex::new(T::one(), T::zero());
            let mut u = z;
            for _ in 0..period {
                mult *= map.derivative(u);
                u = map.eval(u);
            }
            if mult.norm() < T::one() - lit(opts.multiplier_margin) {
                return Some((period, mult));
            }
            return None;
        }
    }
    None
}

/// Classifies `c` by iterating both critical orbits against `m_c`, then
/// probing for an attracting cycle and for capture by the Siegel disk.
pub fn classify_cubic<T: Real>(
    map: &CubicMap<T>,
    max_iter: usize,
    opts: &ClassifyOptions,
) -> OrbitClass {
    let m = escape_radius(map);
    let mut z = map.c;
    let mut w = Complex::new(T::one(), T::zero());
    for n in 1..=max_iter {
        z = map.eval(z);
        w = map.eval(w);
        if !(z.norm() <= m) {
            return OrbitClass {
                tag: OrbitTag::ExteriorEscape,
                iterations_used: n,
            };
        }
        if !(w.norm() <= m) {
            return OrbitClass {
                tag: OrbitTag::InteriorEscape,
                iterations_used: n,
            };
        }
    }
    let mut used = max_iter;
    for (end, point) in [(z, CriticalPoint::Free), (w, CriticalPoint::One)] {
        used += opts.max_period;
        if let Some((period, mult)) = attracting_cycle(map, end, opts) {
            let multiplier = Complex::new(to_f64(mult.re), to_f64(mult.im));
            return OrbitClass {
                tag: OrbitTag::HyperbolicLike {
                    period,
                    multiplier,
                    point,
                },
                iterations_used: used,
            };
        }
    }
    if opts.capture {
        if let Ok(series) = linearizer(map, opts.linearizer_order) {
            let reach = series.inner_image_radius();
            for (start, point) in [
                (map.c, CriticalPoint::Free),
                (Complex::new(T::one(), T::zero()), CriticalPoint::One),
            ] {
                let mut u = start;
                let mut probes = 0;
                for n in 0..=opts.capture_scan.min(max_iter) {
                    if u.norm() <= reach {
                        probes += 1;
                        used += CAPTURE_ORBIT;
                        if capture_probe(map, &series, u) == CaptureVerdict::Inside {
                            return OrbitClass {
                                tag: OrbitTag::Capture {
                                    entry_index: n,
                                    point,
                                },
                                iterations_used: used,
                            };
                        }
                        if probes >= opts.capture_candidates {
                            break;
                        }
                    }
                    u = map.eval(u);
                }
                used += opts.capture_scan.min(max_iter);
            }
        }
    }
    OrbitClass {
        tag: OrbitTag::InLocusUnresolved,
        iterations_used: used,
    }
}

/// Power series `h(z) = Σ a_j z^j` of the linearizer `h(λz) = P_c(h(z))`,
/// `h′(0) = 1`, truncated at order `N`.
#[derive(Clone, Debug, Serialize)]
pub struct LinearizerSeries<T> {
    pub c: Complex<T>,
    /// `a_1, …, a_N` (index 0 holds `a_1 = 1`).
    pub coefficients: Vec<Complex<T>>,
    /// Root-test estimate of the radius of convergence (conformal capacity).
    pub capacity: T,
    /// Set when coefficients overflowed and the series was cut short.
    pub truncated: bool,
}

impl<T: Real> LinearizerSeries<T> {
    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn eval(&self, w: Complex<T>) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for &a in self.coefficients.iter().rev() {
            acc = (acc + a) * w;
        }
        acc
    }

    pub fn derivative(&self, w: Complex<T>) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (j, &a) in self.coefficients.iter().enumerate().rev() {
            acc = acc * w + a * lit::<T>((j + 1) as f64);
        }
        acc
    }

    /// Solves `h(w) = z` by Newton from `seed`; `None` on non-convergence.
    pub fn invert(&self, z: Complex<T>, seed: Complex<T>) -> Option<Complex<T>> {
        let mut w = seed;
        let limit = self.capacity * lit(1.5);
        for _ in 0..60 {
            let d = self.derivative(w);
            if !(d.norm() > T::zero()) {
                return None;
            }
            let step = (self.eval(w) - z) / d;
            w -= step;
            if !(w.norm() <= limit) {
                return None;
            }
            if step.norm() <= lit::<T>(1e-13) * w.norm().max(T::one()) {
                return Some(w);
            }
        }
        None
    }

    /// Largest `|h(w)|` over `|w| = 0.5κ̂`, padded by 10%.
    pub fn inner_image_radius(&self) -> T {
        let r = self.capacity * lit(CAPTURE_INNER);
        (0..64)
            .map(|k| self.eval(cis_turns(lit::<T>(k as f64 / 64.0)) * r).norm())
            .fold(T::zero(), |m, v| m.max(v))
            * lit(1.1)
    }

    /// Largest coefficient mismatch of `h(λz) − P_c(h(z))` through order
    /// `N`, relative to the size of the terms involved.
    pub fn functional_residual(&self, map: &CubicMap<T>) -> T {
        let n = self.order();
        let [a1, a2, a3] = map.coefficients();
        let a = |j: usize| {
            if j >= 1 && j <= n {
                self.coefficients[j - 1]
            } else {
                Complex::new(T::zero(), T::zero())
            }
        };
        let zero = Complex::new(T::zero(), T::zero());
        let mut sq = vec![zero; n + 1];
        for j in 2..=n {
            sq[j] = (1..j).fold(zero, |s, i| s + a(i) * a(j - i));
        }
        let mut worst = T::zero();
        for j in 1..=n {
            let cube = (1..j.saturating_sub(1)).fold(zero, |s, i| s + a(i) * sq[j - i]);
            let lhs = a(j) * lambda_power(&map.theta, j);
            let rhs = a1 * a(j) + a2 * sq[j] + a3 * cube;
            let scale = lhs
                .norm()
                .max((a1 * a(j)).norm())
                .max((a2 * sq[j]).norm())
                .max((a3 * cube).norm())
                .max(T::min_positive_value());
            worst = worst.max((lhs - rhs).norm() / scale);
        }
        worst
    }
}

/// `λ^j` from the reduced angle, avoiding accumulated rounding.
fn lambda_power<T: Real>(theta: &RotationAngle, j: usize) -> Complex<T> {
    cis_turns(lit::<T>(frac(theta.value() * j as f64)))
}

/// Solves the linearizer coefficients order by order:
/// `a_j (λ^j − λ) = a₂[h²]_j + a₃[h³]_j`, then estimates the capacity by a
/// root test over the tail window `j ∈ [N/2, N]`.
pub fn linearizer<T: Real>(map: &CubicMap<T>, order: usize) -> Result<LinearizerSeries<T>> {
    if order < 2 {
        return Err(Error::InvalidParameter(format!(
            "linearizer order {order} < 2"
        )));
    }
    let [a1, a2, a3] = map.coefficients();
    let zero = Complex::new(T::zero(), T::zero());
    // Index by power: a[j], sq[j] = [h²]_j.
    let mut a = vec![zero; order + 1];
    let mut sq = vec![zero; order + 1];
    a[1] = Complex::new(T::one(), T::zero());
    let mut truncated = false;
    let mut last = 1;
    for j in 2..=order {
        sq[j] = (1..j).fold(zero, |s, i| s + a[i] * a[j - i]);
        let cube = (1..j - 1).fold(zero, |s, i| s + a[i] * sq[j - i]);
        let aj: Complex<T> = (a2 * sq[j] + a3 * cube) / (lambda_power::<T>(&map.theta, j) - a1);
        if !(aj.re.is_finite() && aj.im.is_finite()) {
            truncated = true;
            break;
        }
        a[j] = aj;
        last = j;
    }
    let coefficients: Vec<Complex<T>> = a[1..=last].to_vec();
    let lo = (last / 2).max(1);
    let mut root = T::zero();
    for j in lo..=last {
        let m = coefficients[j - 1].norm();
        if m > T::zero() {
            root = root.max((m.ln() / lit::<T>(j as f64)).exp());
        }
    }
    let capacity = if root > T::zero() {
        root.recip()
    } else {
        T::infinity()
    };
    Ok(LinearizerSeries {
        c: map.c,
        coefficients,
        capacity,
        truncated,
    })
}

/// Linearized radius below which a point counts as inside the disk.
pub const CAPTURE_INNER: f64 = 0.5;
/// Linearized radius the follow-up orbit must stay within.
pub const CAPTURE_OUTER: f64 = 0.9;
/// Length of the follow-up orbit.
pub const CAPTURE_ORBIT: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaptureVerdict {
    Inside,
    Outside,
    Unknown,
}

/// Tests whether `z` lies in the Siegel disk: its linearizing coordinate must
/// be within `0.5κ̂` and the next 200 iterates within `0.9κ̂`.
pub fn capture_probe<T: Real>(
    map: &CubicMap<T>,
    series: &LinearizerSeries<T>,
    z: Complex<T>,
) -> CaptureVerdict {
    if z.norm() == T::zero() {
        return CaptureVerdict::Inside;
    }
    if !(z.norm() <= escape_radius(map)) {
        return CaptureVerdict::Outside;
    }
    let Some(w0) = series.invert(z, z) else {
        return CaptureVerdict::Unknown;
    };
    if w0.norm() >= series.capacity * lit(CAPTURE_INNER) {
        return CaptureVerdict::Outside;
    }
    let outer = series.capacity * lit(CAPTURE_OUTER);
    let mut u = z;
    for k in 1..=CAPTURE_ORBIT {
        u = map.eval(u);
        let seed = w0 * lambda_power(&map.theta, k);
        match series.invert(u, seed) {
            Some(w) if w.norm() < outer => {}
            Some(_) => return CaptureVerdict::Outside,
            None => return CaptureVerdict::Unknown,
        }
    }
    CaptureVerdict::Inside
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type C = Complex<f64>;

    fn golden() -> RotationAngle {
        RotationAngle::golden()
    }

    fn map(c: C) -> CubicMap<f64> {
        CubicMap::new(&golden(), c).unwrap()
    }

    #[test]
    fn zero_parameter_rejected() {
        assert!(CubicMap::new(&golden(), C::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn normal_form_basics() {
        let p = map(C::new(0.7, -1.3));
        assert_eq!(cubic_eval(&p, C::new(0.0, 0.0)), C::new(0.0, 0.0));
        let eps = 1e-8;
        let d0 = cubic_eval(&p, C::new(eps, 0.0)) / eps;
        assert!((d0 - p.lambda).norm() < 1e-7);
        let fd = |z: C| (cubic_eval(&p, z + eps) - cubic_eval(&p, z - eps)) / (2.0 * eps);
        assert!(fd(C::new(1.0, 0.0)).norm() < 1e-6);
        assert!(fd(p.c).norm() < 1e-6);
        assert!(p.derivative(C::new(1.0, 0.0)).norm() < 1e-12);
        assert!(p.derivative(p.c).norm() < 1e-12);
    }

    #[test]
    fn quadratic_reference() {
        let g = golden();
        assert_eq!(quadratic_eval(&g, C::new(0.0, 0.0)), C::new(0.0, 0.0));
        let q = QuadraticMap::new(&g);
        let cp = q.critical_point();
        assert!((q.lambda + cp * 2.0).norm() < 1e-15);
        let mut z = cp;
        for _ in 0..10_000 {
            z = q.eval(z);
            assert!(z.norm() < 2.0);
        }
    }

    #[test]
    fn escape_radius_values() {
        assert!((escape_radius(&map(C::new(1.0, 0.0))) - 4.38).abs() < 1e-15);
        assert!((escape_radius(&map(C::new(10.0, 0.0))) - 43.8).abs() < 1e-12);
        assert!((escape_radius(&map(C::new(0.1, 0.0))) - 4.38).abs() < 1e-15);
    }

    #[test]
    fn classification_examples() {
        let opts = ClassifyOptions::default();
        let ext = classify_cubic(&map(C::new(30.0, 0.0)), 2000, &opts);
        assert_eq!(ext.tag, OrbitTag::ExteriorEscape);
        assert!(ext.iterations_used <= 5);
        let int = classify_cubic(&map(C::new(1.0 / 30.0, 0.0)), 2000, &opts);
        assert_eq!(int.tag, OrbitTag::InteriorEscape);

        let lambda = golden().multiplier::<f64>();
        let center = C::new(3.0, 0.0) - lambda.conj() * 6.0;
        let p = map(center);
        assert!((cubic_eval(&p, center) - center).norm() < 1e-12);
        match classify_cubic(&p, 2000, &opts).tag {
            OrbitTag::HyperbolicLike {
                period,
                multiplier,
                point,
            } => {
                assert_eq!(period, 1);
                assert!(multiplier.norm() < 1e-6);
                assert_eq!(point, CriticalPoint::Free);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn linearizer_low_order_coefficients() {
        let p = map(C::new(2.0, 0.5));
        let s = linearizer(&p, 64).unwrap();
        assert_eq!(s.coefficients[0], C::new(1.0, 0.0));
        let lambda = p.lambda;
        let big_a = -lambda * (C::new(1.0, 0.0) + p.c.inv()) / 2.0;
        let a2 = big_a / (lambda * lambda - lambda);
        assert!((s.coefficients[1] - a2).norm() < 1e-12 * a2.norm());
        assert!(s.functional_residual(&p) < 1e-12);
        assert!(s.capacity > 0.0);
        assert!(!s.truncated);
    }

    #[test]
    fn linearizer_order_must_be_two() {
        assert!(linearizer(&map(C::new(2.0, 0.0)), 1).is_err());
    }

    #[test]
    fn series_inversion_round_trip() {
        let p = map(C::new(3.0, 0.0));
        let s = linearizer(&p, 256).unwrap();
        let w = C::new(0.2, 0.1) * s.capacity;
        let z = s.eval(w);
        let back = s.invert(z, z).unwrap();
        assert!((back - w).norm() < 1e-10);
    }

    #[test]
    fn capture_probe_examples() {
        let p = map(C::new(3.0, 0.0));
        let s = linearizer(&p, 256).unwrap();
        assert_eq!(
            capture_probe(&p, &s, C::new(0.0, 0.0)),
            CaptureVerdict::Inside
        );
        assert_eq!(
            capture_probe(&p, &s, C::new(100.0, 0.0)),
            CaptureVerdict::Outside
        );
    }

    #[test]
    fn capture_component_near_three() {
        // P_c(c) = λc(1/2 − c/6) vanishes at c = 3, the capture center.
        let opts = ClassifyOptions::default();
        for c in [C::new(3.0, 0.0), C::new(3.1, 0.1), C::new(2.9, -0.1)] {
            let p = map(c);
            let s = linearizer(&p, 256).unwrap();
            assert_eq!(
                capture_probe(&p, &s, cubic_eval(&p, c)),
                CaptureVerdict::Inside,
                "{c}"
            );
            match classify_cubic(&p, 2000, &opts).tag {
                OrbitTag::Capture { entry_index, point } => {
                    assert_eq!(entry_index, 1);
                    assert_eq!(point, CriticalPoint::Free);
                }
                other => panic!("{c}: {other:?}"),
            }
        }
    }

    #[test]
    fn capacity_is_soft_continuous_in_capture_component() {
        let mut prev: Option<f64> = None;
        for k in 0..10 {
            let c = C::new(2.95 + 0.01 * k as f64, 0.02);
            let s = linearizer(&map(c), 256).unwrap();
            assert!(s.capacity > 0.0);
            if let Some(pk) = prev {
                assert!(
                    (s.capacity - pk).abs() < 0.5 * pk,
                    "{c}: {} vs {}",
                    s.capacity,
                    pk
                );
            }
            prev = Some(s.capacity);
        }
    }

    proptest! {
        #[test]
        fn marking_swap_conjugacy(cr in -20.0f64..20.0, ci in -20.0f64..20.0, zr in -5.0f64..5.0, zi in -5.0f64..5.0) {
            let c = C::new(cr, ci);
            prop_assume!(c.norm() > 1e-3);
            let z = C::new(zr, zi);
            let p = map(c);
            let lhs = cubic_eval(&p, z) / c;
            let rhs = cubic_eval(&p.swapped(), z / c);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(rhs.norm()).max(1e-300));
        }

        #[test]
        fn escape_growth(cr in -40.0f64..40.0, ci in -40.0f64..40.0, scale in 1.0f64..10.0, arg in 0.0f64..6.3) {
            let c = C::new(cr, ci);
            prop_assume!(c.norm() > 1e-3);
            let p = map(c);
            let z = C::from_polar(escape_radius(&p) * scale, arg);
            prop_assert!(cubic_eval(&p, z).norm() >= 1.0148 * z.norm());
        }

        #[test]
        fn large_parameters_escape(r in 30.0f64..1000.0, arg in 0.0f64..6.3) {
            let c = C::from_polar(r, arg);
            let opts = ClassifyOptions { capture: false, ..Default::default() };
            prop_assert_eq!(classify_cubic(&map(c), 500, &opts).tag, OrbitTag::ExteriorEscape);
            prop_assert_eq!(classify_cubic(&map(c.inv()), 500, &opts).tag, OrbitTag::InteriorEscape);
        }
    }
}
