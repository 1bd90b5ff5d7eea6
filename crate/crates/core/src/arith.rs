//! Rotation-number arithmetic: continued fractions, Brjuno partial sums,
//! rotation numbers of circle-map lifts and monotone calibration of a
//! rotation factor.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Values whose continued fraction can be expanded exactly.
///
/// Floats are expanded through their exact binary value, so every digit
/// reported is a digit of the number actually stored.
pub trait ExactValue {
    fn to_exact(&self) -> Option<BigRational>;
}

impl ExactValue for f64 {
    fn to_exact(&self) -> Option<BigRational> {
        BigRational::from_float(*self)
    }
}

impl ExactValue for f32 {
    fn to_exact(&self) -> Option<BigRational> {
        BigRational::from_float(*self)
    }
}

impl ExactValue for BigRational {
    fn to_exact(&self) -> Option<BigRational> {
        Some(self.clone())
    }
}

impl ExactValue for Ratio<i64> {
    fn to_exact(&self) -> Option<BigRational> {
        Some(BigRational::new(
            BigInt::from(*self.numer()),
            BigInt::from(*self.denom()),
        ))
    }
}

/// An angle `θ ∈ (0,1)` together with its continued-fraction expansion
/// `θ = [a_1, a_2, …]`, convergents `p_k/q_k` and Brjuno partial sums.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotationAngle {
    value: f64,
    digits: Vec<u64>,
    convergents: Vec<(u128, u128)>,
    brjuno: Vec<f64>,
}

impl RotationAngle {
    /// Builds the angle from its digits; the value is the last convergent.
    pub fn from_digits(digits: &[u64]) -> Result<Self> {
        if digits.is_empty() || digits.contains(&0) {
            return Err(Error::InvalidParameter(
                "continued-fraction digits must be positive".into(),
            ));
        }
        let mut angle = RotationAngle {
            value: 0.0,
            digits: Vec::new(),
            convergents: Vec::new(),
            brjuno: Vec::new(),
        };
        for &a in digits {
            if !angle.push_digit(a) {
                break;
            }
        }
        let (p, q) = *angle.convergents.last().expect("at least one digit");
        angle.value = p as f64 / q as f64;
        angle.finish();
        Ok(angle)
    }

    /// The golden mean `(√5 − 1)/2 = [1, 1, 1, …]`, expanded to 40 digits.
    pub fn golden() -> Self {
        Self::from_digits(&[1; 40]).expect("golden digits are valid")
    }

    /// `√2 − 1 = [2, 2, 2, …]`, expanded to 30 digits.
    pub fn silver() -> Self {
        Self::from_digits(&[2; 30]).expect("silver digits are valid")
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn value_as<T: Real>(&self) -> T {
        lit(self.value)
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    /// Convergents `(p_k, q_k)` for `k = 1..=n`, with `p_1/q_1 = 1/a_1`.
    pub fn convergents(&self) -> &[(u128, u128)] {
        &self.convergents
    }

    /// Partial sums `W_N = Σ_{k≤N} log(q_{k+1})/q_k`, one per available `N`.
    pub fn brjuno_partial_sums(&self) -> &[f64] {
        &self.brjuno
    }

    pub fn brjuno_sum(&self) -> f64 {
        self.brjuno.last().copied().unwrap_or(0.0)
    }

    pub fn is_bounded_type(&self, bound: u64) -> bool {
        self.digits.iter().all(|&a| a <= bound)
    }

    /// `e^{2πiθ}`.
    pub fn multiplier<T: Real>(&self) -> num_complex::Complex<T> {
        crate::scalar::cis_turns(self.value_as::<T>())
    }

    /// Convergent `k` (1-based) lies above `θ` exactly when `k` is odd.
    pub fn convergent_above(k: usize) -> bool {
        k % 2 == 1
    }

    fn push_digit(&mut self, a: u64) -> bool {
        let a = a as u128;
        let (pm1, qm1, pm2, qm2) = match self.convergents.len() {
            0 => (0u128, 1u128, 1u128, 0u128),
            1 => (self.convergents[0].0, self.convergents[0].1, 0, 1),
            n => (
                self.convergents[n - 1].0,
                self.convergents[n - 1].1,
                self.convergents[n - 2].0,
                self.convergents[n - 2].1,
            ),
        };
        let p = a.checked_mul(pm1).and_then(|v| v.checked_add(pm2));
        let q = a.checked_mul(qm1).and_then(|v| v.checked_add(qm2));
        match (p, q) {
            (Some(p), Some(q)) => {
                self.digits.push(a as u64);
                self.convergents.push((p, q));
                true
            }
            _ => false,
        }
    }

    fn finish(&mut self) {
        self.brjuno.clear();
        let mut sum = 0.0;
        for w in self.convergents.windows(2) {
            sum += (w[1].1 as f64).ln() / w[0].1 as f64;
            self.brjuno.push(sum);
        }
    }
}

/// Expands `value ∈ (0,1)` into at most `n` continued-fraction digits.
pub fn continued_fraction<V: ExactValue>(value: &V, n: usize) -> Result<RotationAngle> {
    let exact = value.to_exact().ok_or(Error::OutOfRange(f64::NAN))?;
    let as_f64 = exact.to_f64().unwrap_or(f64::NAN);
    if !(exact > BigRational::zero() && exact < BigRational::one()) {
        return Err(Error::OutOfRange(as_f64));
    }
    if n == 0 {
        return Err(Error::InvalidParameter(
            "digit count must be positive".into(),
        ));
    }
    let mut angle = RotationAngle {
        value: as_f64,
        digits: Vec::new(),
        convergents: Vec::new(),
        brjuno: Vec::new(),
    };
    let mut x = exact;
    while angle.digits.len() < n {
        if x.is_zero() {
            return Err(Error::RationalInput(angle.digits.len()));
        }
        let inv = x.recip();
        let a = inv.floor();
        x = inv - &a;
        let a = a
            .to_integer()
            .to_u64()
            .ok_or_else(|| Error::InvalidParameter("digit overflow".into()))?;
        if !angle.push_digit(a) {
            break;
        }
    }
    angle.finish();
    Ok(angle)
}

/// Lift `F: ℝ → ℝ` of a degree-one circle map, `F(x+1) = F(x) + 1`.
pub trait CircleMapLift<T: Real> {
    fn lift(&self, x: T) -> T;

    fn name(&self) -> String {
        "circle map".to_string()
    }
}

impl<T: Real, L: CircleMapLift<T> + ?Sized> CircleMapLift<T> for &L {
    fn lift(&self, x: T) -> T {
        (**self).lift(x)
    }

    fn name(&self) -> String {
        (**self).name()
    }
}

/// `x ↦ x + shift`.
#[derive(Clone, Copy, Debug)]
pub struct RigidRotation<T> {
    pub shift: T,
}

impl<T: Real> CircleMapLift<T> for RigidRotation<T> {
    fn lift(&self, x: T) -> T {
        x + self.shift
    }

    fn name(&self) -> String {
        format!("rigid rotation by {}", self.shift)
    }
}

/// `x ↦ x + shift + amplitude·sin(2πx)`; a homeomorphism while
/// `2π·|amplitude| ≤ 1`.
#[derive(Clone, Copy, Debug)]
pub struct SineCircleMap<T> {
    pub shift: T,
    pub amplitude: T,
}

impl<T: Real> CircleMapLift<T> for SineCircleMap<T> {
    fn lift(&self, x: T) -> T {
        x + self.shift + self.amplitude * (T::TAU() * x).sin()
    }

    fn name(&self) -> String {
        format!(
            "sine circle map (shift {}, amplitude {})",
            self.shift, self.amplitude
        )
    }
}

/// A one-parameter family of lifts indexed by `t ∈ [0,1]`.
pub trait LiftFamily<T: Real> {
    type Lift: CircleMapLift<T>;

    fn at(&self, t: T) -> Self::Lift;

    fn name(&self) -> String {
        "lift family".to_string()
    }
}

/// `t ↦ (x ↦ x + t)`, the lifts of `z ↦ e^{2πit}z`.
#[derive(Clone, Copy, Debug, Default)]
pub struct RigidFamily;

impl<T: Real> LiftFamily<T> for RigidFamily {
    type Lift = RigidRotation<T>;

    fn at(&self, t: T) -> RigidRotation<T> {
        RigidRotation { shift: t }
    }

    fn name(&self) -> String {
        "rigid".to_string()
    }
}

/// Checks periodicity and monotonicity of a lift on a uniform grid.
pub fn validate_lift<T: Real, L: CircleMapLift<T> + ?Sized>(
    lift: &L,
    samples: usize,
) -> Result<()> {
    let period_tol: T = if T::epsilon() < lit(1e-10) {
        lit(1e-12)
    } else {
        lit(1e-4)
    };
    let mut prev: Option<T> = None;
    for i in 0..=samples {
        let x = lit::<T>(i as f64) / lit::<T>(samples as f64);
        let fx = lift.lift(x);
        if !fx.is_finite() {
            return Err(Error::InvalidLift(format!(
                "{} is not finite at x = {x}",
                lift.name()
            )));
        }
        let gap = lift.lift(x + T::one()) - fx - T::one();
        if gap.abs() > period_tol * (T::one() + fx.abs()) {
            return Err(Error::InvalidLift(format!(
                "F(x+1) - F(x) - 1 = {gap} at x = {x}"
            )));
        }
        if let Some(p) = prev {
            if fx < p - period_tol {
                return Err(Error::InvalidLift(format!(
                    "{} decreases near x = {x}",
                    lift.name()
                )));
            }
        }
        prev = Some(fx);
    }
    Ok(())
}

/// Orbit of a lift tracked as an integer count plus a fractional position,
/// which keeps full precision over long orbits.
struct LiftOrbit<'a, T: Real, L: ?Sized> {
    lift: &'a L,
    x: T,
    turns: i64,
}

impl<'a, T: Real, L: CircleMapLift<T> + ?Sized> LiftOrbit<'a, T, L> {
    fn new(lift: &'a L, x0: T) -> Self {
        let k = x0.floor();
        LiftOrbit {
            lift,
            x: x0 - k,
            turns: k.to_i64().unwrap_or(0),
        }
    }

    fn step(&mut self) {
        let y = self.lift.lift(self.x);
        let k = y.floor();
        self.x = y - k;
        self.turns += k.to_i64().unwrap_or(0);
    }

    /// `F^n(x0) − x0 − shift`, computed without cancellation in the integer part.
    fn displacement(&self, x0: T, shift: i128) -> T {
        let k = x0.floor();
        let int_part = self.turns as i128 - k.to_i64().unwrap_or(0) as i128 - shift;
        lit::<T>(int_part as f64) + (self.x - (x0 - k))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RotationEstimate {
    pub estimate: f64,
    pub error_bound: f64,
    pub iterations: usize,
}

/// Convergent denominators `q ≤ qmax` of a float in `[0,1)`.
fn float_denominators(x: f64, qmax: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let (mut qm2, mut qm1) = (0u64, 1u64);
    let mut r = x;
    for _ in 0..64 {
        if r <= 0.0 || !r.is_finite() {
            break;
        }
        let inv = 1.0 / r;
        let a = inv.floor();
        if a > qmax as f64 {
            break;
        }
        let a = a as u64;
        let q = match a.checked_mul(qm1).and_then(|v| v.checked_add(qm2)) {
            Some(q) if q <= qmax => q,
            _ => break,
        };
        if out.last() != Some(&q) {
            out.push(q);
        }
        qm2 = qm1;
        qm1 = q;
        r = inv - a as f64;
        if r < 1e-15 {
            break;
        }
    }
    out
}

/// Rotation number of a lift from the orbit of `x0`.
///
/// The crude Birkhoff average `(F^N(x0) − x0)/N` is refined by re-reading the
/// orbit at the convergent denominators of that average; the error bound is
/// the spread of the last three refinements.
pub fn rotation_number<T: Real, L: CircleMapLift<T> + ?Sized>(
    lift: &L,
    x0: T,
    budget: usize,
) -> Result<RotationEstimate> {
    if budget < 1000 {
        return Err(Error::InvalidParameter(format!(
            "rotation-number budget {budget} < 1000"
        )));
    }
    validate_lift(lift, 256)?;
    let mut orbit = LiftOrbit::new(lift, x0);
    for _ in 0..budget {
        orbit.step();
    }
    let crude = to_f64(orbit.displacement(x0, 0)) / budget as f64;
    let mut qs = float_denominators(crude - crude.floor(), budget as u64);
    if qs.last() != Some(&(budget as u64)) {
        qs.push(budget as u64);
    }
    let mut orbit = LiftOrbit::new(lift, x0);
    let mut refinements = Vec::with_capacity(qs.len());
    let mut n = 0u64;
    for &q in &qs {
        while n < q {
            orbit.step();
            n += 1;
        }
        refinements.push(to_f64(orbit.displacement(x0, 0)) / q as f64);
    }
    // The final entry is the full budget; the estimate is the last convergent
    // denominator when one exists.
    let conv: Vec<f64> = if refinements.len() > 1 {
        refinements[..refinements.len() - 1].to_vec()
    } else {
        refinements.clone()
    };
    let estimate = *conv.last().expect("non-empty refinements");
    let tail = &conv[conv.len().saturating_sub(3)..];
    let spread = tail
        .iter()
        .fold(0.0f64, |m, &e| m.max((e - estimate).abs()));
    let floor = 4.0 * to_f64(T::epsilon()) * estimate.abs().max(1.0);
    Ok(RotationEstimate {
        estimate,
        error_bound: spread.max(floor),
        iterations: budget,
    })
}

/// Outcome of comparing a rotation number against a target angle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RotationOrder {
    Below,
    Above,
    /// Consistent with the target through convergent `depth`: the rotation
    /// number lies between the last two convergents examined.
    Undecided {
        depth: usize,
    },
}

/// Decides `ρ(F) − (θ + shift)` by reading `F^{q_k}(x0) − x0 − p_k` at the
/// target's convergents: a negative value at a convergent below `θ` proves
/// `ρ < θ`, a positive one at a convergent above proves `ρ > θ`.
pub fn compare_rotation<T: Real, L: CircleMapLift<T> + ?Sized>(
    lift: &L,
    target: &RotationAngle,
    shift: i64,
    x0: T,
    depth: usize,
) -> RotationOrder {
    let convs = &target.convergents()[..depth.min(target.convergents().len())];
    let mut orbit = LiftOrbit::new(lift, x0);
    let mut n: u128 = 0;
    for (i, &(p, q)) in convs.iter().enumerate() {
        while n < q {
            orbit.step();
            n += 1;
        }
        let p_shifted = p as i128 + shift as i128 * q as i128;
        let d = orbit.displacement(x0, p_shifted);
        if RotationAngle::convergent_above(i + 1) {
            if d > T::zero() {
                return RotationOrder::Above;
            }
        } else if d < T::zero() {
            return RotationOrder::Below;
        }
    }
    RotationOrder::Undecided { depth: convs.len() }
}

#[derive(Clone, Copy, Debug)]
pub struct CalibrationOptions {
    /// Largest convergent denominator the comparison may iterate to.
    pub max_denominator: u128,
    /// Permit tolerances below `1e-9`.
    pub allow_fine_tolerance: bool,
    /// Bisection steps before giving up.
    pub max_steps: usize,
    /// Grid size, in both `t` and `x`, of the check that lifts increase with `t` (0 disables it).
    pub monotone_grid: usize,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions {
            max_denominator: 5_000_000,
            allow_fine_tolerance: false,
            max_steps: 200,
            monotone_grid: 9,
        }
    }
}

pub const MIN_CALIBRATION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub t: f64,
    pub bracket: (f64, f64),
    /// Certified bound on `|ρ(family(t)) − θ|`.
    pub rho_bound: f64,
    pub steps: usize,
}

/// Finds `t ∈ [0,1]` with `|ρ(family(t)) − θ| ≤ tol` by bisection, assuming
/// the rotation number is nondecreasing in `t`.
pub fn calibrate_t<T: Real, F: LiftFamily<T>>(
    family: &F,
    target: &RotationAngle,
    tol: f64,
    opts: &CalibrationOptions,
) -> Result<Calibration> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol}")));
    }
    if tol < MIN_CALIBRATION_TOL && !opts.allow_fine_tolerance {
        return Err(Error::ToleranceTooSmall(tol));
    }
    let convs = target.convergents();
    // Depth at which two consecutive convergents pin the rotation number to tol.
    let depth = (1..convs.len())
        .find(|&k| 1.0 / (convs[k].1 as f64 * convs[k - 1].1 as f64) <= tol)
        .map(|k| k + 1)
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "{} continued-fraction digits cannot resolve tolerance {tol}",
                convs.len()
            ))
        })?;
    let bound_at = |d: usize| 1.0 / (convs[d - 1].1 as f64 * convs[d - 2].1 as f64);
    if convs[depth - 1].1 > opts.max_denominator {
        return Err(Error::BudgetExhausted {
            tol,
            width: bound_at(depth),
        });
    }

    let x0 = T::zero();
    if opts.monotone_grid > 1 {
        // ρ is monotone in t whenever the lifts are pointwise monotone in t.
        let g = opts.monotone_grid;
        for i in 1..g {
            let (a, b) = (
                family.at(lit((i - 1) as f64 / (g - 1) as f64)),
                family.at(lit(i as f64 / (g - 1) as f64)),
            );
            for k in 0..g {
                let x: T = lit(k as f64 / g as f64);
                if b.lift(x) < a.lift(x) {
                    return Err(Error::InvalidLift(format!(
                        "{}: lift not monotone in t",
                        family.name()
                    )));
                }
            }
        }
    }
    let theta = target.value();
    let rho0 = rotation_number(&family.at(T::zero()), x0, 2000)?.estimate;
    let order_at =
        |t: f64, shift: i64| compare_rotation(&family.at(lit(t)), target, shift, x0, depth);
    let mut shift = (rho0 - theta).ceil() as i64;
    let mut bracketed = false;
    for _ in 0..4 {
        match (order_at(0.0, shift), order_at(1.0, shift)) {
            (RotationOrder::Undecided { .. }, _) => {
                return Ok(Calibration {
                    t: 0.0,
                    bracket: (0.0, 0.0),
                    rho_bound: bound_at(depth),
                    steps: 0,
                });
            }
            (_, RotationOrder::Undecided { .. }) => {
                return Ok(Calibration {
                    t: 1.0,
                    bracket: (1.0, 1.0),
                    rho_bound: bound_at(depth),
                    steps: 0,
                });
            }
            (RotationOrder::Above, _) => shift += 1,
            (_, RotationOrder::Below) => shift -= 1,
            (RotationOrder::Below, RotationOrder::Above) => {
                bracketed = true;
                break;
            }
        }
    }
    if !bracketed {
        return Err(Error::BracketFailure {
            target: theta,
            lo: rho0,
            hi: rho0 + 1.0,
        });
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for step in 1..=opts.max_steps {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match order_at(mid, shift) {
            RotationOrder::Below => lo = mid,
            RotationOrder::Above => hi = mid,
            RotationOrder::Undecided { depth } => {
                return Ok(Calibration {
                    t: mid,
                    bracket: (lo, hi),
                    rho_bound: bound_at(depth),
                    steps: step,
                });
            }
        }
    }
    Err(Error::BudgetExhausted {
        tol,
        width: hi - lo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const GOLDEN: f64 = 0.618_033_988_749_894_8;

    #[test]
    fn golden_digits_and_convergents() {
        let a = continued_fraction(&0.61803398875f64, 8).unwrap();
        assert_eq!(a.digits(), &[1; 8]);
        let q: Vec<u128> = a.convergents().iter().map(|c| c.1).collect();
        assert_eq!(q, vec![1, 2, 3, 5, 8, 13, 21, 34]);
        let p: Vec<u128> = a.convergents().iter().map(|c| c.0).collect();
        assert_eq!(p, vec![1, 1, 2, 3, 5, 8, 13, 21]);
    }

    #[test]
    fn silver_digits() {
        let a = continued_fraction(&(2f64.sqrt() - 1.0), 6).unwrap();
        assert_eq!(a.digits(), &[2; 6]);
    }

    #[test]
    fn just_below_half_starts_with_two() {
        let a = continued_fraction(&(0.5 - 1e-9), 3).unwrap();
        assert_eq!(a.digits()[0], 2);
    }

    #[test]
    fn rational_input_is_rejected() {
        assert_eq!(continued_fraction(&0.5f64, 3), Err(Error::RationalInput(1)));
        let r = Ratio::new(3i64, 8);
        assert!(matches!(
            continued_fraction(&r, 5),
            Err(Error::RationalInput(_))
        ));
        assert!(matches!(
            continued_fraction(&1.5f64, 3),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn exact_rational_input_gives_long_honest_expansion() {
        // 40-digit decimal of the golden mean.
        let num: BigInt = "6180339887498948482045868343656381177203".parse().unwrap();
        let den: BigInt = num_traits::pow(BigInt::from(10), 40);
        let a = continued_fraction(&BigRational::new(num, den), 40).unwrap();
        assert!(a.digits()[..40].iter().all(|&d| d == 1));
    }

    #[test]
    fn brjuno_partial_sums_match_hand_sum() {
        let a = RotationAngle::from_digits(&[1, 1, 1, 1]).unwrap();
        // q = 1, 2, 3, 5
        let w = (2f64).ln() / 1.0 + (3f64).ln() / 2.0 + (5f64).ln() / 3.0;
        assert!((a.brjuno_sum() - w).abs() < 1e-15);
        assert_eq!(a.brjuno_partial_sums().len(), 3);
    }

    #[test]
    fn bounded_type_flag() {
        let a = RotationAngle::from_digits(&[1, 3, 2, 7]).unwrap();
        assert!(a.is_bounded_type(7));
        assert!(!a.is_bounded_type(6));
    }

    #[test]
    fn golden_constructor_value() {
        assert!((RotationAngle::golden().value() - GOLDEN).abs() < 1e-15);
    }

    #[test]
    fn rigid_rotation_number_is_exact() {
        let est = rotation_number(&RigidRotation { shift: GOLDEN }, 0.0, 100_000).unwrap();
        assert!((est.estimate - GOLDEN).abs() <= est.error_bound.max(1e-12));
        assert!((est.estimate - GOLDEN).abs() < 1e-12);
    }

    #[test]
    fn sine_map_matches_brute_force_orbit() {
        let lift = SineCircleMap {
            shift: 0.30,
            amplitude: 0.05,
        };
        // Oracle: plain Birkhoff average over 10^7 steps, error < 1e-7.
        let n = 10_000_000u64;
        let mut x = 0.0f64;
        for _ in 0..n {
            x = lift.lift(x);
        }
        let oracle = x / n as f64;
        let est = rotation_number(&lift, 0.0, 100_000).unwrap();
        assert!(
            (est.estimate - oracle).abs() < 2e-6,
            "{} vs {}",
            est.estimate,
            oracle
        );
    }

    #[test]
    fn decreasing_lift_is_invalid() {
        let lift = SineCircleMap {
            shift: 0.1,
            amplitude: 0.5,
        };
        assert!(matches!(
            rotation_number(&lift, 0.0, 1000),
            Err(Error::InvalidLift(_))
        ));
    }

    #[test]
    fn small_budget_is_rejected() {
        assert!(rotation_number(&RigidRotation { shift: 0.3 }, 0.0, 10).is_err());
    }

    #[test]
    fn comparison_orders_rigid_rotations() {
        let g = RotationAngle::golden();
        assert_eq!(
            compare_rotation(&RigidRotation { shift: 0.6 }, &g, 0, 0.0, 30),
            RotationOrder::Below
        );
        assert_eq!(
            compare_rotation(&RigidRotation { shift: 0.62 }, &g, 0, 0.0, 30),
            RotationOrder::Above
        );
        assert!(matches!(
            compare_rotation(&RigidRotation { shift: GOLDEN }, &g, 0, 0.0, 30),
            RotationOrder::Undecided { .. }
        ));
        assert_eq!(
            compare_rotation(&RigidRotation { shift: 1.6 }, &g, 1, 0.0, 30),
            RotationOrder::Below
        );
    }

    #[test]
    fn calibrate_rigid_family_returns_theta() {
        let g = RotationAngle::golden();
        let cal =
            calibrate_t::<f64, _>(&RigidFamily, &g, 1e-9, &CalibrationOptions::default()).unwrap();
        assert!((cal.t - GOLDEN).abs() < 1e-8, "{cal:?}");
        assert!(cal.rho_bound <= 1e-9);
    }

    #[test]
    fn calibrate_refuses_tiny_tolerance() {
        let g = RotationAngle::golden();
        let r = calibrate_t::<f64, _>(&RigidFamily, &g, 1e-12, &CalibrationOptions::default());
        assert_eq!(r, Err(Error::ToleranceTooSmall(1e-12)));
        let opts = CalibrationOptions {
            allow_fine_tolerance: true,
            ..Default::default()
        };
        assert!(calibrate_t::<f64, _>(&RigidFamily, &g, 1e-12, &opts).is_ok());
    }

    struct Shrunk;
    impl LiftFamily<f64> for Shrunk {
        type Lift = RigidRotation<f64>;
        fn at(&self, t: f64) -> RigidRotation<f64> {
            RigidRotation { shift: 0.1 * t }
        }
    }

    #[test]
    fn calibrate_reports_bracket_failure() {
        let g = RotationAngle::golden();
        assert!(matches!(
            calibrate_t(&Shrunk, &g, 1e-8, &CalibrationOptions::default()),
            Err(Error::BracketFailure { .. })
        ));
    }

    struct Decreasing;
    impl LiftFamily<f64> for Decreasing {
        type Lift = RigidRotation<f64>;
        fn at(&self, t: f64) -> RigidRotation<f64> {
            RigidRotation { shift: 1.0 - t }
        }
    }

    #[test]
    fn calibrate_detects_non_monotone_family() {
        let g = RotationAngle::golden();
        assert!(matches!(
            calibrate_t(&Decreasing, &g, 1e-8, &CalibrationOptions::default()),
            Err(Error::InvalidLift(_))
        ));
    }

    #[test]
    fn f32_rotation_number() {
        let est = rotation_number(&RigidRotation { shift: 0.25f32 }, 0.0f32, 1000).unwrap();
        assert!((est.estimate - 0.25).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn convergents_approximate_value(x in 0.001f64..0.999) {
            if let Ok(a) = continued_fraction(&x, 12) {
                let c = a.convergents();
                for k in 0..c.len().saturating_sub(1) {
                    let (p, q) = c[k];
                    let err = (x - p as f64 / q as f64).abs();
                    let bound = 1.0 / (q as f64 * c[k + 1].1 as f64);
                    prop_assert!(err < bound * (1.0 + 1e-9) + 1e-15);
                    prop_assert!(c[k + 1].1 > q);
                }
            }
        }

        #[test]
        fn rigid_rotation_number_recovers_shift(s in 0.0f64..1.0) {
            let est = rotation_number(&RigidRotation { shift: s }, 0.37, 5000).unwrap();
            prop_assert!((est.estimate - s).abs() < 1e-9);
        }

        #[test]
        fn rotation_number_is_conjugation_invariant(s in 0.05f64..0.95, eps in -0.1f64..0.1) {
            // G = R_s conjugated by φ(x) = x + eps·sin(2πx)/(2π).
            let phi = |x: f64| x + eps * (std::f64::consts::TAU * x).sin() / std::f64::consts::TAU;
            struct Conj<P> { s: f64, phi: P, eps: f64 }
            impl<P: Fn(f64) -> f64> CircleMapLift<f64> for Conj<P> {
                fn lift(&self, x: f64) -> f64 {
                    // invert φ by Newton, rotate, push forward
                    let mut y = x;
                    for _ in 0..50 {
                        let f = (self.phi)(y) - x;
                        let d = 1.0 + self.eps * (std::f64::consts::TAU * y).cos();
                        y -= f / d;
                    }
                    (self.phi)(y + self.s)
                }
            }
            let g = Conj { s, phi, eps };
            let a = rotation_number(&RigidRotation { shift: s }, 0.0, 4000).unwrap();
            let b = rotation_number(&g, 0.0, 4000).unwrap();
            prop_assert!((a.estimate - b.estimate).abs() <= a.error_bound + b.error_bound + 2.0 / 4000.0);
        }
    }
}
