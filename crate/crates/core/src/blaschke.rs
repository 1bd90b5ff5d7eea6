//! The degree-5 Blaschke model family
//!
//! ```text
//! B(z) = e^{2πit} z³ (z − p)/(1 − p̄z) · (z − q)/(1 − q̄z),   |p|, |q| > 1,
//! ```
//!
//! with a double critical point at `z = 1` and a marked free critical point
//! `μ`. Also hosts the standard degree-3 map `f_θ`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{
    calibrate_t, Calibration, CalibrationOptions, CircleMapLift, LiftFamily, RotationAngle,
};
use crate::error::{Error, Result};
use crate::scalar::{cis_turns, lit, solve_dense, to_f64, Real};

/// Distance below which a point counts as a pole.
pub const POLE_TOL: f64 = 1e-14;
/// `|z|` beyond which a Blaschke orbit is declared escaping.
pub const C5_ESCAPE: f64 = 1e6;
/// `|μ|` within this distance of 1 selects the circle branch of the solver.
pub const CIRCLE_TOL: f64 = 1e-12;

/// Blaschke factor `(z − a)/(1 − āz)`.
#[inline]
fn factor<T: Real>(z: Complex<T>, a: Complex<T>) -> Complex<T> {
    (z - a) / (Complex::new(T::one(), T::zero()) - a.conj() * z)
}

/// A rational map `e^{2πit} z^power Π (z − a)/(1 − āz)` with all zeros `a`
/// outside the closed disk.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlaschkeMap<T> {
    pub t: T,
    pub power: u32,
    pub zeros: Vec<Complex<T>>,
}

impl<T: Real> BlaschkeMap<T> {
    pub fn degree5(t: T, p: Complex<T>, q: Complex<T>) -> Self {
        BlaschkeMap {
            t,
            power: 3,
            zeros: vec![p, q],
        }
    }

    /// `e^{2πit} z² (z − 3)/(1 − 3z)`.
    pub fn standard(t: T) -> Self {
        BlaschkeMap {
            t,
            power: 2,
            zeros: vec![Complex::new(lit(3.0), T::zero())],
        }
    }

    /// Evaluation without the pole check.
    #[inline]
    pub fn apply(&self, z: Complex<T>) -> Complex<T> {
        let mut w = cis_turns(self.t) * z.powu(self.power);
        for &a in &self.zeros {
            w *= factor(z, a);
        }
        w
    }

    /// Evaluation on the Riemann sphere; non-finite input is `∞ ↦ ∞`.
    pub fn eval(&self, z: Complex<T>) -> Result<Complex<T>> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Ok(Complex::new(T::infinity(), T::infinity()));
        }
        for &a in &self.zeros {
            if (Complex::new(T::one(), T::zero()) - a.conj() * z).norm() < lit(POLE_TOL) {
                return Err(Error::Pole(format!("{z}")));
            }
        }
        Ok(self.apply(z))
    }

    /// Logarithmic derivative `B′/B`.
    pub fn log_derivative(&self, z: Complex<T>) -> Complex<T> {
        log_derivative(self.power, &self.zeros, z)
    }

    /// `B′(z)`.
    pub fn derivative(&self, z: Complex<T>) -> Complex<T> {
        self.apply(z) * self.log_derivative(z)
    }

    /// Lift of the restriction to the unit circle.
    pub fn circle_lift(&self) -> BlaschkeLift<T> {
        BlaschkeLift::new(self)
    }
}

fn log_derivative<T: Real>(power: u32, zeros: &[Complex<T>], z: Complex<T>) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    let mut l = Complex::new(lit::<T>(power as f64), T::zero()) / z;
    for &a in zeros {
        l += Complex::new(T::one() - a.norm_sqr(), T::zero()) / ((z - a) * (one - a.conj() * z));
    }
    l
}

/// Lift of `B|_𝕋` in turns. On the circle each factor equals
/// `z̄·e^{2i·arg(z − a)}` and `arg(z − a) = arg(−a) + Arg(1 − z/a)` is
/// continuous because `|a| > 1`, so
/// `F(x) = t + (power − #zeros)·x + Σ arg(z − a)/π`.
#[derive(Clone, Debug)]
pub struct BlaschkeLift<T> {
    t: T,
    slope: i32,
    offset: T,
    inv_zeros: Vec<Complex<T>>,
}

impl<T: Real> BlaschkeLift<T> {
    pub fn new(map: &BlaschkeMap<T>) -> Self {
        let offset = map.zeros.iter().fold(T::zero(), |s, a| s + (-*a).arg()) / T::PI();
        BlaschkeLift {
            t: map.t,
            slope: map.power as i32 - map.zeros.len() as i32,
            offset,
            inv_zeros: map.zeros.iter().map(|a| a.inv()).collect(),
        }
    }

    pub fn with_t(&self, t: T) -> Self {
        BlaschkeLift { t, ..self.clone() }
    }
}

impl<T: Real> CircleMapLift<T> for BlaschkeLift<T> {
    #[inline]
    fn lift(&self, x: T) -> T {
        let z = cis_turns(x);
        let one = Complex::new(T::one(), T::zero());
        let mut s = T::zero();
        for &ia in &self.inv_zeros {
            s += (one - z * ia).arg();
        }
        self.t + lit::<T>(self.slope as f64) * x + self.offset + s / T::PI()
    }

    fn name(&self) -> String {
        "Blaschke circle restriction".to_string()
    }
}

/// The family `t ↦ lift of B_t|_𝕋` for fixed zeros.
#[derive(Clone, Debug)]
pub struct BlaschkeFamily<T> {
    base: BlaschkeLift<T>,
}

impl<T: Real> BlaschkeFamily<T> {
    pub fn new(power: u32, zeros: Vec<Complex<T>>) -> Self {
        BlaschkeFamily {
            base: BlaschkeLift::new(&BlaschkeMap {
                t: T::zero(),
                power,
                zeros,
            }),
        }
    }

    pub fn standard() -> Self {
        Self::new(2, vec![Complex::new(lit(3.0), T::zero())])
    }
}

impl<T: Real> LiftFamily<T> for BlaschkeFamily<T> {
    type Lift = BlaschkeLift<T>;

    fn at(&self, t: T) -> BlaschkeLift<T> {
        self.base.with_t(t)
    }

    fn name(&self) -> String {
        "Blaschke".to_string()
    }
}

/// Which critical point carries the free marking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Marking {
    /// `|μ| > 1`: free critical point `μ`, double critical point `1`.
    Outside,
    /// `|μ| < 1`: the same map as for `1/μ` with the markings swapped.
    Inside,
    /// `|μ| = 1`: double critical points at `1` and `μ`.
    Circle,
}

fn marking_of(mu_abs: f64) -> Marking {
    if (mu_abs - 1.0).abs() <= CIRCLE_TOL {
        Marking::Circle
    } else if mu_abs > 1.0 {
        Marking::Outside
    } else {
        Marking::Inside
    }
}

/// A solved member of the marked family.
#[derive(Clone, Debug, Serialize)]
pub struct BlaschkeParams<T> {
    pub t: T,
    pub p: Complex<T>,
    pub q: Complex<T>,
    pub mu: Complex<T>,
    pub marking: Marking,
    pub theta: RotationAngle,
    pub residuals: [T; 4],
    pub calibration: Calibration,
}

impl<T: Real> BlaschkeParams<T> {
    pub fn map(&self) -> BlaschkeMap<T> {
        BlaschkeMap::degree5(self.t, self.p, self.q)
    }

    pub fn eval(&self, z: Complex<T>) -> Result<Complex<T>> {
        self.map().eval(z)
    }

    /// The free critical point outside the open disk.
    pub fn free_critical_point(&self) -> Complex<T> {
        match self.marking {
            Marking::Inside => self.mu.inv(),
            _ => self.mu,
        }
    }
}

/// `B′/B` of the degree-5 family at `z` (independent of `t`).
pub fn critical_log_derivative<T: Real>(p: Complex<T>, q: Complex<T>, z: Complex<T>) -> Complex<T> {
    log_derivative(3, &[p, q], z)
}

/// The two real conditions for a double critical point at `z = 1`:
/// `Σ (|a|²−1)/|a−1|² − 3` and `Im Σ (a − ā)(|a|²−1)/|a−1|⁴`.
fn double_critical_at_one<T: Real>(p: Complex<T>, q: Complex<T>) -> [T; 2] {
    let one = Complex::new(T::one(), T::zero());
    let mut r0 = -lit::<T>(3.0);
    let mut r1 = T::zero();
    for a in [p, q] {
        let d2 = (a - one).norm_sqr();
        let m = a.norm_sqr() - T::one();
        r0 += m / d2;
        r1 += lit::<T>(2.0) * a.im * m / (d2 * d2);
    }
    [r0, r1]
}

/// Residuals of the critical-point equations for zeros `p, q` and marked
/// critical point `μ`: the double-critical conditions at 1 followed by
/// `Re L(μ), Im L(μ)` with `L = B′/B`; for `|μ| = 1` the last pair is
/// replaced by the double-critical conditions at `μ`.
pub fn critical_residuals<T: Real>(p: Complex<T>, q: Complex<T>, mu: Complex<T>) -> [T; 4] {
    let [r0, r1] = double_critical_at_one(p, q);
    if marking_of(to_f64(mu.norm())) == Marking::Circle {
        let rot = mu.conj() / mu.norm();
        let [r2, r3] = double_critical_at_one(p * rot, q * rot);
        [r0, r1, r2, r3]
    } else {
        let l = critical_log_derivative(p, q, mu);
        [r0, r1, l.re, l.im]
    }
}

/// Residuals actually driven to zero by Newton: the `L(μ)` pair is scaled
/// by `μ` so that it stays order one for large `|μ|`.
fn scaled_residuals<T: Real>(x: &[T; 4], mu: Complex<T>, circle: bool) -> [T; 4] {
    let p = Complex::new(x[0], x[1]);
    let q = Complex::new(x[2], x[3]);
    let [r0, r1] = double_critical_at_one(p, q);
    if circle {
        let [r2, r3] = double_critical_at_one(p * mu.conj(), q * mu.conj());
        [r0, r1, r2, r3]
    } else {
        let l = critical_log_derivative(p, q, mu) * mu;
        [r0, r1, l.re, l.im]
    }
}

fn max_abs<T: Real>(r: &[T; 4]) -> T {
    r.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Convergence threshold on the max-norm of the scaled residuals.
    pub residual_tol: f64,
    pub max_steps: usize,
    /// Relative central-difference step for the Jacobian.
    pub fd_step: f64,
    pub random_starts: usize,
    pub seed: u64,
    /// Starting point from a neighbouring solve.
    pub hint: Option<(Complex<f64>, Complex<f64>)>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            residual_tol: 1e-13,
            max_steps: 200,
            fd_step: 1e-6,
            random_starts: 8,
            seed: 0x5eed,
            hint: None,
        }
    }
}

/// Zeros `(p, q)` realizing a critical configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalSolution<T> {
    pub p: Complex<T>,
    pub q: Complex<T>,
    pub residual: T,
    pub steps: usize,
}

impl<T: Real> CriticalSolution<T> {
    /// Distance between two solutions as unordered pairs.
    pub fn distance(&self, other: &Self) -> T {
        let direct = (self.p - other.p).norm().max((self.q - other.q).norm());
        let swapped = (self.p - other.q).norm().max((self.q - other.p).norm());
        direct.min(swapped)
    }
}

/// Damped Newton from one start; `None` when it fails to converge or leaves
/// the admissible region `|p|, |q| > 1`.
fn newton_from<T: Real>(
    start: (Complex<T>, Complex<T>),
    mu: Complex<T>,
    circle: bool,
    opts: &SolverOptions,
) -> std::result::Result<CriticalSolution<T>, T> {
    let admissible = |x: &[T; 4]| {
        let one = T::one() + lit(1e-9);
        x[0].hypot(x[1]) > one && x[2].hypot(x[3]) > one && x.iter().all(|v| v.is_finite())
    };
    let mut x = [start.0.re, start.0.im, start.1.re, start.1.im];
    if !admissible(&x) {
        return Err(T::infinity());
    }
    let mut r = scaled_residuals(&x, mu, circle);
    let mut norm = max_abs(&r);
    let tol: T = lit(opts.residual_tol);
    for step in 0..opts.max_steps {
        if norm <= tol {
            return Ok(CriticalSolution {
                p: Complex::new(x[0], x[1]),
                q: Complex::new(x[2], x[3]),
                residual: norm,
                steps: step,
            });
        }
        let mut jac = [[T::zero(); 4]; 4];
        for j in 0..4 {
            let h = lit::<T>(opts.fd_step) * x[j].abs().max(T::one());
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let rp = scaled_residuals(&xp, mu, circle);
            let rm = scaled_residuals(&xm, mu, circle);
            for i in 0..4 {
                jac[i][j] = (rp[i] - rm[i]) / (h + h);
            }
        }
        let rhs = [-r[0], -r[1], -r[2], -r[3]];
        let Some(delta) = solve_dense(jac, rhs) else {
            return Err(norm);
        };
        let mut lambda = T::one();
        let mut accepted = false;
        for _ in 0..40 {
            let trial = [
                x[0] + lambda * delta[0],
                x[1] + lambda * delta[1],
                x[2] + lambda * delta[2],
                x[3] + lambda * delta[3],
            ];
            if admissible(&trial) {
                let rt = scaled_residuals(&trial, mu, circle);
                let nt = max_abs(&rt);
                if nt < norm {
                    x = trial;
                    r = rt;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            lambda *= lit(0.5);
        }
        if !accepted {
            return Err(norm);
        }
    }
    if norm <= tol {
        Ok(CriticalSolution {
            p: Complex::new(x[0], x[1]),
            q: Complex::new(x[2], x[3]),
            residual: norm,
            steps: opts.max_steps,
        })
    } else {
        Err(norm)
    }
}

/// Marked critical point brought to `|μ| ≥ 1`, with its marking.
fn normalize_mu<T: Real>(mu: Complex<T>) -> Result<(Complex<T>, Marking)> {
    let abs = to_f64(mu.norm());
    if !(abs > 0.0) || !abs.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "marked critical point must be finite and nonzero, got {mu}"
        )));
    }
    let marking = marking_of(abs);
    let target = match marking {
        Marking::Inside => mu.inv(),
        Marking::Circle => mu / mu.norm(),
        Marking::Outside => mu,
    };
    Ok((target, marking))
}

const STRUCTURED_STARTS: usize = 15;

/// Deterministic list of Newton starts for a normalized `μ`.
fn starts<T: Real>(mu: Complex<T>, opts: &SolverOptions) -> Vec<(Complex<T>, Complex<T>)> {
    let c = |z: Complex<f64>| Complex::new(lit::<T>(z.re), lit::<T>(z.im));
    let mut out = Vec::new();
    if let Some((p, q)) = opts.hint {
        out.push((c(p), c(q)));
    }
    let three = Complex::new(lit::<T>(3.0), T::zero());
    if to_f64(mu.norm()) >= 10.0 {
        out.push((mu * lit::<T>(1.5), three));
        out.push((mu, three));
    }
    // Observed shape of solutions: one zero near 1.5μ to 2.5μ, the other of
    // modulus 2 to 3.5 near the positive real axis.
    for k in [1.7, 2.3, 1.5] {
        for b in [0.0, 0.3, -0.3, 0.7, -0.7] {
            out.push((mu * lit::<T>(k), c(Complex::from_polar(2.6, b))));
        }
    }
    // Random starts are log-uniform in modulus up to the scale of the solutions.
    let rmax = (3.0 * to_f64(mu.norm())).max(8.0);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_starts {
        let mut pick = || {
            let r: f64 = 1.2 * (rmax / 1.2).powf(rng.gen::<f64>());
            let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            c(Complex::from_polar(r, a))
        };
        let p = pick();
        let q = pick();
        out.push((p, q));
    }
    out
}

/// Solves for the zeros `(p, q)` whose map has a double critical point at 1
/// and a critical point at `μ` (`|μ| ≥ 1` after normalization). Starts are
/// tried in order: continuation hint, asymptotic start, random starts.
pub fn solve_critical<T: Real>(
    mu: Complex<T>,
    opts: &SolverOptions,
) -> Result<(CriticalSolution<T>, Marking)> {
    let (target, marking) = normalize_mu(mu)?;
    let circle = marking == Marking::Circle;
    let mut best = f64::INFINITY;
    for start in starts(target, opts) {
        match newton_from(start, target, circle, opts) {
            Ok(sol) => return Ok((sol, marking)),
            Err(res) => best = best.min(to_f64(res)),
        }
    }
    Err(Error::SolverFailure {
        best_residual: best,
    })
}

/// All converged solutions from the random starts alone (used to probe
/// uniqueness of the critical parametrization).
pub fn solve_critical_all_starts<T: Real>(
    mu: Complex<T>,
    opts: &SolverOptions,
) -> Result<Vec<CriticalSolution<T>>> {
    let (target, marking) = normalize_mu(mu)?;
    let circle = marking == Marking::Circle;
    let random_only = SolverOptions {
        hint: None,
        ..opts.clone()
    };
    let mut found = Vec::new();
    let skip = if to_f64(target.norm()) >= 10.0 { 2 } else { 0 } + STRUCTURED_STARTS;
    for start in starts(target, &random_only).into_iter().skip(skip) {
        if let Ok(sol) = newton_from(start, target, circle, opts) {
            found.push(sol);
        }
    }
    Ok(found)
}

/// Default rotation-number tolerance for the calibration of `t`.
pub const DEFAULT_T_TOL: f64 = 1e-10;

fn fine_calibration() -> CalibrationOptions {
    CalibrationOptions {
        allow_fine_tolerance: true,
        ..CalibrationOptions::default()
    }
}

/// Solves the marked family at `μ` and calibrates `t` so that `B|_𝕋` has
/// rotation number `θ` within `tol`.
pub fn solve_blaschke<T: Real>(
    mu: Complex<T>,
    theta: &RotationAngle,
    tol: f64,
) -> Result<BlaschkeParams<T>> {
    solve_blaschke_with(
        mu,
        theta,
        tol,
        &SolverOptions::default(),
        &fine_calibration(),
    )
}

pub fn solve_blaschke_with<T: Real>(
    mu: Complex<T>,
    theta: &RotationAngle,
    tol: f64,
    opts: &SolverOptions,
    cal_opts: &CalibrationOptions,
) -> Result<BlaschkeParams<T>> {
    let (sol, marking) = solve_critical(mu, opts)?;
    let family = BlaschkeFamily::new(3, vec![sol.p, sol.q]);
    let calibration = calibrate_t(&family, theta, tol, cal_opts)?;
    let residuals = critical_residuals(sol.p, sol.q, normalize_mu(mu)?.0);
    Ok(BlaschkeParams {
        t: lit(calibration.t),
        p: sol.p,
        q: sol.q,
        mu,
        marking,
        theta: theta.clone(),
        residuals,
        calibration,
    })
}

/// `t(θ)` for the standard map `e^{2πit} z² (z − 3)/(1 − 3z)`.
pub fn standard_f_theta<T: Real>(theta: &RotationAngle, tol: f64) -> Result<Calibration> {
    calibrate_t(
        &BlaschkeFamily::<T>::standard(),
        theta,
        tol,
        &fine_calibration(),
    )
}

/// Outcome of iterating the free critical point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum C5Tag {
    /// First index `k` with `|B^k(c)| ≤ 1`.
    HitsClosedDisk(usize),
    BoundedOutside,
    Escapes,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct C5Class {
    pub tag: C5Tag,
    pub iterations_used: usize,
}

impl C5Class {
    /// Membership in the connectedness locus.
    pub fn is_member(&self) -> bool {
        !matches!(self.tag, C5Tag::Escapes)
    }
}

/// Classifies a solved map by the orbit of its free critical point.
pub fn classify_params<T: Real>(params: &BlaschkeParams<T>, max_iter: usize) -> C5Class {
    let map = params.map();
    let mut z = params.free_critical_point();
    let escape: T = lit(C5_ESCAPE);
    for k in 0..=max_iter {
        let r = z.norm();
        if r <= T::one() || (params.marking == Marking::Circle && k == 0) {
            return C5Class {
                tag: C5Tag::HitsClosedDisk(k),
                iterations_used: k,
            };
        }
        if r > escape || !r.is_finite() {
            return C5Class {
                tag: C5Tag::Escapes,
                iterations_used: k,
            };
        }
        if k < max_iter {
            z = map.apply(z);
        }
    }
    C5Class {
        tag: C5Tag::BoundedOutside,
        iterations_used: max_iter,
    }
}

/// Solves at `μ` and classifies.
pub fn classify_c5<T: Real>(
    mu: Complex<T>,
    theta: &RotationAngle,
    max_iter: usize,
) -> Result<C5Class> {
    let params = solve_blaschke(mu, theta, 1e-9)?;
    Ok(classify_params(&params, max_iter))
}

/// Smallest `k ≤ kmax` with `|B^k(z)| ≤ 1`; `None` when the orbit escapes
/// or the budget runs out first.
pub fn first_entry_time<T: Real>(
    map: &BlaschkeMap<T>,
    z: Complex<T>,
    kmax: usize,
) -> Option<usize> {
    let escape: T = lit(C5_ESCAPE);
    let mut z = z;
    for k in 0..=kmax {
        let r = z.norm();
        if r <= T::one() {
            return Some(k);
        }
        if r > escape || !r.is_finite() {
            return None;
        }
        z = map.apply(z);
    }
    None
}
