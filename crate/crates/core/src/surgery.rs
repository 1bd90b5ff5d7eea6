//! Constructive pieces of the Siegel-disk surgery on degree-5 Blaschke
//! products: the circle conjugacy `h` to the rigid rotation, its
//! Douady-Earle extension `H` to the disk, the modified map
//!
//! ```text
//! B̃(z) = B(z)                 |z| ≥ 1
//! B̃(z) = H⁻¹(e^{2πiθ} H(z))   |z| < 1
//! ```
//!
//! and finite-difference samples of the Beltrami coefficient of `H`.
//!
//! Angles on the circle are measured in turns.

use std::collections::HashMap;
use std::sync::RwLock;

use num_complex::Complex;
use serde::Serialize;

use crate::arith::CircleMapLift;
use crate::blaschke::BlaschkeParams;
use crate::error::{Error, Result};
use crate::scalar::{arg_turns, cis_turns, frac, lit, to_f64, wrap_half, Real};

/// Orbit angles closer than this count as a numerical collision.
pub const COLLISION_TOL: f64 = 1e-12;
/// Default quadrature order of the extension.
pub const DEFAULT_ORDER: usize = 2048;
const NEWTON_STEPS: usize = 100;
const INVERSION_STEPS: usize = 60;
const CACHE_LIMIT: usize = 1 << 18;

/// Monotone piecewise-linear circle homeomorphism given by a table of
/// `(x, h(x))` pairs in turns, with `h(0) = 0`.
#[derive(Clone, Debug, Serialize)]
pub struct CircleConjugacy<T> {
    /// Rotation number the table conjugates to.
    pub theta: T,
    xs: Vec<T>,
    ys: Vec<T>,
}

impl<T: Real> CircleConjugacy<T> {
    /// Builds the conjugacy from pairs in any order. Both coordinates must be
    /// strictly increasing once sorted and the pair `(0, 0)` must be present.
    pub fn from_pairs(theta: T, mut pairs: Vec<(T, T)>) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::InvalidParameter(
                "conjugacy table needs at least two points".into(),
            ));
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite table angles"));
        if pairs[0] != (T::zero(), T::zero()) {
            return Err(Error::InvalidParameter(
                "conjugacy table must contain h(0) = 0".into(),
            ));
        }
        let tol = lit::<T>(COLLISION_TOL);
        let n = pairs.len();
        for i in 0..n {
            let (x0, y0) = pairs[i];
            let (x1, y1) = if i + 1 < n {
                pairs[i + 1]
            } else {
                (T::one(), T::one())
            };
            if x1 - x0 < tol {
                return Err(Error::OrbitCollision(n));
            }
            if !(y1 > y0) {
                return Err(Error::OrderMismatch(i));
            }
        }
        let (xs, ys) = pairs.into_iter().unzip();
        Ok(CircleConjugacy { theta, xs, ys })
    }

    /// `h(angle of f^n(1)) = frac(nθ)` for `n < len`, from the orbit of the
    /// lift `f` starting at 0.
    pub fn from_lift<L: CircleMapLift<T> + ?Sized>(lift: &L, theta: T, len: usize) -> Result<Self> {
        let mut pairs = Vec::with_capacity(len);
        let mut x = T::zero();
        for n in 0..len {
            pairs.push((x, frac(theta * lit::<T>(n as f64))));
            x = frac(lift.lift(x));
        }
        Self::from_pairs(theta, pairs)
    }

    /// The identity conjugacy on `len` equally spaced angles.
    pub fn identity(theta: T, len: usize) -> Self {
        let xs: Vec<T> = (0..len).map(|k| lit::<T>(k as f64 / len as f64)).collect();
        CircleConjugacy {
            theta,
            ys: xs.clone(),
            xs,
        }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn table(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    fn interpolate(from: &[T], to: &[T], x: T) -> T {
        let x = frac(x);
        let i = from.partition_point(|&v| v <= x) - 1;
        let (x0, y0) = (from[i], to[i]);
        let (x1, y1) = if i + 1 < from.len() {
            (from[i + 1], to[i + 1])
        } else {
            (T::one(), T::one())
        };
        frac(y0 + (x - x0) / (x1 - x0) * (y1 - y0))
    }

    /// `h(x)`.
    pub fn eval(&self, x: T) -> T {
        Self::interpolate(&self.xs, &self.ys, x)
    }

    /// `h⁻¹(y)`.
    pub fn inverse(&self, y: T) -> T {
        Self::interpolate(&self.ys, &self.xs, y)
    }

    /// `|h(f(x)) − h(x) − θ|` reduced mod 1.
    pub fn residual<L: CircleMapLift<T> + ?Sized>(&self, lift: &L, x: T) -> T {
        wrap_half(self.eval(lift.lift(x)) - self.eval(x) - self.theta).abs()
    }

    /// Mean residual over `count` fixed, equally spaced off-grid probes.
    pub fn mean_probe_residual<L: CircleMapLift<T> + ?Sized>(&self, lift: &L, count: usize) -> T {
        let total = (0..count).fold(T::zero(), |s, j| {
            s + self.residual(lift, lit::<T>((j as f64 + 0.5) / count as f64))
        });
        total / lit::<T>(count as f64)
    }

    /// Largest residual over the midpoints of the table gaps.
    pub fn midpoint_residual<L: CircleMapLift<T> + ?Sized>(&self, lift: &L) -> T {
        let n = self.xs.len();
        (0..n)
            .map(|i| {
                let x1 = if i + 1 < n { self.xs[i + 1] } else { T::one() };
                self.residual(lift, (self.xs[i] + x1) * lit(0.5))
            })
            .fold(T::zero(), |m, r| m.max(r))
    }
}

/// The conjugacy of `B|_𝕋` to `x ↦ x + θ`, tabulated on the orbit of the
/// critical point 1.
pub fn circle_conjugacy<T: Real>(
    params: &BlaschkeParams<T>,
    len: usize,
) -> Result<CircleConjugacy<T>> {
    CircleConjugacy::from_lift(&params.map().circle_lift(), params.theta.value_as(), len)
}

/// The Douady-Earle extension of a circle homeomorphism, evaluated by
/// trapezoid quadrature of the conformal barycenter equation.
///
/// The quadrature nodes for `H(w)` are the images of equally spaced points
/// under the disk automorphism sending 0 to `w`, which turns harmonic
/// measure into the uniform measure.
#[derive(Debug)]
pub struct DiskExtension<T> {
    pub conjugacy: CircleConjugacy<T>,
    pub order: usize,
    cache: RwLock<HashMap<(u64, u64), Complex<T>>>,
}

impl<T: Real> Clone for DiskExtension<T> {
    fn clone(&self) -> Self {
        DiskExtension::new(self.conjugacy.clone(), self.order)
    }
}

fn tolerance<T: Real>() -> T {
    T::epsilon() * lit(64.0)
}

impl<T: Real> DiskExtension<T> {
    pub fn new(conjugacy: CircleConjugacy<T>, order: usize) -> Self {
        DiskExtension {
            conjugacy,
            order: order.max(8),
            cache: RwLock::new(HashMap::new()),
        }
    }

    fn boundary_values(
        &self,
        w: Complex<T>,
        post: Option<&dyn Fn(Complex<T>) -> Complex<T>>,
    ) -> Vec<Complex<T>> {
        let m = self.order;
        (0..m)
            .map(|k| {
                let eta = cis_turns(lit::<T>(k as f64 / m as f64));
                let zeta = (eta + w) / (Complex::new(T::one(), T::zero()) + w.conj() * eta);
                let u = cis_turns(self.conjugacy.eval(arg_turns(zeta)));
                match post {
                    Some(g) => g(u),
                    None => u,
                }
            })
            .collect()
    }

    /// Number of cached evaluations.
    pub fn cached(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }

    /// `H(w)` for `|w| < 1`.
    pub fn eval(&self, w: Complex<T>) -> Result<Complex<T>> {
        let key = (to_f64(w.re).to_bits(), to_f64(w.im).to_bits());
        if let Some(&v) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(v);
        }
        let v = self.eval_uncached(w, None)?;
        let mut cache = self.cache.write().expect("cache lock");
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, v);
        Ok(v)
    }

    /// Extension of `g∘h` for a boundary map `g` applied after `h`.
    pub fn eval_composed(
        &self,
        w: Complex<T>,
        g: &dyn Fn(Complex<T>) -> Complex<T>,
    ) -> Result<Complex<T>> {
        self.eval_uncached(w, Some(g))
    }

    fn eval_uncached(
        &self,
        w: Complex<T>,
        post: Option<&dyn Fn(Complex<T>) -> Complex<T>>,
    ) -> Result<Complex<T>> {
        if !(w.norm() < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "extension needs |w| < 1, got {}",
                to_f64(w.norm())
            )));
        }
        let u = self.boundary_values(w, post);
        let radial = cis_turns(self.conjugacy.eval(arg_turns(w))) * w.norm();
        let fallback = match post {
            Some(g) => g(radial),
            None => radial,
        };
        barycenter(&u, fallback)
    }

    /// `H⁻¹(y)` by Newton with a finite-difference real Jacobian, trying the
    /// seeds in order.
    pub fn invert(&self, y: Complex<T>, seeds: &[Complex<T>]) -> Result<Complex<T>> {
        let mut best = T::infinity();
        for &seed in seeds {
            match self.invert_from(y, seed) {
                Ok(w) => return Ok(w),
                Err(Error::Inversion(r)) => best = best.min(lit(r)),
                Err(e) => return Err(e),
            }
        }
        Err(Error::Inversion(to_f64(best)))
    }

    fn invert_from(&self, y: Complex<T>, seed: Complex<T>) -> Result<Complex<T>> {
        let one = T::one();
        let cap = one - lit::<T>(1e-12);
        let mut w = if seed.norm() < cap {
            seed
        } else {
            seed * (cap / seed.norm())
        };
        let tol = T::epsilon().sqrt() * lit(1e-4);
        let mut fw = self.eval_uncached(w, None)?;
        let mut r = (fw - y).norm();
        for _ in 0..INVERSION_STEPS {
            if r < tol {
                return Ok(w);
            }
            let h = T::epsilon().sqrt() * lit::<T>(0.1) * (one - w.norm());
            let hx = (self.eval_uncached(w + Complex::new(h, T::zero()), None)? - fw) / h;
            let hy = (self.eval_uncached(w + Complex::new(T::zero(), h), None)? - fw) / h;
            let det = hx.re * hy.im - hx.im * hy.re;
            if !(det.abs() > T::zero()) {
                break;
            }
            let d = fw - y;
            let dx = (hy.im * d.re - hy.re * d.im) / det;
            let dy = (hx.re * d.im - hx.im * d.re) / det;
            let mut step = Complex::new(-dx, -dy);
            let mut accepted = false;
            for _ in 0..30 {
                let cand = w + step;
                if cand.norm() < cap {
                    let fc = self.eval_uncached(cand, None)?;
                    let rc = (fc - y).norm();
                    if rc < r {
                        w = cand;
                        fw = fc;
                        r = rc;
                        accepted = true;
                        break;
                    }
                }
                step *= lit::<T>(0.5);
            }
            if !accepted {
                break;
            }
        }
        if r < tol {
            Ok(w)
        } else {
            Err(Error::Inversion(to_f64(r)))
        }
    }
}

/// Mean of `(u_k − z)/(1 − z̄u_k)` with its `∂_z` and `∂_z̄` derivatives.
fn barycenter_field<T: Real>(
    u: &[Complex<T>],
    z: Complex<T>,
) -> (Complex<T>, Complex<T>, Complex<T>) {
    let one = Complex::new(T::one(), T::zero());
    let inv_m = lit::<T>(1.0 / u.len() as f64);
    let (mut f, mut a, mut b) = (f_zero::<T>(), f_zero::<T>(), f_zero::<T>());
    for &uk in u {
        let den = (one - z.conj() * uk).inv();
        let num = uk - z;
        f += num * den;
        a -= den;
        b += num * uk * den * den;
    }
    (f * inv_m, a * inv_m, b * inv_m)
}

/// Solves `Σ (u_k − z)/(1 − z̄u_k) = 0` for `z ∈ 𝔻` by damped real-2D
/// Newton, seeded at the Euclidean mean of the `u_k` and then at `fallback`.
fn barycenter<T: Real>(u: &[Complex<T>], fallback: Complex<T>) -> Result<Complex<T>> {
    let inv_m = lit::<T>(1.0 / u.len() as f64);
    let mean = u.iter().fold(f_zero::<T>(), |s, &v| s + v) * inv_m;
    let mut best = T::infinity();
    for seed in [mean, fallback] {
        match barycenter_from(u, seed) {
            Ok(z) => return Ok(z),
            Err(r) => best = best.min(r),
        }
    }
    Err(Error::Extension(to_f64(best)))
}

fn barycenter_from<T: Real>(
    u: &[Complex<T>],
    seed: Complex<T>,
) -> std::result::Result<Complex<T>, T> {
    let cap = T::one() - lit::<T>(1e-15);
    let mut z = if seed.norm() < cap {
        seed
    } else {
        seed * (lit::<T>(0.999) / seed.norm())
    };
    let tol = tolerance::<T>();
    let (mut f, mut a, mut b) = barycenter_field(u, z);
    for _ in 0..NEWTON_STEPS {
        let r = f.norm();
        if r <= tol {
            return Ok(z);
        }
        let det = a.norm_sqr() - b.norm_sqr();
        if !(det > T::zero()) {
            return Err(r);
        }
        let mut delta = (b * f.conj() - a.conj() * f) / det;
        let mut accepted = false;
        for _ in 0..60 {
            let cand = z + delta;
            if cand.norm() < cap {
                let next = barycenter_field(u, cand);
                if next.0.norm() < r {
                    z = cand;
                    (f, a, b) = next;
                    accepted = true;
                    break;
                }
            }
            delta *= lit::<T>(0.5);
        }
        if !accepted {
            return if r <= tol * lit(1e3) { Ok(z) } else { Err(r) };
        }
    }
    if f.norm() <= tol * lit(1e3) {
        Ok(z)
    } else {
        Err(f.norm())
    }
}

fn f_zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// `B̃(z)`: the Blaschke product outside the disk and the conjugated rigid
/// rotation inside.
pub fn modified_blaschke_eval<T: Real>(
    params: &BlaschkeParams<T>,
    ext: &DiskExtension<T>,
    z: Complex<T>,
) -> Result<Complex<T>> {
    if z.norm() >= T::one() {
        return params.eval(z);
    }
    let hz = ext.eval(z)?;
    let target = hz * params.theta.multiplier::<T>();
    let mut seeds = vec![target, z * params.theta.multiplier::<T>()];
    if z.norm() > T::zero() {
        let boundary = params.map().apply(z / z.norm());
        seeds.push(boundary * z.norm());
        let angle = ext.conjugacy.inverse(arg_turns(target));
        seeds.push(cis_turns(angle) * z.norm());
    }
    ext.invert(target, &seeds)
}

/// Beltrami coefficient `μ = ∂̄H/∂H` of the extension and its dilatation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BeltramiSample<T> {
    pub w: Complex<T>,
    pub h: Complex<T>,
    pub mu: Complex<T>,
    pub dilatation: T,
}

/// Default finite-difference spacing `1e-4·(1 − |w|)`.
pub fn default_step<T: Real>(w: Complex<T>) -> T {
    lit::<T>(1e-4) * (T::one() - w.norm())
}

/// Central-difference sample of the Beltrami coefficient of `H` at `w`.
pub fn beltrami_sample<T: Real>(
    ext: &DiskExtension<T>,
    w: Complex<T>,
    step: T,
) -> Result<BeltramiSample<T>> {
    if !(step > T::zero()) || !(w.norm() + step * lit(2.0) < T::one()) {
        return Err(Error::InvalidParameter(format!(
            "sample point {} too close to the circle for step {}",
            w,
            to_f64(step)
        )));
    }
    let dx = Complex::new(step, T::zero());
    let dy = Complex::new(T::zero(), step);
    let two = lit::<T>(2.0);
    let hx = (ext.eval(w + dx)? - ext.eval(w - dx)?) / (step * two);
    let hy = (ext.eval(w + dy)? - ext.eval(w - dy)?) / (step * two);
    let i = Complex::new(T::zero(), T::one());
    let dz = (hx - i * hy) / two;
    let dzbar = (hx + i * hy) / two;
    let mu = dzbar / dz;
    let k = mu.norm();
    if !(k < T::one()) {
        return Err(Error::DegenerateBeltrami(to_f64(k)));
    }
    Ok(BeltramiSample {
        w,
        h: ext.eval(w)?,
        mu,
        dilatation: (T::one() + k) / (T::one() - k),
    })
}
