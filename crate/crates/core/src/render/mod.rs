//! Scanline-parallel rasterization of parameter and dynamical planes, and
//! orbit dumps.
//!
//! Each scanline is a pure function of its inputs, so a parallel render
//! equals a serial one cell for cell.

mod config;
mod raster;
mod window;

use std::io::Write;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{CalibrationOptions, RotationAngle};
use crate::blaschke::{
    classify_params, solve_blaschke, solve_blaschke_with, BlaschkeMap, C5Tag, Marking,
    SolverOptions,
};
use crate::cubic::{
    classify_cubic, escape_radius, ClassifyOptions, CubicMap, CubicPolynomial, OrbitTag,
    QuadraticMap,
};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

pub use config::{parse_config, Config};
pub use raster::{Cell, CellCode, Raster, RasterMeta, PALETTE_VERSION};
pub use window::{parse_complex, parse_list, Window};

/// Thresholds for the superattracting basins of 0 and ∞ in Blaschke renders.
pub const BASIN_ZERO: f64 = 1e-6;
pub const BASIN_INFINITY: f64 = 1e6;

#[derive(Clone, Debug)]
pub struct RenderOptions {
    pub parallel: bool,
    pub classify: ClassifyOptions,
    /// Rotation-number tolerance when calibrating `t` per pixel.
    pub t_tol: f64,
    pub solver: SolverOptions,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            parallel: true,
            classify: ClassifyOptions::default(),
            t_tol: 1e-7,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Default)]
struct RowStats {
    failures: usize,
    fallbacks: usize,
}

fn meta(kind: &str, theta: &RotationAngle, max_iter: usize, map: String) -> RasterMeta {
    RasterMeta {
        kind: kind.to_string(),
        theta_digits: theta.digits().to_vec(),
        max_iter,
        map,
        version: env!("CARGO_PKG_VERSION").to_string(),
        palette_version: PALETTE_VERSION,
        failures: 0,
        fallbacks: 0,
    }
}

/// Runs `row` over every scanline and assembles the raster.
fn rasterize<F>(window: &Window, parallel: bool, mut meta: RasterMeta, row: F) -> Raster
where
    F: Fn(usize, &mut [Cell]) -> RowStats + Sync,
{
    let mut cells = vec![Cell::INVALID; window.len()];
    let stats: Vec<RowStats> = if parallel {
        cells
            .par_chunks_mut(window.nx)
            .enumerate()
            .map(|(j, r)| row(j, r))
            .collect()
    } else {
        cells
            .chunks_mut(window.nx)
            .enumerate()
            .map(|(j, r)| row(j, r))
            .collect()
    };
    meta.failures = stats.iter().map(|s| s.failures).sum();
    meta.fallbacks = stats.iter().map(|s| s.fallbacks).sum();
    Raster {
        window: *window,
        meta,
        cells,
    }
}

fn to_t<T: Real>(z: Complex<f64>) -> Complex<T> {
    Complex::new(lit(z.re), lit(z.im))
}

fn from_t<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(to_f64(z.re), to_f64(z.im))
}

/// Per-pixel [`classify_cubic`] over the `c`-plane. The pixel at `c = 0` is
/// marked invalid.
pub fn render_parameter_cubic<T: Real>(
    theta: &RotationAngle,
    window: &Window,
    max_iter: usize,
    opts: &RenderOptions,
) -> Raster {
    let m = meta("parameter-cubic", theta, max_iter, String::new());
    rasterize(window, opts.parallel, m, |j, row| {
        for (i, cell) in row.iter_mut().enumerate() {
            let c = window.point(i, j);
            *cell = match CubicMap::new(theta, to_t::<T>(c)) {
                Err(_) => Cell::INVALID,
                Ok(map) => {
                    let class = classify_cubic(&map, max_iter, &opts.classify);
                    match class.tag {
                        OrbitTag::ExteriorEscape => {
                            Cell::new(CellCode::ExteriorEscape, class.iterations_used)
                        }
                        OrbitTag::InteriorEscape => {
                            Cell::new(CellCode::InteriorEscape, class.iterations_used)
                        }
                        OrbitTag::HyperbolicLike { period, .. } => {
                            Cell::new(CellCode::Hyperbolic, period)
                        }
                        OrbitTag::Capture { entry_index, .. } => {
                            Cell::new(CellCode::Capture, entry_index)
                        }
                        OrbitTag::InLocusUnresolved => Cell::new(CellCode::Unresolved, 0),
                    }
                }
            };
        }
        RowStats::default()
    })
}

/// Per-pixel Blaschke solve and free-critical-orbit classification over the
/// `μ`-plane.
///
/// Along a scanline the left neighbour's zeros seed Newton; if that fails,
/// the multi-start schedule runs with a seed derived from the pixel index,
/// and the event is counted as a fallback. Pixels whose footprint meets the
/// unit circle are evaluated at the nearest point of the circle. Solver
/// failures get their own cell code and are counted in the metadata.
pub fn render_parameter_blaschke<T: Real>(
    theta: &RotationAngle,
    window: &Window,
    max_iter: usize,
    opts: &RenderOptions,
) -> Raster {
    let m = meta("parameter-blaschke", theta, max_iter, String::new());
    let cal = CalibrationOptions {
        allow_fine_tolerance: true,
        ..CalibrationOptions::default()
    };
    let radius = window.pixel_radius();
    rasterize(window, opts.parallel, m, |j, row| {
        let mut stats = RowStats::default();
        let mut hint: Option<((Complex<f64>, Complex<f64>), Marking)> = None;
        for (i, cell) in row.iter_mut().enumerate() {
            let mu = window.point(i, j);
            let r = mu.norm();
            if !(r > 0.0) {
                *cell = Cell::INVALID;
                hint = None;
                continue;
            }
            if (r - 1.0).abs() <= radius {
                *cell = Cell::new(CellCode::HitsDisk, 0);
                continue;
            }
            let marking = if r > 1.0 {
                Marking::Outside
            } else {
                Marking::Inside
            };
            let seeded = SolverOptions {
                seed: opts.solver.seed ^ (window.index(i, j) as u64),
                hint: None,
                ..opts.solver.clone()
            };
            let mut result = Err(Error::Branch);
            if let Some((pq, _)) = hint.filter(|(_, mk)| *mk == marking) {
                let quick = SolverOptions {
                    hint: Some(pq),
                    random_starts: 0,
                    ..seeded.clone()
                };
                result = solve_blaschke_with::<T>(to_t(mu), theta, opts.t_tol, &quick, &cal);
                if result.is_err() {
                    stats.fallbacks += 1;
                }
            }
            if result.is_err() {
                result = solve_blaschke_with::<T>(to_t(mu), theta, opts.t_tol, &seeded, &cal);
            }
            *cell = match result {
                Ok(params) => {
                    hint = Some(((from_t(params.p), from_t(params.q)), marking));
                    let class = classify_params(&params, max_iter);
                    match class.tag {
                        C5Tag::HitsClosedDisk(k) => Cell::new(CellCode::HitsDisk, k),
                        C5Tag::BoundedOutside => Cell::new(CellCode::BoundedOutside, 0),
                        C5Tag::Escapes => Cell::new(CellCode::Escapes, class.iterations_used),
                    }
                }
                Err(_) => {
                    hint = None;
                    stats.failures += 1;
                    Cell::new(CellCode::SolverFailure, 0)
                }
            };
        }
        stats
    })
}

/// A dynamical system to render or iterate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum MapSpec {
    Cubic {
        c: Complex<f64>,
    },
    Quadratic,
    Blaschke {
        mu: Complex<f64>,
    },
    /// `z ↦ e^{2πiθ} z`.
    Rigid,
}

impl MapSpec {
    fn describe(&self) -> String {
        match self {
            MapSpec::Cubic { c } => format!("cubic c={},{}", c.re, c.im),
            MapSpec::Quadratic => "quadratic".into(),
            MapSpec::Blaschke { mu } => format!("blaschke mu={},{}", mu.re, mu.im),
            MapSpec::Rigid => "rigid".into(),
        }
    }
}

enum Dynamics<T> {
    Cubic(CubicMap<T>),
    Quadratic(QuadraticMap<T>),
    Blaschke(BlaschkeMap<T>),
    Rigid(Complex<T>),
}

impl<T: Real> Dynamics<T> {
    fn build(theta: &RotationAngle, spec: &MapSpec) -> Result<Self> {
        Ok(match *spec {
            MapSpec::Cubic { c } => Dynamics::Cubic(CubicMap::new(theta, to_t(c))?),
            MapSpec::Quadratic => Dynamics::Quadratic(QuadraticMap::new(theta)),
            MapSpec::Blaschke { mu } => {
                Dynamics::Blaschke(solve_blaschke::<T>(to_t(mu), theta, 1e-10)?.map())
            }
            MapSpec::Rigid => Dynamics::Rigid(theta.multiplier()),
        })
    }

    fn step(&self, z: Complex<T>) -> Complex<T> {
        match self {
            Dynamics::Cubic(m) => m.eval(z),
            Dynamics::Quadratic(m) => m.eval(z),
            Dynamics::Blaschke(m) => m.apply(z),
            Dynamics::Rigid(l) => *l * z,
        }
    }
}

/// Filled Julia set of a cubic or the quadratic map (escape against `m_c` or
/// 2), or basin picture of a Blaschke product with first-entry coloring.
///
/// Blaschke cells: orbits reaching `|z| < 1e-6` are in the basin of 0 with
/// value the first index `k` with `|B^k(z)| < 1`; orbits reaching `|z| > 1e6`
/// are in the basin of ∞; pixels meeting the unit circle get the circle
/// code.
pub fn render_julia<T: Real>(
    theta: &RotationAngle,
    spec: &MapSpec,
    window: &Window,
    max_iter: usize,
    opts: &RenderOptions,
) -> Result<Raster> {
    let dynamics = Dynamics::<T>::build(theta, spec)?;
    let escape: T = match &dynamics {
        Dynamics::Cubic(m) => escape_radius(m),
        Dynamics::Quadratic(_) => lit(QuadraticMap::<T>::ESCAPE_RADIUS),
        Dynamics::Blaschke(_) => lit(BASIN_INFINITY),
        Dynamics::Rigid(_) => {
            return Err(Error::InvalidParameter(
                "the rigid rotation has no Julia set to render".into(),
            ))
        }
    };
    let blaschke = matches!(dynamics, Dynamics::Blaschke(_));
    let radius = window.pixel_radius();
    let m = meta("julia", theta, max_iter, spec.describe());
    Ok(rasterize(window, opts.parallel, m, |j, row| {
        for (i, cell) in row.iter_mut().enumerate() {
            let p = window.point(i, j);
            if blaschke && (p.norm() - 1.0).abs() <= radius {
                *cell = Cell::new(CellCode::Circle, 0);
                continue;
            }
            let mut z = to_t::<T>(p);
            let mut first_entry: Option<usize> = None;
            let mut out = if blaschke {
                Cell::new(CellCode::BlaschkeUndecided, 0)
            } else {
                Cell::new(CellCode::JuliaBounded, 0)
            };
            for n in 0..=max_iter {
                let r = z.norm();
                if blaschke {
                    if first_entry.is_none() && r < T::one() {
                        first_entry = Some(n);
                    }
                    if r < lit(BASIN_ZERO) {
                        out = Cell::new(CellCode::BasinZero, first_entry.unwrap_or(n));
                        break;
                    }
                    if !(r <= escape) {
                        out = Cell::new(CellCode::BasinInfinity, n);
                        break;
                    }
                } else if !(r <= escape) {
                    out = Cell::new(CellCode::JuliaEscape, n);
                    break;
                }
                if n < max_iter {
                    z = dynamics.step(z);
                }
            }
            *cell = out;
        }
        RowStats::default()
    }))
}

/// `z_0, …, z_n` of an orbit. Iteration stops early, with `truncated` set,
/// once a value overflows.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitDump {
    pub spec: MapSpec,
    pub points: Vec<Complex<f64>>,
    pub truncated: bool,
}

impl OrbitDump {
    pub fn write_json_lines<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (n, z) in self.points.iter().enumerate() {
            writeln!(
                out,
                "{}",
                serde_json::json!({ "n": n, "re": z.re, "im": z.im })
            )?;
        }
        if self.truncated {
            writeln!(
                out,
                "{}",
                serde_json::json!({ "truncated": true, "after": self.points.len() })
            )?;
        }
        Ok(())
    }
}

pub fn orbit_dump<T: Real>(
    theta: &RotationAngle,
    spec: &MapSpec,
    z0: Complex<f64>,
    n: usize,
) -> Result<OrbitDump> {
    let dynamics = Dynamics::<T>::build(theta, spec)?;
    let mut points = vec![z0];
    let mut z = to_t::<T>(z0);
    let mut truncated = false;
    for _ in 0..n {
        z = dynamics.step(z);
        if !(z.re.is_finite() && z.im.is_finite()) {
            truncated = true;
            break;
        }
        points.push(from_t(z));
    }
    Ok(OrbitDump {
        spec: *spec,
        points,
        truncated,
    })
}
