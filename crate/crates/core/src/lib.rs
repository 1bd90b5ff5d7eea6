//! Dynamics of cubic polynomials with a Siegel disk of prescribed rotation
//! number and of their degree-5 Blaschke models.
//!
//! Numerical code is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix the common `f64` instantiations.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod blaschke;
pub mod boettcher;
pub mod cubic;
pub mod error;
pub mod render;
pub mod scalar;
pub mod surgery;

pub use arith::RotationAngle;
pub use error::{Error, Result};

pub type CubicMap64 = cubic::CubicMap<f64>;
pub type CubicMap32 = cubic::CubicMap<f32>;
pub type SCubic64 = boettcher::SCubic<f64>;
pub type BlaschkeMap64 = blaschke::BlaschkeMap<f64>;
pub type BlaschkeParams64 = blaschke::BlaschkeParams<f64>;
pub type LinearizerSeries64 = cubic::LinearizerSeries<f64>;
pub type CircleConjugacy64 = surgery::CircleConjugacy<f64>;
pub type DiskExtension64 = surgery::DiskExtension<f64>;
pub type Complex64 = num_complex::Complex<f64>;
