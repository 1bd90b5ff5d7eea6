use std::str::FromStr;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};

/// Rectangular region of the plane sampled on an `nx × ny` grid.
///
/// Pixel `(i, j)` (column `i`, row `j`, rows counted from the top) samples
/// its center
///
/// ```text
/// re = cx − w/2 + (i + ½)·w/nx
/// im = cy + h/2 − (j + ½)·h/ny
/// ```
///
/// and cells are stored row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub center: Complex<f64>,
    pub width: f64,
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Window {
    pub fn new(
        center: Complex<f64>,
        width: f64,
        height: f64,
        nx: usize,
        ny: usize,
    ) -> Result<Self> {
        if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "window size must be positive, got {width}×{height}"
            )));
        }
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidParameter(format!(
                "resolution must be positive, got {nx}×{ny}"
            )));
        }
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(Error::InvalidParameter(
                "window center must be finite".into(),
            ));
        }
        Ok(Window {
            center,
            width,
            height,
            nx,
            ny,
        })
    }

    /// Parses `cx,cy,w,h` and `nx,ny`.
    pub fn parse(window: &str, resolution: &str) -> Result<Self> {
        let w: Vec<f64> = parse_list(window, 4)?;
        let r: Vec<usize> = parse_list(resolution, 2)?;
        Window::new(Complex::new(w[0], w[1]), w[2], w[3], r[0], r[1])
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pixel_width(&self) -> f64 {
        self.width / self.nx as f64
    }

    pub fn pixel_height(&self) -> f64 {
        self.height / self.ny as f64
    }

    /// Half the pixel diagonal.
    pub fn pixel_radius(&self) -> f64 {
        0.5 * self.pixel_width().hypot(self.pixel_height())
    }

    pub fn point(&self, i: usize, j: usize) -> Complex<f64> {
        Complex::new(
            self.center.re - 0.5 * self.width + (i as f64 + 0.5) * self.pixel_width(),
            self.center.im + 0.5 * self.height - (j as f64 + 0.5) * self.pixel_height(),
        )
    }

    /// The pixel whose closed footprint contains `z`, if any.
    pub fn pixel_of(&self, z: Complex<f64>) -> Option<(usize, usize)> {
        let fx = (z.re - (self.center.re - 0.5 * self.width)) / self.pixel_width();
        let fy = ((self.center.im + 0.5 * self.height) - z.im) / self.pixel_height();
        if !(fx >= 0.0 && fy >= 0.0) {
            return None;
        }
        let (i, j) = (fx.floor() as usize, fy.floor() as usize);
        (i < self.nx && j < self.ny).then_some((i, j))
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }
}

/// Parses a comma-separated list of exactly `n` values.
pub fn parse_list<V: FromStr>(text: &str, n: usize) -> Result<Vec<V>> {
    let items: Vec<&str> = text.split(',').map(str::trim).collect();
    if items.len() != n {
        return Err(Error::InvalidParameter(format!(
            "expected {n} comma-separated values, got `{text}`"
        )));
    }
    items
        .iter()
        .map(|s| {
            s.parse::<V>()
                .map_err(|_| Error::InvalidParameter(format!("cannot parse `{s}` in `{text}`")))
        })
        .collect()
}

/// Parses `re,im` (or a bare real number).
pub fn parse_complex(text: &str) -> Result<Complex<f64>> {
    if !text.contains(',') {
        let re = text
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidParameter(format!("cannot parse complex `{text}`")))?;
        return Ok(Complex::new(re, 0.0));
    }
    let v: Vec<f64> = parse_list(text, 2)?;
    Ok(Complex::new(v[0], v[1]))
}
