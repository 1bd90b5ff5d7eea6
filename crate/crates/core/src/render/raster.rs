use std::io::Write;

use serde::Serialize;

use super::window::Window;

/// Version of the code→color table below.
pub const PALETTE_VERSION: u32 = 1;

/// Per-pixel classification code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[repr(u8)]
pub enum CellCode {
    /// Parameter or point outside the domain (e.g. `c = 0`).
    Invalid = 0,
    ExteriorEscape = 1,
    InteriorEscape = 2,
    Hyperbolic = 3,
    Capture = 4,
    Unresolved = 5,
    /// Blaschke parameter whose free critical orbit meets the closed disk.
    HitsDisk = 6,
    BoundedOutside = 7,
    Escapes = 8,
    SolverFailure = 9,
    JuliaEscape = 10,
    JuliaBounded = 11,
    BasinZero = 12,
    BasinInfinity = 13,
    /// Pixel footprint meets the invariant unit circle.
    Circle = 14,
    BlaschkeUndecided = 15,
}

impl CellCode {
    pub const ALL: [CellCode; 16] = [
        CellCode::Invalid,
        CellCode::ExteriorEscape,
        CellCode::InteriorEscape,
        CellCode::Hyperbolic,
        CellCode::Capture,
        CellCode::Unresolved,
        CellCode::HitsDisk,
        CellCode::BoundedOutside,
        CellCode::Escapes,
        CellCode::SolverFailure,
        CellCode::JuliaEscape,
        CellCode::JuliaBounded,
        CellCode::BasinZero,
        CellCode::BasinInfinity,
        CellCode::Circle,
        CellCode::BlaschkeUndecided,
    ];

    pub fn base_color(self) -> [u8; 3] {
        match self {
            CellCode::Invalid => [255, 0, 255],
            CellCode::ExteriorEscape => [40, 70, 160],
            CellCode::InteriorEscape => [160, 70, 40],
            CellCode::Hyperbolic => [20, 20, 20],
            CellCode::Capture => [230, 200, 60],
            CellCode::Unresolved => [0, 0, 0],
            CellCode::HitsDisk => [230, 200, 60],
            CellCode::BoundedOutside => [0, 0, 0],
            CellCode::Escapes => [40, 70, 160],
            CellCode::SolverFailure => [255, 0, 0],
            CellCode::JuliaEscape => [40, 70, 160],
            CellCode::JuliaBounded => [0, 0, 0],
            CellCode::BasinZero => [230, 200, 60],
            CellCode::BasinInfinity => [40, 70, 160],
            CellCode::Circle => [255, 255, 255],
            CellCode::BlaschkeUndecided => [0, 0, 0],
        }
    }

    /// Codes whose color is banded by the cell value.
    fn banded(self) -> bool {
        matches!(
            self,
            CellCode::ExteriorEscape
                | CellCode::InteriorEscape
                | CellCode::Escapes
                | CellCode::JuliaEscape
                | CellCode::BasinInfinity
                | CellCode::BasinZero
                | CellCode::HitsDisk
                | CellCode::Capture
        )
    }

    /// Whether the code marks a member of the connectedness locus.
    pub fn in_locus(self) -> bool {
        matches!(
            self,
            CellCode::Hyperbolic
                | CellCode::Capture
                | CellCode::Unresolved
                | CellCode::HitsDisk
                | CellCode::BoundedOutside
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub code: CellCode,
    /// Iteration count, period, or first-entry index depending on the code.
    pub value: u32,
}

impl Cell {
    pub const INVALID: Cell = Cell {
        code: CellCode::Invalid,
        value: 0,
    };

    pub fn new(code: CellCode, value: usize) -> Self {
        Cell {
            code,
            value: value.min(u32::MAX as usize) as u32,
        }
    }

    pub fn color(&self) -> [u8; 3] {
        let base = self.code.base_color();
        if !self.code.banded() {
            return base;
        }
        let band = (self.value % 16) as u16;
        base.map(|c| ((c as u16 * (9 + band)) / 24) as u8)
    }
}

/// Everything needed to regenerate a raster.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RasterMeta {
    pub kind: String,
    pub theta_digits: Vec<u64>,
    pub max_iter: usize,
    /// Map-specific parameters (e.g. `c` or `mu`), as text.
    pub map: String,
    pub version: String,
    pub palette_version: u32,
    pub failures: usize,
    pub fallbacks: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Raster {
    pub window: Window,
    pub meta: RasterMeta,
    pub cells: Vec<Cell>,
}

impl Raster {
    pub fn cell(&self, i: usize, j: usize) -> Cell {
        self.cells[self.window.index(i, j)]
    }

    pub fn failure_rate(&self) -> f64 {
        self.meta.failures as f64 / self.cells.len().max(1) as f64
    }

    pub fn count(&self, code: CellCode) -> usize {
        self.cells.iter().filter(|c| c.code == code).count()
    }

    pub fn rgb(&self) -> Vec<u8> {
        self.cells.iter().flat_map(|c| c.color()).collect()
    }

    /// Binary P6 image.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.window.nx, self.window.ny).into_bytes();
        out.extend(self.rgb());
        out
    }

    /// Header record with window and metadata, then one record per cell.
    pub fn write_json_lines<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header = serde_json::json!({ "window": self.window, "meta": self.meta });
        writeln!(out, "{header}")?;
        for j in 0..self.window.ny {
            for i in 0..self.window.nx {
                let c = self.cell(i, j);
                writeln!(
                    out,
                    "{}",
                    serde_json::json!({ "i": i, "j": j, "code": c.code as u8, "value": c.value })
                )?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn tiny() -> Raster {
        let window = Window::new(Complex::new(0.0, 0.0), 2.0, 1.0, 2, 1).unwrap();
        let meta = RasterMeta {
            kind: "test".into(),
            theta_digits: vec![1, 1],
            max_iter: 10,
            map: String::new(),
            version: "0".into(),
            palette_version: PALETTE_VERSION,
            failures: 0,
            fallbacks: 0,
        };
        Raster {
            window,
            meta,
            cells: vec![
                Cell::new(CellCode::Circle, 0),
                Cell::new(CellCode::JuliaEscape, 7),
            ],
        }
    }

    #[test]
    fn ppm_layout() {
        let ppm = tiny().to_ppm();
        let header = b"P6\n2 1\n255\n";
        assert_eq!(&ppm[..header.len()], header);
        assert_eq!(ppm.len(), header.len() + 6);
        assert_eq!(&ppm[header.len()..header.len() + 3], &[255, 255, 255]);
    }

    #[test]
    fn palette_is_fixed() {
        assert_eq!(Cell::new(CellCode::JuliaEscape, 7).color(), [26, 46, 106]);
        assert_eq!(Cell::new(CellCode::JuliaEscape, 23).color(), [26, 46, 106]);
        for code in CellCode::ALL {
            let _ = Cell::new(code, 3).color();
        }
    }

    #[test]
    fn json_lines_record_count() {
        let mut buf = Vec::new();
        tiny().write_json_lines(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        let rec: serde_json::Value = serde_json::from_str(text.lines().nth(2).unwrap()).unwrap();
        assert_eq!(rec["code"], 10);
        assert_eq!(rec["value"], 7);
    }
}
