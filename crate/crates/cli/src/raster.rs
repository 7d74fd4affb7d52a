//! Planar rasters of fiber counts for curves, written as plain PGM (P2).

use amoeba::error::{Error, Result};
use amoeba::fibers::{curve_fiber_exact, SolverConfig, Space};
use amoeba::laurent::PolySystem;
use amoeba::par;
use serde_json::json;

/// Largest per-axis resolution accepted by [`render_raster`].
pub const MAX_RESOLUTION: usize = 4096;

/// Pixel values are fiber counts capped here (PGM gray levels).
pub const COUNT_CAP: u32 = 255;

/// A row-major grid of fiber counts over a planar box. Row 0 is the top of
/// the image (largest second coordinate).
#[derive(Clone, Debug, PartialEq)]
pub struct RasterImage {
    pub width: usize,
    pub height: usize,
    pub domain: [[f64; 2]; 2],
    pub values: Vec<u32>,
}

impl RasterImage {
    /// Plain (ASCII) PGM with the count as gray level.
    pub fn to_pgm(&self) -> String {
        let mut out = format!("P2\n{} {}\n{}\n", self.width, self.height, COUNT_CAP);
        for row in self.values.chunks(self.width.max(1)) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// JSON sidecar with the raw grid.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "width": self.width,
            "height": self.height,
            "box": self.domain,
            "values": self.values,
        })
    }
}

/// Exact fiber count at every pixel center of a `width x height` grid over
/// `domain`. Curves only; counts are capped at [`COUNT_CAP`].
pub fn render_raster(
    sys: &PolySystem,
    space: Space,
    domain: [[f64; 2]; 2],
    width: usize,
    height: usize,
    cfg: &SolverConfig,
) -> Result<RasterImage> {
    if sys.n() != 1 {
        return Err(Error::Unsupported(
            "rendering is limited to curves (n = 1)".into(),
        ));
    }
    if width > MAX_RESOLUTION || height > MAX_RESOLUTION {
        return Err(Error::InvalidInput(format!(
            "resolution {width}x{height} exceeds {MAX_RESOLUTION} per axis"
        )));
    }
    for [lo, hi] in &domain {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::InvalidInput(format!(
                "invalid raster interval [{lo}, {hi}]"
            )));
        }
    }
    let [xr, yr] = domain;
    if width == 0 || height == 0 || xr[0] == xr[1] || yr[0] == yr[1] {
        return Ok(RasterImage {
            width: 0,
            height: 0,
            domain,
            values: Vec::new(),
        });
    }
    let dx = (xr[1] - xr[0]) / width as f64;
    let dy = (yr[1] - yr[0]) / height as f64;

    let rows: Vec<Result<Vec<u32>>> = par::map_indexed(height, |row| {
        let y = yr[1] - (row as f64 + 0.5) * dy;
        let mut out = Vec::with_capacity(width);
        for col in 0..width {
            let x = xr[0] + (col as f64 + 0.5) * dx;
            let count = match curve_fiber_exact(sys, space, &[x, y], cfg) {
                Ok(report) => report.count as u32,
                Err(Error::NonGenericQuery) => 0,
                Err(e) => return Err(e),
            };
            out.push(count.min(COUNT_CAP));
        }
        Ok(out)
    });

    let mut values = Vec::with_capacity(width * height);
    for row in rows {
        values.extend(row?);
    }
    Ok(RasterImage {
        width,
        height,
        domain,
        values,
    })
}
