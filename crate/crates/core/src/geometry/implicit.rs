//! Sampled signed-distance grids (positive inside the domain).
//!
//! A grid is described by a small JSON header
//! `{"nx": .., "ny": .., "dx": .., "dy": .., "origin": [x0, y0], "values": "file"}`.
//! The values file is CSV (`.csv`, `ny` rows of `nx` numbers) or raw
//! little-endian `f64` in row-major order (index `j * nx + i`).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplicitHeader {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub origin: [f64; 2],
    pub values: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitGrid {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub origin: [f64; 2],
    pub values: Vec<f64>,
}

impl ImplicitGrid {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64, origin: [f64; 2], values: Vec<f64>) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::Geometry("implicit grid needs at least 2x2 samples".into()));
        }
        if !(dx > 0.0 && dy > 0.0) {
            return Err(Error::Geometry("implicit grid spacing must be positive".into()));
        }
        if values.len() != nx * ny {
            return Err(Error::Geometry(format!(
                "implicit grid expects {} values, got {}",
                nx * ny,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Geometry("implicit grid has non-finite samples".into()));
        }
        if !values.iter().any(|&v| v > 0.0) {
            return Err(Error::Geometry("implicit domain is empty".into()));
        }
        Ok(Self {
            nx,
            ny,
            dx,
            dy,
            origin,
            values,
        })
    }

    /// Samples an analytic signed distance on a grid.
    pub fn from_fn(nx: usize, ny: usize, dx: f64, dy: f64, origin: [f64; 2], f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(f(origin[0] + i as f64 * dx, origin[1] + j as f64 * dy));
            }
        }
        Self::new(nx, ny, dx, dy, origin, values)
    }

    pub fn load(header_path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(header_path)?;
        let h: ImplicitHeader = serde_json::from_str(&text)?;
        let data_path = header_path.parent().unwrap_or(Path::new(".")).join(&h.values);
        let values = if data_path.extension().and_then(|e| e.to_str()) == Some("csv") {
            let text = std::fs::read_to_string(&data_path)?;
            text.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| Error::Io(format!("bad number '{s}' in {}: {e}", data_path.display())))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            let bytes = std::fs::read(&data_path)?;
            if bytes.len() % 8 != 0 {
                return Err(Error::Io("binary grid length is not a multiple of 8".into()));
            }
            bytes
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
                .collect()
        };
        Self::new(h.nx, h.ny, h.dx, h.dy, h.origin, values)
    }

    /// Sampling resolution used as the geometric error scale.
    pub fn h_geo(&self) -> f64 {
        self.dx.max(self.dy)
    }

    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        (
            self.origin,
            [
                self.origin[0] + (self.nx - 1) as f64 * self.dx,
                self.origin[1] + (self.ny - 1) as f64 * self.dy,
            ],
        )
    }

    /// Bilinear interpolation. Points outside the sampled box are clamped to it
    /// and pushed further negative by their distance to the box.
    pub fn signed_distance(&self, x: f64, y: f64) -> f64 {
        let (lo, hi) = self.bounds();
        let cx = x.clamp(lo[0], hi[0]);
        let cy = y.clamp(lo[1], hi[1]);
        let outside = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
        let fx = ((cx - self.origin[0]) / self.dx).min((self.nx - 1) as f64);
        let fy = ((cy - self.origin[1]) / self.dy).min((self.ny - 1) as f64);
        let i = (fx.floor() as usize).min(self.nx - 2);
        let j = (fy.floor() as usize).min(self.ny - 2);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let v = |i: usize, j: usize| self.values[j * self.nx + i];
        let val = (1.0 - tx) * (1.0 - ty) * v(i, j)
            + tx * (1.0 - ty) * v(i + 1, j)
            + (1.0 - tx) * ty * v(i, j + 1)
            + tx * ty * v(i + 1, j + 1);
        if outside > 0.0 {
            val.min(0.0) - outside
        } else {
            val
        }
    }
}
