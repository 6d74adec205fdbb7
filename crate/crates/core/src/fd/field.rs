//! Grid fields and their CSV / binary dumps.
//!
//! Binary layout: `nx: u64, ny: u64, h: f64, origin_x: f64, origin_y: f64`,
//! then `nx * ny` values as row-major little-endian `f64` (index `j * nx + i`).

use super::grid::{Grid, NodeKind};
use crate::error::{Error, Result};
use crate::pucci::{PucciParams, Sign};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Elliptic,
    Parabolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldMeta {
    pub kind: ProblemKind,
    pub sign: Sign,
    /// `epsilon` for elliptic fields, `t` for parabolic snapshots.
    pub parameter: f64,
    pub params: PucciParams,
}

#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
    pub meta: FieldMeta,
}

impl ScalarField {
    pub fn value_at(&self, n: usize) -> f64 {
        self.values[n]
    }

    /// Value at the grid node nearest to `x`.
    pub fn sample(&self, x: &[f64]) -> Result<f64> {
        let n = self
            .grid
            .nearest_node(x)
            .ok_or_else(|| Error::Domain(format!("point {x:?} is outside the grid")))?;
        Ok(self.values[n])
    }

    /// Iterator over `(node, coords, value)` for interior nodes.
    pub fn interior(&self) -> impl Iterator<Item = (usize, [f64; 2], f64)> + '_ {
        (0..self.grid.len())
            .filter(|&n| self.grid.kind[n] == NodeKind::Interior)
            .map(|n| (n, self.grid.coords(n), self.values[n]))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,y,value")?;
        for n in 0..self.grid.len() {
            let [x, y] = self.grid.coords(n);
            writeln!(w, "{x:.16e},{y:.16e},{:.16e}", self.values[n])?;
        }
        Ok(())
    }

    pub fn to_binary(&self) -> Vec<u8> {
        let g = &self.grid;
        let mut out = Vec::with_capacity(40 + 8 * g.len());
        out.extend_from_slice(&(g.nx as u64).to_le_bytes());
        out.extend_from_slice(&(g.ny as u64).to_le_bytes());
        out.extend_from_slice(&g.h.to_le_bytes());
        out.extend_from_slice(&g.origin[0].to_le_bytes());
        out.extend_from_slice(&g.origin[1].to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }
}

/// Parsed binary dump: `(nx, ny, h, origin, values)`.
pub fn read_binary(bytes: &[u8]) -> Result<(usize, usize, f64, [f64; 2], Vec<f64>)> {
    if bytes.len() < 40 {
        return Err(Error::Io("binary field is shorter than its header".into()));
    }
    let u = |k: usize| u64::from_le_bytes(bytes[8 * k..8 * k + 8].try_into().expect("8 bytes"));
    let f = |k: usize| f64::from_le_bytes(bytes[8 * k..8 * k + 8].try_into().expect("8 bytes"));
    let (nx, ny) = (u(0) as usize, u(1) as usize);
    if bytes.len() != 40 + 8 * nx * ny {
        return Err(Error::Io("binary field length does not match its header".into()));
    }
    let values = (0..nx * ny).map(|k| f(5 + k)).collect();
    Ok((nx, ny, f(2), [f(3), f(4)], values))
}
