//! Uniform 2D grids with node classification and wide-stencil arms.
//!
//! Arms that would cross the boundary are cut at the crossing point, where
//! the boundary datum 1 is imposed. Nodes that see only full-length arms are
//! "regular" and read their neighbours through flat index offsets.

use super::frames::{select_frames, Frame};
use crate::error::{Error, Result};
use crate::geometry::Domain;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    /// Unknown.
    Interior,
    /// Outside the domain (or within the snapping distance of Γ); holds 1.
    Exterior,
    /// Inside but excluded from the solve; holds 0.
    Frozen,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub center: [f64; 2],
    pub radius: f64,
}

fn default_radius() -> usize {
    3
}

fn default_directions() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub h: f64,
    #[serde(default = "default_radius")]
    pub stencil_radius: usize,
    #[serde(default = "default_directions")]
    pub directions: usize,
    /// Nodes with `d_Γ <= snap * h` are treated as boundary nodes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snap: Option<f64>,
    /// Interior nodes outside this disk are frozen at 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
    /// Interior nodes deeper than this are frozen at 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freeze_depth: Option<f64>,
    /// Overrides the domain bounding box.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<[[f64; 2]; 2]>,
}

impl GridConfig {
    pub fn new(h: f64) -> Self {
        Self {
            h,
            stencil_radius: default_radius(),
            directions: default_directions(),
            snap: None,
            window: None,
            freeze_depth: None,
            bounds: None,
        }
    }
}

pub(crate) const BOUNDARY: u32 = u32::MAX;
const REGULAR: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Arm {
    pub target: u32,
    pub len: f64,
}

#[derive(Debug, Clone)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub origin: [f64; 2],
    pub kind: Vec<NodeKind>,
    /// Signed distance to Γ at each node (positive inside).
    pub dist: Vec<f64>,
    pub frames: Vec<Frame>,
    pub stencil_radius: usize,
    offsets: Vec<[isize; 4]>,
    frame_len: Vec<f64>,
    slot: Vec<u32>,
    arms: Vec<Arm>,
}

impl Grid {
    pub fn build(dom: &Domain, cfg: &GridConfig, default_snap: f64) -> Result<Self> {
        if dom.dim() != 2 {
            return Err(Error::Config("the grid solver is two-dimensional".into()));
        }
        if !dom.is_bounded() && cfg.bounds.is_none() {
            return Err(Error::Config(
                "unbounded domains are not supported by the grid solver".into(),
            ));
        }
        let h = cfg.h;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Config(format!("grid spacing must be positive, got {h}")));
        }
        let frames = select_frames(cfg.stencil_radius, cfg.directions)?;
        let snap = cfg.snap.unwrap_or(default_snap);

        let (mut lo, mut hi) = match cfg.bounds {
            Some([lo, hi]) => (lo, hi),
            None => {
                let (lo, hi) = dom.bounds().expect("bounded domain");
                ([lo[0], lo[1]], [hi[0], hi[1]])
            }
        };
        if let Some(w) = cfg.window {
            for k in 0..2 {
                lo[k] = lo[k].max(w.center[k] - w.radius);
                hi[k] = hi[k].min(w.center[k] + w.radius);
            }
        }
        if !(hi[0] > lo[0] && hi[1] > lo[1]) {
            return Err(Error::Config("empty computational box".into()));
        }
        let pad = (cfg.stencil_radius + 2) as f64;
        let i0 = (lo[0] / h).floor() - pad;
        let j0 = (lo[1] / h).floor() - pad;
        let i1 = (hi[0] / h).ceil() + pad;
        let j1 = (hi[1] / h).ceil() + pad;
        let nx = (i1 - i0) as usize + 1;
        let ny = (j1 - j0) as usize + 1;
        if nx * ny > 50_000_000 {
            return Err(Error::Config(format!("grid of {nx} x {ny} nodes is too large")));
        }
        let origin = [i0 * h, j0 * h];

        let mut kind = Vec::with_capacity(nx * ny);
        let mut dist = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let x = [origin[0] + i as f64 * h, origin[1] + j as f64 * h];
                let sd = dom.signed_distance(&x);
                dist.push(sd);
                let mut k = if sd > snap * h { NodeKind::Interior } else { NodeKind::Exterior };
                if k == NodeKind::Interior {
                    let outside_window = cfg.window.is_some_and(|w| {
                        (x[0] - w.center[0]).hypot(x[1] - w.center[1]) > w.radius
                    });
                    let too_deep = cfg.freeze_depth.is_some_and(|fd| sd > fd);
                    if outside_window || too_deep {
                        k = NodeKind::Frozen;
                    }
                }
                kind.push(k);
            }
        }

        let offsets: Vec<[isize; 4]> = frames
            .iter()
            .map(|f| {
                let [(a, b), (c, d)] = f.vectors();
                let o1 = b as isize * nx as isize + a as isize;
                let o2 = d as isize * nx as isize + c as isize;
                [o1, -o1, o2, -o2]
            })
            .collect();
        let frame_len: Vec<f64> = frames.iter().map(|f| f.length() * h).collect();
        let reach = cfg.stencil_radius as f64 * std::f64::consts::SQRT_2 * h;

        let mut slot = vec![REGULAR; nx * ny];
        let mut arms = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let n = j * nx + i;
                if kind[n] != NodeKind::Interior {
                    continue;
                }
                for f in &frames {
                    for (a, b) in f.vectors() {
                        for s in [1, -1] {
                            let (ti, tj) = (i as i64 + (s * a) as i64, j as i64 + (s * b) as i64);
                            if ti < 0 || tj < 0 || ti >= nx as i64 || tj >= ny as i64 {
                                return Err(Error::Config(
                                    "wide stencil leaves the computational box; enlarge the box".into(),
                                ));
                            }
                        }
                    }
                }
                if dist[n] > reach * (1.0 + 1e-9) {
                    continue;
                }
                let x = [origin[0] + i as f64 * h, origin[1] + j as f64 * h];
                let mut local = Vec::with_capacity(4 * frames.len());
                let mut cut = false;
                for (k, f) in frames.iter().enumerate() {
                    for (m, &(a, b)) in f.vectors().iter().enumerate() {
                        for (side, s) in [(0usize, 1i32), (1, -1)] {
                            let off = offsets[k][2 * m + side];
                            let target = (n as isize + off) as usize;
                            let len = frame_len[k];
                            let dir = [(s * a) as f64 / f.length(), (s * b) as f64 / f.length()];
                            match dom.boundary_crossing(&x, &dir, len) {
                                Some(tau) if tau < len * (1.0 - 1e-12) => {
                                    cut = true;
                                    local.push(Arm {
                                        target: BOUNDARY,
                                        len: tau.max(1e-3 * snap.max(1e-6) * h),
                                    });
                                }
                                _ => local.push(Arm {
                                    target: target as u32,
                                    len,
                                }),
                            }
                        }
                    }
                }
                if cut {
                    slot[n] = (arms.len() / (4 * frames.len())) as u32;
                    arms.extend(local);
                }
            }
        }

        Ok(Self {
            nx,
            ny,
            h,
            origin,
            kind,
            dist,
            frames,
            stencil_radius: cfg.stencil_radius,
            offsets,
            frame_len,
            slot,
            arms,
        })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, n: usize) -> [f64; 2] {
        let (i, j) = (n % self.nx, n / self.nx);
        [self.origin[0] + i as f64 * self.h, self.origin[1] + j as f64 * self.h]
    }

    /// Nearest node to a point, if it lies within the grid.
    pub fn nearest_node(&self, x: &[f64]) -> Option<usize> {
        let i = ((x[0] - self.origin[0]) / self.h).round();
        let j = ((x[1] - self.origin[1]) / self.h).round();
        if i < 0.0 || j < 0.0 || i >= self.nx as f64 || j >= self.ny as f64 {
            return None;
        }
        Some(self.index(i as usize, j as usize))
    }

    pub fn interior_count(&self) -> usize {
        self.kind.iter().filter(|&&k| k == NodeKind::Interior).count()
    }

    pub fn irregular_count(&self) -> usize {
        self.arms.len() / (4 * self.frames.len()).max(1)
    }

    /// Initial field: 1 on exterior nodes, 0 elsewhere.
    pub fn boundary_field(&self) -> Vec<f64> {
        self.kind
            .iter()
            .map(|&k| if k == NodeKind::Exterior { 1.0 } else { 0.0 })
            .collect()
    }

    /// Arm `a` (0..4: +v1, -v1, +v2, -v2) of frame `k` at interior node `n`.
    #[inline]
    pub(crate) fn arm(&self, n: usize, k: usize, a: usize) -> Arm {
        let s = self.slot[n];
        if s == REGULAR {
            Arm {
                target: (n as isize + self.offsets[k][a]) as u32,
                len: self.frame_len[k],
            }
        } else {
            self.arms[s as usize * 4 * self.frames.len() + 4 * k + a]
        }
    }

    /// Nonuniform second difference along direction `m` (0 or 1) of frame `k`:
    /// returns `(D, a_plus, a_minus, arm_plus, arm_minus)` with
    /// `D = a_plus (u_+ - u_0) + a_minus (u_- - u_0)`.
    #[inline]
    pub(crate) fn second_difference(&self, u: &[f64], n: usize, k: usize, m: usize) -> (f64, f64, f64, Arm, Arm) {
        let ap = self.arm(n, k, 2 * m);
        let am = self.arm(n, k, 2 * m + 1);
        let val = |arm: Arm| if arm.target == BOUNDARY { 1.0 } else { u[arm.target as usize] };
        let sum = ap.len + am.len;
        let wp = 2.0 / (ap.len * sum);
        let wm = 2.0 / (am.len * sum);
        let u0 = u[n];
        (wp * (val(ap) - u0) + wm * (val(am) - u0), wp, wm, ap, am)
    }
}
