use super::implicit::ImplicitGrid;
use super::modulus::Modulus;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;

/// Shape description as it appears in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ShapeSpec {
    Ball { center: Vec<f64>, radius: f64 },
    ExteriorBall { center: Vec<f64>, radius: f64 },
    Annulus { center: Vec<f64>, r_in: f64, r_out: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
    /// Path to an implicit-grid JSON header, relative to the config file.
    Implicit { header: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    #[serde(flatten)]
    pub shape: ShapeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Modulus>,
}

impl DomainSpec {
    pub fn build(&self, base_dir: &Path) -> Result<Domain> {
        let shape = match &self.shape {
            ShapeSpec::Ball { center, radius } => Shape::ball(center.clone(), *radius)?,
            ShapeSpec::ExteriorBall { center, radius } => Shape::exterior_ball(center.clone(), *radius)?,
            ShapeSpec::Annulus { center, r_in, r_out } => Shape::annulus(center.clone(), *r_in, *r_out)?,
            ShapeSpec::Polygon { vertices } => Shape::polygon(vertices.clone())?,
            ShapeSpec::Implicit { header } => {
                Shape::Implicit(Arc::new(ImplicitGrid::load(&base_dir.join(header))?))
            }
        };
        if let Some(m) = &self.modulus {
            m.validate()?;
        }
        Ok(Domain {
            shape,
            modulus: self.modulus.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Ball { center: Vec<f64>, radius: f64 },
    ExteriorBall { center: Vec<f64>, radius: f64 },
    Annulus { center: Vec<f64>, r_in: f64, r_out: f64 },
    /// Convex polygon, counterclockwise.
    Polygon { vertices: Vec<[f64; 2]> },
    Implicit(Arc<ImplicitGrid>),
}

fn check_center(center: &[f64]) -> Result<()> {
    if !(2..=3).contains(&center.len()) || center.iter().any(|c| !c.is_finite()) {
        return Err(Error::Geometry("center must be a finite 2D or 3D point".into()));
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Geometry(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

impl Shape {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        check_center(&center)?;
        positive("radius", radius)?;
        Ok(Shape::Ball { center, radius })
    }

    pub fn exterior_ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        check_center(&center)?;
        positive("radius", radius)?;
        Ok(Shape::ExteriorBall { center, radius })
    }

    pub fn annulus(center: Vec<f64>, r_in: f64, r_out: f64) -> Result<Self> {
        check_center(&center)?;
        positive("r_in", r_in)?;
        if !(r_out > r_in && r_out.is_finite()) {
            return Err(Error::Geometry(format!("need r_in < r_out, got {r_in}, {r_out}")));
        }
        Ok(Shape::Annulus { center, r_in, r_out })
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::Geometry("polygon needs at least 3 vertices".into()));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Geometry("polygon vertices must be finite".into()));
        }
        for k in 0..n {
            let (a, b, c) = (vertices[k], vertices[(k + 1) % n], vertices[(k + 2) % n]);
            let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
            if !(cross > 0.0) {
                return Err(Error::Geometry(
                    "polygon must be convex with counterclockwise vertices".into(),
                ));
            }
        }
        Ok(Shape::Polygon { vertices })
    }

    /// Axis-aligned rectangle `[lo, hi]`.
    pub fn rectangle(lo: [f64; 2], hi: [f64; 2]) -> Result<Self> {
        Self::polygon(vec![lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]])
    }
}

/// A domain with optional user-supplied boundary modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub shape: Shape,
    pub modulus: Option<Modulus>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Outward unit normal of edge `a -> b` of a counterclockwise polygon.
fn outward_normal(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
    let l = (ex * ex + ey * ey).sqrt();
    [ey / l, -ex / l]
}

/// Closest point on segment `a b` and its parameter in `[0, 1]`.
pub(crate) fn closest_on_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> ([f64; 2], f64) {
    let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
    let t = (((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / (ex * ex + ey * ey)).clamp(0.0, 1.0);
    ([a[0] + t * ex, a[1] + t * ey], t)
}

/// Positive root of `tau^2 + 2 pd tau + c0 = 0` when `c0 < 0`.
fn exit_root(pd: f64, c0: f64) -> f64 {
    let disc = (pd * pd - c0).max(0.0).sqrt();
    if pd <= 0.0 {
        disc - pd
    } else {
        -c0 / (pd + disc)
    }
}

/// Smaller positive root when `c0 > 0` (ray from outside a sphere), if any.
fn entry_root(pd: f64, c0: f64) -> Option<f64> {
    if pd >= 0.0 {
        return None;
    }
    let d2 = pd * pd - c0;
    if d2 < 0.0 {
        return None;
    }
    Some(c0 / (-pd + d2.sqrt()))
}

impl Domain {
    pub fn new(shape: Shape) -> Self {
        Self { shape, modulus: None }
    }

    pub fn with_modulus(mut self, m: Modulus) -> Result<Self> {
        m.validate()?;
        self.modulus = Some(m);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Ball { center, .. } | Shape::ExteriorBall { center, .. } | Shape::Annulus { center, .. } => {
                center.len()
            }
            Shape::Polygon { .. } | Shape::Implicit(_) => 2,
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self.shape, Shape::ExteriorBall { .. })
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Input(format!(
                "point has dimension {}, domain has {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Signed distance to the boundary, positive inside.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ball { center, radius } => radius - norm(&sub(x, center)),
            Shape::ExteriorBall { center, radius } => norm(&sub(x, center)) - radius,
            Shape::Annulus { center, r_in, r_out } => {
                let r = norm(&sub(x, center));
                (r - r_in).min(r_out - r)
            }
            Shape::Polygon { vertices } => {
                let p = [x[0], x[1]];
                let n = vertices.len();
                let mut d = f64::INFINITY;
                let mut inside = true;
                for k in 0..n {
                    let (a, b) = (vertices[k], vertices[(k + 1) % n]);
                    let nrm = outward_normal(a, b);
                    if (p[0] - a[0]) * nrm[0] + (p[1] - a[1]) * nrm[1] >= 0.0 {
                        inside = false;
                    }
                    let (c, _) = closest_on_segment(p, a, b);
                    d = d.min(((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt());
                }
                if inside {
                    d
                } else {
                    -d
                }
            }
            Shape::Implicit(g) => g.signed_distance(x[0], x[1]),
        }
    }

    /// `d_Γ(x)` for `x` in the closed domain.
    pub fn distance_to_boundary(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let sd = self.signed_distance(x);
        let tol = match &self.shape {
            Shape::Implicit(g) => g.h_geo(),
            _ => 1e-12,
        };
        if sd < -tol {
            return Err(Error::Domain(format!("point lies outside the closed domain (signed distance {sd})")));
        }
        Ok(sd.max(0.0))
    }

    /// Axis-aligned bounding box of a bounded domain.
    pub fn bounds(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match &self.shape {
            Shape::Ball { center, radius } => Some((
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            )),
            Shape::Annulus { center, r_out, .. } => Some((
                center.iter().map(|c| c - r_out).collect(),
                center.iter().map(|c| c + r_out).collect(),
            )),
            Shape::ExteriorBall { .. } => None,
            Shape::Polygon { vertices } => {
                let mut lo = vec![f64::INFINITY; 2];
                let mut hi = vec![f64::NEG_INFINITY; 2];
                for v in vertices {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                Some((lo, hi))
            }
            Shape::Implicit(g) => {
                let (lo, hi) = g.bounds();
                Some((lo.to_vec(), hi.to_vec()))
            }
        }
    }

    /// First `tau` in `(0, max_len]` where `x + tau dir` leaves the domain.
    /// `x` must be inside and `dir` a unit vector.
    pub fn boundary_crossing(&self, x: &[f64], dir: &[f64], max_len: f64) -> Option<f64> {
        let hit = match &self.shape {
            Shape::Ball { center, radius } => {
                let p = sub(x, center);
                let r = norm(&p);
                Some(exit_root(dot(&p, dir), (r - radius) * (r + radius)))
            }
            Shape::ExteriorBall { center, radius } => {
                let p = sub(x, center);
                let r = norm(&p);
                entry_root(dot(&p, dir), (r - radius) * (r + radius))
            }
            Shape::Annulus { center, r_in, r_out } => {
                let p = sub(x, center);
                let r = norm(&p);
                let pd = dot(&p, dir);
                let outer = exit_root(pd, (r - r_out) * (r + r_out));
                match entry_root(pd, (r - r_in) * (r + r_in)) {
                    Some(inner) => Some(inner.min(outer)),
                    None => Some(outer),
                }
            }
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                let mut best = f64::INFINITY;
                for k in 0..n {
                    let (a, b) = (vertices[k], vertices[(k + 1) % n]);
                    let nrm = outward_normal(a, b);
                    let nd = nrm[0] * dir[0] + nrm[1] * dir[1];
                    if nd > 0.0 {
                        let gap = (a[0] - x[0]) * nrm[0] + (a[1] - x[1]) * nrm[1];
                        best = best.min(gap.max(0.0) / nd);
                    }
                }
                Some(best)
            }
            Shape::Implicit(g) => implicit_crossing(g, x, dir, max_len),
        };
        hit.filter(|&t| t <= max_len && t.is_finite())
    }
}

fn implicit_crossing(g: &ImplicitGrid, x: &[f64], dir: &[f64], max_len: f64) -> Option<f64> {
    let at = |t: f64| g.signed_distance(x[0] + t * dir[0], x[1] + t * dir[1]);
    let floor = 1e-3 * g.h_geo();
    let mut t = 0.0;
    let mut v = at(0.0);
    if v <= 0.0 {
        return Some(0.0);
    }
    while t < max_len {
        let step = (0.9 * v).max(floor).min(max_len - t).max(1e-300);
        let tn = t + step;
        let vn = at(tn);
        if vn <= 0.0 {
            let (mut lo, mut hi) = (t, tn);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if at(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        t = tn;
        v = vn;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        let ball = Domain::new(Shape::ball(vec![0.0, 0.0], 1.0).unwrap());
        assert_eq!(ball.distance_to_boundary(&[0.0, 0.0]).unwrap(), 1.0);
        let ann = Domain::new(Shape::annulus(vec![0.0, 0.0], 1.0, 2.0).unwrap());
        assert!((ann.distance_to_boundary(&[1.4, 0.0]).unwrap() - 0.4).abs() < 1e-15);
        let sq = Domain::new(Shape::rectangle([0.0, 0.0], [1.0, 1.0]).unwrap());
        assert!((sq.distance_to_boundary(&[0.3, 0.5]).unwrap() - 0.3).abs() < 1e-15);
        assert!(matches!(sq.distance_to_boundary(&[1.3, 0.5]), Err(Error::Domain(_))));
        assert!((sq.signed_distance(&[1.3, 0.5]) + 0.3).abs() < 1e-15);
    }

    #[test]
    fn crossings() {
        let ball = Domain::new(Shape::ball(vec![0.0, 0.0], 1.0).unwrap());
        let t = ball.boundary_crossing(&[0.5, 0.0], &[1.0, 0.0], 2.0).unwrap();
        assert!((t - 0.5).abs() < 1e-15);
        assert!(ball.boundary_crossing(&[0.5, 0.0], &[1.0, 0.0], 0.4).is_none());
        let ext = Domain::new(Shape::exterior_ball(vec![0.0, 0.0], 1.0).unwrap());
        let t = ext.boundary_crossing(&[2.0, 0.0], &[-1.0, 0.0], 5.0).unwrap();
        assert!((t - 1.0).abs() < 1e-15);
        assert!(ext.boundary_crossing(&[2.0, 0.0], &[0.0, 1.0], 5.0).is_none());
        let sq = Domain::new(Shape::rectangle([0.0, 0.0], [1.0, 1.0]).unwrap());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let t = sq.boundary_crossing(&[0.5, 0.8], &[s, s], 1.0).unwrap();
        assert!((t - 0.2 / s).abs() < 1e-14);
        let g = ImplicitGrid::from_fn(101, 101, 0.04, 0.04, [-2.0, -2.0], |x, y| 1.0 - (x * x + y * y).sqrt())
            .unwrap();
        let imp = Domain::new(Shape::Implicit(Arc::new(g)));
        let t = imp.boundary_crossing(&[0.0, 0.0], &[1.0, 0.0], 3.0).unwrap();
        assert!((t - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Shape::polygon(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).is_err());
        assert!(Shape::annulus(vec![0.0, 0.0], 2.0, 1.0).is_err());
        assert!(Shape::ball(vec![0.0], 1.0).is_err());
    }

    #[test]
    fn spec_roundtrip() {
        let json = r#"{"type": "ball", "center": [0.0, 0.0], "radius": 1.0, "modulus": {"kind": "lipschitz", "l": 1.0}}"#;
        let spec: DomainSpec = serde_json::from_str(json).unwrap();
        let d = spec.build(Path::new(".")).unwrap();
        assert_eq!(d.modulus, Some(Modulus::Lipschitz { l: 1.0 }));
    }
}
