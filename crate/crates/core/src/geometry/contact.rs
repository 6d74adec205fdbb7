use super::modulus::Modulus;
use super::shape::{closest_on_segment, Domain, Shape};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Touching ball `B_R(x)` with `R = d_Γ(x)` meeting the complement at `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactData {
    pub x: Vec<f64>,
    pub radius: f64,
    pub z: Vec<f64>,
    /// Principal curvatures at `z`, positive when Γ bends around the domain.
    pub curvatures: Vec<f64>,
    /// `prod (1 - R kappa_j)`
    pub pi0: f64,
}

fn sphere_contact(x: &[f64], center: &[f64], rho: f64, tie_tol: f64) -> Result<Vec<f64>> {
    let p: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
    let r = p.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r <= tie_tol {
        return Err(Error::MultiContact("point is at the centre; every boundary point is nearest".into()));
    }
    Ok(center.iter().zip(&p).map(|(c, v)| c + rho * v / r).collect())
}

pub fn contact_ball(dom: &Domain, x: &[f64]) -> Result<ContactData> {
    let radius = dom.distance_to_boundary(x)?;
    if radius <= 0.0 {
        return Err(Error::Geometry("point lies on the boundary".into()));
    }
    let tol = 1e-9 * (1.0 + radius);
    let n1 = x.len() - 1;
    let (z, curvatures) = match &dom.shape {
        Shape::Ball { center, radius: rho } => (sphere_contact(x, center, *rho, tol)?, vec![1.0 / rho; n1]),
        Shape::ExteriorBall { center, radius: rho } => {
            (sphere_contact(x, center, *rho, tol)?, vec![-1.0 / rho; n1])
        }
        Shape::Annulus { center, r_in, r_out } => {
            let r = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let (d_in, d_out) = (r - r_in, r_out - r);
            if (d_in - d_out).abs() <= tol {
                return Err(Error::MultiContact("equidistant from both annulus circles".into()));
            }
            if d_in < d_out {
                (sphere_contact(x, center, *r_in, tol)?, vec![-1.0 / r_in; n1])
            } else {
                (sphere_contact(x, center, *r_out, tol)?, vec![1.0 / r_out; n1])
            }
        }
        Shape::Polygon { vertices } => {
            let p = [x[0], x[1]];
            let n = vertices.len();
            let mut hits: Vec<([f64; 2], f64, f64)> = (0..n)
                .map(|k| {
                    let (c, t) = closest_on_segment(p, vertices[k], vertices[(k + 1) % n]);
                    (c, t, ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt())
                })
                .collect();
            hits.sort_by(|a, b| a.2.total_cmp(&b.2));
            let (c, t, d) = hits[0];
            if t <= 1e-12 || t >= 1.0 - 1e-12 {
                return Err(Error::MultiContact("nearest boundary point is a polygon vertex".into()));
            }
            if hits[1].2 - d <= tol {
                return Err(Error::MultiContact("several polygon edges are nearest".into()));
            }
            (c.to_vec(), vec![0.0])
        }
        Shape::Implicit(_) => {
            return Err(Error::Geometry(
                "contact curvature is not available for implicit domains".into(),
            ))
        }
    };
    for &kappa in &curvatures {
        if kappa >= 1.0 / radius {
            return Err(Error::CurvatureCondition {
                kappa,
                inv_radius: 1.0 / radius,
            });
        }
    }
    let pi0 = curvatures.iter().map(|k| 1.0 - radius * k).product();
    Ok(ContactData {
        x: x.to_vec(),
        radius,
        z,
        curvatures,
        pi0,
    })
}

/// A valid modulus for a primitive shape.
///
/// Spheres are graphs over tangent charts of half-width `rho/2` with slope at
/// most `1/sqrt(3)`. Convex polygons are Lipschitz graphs near a vertex of
/// interior angle `alpha` with slope `cot(alpha/2)`.
pub fn classify_regularity(dom: &Domain) -> Result<Modulus> {
    match &dom.shape {
        Shape::Ball { .. } | Shape::ExteriorBall { .. } | Shape::Annulus { .. } => {
            Ok(Modulus::Lipschitz { l: 1.0 / 3f64.sqrt() })
        }
        Shape::Polygon { vertices } => {
            let n = vertices.len();
            let mut l: f64 = 0.0;
            for k in 0..n {
                let prev = vertices[(k + n - 1) % n];
                let cur = vertices[k];
                let next = vertices[(k + 1) % n];
                let u = [prev[0] - cur[0], prev[1] - cur[1]];
                let v = [next[0] - cur[0], next[1] - cur[1]];
                let cos = (u[0] * v[0] + u[1] * v[1])
                    / ((u[0] * u[0] + u[1] * u[1]).sqrt() * (v[0] * v[0] + v[1] * v[1]).sqrt());
                let alpha = cos.clamp(-1.0, 1.0).acos();
                l = l.max(1.0 / (0.5 * alpha).tan());
            }
            Ok(Modulus::Lipschitz { l })
        }
        Shape::Implicit(_) => match &dom.modulus {
            Some(m) => Ok(m.clone()),
            None => Err(Error::Geometry("implicit domains need a user-supplied modulus".into())),
        },
    }
}
