use crate::error::{Error, Result};
use crate::pucci::{PucciParams, Sign};
use crate::special::{ln_f_reduced, ln_g_at_zero, ln_g_reduced};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadialKind {
    Ball,
    Exterior,
}

fn check_eps(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(())
}

/// Profile power for the exterior problem: `-1 + (N-1) Lambda/lambda` (minus)
/// or `-1 + (N-1) lambda/Lambda` (plus).
pub fn exterior_power(sign: Sign, p: &PucciParams) -> f64 {
    let n1 = p.dim as f64 - 1.0;
    match sign {
        Sign::Minus => -1.0 + n1 * p.big_lambda / p.lambda,
        Sign::Plus => -1.0 + n1 * p.lambda / p.big_lambda,
    }
}

/// Profile power for the ball problem, `N - 2` for both signs.
pub fn ball_power(p: &PucciParams) -> f64 {
    p.dim as f64 - 2.0
}

/// Profile rate `1 / (sqrt(ell) eps)`.
pub fn profile_rate(sign: Sign, epsilon: f64, p: &PucciParams) -> f64 {
    1.0 / (p.ell(sign).sqrt() * epsilon)
}

/// The exact solution of `-eps^2 M(D^2 u) + u = 0`, `u = 1` on `|x| = R`, for a
/// ball or the exterior of a ball centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialEllipticSolution {
    pub sign: Sign,
    pub radius: f64,
    pub epsilon: f64,
    pub params: PucciParams,
    pub kind: RadialKind,
}

impl RadialEllipticSolution {
    pub fn new(kind: RadialKind, sign: Sign, radius: f64, epsilon: f64, params: PucciParams) -> Result<Self> {
        params.validate()?;
        check_eps(epsilon)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("radius must be positive, got {radius}")));
        }
        Ok(Self {
            sign,
            radius,
            epsilon,
            params,
            kind,
        })
    }

    pub fn log_u(&self, x_norm: f64) -> Result<f64> {
        match self.kind {
            RadialKind::Ball => ball_solution(self.sign, x_norm, self.radius, self.epsilon, &self.params),
            RadialKind::Exterior => {
                exterior_solution(self.sign, x_norm, self.radius, self.epsilon, &self.params)
            }
        }
    }

    /// `eps log u + d/sqrt(ell)` with `d` the distance to the sphere.
    pub fn discrepancy(&self, x_norm: f64) -> Result<f64> {
        let d = (x_norm - self.radius).abs();
        Ok(self.epsilon * self.log_u(x_norm)? + d / self.params.ell(self.sign).sqrt())
    }
}

/// `log u(x)` in the ball `|x| < R`: `u = g(|x|)/g(R)` with `b = N - 2`.
pub fn ball_solution(sign: Sign, x_norm: f64, radius: f64, epsilon: f64, p: &PucciParams) -> Result<f64> {
    check_eps(epsilon)?;
    if !(x_norm >= 0.0 && x_norm <= radius) {
        return Err(Error::Domain(format!("need 0 <= |x| <= R, got |x| = {x_norm}, R = {radius}")));
    }
    if x_norm == radius {
        return Ok(0.0);
    }
    let a = profile_rate(sign, epsilon, p);
    let b = ball_power(p);
    let (sx, sr) = (a * x_norm, a * radius);
    Ok(ln_g_reduced(sx, b) - ln_g_reduced(sr, b) - (sr - sx))
}

/// `log u(x)` outside the ball, `|x| > R`: the bounded solution `f(|x|)/f(R)`.
pub fn exterior_solution(
    sign: Sign,
    x_norm: f64,
    radius: f64,
    epsilon: f64,
    p: &PucciParams,
) -> Result<f64> {
    check_eps(epsilon)?;
    if !(x_norm >= radius) || !x_norm.is_finite() {
        return Err(Error::Domain(format!("need |x| >= R, got |x| = {x_norm}, R = {radius}")));
    }
    if x_norm == radius {
        return Ok(0.0);
    }
    let a = profile_rate(sign, epsilon, p);
    let b = exterior_power(sign, p);
    let (sx, sr) = (a * x_norm, a * radius);
    Ok(ln_f_reduced(sx, b) - ln_f_reduced(sr, b) - (sx - sr))
}

/// Upper bound for `eps log u(x) + d/sqrt(ell)` at distance `d` from the boundary:
/// `eps log[ int (sin t)^{N-2} / int e^{-(d/eps)(1 - cos t)/sqrt(ell)} (sin t)^{N-2} ]`.
pub fn elliptic_barrier_above(sign: Sign, d: f64, epsilon: f64, p: &PucciParams) -> Result<f64> {
    check_eps(epsilon)?;
    if !(d >= 0.0) || !d.is_finite() {
        return Err(Error::Domain(format!("distance must be nonnegative, got {d}")));
    }
    if d == 0.0 {
        return Ok(0.0);
    }
    let b = ball_power(p);
    let s = profile_rate(sign, epsilon, p) * d;
    Ok(epsilon * (ln_g_at_zero(b)? - ln_g_reduced(s, b)))
}

/// Lower bound for `eps log u(x) + (|x - z| - d_z)/sqrt(ell)` from the exterior
/// solution of the ball `B_{d_z}(z)`, where `z` lies outside the closed domain.
pub fn elliptic_barrier_below(
    sign: Sign,
    x: &[f64],
    z: &[f64],
    d_z: f64,
    epsilon: f64,
    p: &PucciParams,
) -> Result<f64> {
    check_eps(epsilon)?;
    if x.len() != z.len() {
        return Err(Error::Input("point dimensions differ".into()));
    }
    if !(d_z > 0.0) {
        return Err(Error::Domain(format!("d_z must be positive, got {d_z}")));
    }
    let dist = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    elliptic_barrier_below_radial(sign, dist, d_z, epsilon, p)
}

/// As [`elliptic_barrier_below`] given `|x - z|` directly.
pub fn elliptic_barrier_below_radial(
    sign: Sign,
    dist: f64,
    d_z: f64,
    epsilon: f64,
    p: &PucciParams,
) -> Result<f64> {
    if dist < d_z * (1.0 - 1e-14) {
        return Err(Error::Geometry(format!(
            "|x - z| = {dist} is smaller than d_z = {d_z}"
        )));
    }
    if dist <= d_z {
        return Ok(0.0);
    }
    let a = profile_rate(sign, epsilon, p);
    let b = exterior_power(sign, p);
    Ok(epsilon * (ln_f_reduced(a * dist, b) - ln_f_reduced(a * d_z, b)))
}
