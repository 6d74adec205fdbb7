use super::elliptic::ball_power;
use crate::error::{Error, Result};
use crate::pucci::{PucciParams, Sign};
use crate::special::{ln_g_at_zero, ln_g_reduced};
use serde::{Deserialize, Serialize};

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    Ok(())
}

/// Time exponent of the global sub-solution: `N Lambda/(2 lambda)` for minus,
/// `((N-1) lambda + Lambda)/(2 Lambda)` for plus.
pub fn phi_exponent(sign: Sign, p: &PucciParams) -> f64 {
    let n = p.dim as f64;
    match sign {
        Sign::Minus => n * p.big_lambda / (2.0 * p.lambda),
        Sign::Plus => ((n - 1.0) * p.lambda + p.big_lambda) / (2.0 * p.big_lambda),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiEval {
    pub value: f64,
    pub log_value: f64,
    /// `Phi_t - M(D^2 Phi)`, nonpositive.
    pub residual: f64,
}

/// `Phi(x, t) = t^{-c} e^{-|x|^2/(4 ell t)}` and its analytic residual.
pub fn phi_global(sign: Sign, x_norm: f64, t: f64, p: &PucciParams) -> Result<PhiEval> {
    check_t(t)?;
    if !(x_norm >= 0.0) {
        return Err(Error::Domain(format!("|x| must be nonnegative, got {x_norm}")));
    }
    let c = phi_exponent(sign, p);
    let ell = p.ell(sign);
    let r2 = x_norm * x_norm;
    let log_value = -c * t.ln() - r2 / (4.0 * ell * t);
    let value = log_value.exp();
    let (l, u) = (p.lambda, p.big_lambda);
    let residual = match sign {
        Sign::Minus => {
            if r2 >= 2.0 * l * t {
                (l - u) / (2.0 * l * t) * value
            } else {
                r2 * (l - u) / (4.0 * l * l * t * t) * value
            }
        }
        Sign::Plus => {
            if r2 >= 2.0 * u * t {
                0.0
            } else {
                (u - l) / (4.0 * u * u * t * t) * (r2 - 2.0 * u * t) * value
            }
        }
    };
    Ok(PhiEval {
        value,
        log_value,
        residual,
    })
}

/// Normalizing constant `A = (delta^2 e / (4 ell c))^c` so that
/// `sup_t A Phi(x - z, t) = 1` on `|x - z| = delta`.
pub fn barrier_prefactor(sign: Sign, delta: f64, p: &PucciParams) -> Result<f64> {
    Ok(ln_barrier_prefactor(sign, delta, p)?.exp())
}

pub fn ln_barrier_prefactor(sign: Sign, delta: f64, p: &PucciParams) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    let c = phi_exponent(sign, p);
    let ell = p.ell(sign);
    Ok(c * (2.0 * delta.ln() + 1.0 - (4.0 * ell * c).ln()))
}

/// Upper bound for `4t log v(x, t)` at distance `d`:
/// `-d^2/ell + 4t log[ int (sin s)^{N-2} / int e^{-(d^2/(2 ell t))(1 - cos s)} (sin s)^{N-2} ]`.
pub fn parabolic_barrier_above(sign: Sign, d: f64, t: f64, p: &PucciParams) -> Result<f64> {
    check_t(t)?;
    if !(d >= 0.0) || !d.is_finite() {
        return Err(Error::Domain(format!("distance must be nonnegative, got {d}")));
    }
    if d == 0.0 {
        return Ok(0.0);
    }
    let ell = p.ell(sign);
    let b = ball_power(p);
    let s = d * d / (2.0 * ell * t);
    Ok(-d * d / ell + 4.0 * t * (ln_g_at_zero(b)? - ln_g_reduced(s, b)))
}

/// `log(A Phi(x - z, t))`, a lower bound for `log v(x, t)` when the nearest
/// point of the closed domain to `z` is at distance `delta`.
pub fn parabolic_barrier_below(
    sign: Sign,
    x: &[f64],
    z: &[f64],
    delta: f64,
    t: f64,
    p: &PucciParams,
) -> Result<f64> {
    if x.len() != z.len() {
        return Err(Error::Input("point dimensions differ".into()));
    }
    let dist = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    parabolic_barrier_below_radial(sign, dist, delta, t, p)
}

pub fn parabolic_barrier_below_radial(
    sign: Sign,
    dist: f64,
    delta: f64,
    t: f64,
    p: &PucciParams,
) -> Result<f64> {
    check_t(t)?;
    let phi = phi_global(sign, dist, t, p)?;
    Ok(ln_barrier_prefactor(sign, delta, p)? + phi.log_value)
}

/// Barrier record: above uses the distance `d_Γ(x)`, below uses an exterior
/// anchor `z` at distance `delta` from the domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "direction", rename_all = "lowercase")]
pub enum ParabolicBarrier {
    Above { sign: Sign, params: PucciParams },
    Below { sign: Sign, z: Vec<f64>, delta: f64, params: PucciParams },
}

impl ParabolicBarrier {
    /// Bound on `log v(x, t)`; `d` is `d_Γ(x)` (only used for `Above`).
    pub fn log_bound(&self, x: &[f64], d: f64, t: f64) -> Result<f64> {
        match self {
            ParabolicBarrier::Above { sign, params } => {
                Ok(parabolic_barrier_above(*sign, d, t, params)? / (4.0 * t))
            }
            ParabolicBarrier::Below { sign, z, delta, params } => {
                parabolic_barrier_below(*sign, x, z, *delta, t, params)
            }
        }
    }
}
