//! The profile integrals
//!
//! ```text
//! g(s) = int_0^pi  e^{a s cos t} (sin t)^b dt
//! f(s) = int_0^inf e^{-a s cosh t} (sinh t)^b dt
//! ```
//!
//! and their asymptotic expansions. Both are evaluated in log form: after the
//! substitutions `u = 1 - cos t` and `w = cosh t - 1` the exponential factor
//! `e^{+-a s}` is pulled out and the remaining integrand is shifted by its peak.

use super::gamma::{gamma_fn, ln_gamma};
use super::quadrature::{tanh_sinh_pieces, QuadResult};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

const REL_TOL: f64 = 1e-14;
/// Log-integrand drop below the peak at which the range is truncated.
const LOG_CUTOFF: f64 = 42.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileParams {
    pub a: f64,
    pub b: f64,
}

impl ProfileParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Parameter(format!("profile rate a must be positive, got {a}")));
        }
        if !(b > -1.0 && b.is_finite()) {
            return Err(Error::Parameter(format!("profile power b must exceed -1, got {b}")));
        }
        Ok(Self { a, b })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    F,
    G,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureReport {
    /// `exp(log_value)`; may underflow to 0 or overflow to infinity.
    pub value: f64,
    pub log_value: f64,
    pub abs_error_estimate: f64,
    pub rel_error_estimate: f64,
    pub evaluations: usize,
    /// Angle at which the integration range was cut (`pi` for an untruncated `g`).
    pub truncation_point: f64,
}

/// Reduced integral in log form: `ln int e^{-s x} (x (x + k))^c dx`.
#[derive(Debug, Clone, Copy)]
struct Reduced {
    log_value: f64,
    rel_err: f64,
    evals: usize,
    cut: f64,
}

fn log_terms(c: f64, x: f64, other: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * (x.ln() + other.ln())
    }
}

fn sorted_points(mut pts: Vec<f64>, end: f64) -> Vec<f64> {
    pts.retain(|&p| p > 0.0 && p < end && p.is_finite());
    pts.push(0.0);
    pts.push(end);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1e-300));
    pts
}

/// Shift, breakpoints and cutoff of one reduced integral. Reusing a plan at a
/// nearby `s` keeps the value ratio free of the rounding in `ln`.
#[derive(Debug, Clone)]
struct Plan {
    shift: f64,
    pts: Vec<f64>,
    end: f64,
}

fn g_phi(s: f64, c: f64, u: f64, two_minus_u: f64) -> f64 {
    -s * u + log_terms(c, u, two_minus_u)
}

fn f_phi(s: f64, c: f64, w: f64) -> f64 {
    -s * w + log_terms(c, w, w + 2.0)
}

fn plan_g(s: f64, b: f64) -> Plan {
    let c = 0.5 * (b - 1.0);
    let peak = if c > 0.0 {
        Some(2.0 * c / ((s + c) + (s * s + c * c).sqrt()))
    } else {
        None
    };
    let reference = peak.unwrap_or(if s > 0.5 { 1.0 / s } else { 1.0 });
    let shift = g_phi(s, c, reference, 2.0 - reference);

    let mut end = 2.0;
    if s > 0.0 {
        let mut t = 2.0 * reference.max(1.0 / s);
        while t < 2.0 {
            if g_phi(s, c, t, 2.0 - t) < shift - LOG_CUTOFF {
                end = t;
                break;
            }
            t *= 2.0;
        }
    }
    let mut bps = vec![reference];
    if s > 0.0 {
        bps.push(1.0 / s);
    }
    Plan {
        shift,
        pts: sorted_points(bps, end),
        end,
    }
}

/// `e^{-shift} G~(s)` with `G~(s) = int_0^2 e^{-s u} (u (2 - u))^c du`, `c = (b - 1)/2`.
fn sum_g(s: f64, b: f64, plan: &Plan) -> QuadResult {
    let c = 0.5 * (b - 1.0);
    let last = plan.pts.len() - 2;
    tanh_sinh_pieces(
        |x, dl, dr, k| {
            let u = if k == 0 { dl } else { x };
            let two_minus_u = if k == last { (2.0 - plan.end) + dr } else { 2.0 - x };
            (g_phi(s, c, u, two_minus_u) - plan.shift).exp()
        },
        &plan.pts,
        REL_TOL,
    )
}

fn plan_f(s: f64, b: f64) -> Plan {
    let c = 0.5 * (b - 1.0);
    let reference = if c > 0.0 {
        let d = s - c;
        let root = (s * s + c * c).sqrt();
        if d >= 0.0 {
            2.0 * c / (d + root)
        } else {
            (root - d) / s
        }
    } else {
        (1.0 / s).min(1.0)
    };
    let shift = f_phi(s, c, reference);
    let mut end = 2.0 * reference.max(1.0 / s);
    while f_phi(s, c, end) >= shift - LOG_CUTOFF {
        end *= 2.0;
    }
    Plan {
        shift,
        pts: sorted_points(vec![reference, 1.0 / s, 2.0], end),
        end,
    }
}

/// `e^{-shift} F~(s)` with `F~(s) = int_0^inf e^{-s w} (w (w + 2))^c dw`, `s > 0`.
fn sum_f(s: f64, b: f64, plan: &Plan) -> QuadResult {
    let c = 0.5 * (b - 1.0);
    tanh_sinh_pieces(
        |x, dl, _, k| {
            let w = if k == 0 { dl } else { x };
            (f_phi(s, c, w) - plan.shift).exp()
        },
        &plan.pts,
        REL_TOL,
    )
}

fn reduce(plan: Plan, r: QuadResult) -> Reduced {
    Reduced {
        log_value: r.value.ln() + plan.shift,
        rel_err: r.abs_err / r.value,
        evals: r.evals,
        cut: plan.end,
    }
}

fn reduced_g(s: f64, b: f64) -> Reduced {
    let plan = plan_g(s, b);
    let r = sum_g(s, b, &plan);
    reduce(plan, r)
}

fn reduced_f(s: f64, b: f64) -> Reduced {
    let plan = plan_f(s, b);
    let r = sum_f(s, b, &plan);
    reduce(plan, r)
}

fn report(log_value: f64, red: Reduced, cut_angle: f64) -> QuadratureReport {
    let value = log_value.exp();
    QuadratureReport {
        value,
        log_value,
        abs_error_estimate: if value.is_finite() { red.rel_err * value } else { f64::INFINITY },
        rel_error_estimate: red.rel_err,
        evaluations: red.evals,
        truncation_point: cut_angle,
    }
}

/// `ln int_0^2 e^{-s u} (u(2-u))^{(b-1)/2} du`, the normalized `g` integral with `s = a sigma`.
pub fn ln_g_reduced(s: f64, b: f64) -> f64 {
    reduced_g(s, b).log_value
}

/// `ln int_0^inf e^{-s w} (w(w+2))^{(b-1)/2} dw`.
pub fn ln_f_reduced(s: f64, b: f64) -> f64 {
    reduced_f(s, b).log_value
}

/// `g(sigma)` for `sigma >= 0`.
pub fn g_profile(sigma: f64, pp: &ProfileParams) -> Result<QuadratureReport> {
    ProfileParams::new(pp.a, pp.b)?;
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!("g requires sigma >= 0, got {sigma}")));
    }
    let s = pp.a * sigma;
    let red = reduced_g(s, pp.b);
    let cut = if red.cut >= 2.0 { std::f64::consts::PI } else { (1.0 - red.cut).acos() };
    Ok(report(red.log_value + s, red, cut))
}

/// `f(sigma)` for `sigma > 0`.
pub fn f_profile(sigma: f64, pp: &ProfileParams) -> Result<QuadratureReport> {
    ProfileParams::new(pp.a, pp.b)?;
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!("f requires sigma > 0, got {sigma}")));
    }
    let s = pp.a * sigma;
    let red = reduced_f(s, pp.b);
    Ok(report(red.log_value - s, red, (1.0 + red.cut).acosh()))
}

pub fn profile(kind: ProfileKind, sigma: f64, pp: &ProfileParams) -> Result<QuadratureReport> {
    match kind {
        ProfileKind::F => f_profile(sigma, pp),
        ProfileKind::G => g_profile(sigma, pp),
    }
}

/// `g(0) = int_0^pi (sin t)^b dt = sqrt(pi) Gamma((b+1)/2) / Gamma(b/2 + 1)`.
pub fn g_at_zero(b: f64) -> Result<f64> {
    Ok(ln_g_at_zero(b)?.exp())
}

pub fn ln_g_at_zero(b: f64) -> Result<f64> {
    if !(b > -1.0) {
        return Err(Error::Parameter(format!("b must exceed -1, got {b}")));
    }
    Ok(0.5 * std::f64::consts::PI.ln() + ln_gamma(0.5 * (b + 1.0))? - ln_gamma(0.5 * b + 1.0)?)
}

fn ln_large_prefactor(s: f64, b: f64) -> f64 {
    0.5 * (b - 1.0) * std::f64::consts::LN_2 + ln_gamma(0.5 * (b + 1.0)).unwrap_or(f64::NAN)
        - 0.5 * (b + 1.0) * s.ln()
}

/// Leading term of `g` as `sigma -> inf`.
pub fn g_asymptotic_large(sigma: f64, pp: &ProfileParams) -> f64 {
    ln_g_asymptotic_large(sigma, pp).exp()
}

pub fn ln_g_asymptotic_large(sigma: f64, pp: &ProfileParams) -> f64 {
    let s = pp.a * sigma;
    ln_large_prefactor(s, pp.b) + s
}

/// Leading term of `f` as `sigma -> inf`.
pub fn f_asymptotic_large(sigma: f64, pp: &ProfileParams) -> f64 {
    ln_f_asymptotic_large(sigma, pp).exp()
}

pub fn ln_f_asymptotic_large(sigma: f64, pp: &ProfileParams) -> f64 {
    let s = pp.a * sigma;
    ln_large_prefactor(s, pp.b) - s
}

/// Limit value `f(0+)` for `-1 < b < 0`. The sign is chosen so the constant is
/// positive, which is what the quadrature gives.
pub fn f_zero_limit(b: f64) -> Result<f64> {
    if !(b > -1.0 && b < 0.0) {
        return Err(Error::Parameter(format!("f(0+) is finite only for -1 < b < 0, got {b}")));
    }
    let pi = std::f64::consts::PI;
    Ok(-pi.sqrt() / (2.0 * (0.5 * b * pi).sin()) * gamma_fn(0.5 * (b + 1.0))?
        / gamma_fn(0.5 * b + 1.0)?)
}

/// Leading term of `f` as `sigma -> 0+`, by the sign of `b`.
pub fn f_asymptotic_small(sigma: f64, pp: &ProfileParams) -> f64 {
    let s = pp.a * sigma;
    let b = pp.b;
    if b > 0.0 {
        (ln_gamma(b).unwrap_or(f64::NAN) - b * s.ln()).exp()
    } else if b == 0.0 {
        -s.ln()
    } else {
        f_zero_limit(b).unwrap_or(f64::NAN)
    }
}

/// Relative residual `|-h'' - (b+1)/sigma h' + a^2 h| / (a^2 h)` of the profile
/// ODE with central differences of step `1e-4 sigma`.
pub fn ode_residual_check(kind: ProfileKind, pp: &ProfileParams, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    let d = 1e-4 * sigma;
    ProfileParams::new(pp.a, pp.b)?;
    // Ratios h(sigma +- d) / h(sigma) from sums under one plan: g = e^{s} G~(s), f = e^{-s} F~(s).
    let (s0, sd) = (pp.a * sigma, pp.a * d);
    let (rp, rm) = match kind {
        ProfileKind::G => {
            let plan = plan_g(s0, pp.b);
            let mid = sum_g(s0, pp.b, &plan).value;
            (
                sd.exp() * sum_g(s0 + sd, pp.b, &plan).value / mid,
                (-sd).exp() * sum_g(s0 - sd, pp.b, &plan).value / mid,
            )
        }
        ProfileKind::F => {
            let plan = plan_f(s0, pp.b);
            let mid = sum_f(s0, pp.b, &plan).value;
            (
                (-sd).exp() * sum_f(s0 + sd, pp.b, &plan).value / mid,
                sd.exp() * sum_f(s0 - sd, pp.b, &plan).value / mid,
            )
        }
    };
    let h2 = (rp - 2.0 + rm) / (d * d);
    let h1 = (rp - rm) / (2.0 * d);
    let a2 = pp.a * pp.a;
    Ok(((-h2 - (pp.b + 1.0) / sigma * h1 + a2) / a2).abs())
}
