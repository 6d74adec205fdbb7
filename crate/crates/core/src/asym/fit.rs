//! Rate models, least-squares fits through the origin and Richardson extrapolation.

use crate::error::{Error, Result};
use crate::fd::ProblemKind;
use crate::geometry::{psi_omega, Modulus};
use crate::pucci::{PucciParams, Sign};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateModel {
    /// `eps log(1/eps)`
    EpsLogInvEps,
    /// `eps log(1/psi(eps))`
    EpsLogInvPsi,
    /// `eps log|log psi(eps)|`
    EpsLogLogPsi,
    /// `eps`
    Eps,
    /// `t log(1/t)`
    TLogInvT,
    /// `t log(1/psi(t))`
    TLogInvPsi,
}

impl RateModel {
    pub const ELLIPTIC: [RateModel; 3] = [RateModel::EpsLogInvEps, RateModel::EpsLogLogPsi, RateModel::EpsLogInvPsi];
    pub const PARABOLIC: [RateModel; 2] = [RateModel::TLogInvT, RateModel::TLogInvPsi];

    pub fn label(&self) -> &'static str {
        match self {
            RateModel::EpsLogInvEps => "eps*log(1/eps)",
            RateModel::EpsLogInvPsi => "eps*log(1/psi(eps))",
            RateModel::EpsLogLogPsi => "eps*log|log psi(eps)|",
            RateModel::Eps => "eps",
            RateModel::TLogInvT => "t*log(1/t)",
            RateModel::TLogInvPsi => "t*log(1/psi(t))",
        }
    }

    pub fn needs_modulus(&self) -> bool {
        matches!(self, RateModel::EpsLogInvPsi | RateModel::EpsLogLogPsi | RateModel::TLogInvPsi)
    }

    /// `rho(s)` for parameter `s` (`eps` or `t`).
    pub fn rho(&self, s: f64, modulus: Option<&Modulus>) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::Parameter(format!("rate parameter must be positive, got {s}")));
        }
        let psi = |s: f64| -> Result<f64> {
            let m = modulus.ok_or_else(|| Error::Fit(format!("model {} needs a modulus", self.label())))?;
            psi_omega(m, s)
        };
        Ok(match self {
            RateModel::EpsLogInvEps | RateModel::TLogInvT => -s * s.ln(),
            RateModel::Eps => s,
            RateModel::EpsLogInvPsi | RateModel::TLogInvPsi => -s * psi(s)?.ln(),
            RateModel::EpsLogLogPsi => s * psi(s)?.ln().abs().ln(),
        })
    }
}

/// The rate predicted by the small-diffusion and short-time theorems for a
/// `C^{0,omega}` domain.
pub fn theoretical_regime(kind: ProblemKind, sign: Sign, p: &PucciParams) -> RateModel {
    match kind {
        ProblemKind::Parabolic => RateModel::TLogInvPsi,
        ProblemKind::Elliptic => {
            let n1 = p.dim as f64 - 1.0;
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
            match sign {
                Sign::Minus => {
                    if p.dim == 2 && close(p.lambda, p.big_lambda) {
                        RateModel::EpsLogLogPsi
                    } else {
                        RateModel::EpsLogInvPsi
                    }
                }
                Sign::Plus => {
                    let t = p.lambda * n1;
                    if close(p.big_lambda, t) {
                        RateModel::EpsLogLogPsi
                    } else if p.big_lambda > t {
                        RateModel::EpsLogInvEps
                    } else {
                        RateModel::EpsLogInvPsi
                    }
                }
            }
        }
    }
}

/// `y ~ a x` by least squares; `r_squared` is the uncentered coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OriginFit {
    pub coefficient: f64,
    pub r_squared: f64,
    pub std_error: f64,
}

pub fn fit_through_origin(x: &[f64], y: &[f64]) -> Result<OriginFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Fit("need at least two matched points".into()));
    }
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let syy: f64 = y.iter().map(|v| v * v).sum();
    if !(sxx > 0.0) || !sxx.is_finite() || !syy.is_finite() {
        return Err(Error::Fit("degenerate regressor".into()));
    }
    let a = x.iter().zip(y).map(|(u, v)| u * v).sum::<f64>() / sxx;
    let ssr: f64 = x.iter().zip(y).map(|(u, v)| (v - a * u).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ssr / syy };
    let se = (ssr / (x.len() - 1) as f64 / sxx).sqrt();
    Ok(OriginFit {
        coefficient: a,
        r_squared: r2,
        std_error: se,
    })
}

/// `y ~ a x1 + b x2` through the origin with uncentered R^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoTermFit {
    pub a: f64,
    pub b: f64,
    pub r_squared: f64,
}

pub fn fit_two_term(x1: &[f64], x2: &[f64], y: &[f64]) -> Result<TwoTermFit> {
    let n = y.len();
    if x1.len() != n || x2.len() != n || n < 3 {
        return Err(Error::Fit("need at least three matched points".into()));
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    let (s11, s12, s22) = (dot(x1, x1), dot(x1, x2), dot(x2, x2));
    let (s1y, s2y, syy) = (dot(x1, y), dot(x2, y), dot(y, y));
    let det = s11 * s22 - s12 * s12;
    if !(det.abs() > 1e-14 * s11 * s22) {
        return Err(Error::Fit("collinear regressors".into()));
    }
    let a = (s22 * s1y - s12 * s2y) / det;
    let b = (s11 * s2y - s12 * s1y) / det;
    let ssr: f64 = (0..n).map(|i| (y[i] - a * x1[i] - b * x2[i]).powi(2)).sum();
    Ok(TwoTermFit {
        a,
        b,
        r_squared: if syy == 0.0 { 1.0 } else { 1.0 - ssr / syy },
    })
}

/// `|y| ~ C s^p` fitted on logs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub constant: f64,
    pub r_squared: f64,
}

pub fn fit_power(s: &[f64], y: &[f64]) -> Result<PowerFit> {
    if s.len() != y.len() || s.len() < 2 {
        return Err(Error::Fit("need at least two matched points".into()));
    }
    if s.iter().chain(y).any(|v| *v == 0.0 || !v.is_finite()) || s.iter().any(|v| *v < 0.0) {
        return Err(Error::Fit("power fit needs nonzero finite data".into()));
    }
    let lx: Vec<f64> = s.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxx: f64 = lx.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(u, v)| (u - mx) * (v - my)).sum();
    let syy: f64 = ly.iter().map(|v| (v - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("parameters are all equal".into()));
    }
    let p = sxy / sxx;
    let ssr: f64 = lx.iter().zip(&ly).map(|(u, v)| (v - my - p * (u - mx)).powi(2)).sum();
    Ok(PowerFit {
        exponent: p,
        constant: (my - p * mx).exp(),
        r_squared: if syy == 0.0 { 1.0 } else { 1.0 - ssr / syy },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub model: RateModel,
    pub coefficient: f64,
    pub r_squared: f64,
    /// Two-standard-error band on the coefficient.
    pub band: [f64; 2],
}

pub fn fit_model(model: RateModel, params: &[f64], values: &[f64], modulus: Option<&Modulus>) -> Result<ModelFit> {
    let x = params.iter().map(|&s| model.rho(s, modulus)).collect::<Result<Vec<_>>>()?;
    let f = fit_through_origin(&x, values)?;
    Ok(ModelFit {
        model,
        coefficient: f.coefficient,
        r_squared: f.r_squared,
        band: [f.coefficient - 2.0 * f.std_error, f.coefficient + 2.0 * f.std_error],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSelection {
    /// Highest R^2, or `None` on a tie within the margin.
    pub best: Option<RateModel>,
    pub tie: bool,
    pub fits: Vec<ModelFit>,
}

/// Picks the highest R^2 when it beats the runner-up by at least `margin`.
pub fn select_model(mut fits: Vec<ModelFit>, margin: f64) -> Result<ModelSelection> {
    if fits.is_empty() {
        return Err(Error::Fit("no candidate models".into()));
    }
    fits.sort_by(|a, b| b.r_squared.total_cmp(&a.r_squared));
    let tie = fits.len() > 1 && fits[0].r_squared - fits[1].r_squared < margin;
    Ok(ModelSelection {
        best: if tie { None } else { Some(fits[0].model) },
        tie,
        fits,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub limit: f64,
    pub error_bar: f64,
    pub order: f64,
    pub extrapolants: Vec<f64>,
}

/// Richardson extrapolation of `S(s) = S_0 + C s^p` along a geometric sequence
/// with ratio `s_{k-1}/s_k = ratio`. The order is estimated from the last three
/// values, clamped to `[0.25, 2]`, with `fallback` when the estimate is unusable.
pub fn richardson(values: &[f64], ratio: f64, fallback: f64) -> Result<Extrapolation> {
    let n = values.len();
    if n < 2 {
        return Err(Error::Fit("extrapolation needs at least two values".into()));
    }
    if !(ratio > 1.0) {
        return Err(Error::Fit(format!("sequence ratio must exceed 1, got {ratio}")));
    }
    let mut order = fallback;
    if n >= 3 {
        let rho = (values[n - 3] - values[n - 2]) / (values[n - 2] - values[n - 1]);
        if rho.is_finite() && rho > 1.0 {
            order = (rho.ln() / ratio.ln()).clamp(0.25, 2.0);
        }
    }
    let f = ratio.powf(order) - 1.0;
    let ex: Vec<f64> = (1..n).map(|k| values[k] + (values[k] - values[k - 1]) / f).collect();
    let limit = ex[ex.len() - 1];
    let error_bar = if ex.len() >= 2 {
        (ex[ex.len() - 1] - ex[ex.len() - 2]).abs()
    } else {
        (values[n - 1] - values[n - 2]).abs()
    };
    Ok(Extrapolation {
        limit,
        error_bar,
        order,
        extrapolants: ex,
    })
}
