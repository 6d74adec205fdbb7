//! Scaled q-means of grid solutions on a touching ball and their limits.

use super::constants::{big_c_constant, c_constant};
use super::fit::{richardson, Extrapolation};
use super::pool::par_map;
use super::qmean::{ball_sample, q_mean};
use super::study::check_sequence;
use crate::error::{Error, Result};
use crate::fd::{
    solve_elliptic, solve_parabolic, EllipticOptions, GridConfig, ParabolicOptions, ProblemKind, ScalarField,
    Window,
};
use crate::geometry::{ContactData, Domain};
use crate::pucci::{PucciParams, Sign};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QMeanSettings {
    /// `h = eps sqrt(lambda) / resolution` or `h = sqrt(lambda t) / resolution`.
    pub resolution: f64,
    /// Nodes deeper than `freeze * sqrt(Lambda) eps` (elliptic) or
    /// `freeze * sqrt(Lambda t)` (parabolic) are frozen at 0.
    pub freeze: f64,
    /// The solve window is the ball grown by `margin * sqrt(Lambda) eps` or
    /// `margin * sqrt(Lambda t)`.
    pub margin: f64,
    /// `None` picks the 5-point stencil when `lambda = Lambda` and the
    /// 8-frame stencil of radius 3 otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stencil: Option<(usize, usize)>,
}

impl QMeanSettings {
    pub fn for_kind(kind: ProblemKind) -> Self {
        match kind {
            ProblemKind::Elliptic => Self {
                resolution: 4.0,
                freeze: 20.0,
                margin: 12.0,
                stencil: None,
            },
            ProblemKind::Parabolic => Self {
                resolution: 6.0,
                freeze: 12.0,
                margin: 8.0,
                stencil: None,
            },
        }
    }

    fn stencil_for(&self, p: &PucciParams) -> (usize, usize) {
        self.stencil.unwrap_or(if p.lambda == p.big_lambda { (1, 1) } else { (3, 8) })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QMeanResult {
    pub q: f64,
    /// `eps` or `t`.
    pub parameter: f64,
    pub center: Vec<f64>,
    pub radius: f64,
    pub value: f64,
    pub scaled: f64,
    pub predicted: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QMeanStudy {
    pub kind: ProblemKind,
    pub sign: Sign,
    pub params: PucciParams,
    pub q: f64,
    pub pi0: f64,
    pub results: Vec<QMeanResult>,
    pub extrapolation: Extrapolation,
    pub predicted: f64,
    pub relative_error: f64,
}

/// Exponent of the parameter scaling: `(N+1)/(2(q-1))` for `R/eps`,
/// `(N+1)/(4(q-1))` for `R^2/t`; zero for `q = inf`.
fn scale_exponent(kind: ProblemKind, n: usize, q: f64) -> f64 {
    if q.is_infinite() {
        return 0.0;
    }
    let m = n as f64 + 1.0;
    match kind {
        ProblemKind::Elliptic => m / (2.0 * (q - 1.0)),
        ProblemKind::Parabolic => m / (4.0 * (q - 1.0)),
    }
}

pub fn scaled_qmean(kind: ProblemKind, n: usize, q: f64, radius: f64, parameter: f64, mu: f64) -> f64 {
    let base = match kind {
        ProblemKind::Elliptic => radius / parameter,
        ProblemKind::Parabolic => radius * radius / parameter,
    };
    base.powf(scale_exponent(kind, n, q)) * mu
}

/// `c_{N,q}` (elliptic) or `C_{N,q}` (parabolic) times `(Pi_0 / ell^{(N+1)/2})^{-1/(2(q-1))}`;
/// `1/2` for `q = inf`.
pub fn predicted_limit(kind: ProblemKind, sign: Sign, p: &PucciParams, q: f64, pi0: f64) -> Result<f64> {
    if !(q > 1.0) {
        return Err(Error::Parameter(format!("unsupported exponent q = {q}; need q > 1")));
    }
    if q.is_infinite() {
        return Ok(0.5);
    }
    if !(pi0 > 0.0) {
        return Err(Error::Parameter(format!("Pi_0 must be positive, got {pi0}")));
    }
    let n = p.dim;
    let c = match kind {
        ProblemKind::Elliptic => c_constant(n, q)?,
        ProblemKind::Parabolic => big_c_constant(n, q)?,
    };
    let ell = p.ell(sign);
    let inner = pi0 / ell.powf((n as f64 + 1.0) / 2.0);
    Ok(c * inner.powf(-1.0 / (2.0 * (q - 1.0))))
}

fn grid_for(kind: ProblemKind, p: &PucciParams, set: &QMeanSettings, c: &ContactData, s: f64) -> GridConfig {
    let (h, layer) = match kind {
        ProblemKind::Elliptic => (s * p.lambda.sqrt() / set.resolution, p.big_lambda.sqrt() * s),
        ProblemKind::Parabolic => ((p.lambda * s).sqrt() / set.resolution, (p.big_lambda * s).sqrt()),
    };
    let (radius, directions) = set.stencil_for(p);
    let mut cfg = GridConfig::new(h);
    cfg.stencil_radius = radius;
    cfg.directions = directions;
    cfg.freeze_depth = Some(set.freeze * layer);
    cfg.window = Some(Window {
        center: [c.x[0], c.x[1]],
        radius: c.radius + (set.margin * layer).max(4.0 * h),
    });
    cfg
}

fn solve_cell(kind: ProblemKind, dom: &Domain, sign: Sign, p: &PucciParams, cfg: &GridConfig, s: f64) -> Result<ScalarField> {
    match kind {
        ProblemKind::Elliptic => Ok(solve_elliptic(dom, sign, s, p, cfg, &EllipticOptions::default())?.field),
        ProblemKind::Parabolic => {
            let sol = solve_parabolic(dom, sign, s, p, cfg, &ParabolicOptions::default())?;
            Ok(sol.snapshots.into_iter().next().expect("one snapshot"))
        }
    }
}

/// Scaled q-means of the grid solution on `B_R(x)` along the parameter
/// sequence, Richardson-extrapolated and compared with the predicted limit.
pub fn qmean_limit(
    kind: ProblemKind,
    dom: &Domain,
    contact: &ContactData,
    sign: Sign,
    params: &PucciParams,
    q: f64,
    parameters: &[f64],
    set: &QMeanSettings,
) -> Result<QMeanStudy> {
    params.validate()?;
    check_sequence(parameters, 2)?;
    if contact.x.len() != 2 || params.dim != 2 {
        return Err(Error::Input("grid q-means are two-dimensional".into()));
    }
    let predicted = predicted_limit(kind, sign, params, q, contact.pi0)?;
    let results = par_map(parameters, |&s| -> Result<QMeanResult> {
        let cfg = grid_for(kind, params, set, contact, s);
        let field = solve_cell(kind, dom, sign, params, &cfg, s)?;
        let sample = ball_sample(&field, &contact.x, contact.radius, true)?;
        let mu = q_mean(&sample, q)?;
        Ok(QMeanResult {
            q,
            parameter: s,
            center: contact.x.clone(),
            radius: contact.radius,
            value: mu,
            scaled: scaled_qmean(kind, params.dim, q, contact.radius, s, mu),
            predicted,
            samples: sample.values.len(),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let scaled: Vec<f64> = results.iter().map(|r| r.scaled).collect();
    let n = parameters.len();
    let ratio = parameters[n - 2] / parameters[n - 1];
    let fallback = match kind {
        ProblemKind::Elliptic => 1.0,
        ProblemKind::Parabolic => 0.5,
    };
    let extrapolation = richardson(&scaled, ratio, fallback)?;
    let relative_error = (extrapolation.limit - predicted).abs() / predicted.abs();
    Ok(QMeanStudy {
        kind,
        sign,
        params: *params,
        q,
        pi0: contact.pi0,
        results,
        extrapolation,
        predicted,
        relative_error,
    })
}

pub fn elliptic_qmean_limit(
    dom: &Domain,
    contact: &ContactData,
    sign: Sign,
    params: &PucciParams,
    q: f64,
    eps: &[f64],
    set: &QMeanSettings,
) -> Result<QMeanStudy> {
    qmean_limit(ProblemKind::Elliptic, dom, contact, sign, params, q, eps, set)
}

pub fn parabolic_qmean_limit(
    dom: &Domain,
    contact: &ContactData,
    sign: Sign,
    params: &PucciParams,
    q: f64,
    t: &[f64],
    set: &QMeanSettings,
) -> Result<QMeanStudy> {
    qmean_limit(ProblemKind::Parabolic, dom, contact, sign, params, q, t, set)
}
