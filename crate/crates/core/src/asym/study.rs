//! Varadhan-limit sweeps: `eps log u + d/sqrt(ell)` and `4t log v + d^2/ell`
//! along a decreasing parameter sequence, with rate fits.

use super::fit::{
    fit_model, fit_power, fit_two_term, select_model, theoretical_regime, ModelSelection, PowerFit,
    RateModel, TwoTermFit,
};
use super::pool::par_map;
use crate::error::{Error, Result};
use crate::fd::{
    solve_elliptic, solve_parabolic, EllipticOptions, GridConfig, NodeKind, ParabolicOptions, ProblemKind,
    ScalarField, Window,
};
use crate::geometry::{classify_regularity, Domain, Modulus, Shape};
use crate::pucci::{PucciParams, Sign};
use crate::radial::{ball_solution, exterior_solution};
use serde::{Deserialize, Serialize};

pub const SELECTION_MARGIN: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdSettings {
    /// Layer resolution: `h = eps sqrt(lambda) / resolution` (elliptic) or
    /// `h = sqrt(lambda t) / resolution` (parabolic).
    pub resolution: f64,
    /// Also keep `h <= d / depth_resolution` at a probe of depth `d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth_resolution: Option<f64>,
    /// Solve on a disk around each probe instead of the whole domain.
    pub windowed: bool,
    pub stencil_radius: usize,
    pub directions: usize,
}

impl FdSettings {
    pub fn for_kind(kind: ProblemKind) -> Self {
        Self {
            resolution: match kind {
                ProblemKind::Elliptic => 4.0,
                ProblemKind::Parabolic => 6.0,
            },
            depth_resolution: match kind {
                ProblemKind::Elliptic => None,
                ProblemKind::Parabolic => Some(6.0),
            },
            windowed: true,
            stencil_radius: 3,
            directions: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Source {
    /// Closed-form radial solutions (ball or exterior of a ball).
    Radial,
    Fd(FdSettings),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    /// Requested point.
    pub x: Vec<f64>,
    /// Point actually evaluated per parameter (the nearest node for grid sources).
    pub evaluated: Vec<Vec<f64>>,
    /// `d_Γ` at the evaluated points.
    pub distance: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeFit {
    pub selection: ModelSelection,
    /// Fit of the theoretically predicted model alone.
    pub predicted: Option<super::fit::ModelFit>,
    pub two_term: Option<TwoTermFit>,
    pub power: Option<PowerFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymStudy {
    pub kind: ProblemKind,
    pub sign: Sign,
    pub params: PucciParams,
    pub parameters: Vec<f64>,
    pub probes: Vec<Probe>,
    /// `observed[p][k]`: discrepancy at probe `p`, parameter `k`.
    pub observed: Vec<Vec<f64>>,
    /// `log u` or `log v` at the evaluated points.
    pub log_values: Vec<Vec<f64>>,
    pub theoretical: RateModel,
    pub fits: Vec<ProbeFit>,
}

pub fn check_sequence(s: &[f64], min_len: usize) -> Result<()> {
    if s.len() < min_len {
        return Err(Error::Fit(format!("need at least {min_len} sequence points, got {}", s.len())));
    }
    if s.iter().any(|v| !(*v > 0.0) || !v.is_finite()) || s.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Parameter("parameter sequence must be positive and strictly decreasing".into()));
    }
    Ok(())
}

/// `(log u, d)` at `x` from the closed-form radial solution.
fn radial_cell(kind: ProblemKind, dom: &Domain, sign: Sign, p: &PucciParams, x: &[f64], s: f64) -> Result<(f64, f64)> {
    if kind == ProblemKind::Parabolic {
        return Err(Error::Input(
            "no closed-form parabolic radial solution; use the grid source".into(),
        ));
    }
    let norm = |c: &[f64]| x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    match &dom.shape {
        Shape::Ball { center, radius } => {
            let r = norm(center);
            Ok((ball_solution(sign, r.min(*radius), *radius, s, p)?, (radius - r).max(0.0)))
        }
        Shape::ExteriorBall { center, radius } => {
            let r = norm(center);
            Ok((exterior_solution(sign, r.max(*radius), *radius, s, p)?, (r - radius).max(0.0)))
        }
        _ => Err(Error::Input("the radial source needs a ball or ball-exterior domain".into())),
    }
}

fn window_radius(kind: ProblemKind, p: &PucciParams, d: f64, s: f64) -> f64 {
    let spread = (p.big_lambda / p.lambda).sqrt();
    match kind {
        ProblemKind::Elliptic => 1.5 * spread * d + 15.0 * p.big_lambda.sqrt() * s,
        ProblemKind::Parabolic => 1.5 * spread * d + 10.0 * (p.big_lambda * s).sqrt(),
    }
}

/// Grid configuration for one (probe, parameter) cell.
pub fn cell_grid(kind: ProblemKind, p: &PucciParams, set: &FdSettings, x: &[f64], d: f64, s: f64) -> GridConfig {
    let h = match kind {
        ProblemKind::Elliptic => s * p.lambda.sqrt() / set.resolution,
        ProblemKind::Parabolic => (p.lambda * s).sqrt() / set.resolution,
    };
    let h = match set.depth_resolution {
        Some(k) if d > 0.0 => h.min(d / k),
        _ => h,
    };
    let mut cfg = GridConfig::new(h);
    cfg.stencil_radius = set.stencil_radius;
    cfg.directions = set.directions;
    if set.windowed {
        cfg.window = Some(Window {
            center: [x[0], x[1]],
            radius: window_radius(kind, p, d, s),
        });
    }
    cfg
}

/// `(log value, d, node coords)` at the node nearest to `x`.
fn node_value(field: &ScalarField, x: &[f64]) -> Result<(f64, f64, Vec<f64>)> {
    let g = &field.grid;
    let n = g
        .nearest_node(x)
        .ok_or_else(|| Error::Domain(format!("probe {x:?} is outside the grid")))?;
    let d = if g.kind[n] == NodeKind::Interior { g.dist[n] } else { 0.0 };
    let v = field.values[n];
    if !(v > 0.0) {
        return Err(Error::Domain(format!("grid value {v} at probe {x:?} has no logarithm")));
    }
    Ok((v.ln(), d, g.coords(n).to_vec()))
}

fn fd_cell(
    kind: ProblemKind,
    dom: &Domain,
    sign: Sign,
    p: &PucciParams,
    set: &FdSettings,
    x: &[f64],
    s: f64,
) -> Result<(f64, f64, Vec<f64>)> {
    let d = dom.distance_to_boundary(x)?;
    let cfg = cell_grid(kind, p, set, x, d, s);
    match kind {
        ProblemKind::Elliptic => {
            let sol = solve_elliptic(dom, sign, s, p, &cfg, &EllipticOptions::default())?;
            node_value(&sol.field, x)
        }
        ProblemKind::Parabolic => {
            let sol = solve_parabolic(dom, sign, s, p, &cfg, &ParabolicOptions::default())?;
            node_value(&sol.snapshots[0], x)
        }
    }
}

fn modulus_for(dom: &Domain) -> Option<Modulus> {
    dom.modulus.clone().or_else(|| classify_regularity(dom).ok())
}

pub fn fit_probe(
    kind: ProblemKind,
    sign: Sign,
    p: &PucciParams,
    parameters: &[f64],
    observed: &[f64],
    modulus: Option<&Modulus>,
) -> Result<ProbeFit> {
    let candidates: &[RateModel] = match kind {
        ProblemKind::Elliptic => &RateModel::ELLIPTIC,
        ProblemKind::Parabolic => &RateModel::PARABOLIC,
    };
    let fits = candidates
        .iter()
        .filter(|m| modulus.is_some() || !m.needs_modulus())
        .map(|&m| fit_model(m, parameters, observed, modulus))
        .collect::<Result<Vec<_>>>()?;
    let selection = select_model(fits, SELECTION_MARGIN)?;
    let theory = theoretical_regime(kind, sign, p);
    let predicted = selection.fits.iter().find(|f| f.model == theory).cloned();
    let two_term = match kind {
        ProblemKind::Parabolic => {
            let x1: Vec<f64> = parameters.iter().map(|t| -t * t.ln()).collect();
            Some(fit_two_term(&x1, parameters, observed)?)
        }
        ProblemKind::Elliptic => None,
    };
    let power = fit_power(parameters, observed).ok();
    Ok(ProbeFit {
        selection,
        predicted,
        two_term,
        power,
    })
}

/// Discrepancies per (probe, parameter) and the rate fits per probe.
pub fn varadhan_sweep(
    kind: ProblemKind,
    dom: &Domain,
    sign: Sign,
    params: &PucciParams,
    probes: &[Vec<f64>],
    parameters: &[f64],
    source: &Source,
) -> Result<AsymStudy> {
    params.validate()?;
    check_sequence(parameters, 4)?;
    if probes.is_empty() {
        return Err(Error::Input("no probe points".into()));
    }
    for x in probes {
        if x.len() != dom.dim() {
            return Err(Error::Input(format!("probe {x:?} has the wrong dimension")));
        }
        dom.distance_to_boundary(x)?;
    }
    let cells: Vec<(usize, usize)> = (0..probes.len())
        .flat_map(|i| (0..parameters.len()).map(move |k| (i, k)))
        .collect();
    let results = par_map(&cells, |&(i, k)| {
        let x = &probes[i];
        let s = parameters[k];
        match source {
            Source::Radial => radial_cell(kind, dom, sign, params, x, s).map(|(l, d)| (l, d, x.clone())),
            Source::Fd(set) => fd_cell(kind, dom, sign, params, set, x, s),
        }
    });
    let ell = params.ell(sign);
    let mut out_probes: Vec<Probe> = probes
        .iter()
        .map(|x| Probe {
            x: x.clone(),
            evaluated: Vec::new(),
            distance: Vec::new(),
        })
        .collect();
    let mut observed = vec![Vec::with_capacity(parameters.len()); probes.len()];
    let mut log_values = vec![Vec::with_capacity(parameters.len()); probes.len()];
    for (&(i, k), r) in cells.iter().zip(results) {
        let (lv, d, at) = r?;
        let s = parameters[k];
        let disc = match kind {
            ProblemKind::Elliptic => s * lv + d / ell.sqrt(),
            ProblemKind::Parabolic => 4.0 * s * lv + d * d / ell,
        };
        observed[i].push(disc);
        log_values[i].push(lv);
        out_probes[i].evaluated.push(at);
        out_probes[i].distance.push(d);
    }
    let modulus = modulus_for(dom);
    let fits = observed
        .iter()
        .map(|obs| fit_probe(kind, sign, params, parameters, obs, modulus.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    Ok(AsymStudy {
        kind,
        sign,
        params: *params,
        parameters: parameters.to_vec(),
        probes: out_probes,
        observed,
        log_values,
        theoretical: theoretical_regime(kind, sign, params),
        fits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_probe_is_zero() {
        let dom = Domain::new(Shape::ball(vec![0.0, 0.0, 0.0], 1.0).unwrap());
        let p = PucciParams::new(1.0, 2.0, 3).unwrap();
        let eps: Vec<f64> = (3..8).map(|k| 2f64.powi(-k)).collect();
        let st = varadhan_sweep(
            ProblemKind::Elliptic,
            &dom,
            Sign::Plus,
            &p,
            &[vec![1.0, 0.0, 0.0], vec![0.5, 0.0, 0.0]],
            &eps,
            &Source::Radial,
        )
        .unwrap();
        assert!(st.observed[0].iter().all(|v| *v == 0.0));
        assert!(st.observed[1].iter().all(|v| *v > 0.0));
        assert!(varadhan_sweep(ProblemKind::Elliptic, &dom, Sign::Plus, &p, &[vec![0.5, 0.0, 0.0]], &eps[..3], &Source::Radial).is_err());
    }
}
