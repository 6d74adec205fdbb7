//! Explicit monotone stepping for `v_t = M_h(v)`, `v = 0` at `t = 0`, `v = 1` on Γ.

use super::field::{FieldMeta, ProblemKind, ScalarField};
use super::grid::{Grid, GridConfig, NodeKind};
use super::operator::choose;
use super::report::ResidualReport;
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::pucci::{PucciParams, Sign};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const PARABOLIC_SNAP: f64 = 0.25;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParabolicOptions {
    /// Snapshot times in `(0, t_final]`; `t_final` alone when empty.
    #[serde(default)]
    pub times: Vec<f64>,
    /// Manual time step; must not exceed the monotone bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ParabolicSolution {
    pub times: Vec<f64>,
    pub snapshots: Vec<ScalarField>,
    pub dt: f64,
    pub report: ResidualReport,
}

impl ParabolicSolution {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.snapshots[0].grid
    }
}

/// Largest monotone explicit step: `1 / max_node max_frame sum_m Lambda (a_+ + a_-)`.
pub(crate) fn stable_dt(grid: &Grid, params: &PucciParams) -> f64 {
    let mut worst: f64 = 0.0;
    let zeros = vec![0.0; grid.len()];
    for n in 0..grid.len() {
        if grid.kind[n] != NodeKind::Interior {
            continue;
        }
        for k in 0..grid.frames.len() {
            let mut s = 0.0;
            for m in 0..2 {
                let (_, wp, wm, ..) = grid.second_difference(&zeros, n, k, m);
                s += params.big_lambda * (wp + wm);
            }
            worst = worst.max(s);
        }
    }
    if worst > 0.0 {
        1.0 / worst
    } else {
        f64::INFINITY
    }
}

pub fn solve_parabolic(
    dom: &Domain,
    sign: Sign,
    t_final: f64,
    params: &PucciParams,
    cfg: &GridConfig,
    opts: &ParabolicOptions,
) -> Result<ParabolicSolution> {
    params.validate()?;
    if params.dim != 2 {
        return Err(Error::Parameter("the grid solver needs dim = 2".into()));
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::Parameter(format!("t_final must be positive, got {t_final}")));
    }
    let mut times = if opts.times.is_empty() { vec![t_final] } else { opts.times.clone() };
    times.sort_by(f64::total_cmp);
    if times[0] <= 0.0 || *times.last().unwrap() > t_final * (1.0 + 1e-12) {
        return Err(Error::Parameter("snapshot times must lie in (0, t_final]".into()));
    }
    let grid = Arc::new(Grid::build(dom, cfg, PARABOLIC_SNAP)?);
    let bound = stable_dt(&grid, params);
    let dt = match opts.dt {
        Some(dt) if !(dt > 0.0) => return Err(Error::Config(format!("time step must be positive, got {dt}"))),
        Some(dt) if dt > bound * (1.0 + 1e-12) => {
            return Err(Error::Config(format!("time step {dt} violates the monotone bound {bound}")))
        }
        Some(dt) => dt,
        None => 0.9 * bound,
    };

    let unknowns: Vec<usize> = (0..grid.len()).filter(|&n| grid.kind[n] == NodeKind::Interior).collect();
    let mut u = grid.boundary_field();
    let mut next = u.clone();
    let mut prefer = vec![0usize; unknowns.len()];
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut snapshots = Vec::with_capacity(times.len());
    let mut history = Vec::with_capacity(times.len());
    let meta = |tau: f64| FieldMeta {
        kind: ProblemKind::Parabolic,
        sign,
        parameter: tau,
        params: *params,
    };

    let mut pending = times.iter().copied().peekable();
    while pending.peek().is_some() {
        let step = dt.min(t_final - t);
        let mut max_rate: f64 = 0.0;
        for (r, &n) in unknowns.iter().enumerate() {
            let c = choose(&grid, &u, n, sign, params, Some(prefer[r]));
            prefer[r] = c.frame;
            next[n] = u[n] + step * c.value;
            max_rate = max_rate.max(c.value.abs());
        }
        let t_next = if step < dt { t_final } else { t + step };
        while let Some(&tau) = pending.peek() {
            if tau > t_next * (1.0 + 1e-14) {
                break;
            }
            let w = if t_next > t { ((tau - t) / (t_next - t)).clamp(0.0, 1.0) } else { 1.0 };
            let values = u.iter().zip(&next).map(|(a, b)| a + w * (b - a)).collect();
            snapshots.push(ScalarField {
                grid: Arc::clone(&grid),
                values,
                meta: meta(tau),
            });
            history.push(max_rate);
            pending.next();
        }
        std::mem::swap(&mut u, &mut next);
        t = t_next;
        steps += 1;
    }

    let report = ResidualReport {
        max_residual: 0.0,
        mean_residual: 0.0,
        tolerance: 0.0,
        converged: true,
        iterations: steps,
        factorizations: 0,
        linear_iterations: 0,
        unknowns: unknowns.len(),
        history,
    };
    Ok(ParabolicSolution {
        times,
        snapshots,
        dt,
        report,
    })
}
