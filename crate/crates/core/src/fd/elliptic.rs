//! Policy iteration for `-eps^2 M_h(u) + u = 0` with `u = 1` on Γ.

use super::field::{FieldMeta, ProblemKind, ScalarField};
use super::grid::{Grid, GridConfig, NodeKind, BOUNDARY};
use super::operator::choose;
use super::report::ResidualReport;
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::pucci::{PucciParams, Sign};
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const ELLIPTIC_SNAP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EllipticOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Skip the `h <= eps sqrt(lambda) / 4` resolution check.
    pub allow_coarse: bool,
}

impl Default for EllipticOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 200,
            allow_coarse: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EllipticSolution {
    pub field: ScalarField,
    pub report: ResidualReport,
}

/// Sparse rows in a flat layout, `A x = b` over the unknowns.
struct System {
    diag: Vec<f64>,
    start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    rhs: Vec<f64>,
}

impl System {
    fn residual(&self, x: &[f64]) -> Vec<f64> {
        self.apply(x).iter().zip(&self.rhs).map(|(ax, b)| b - ax).collect()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..x.len())
            .map(|r| {
                let mut s = self.diag[r] * x[r];
                for e in self.start[r]..self.start[r + 1] {
                    s += self.vals[e] * x[self.cols[e]];
                }
                s
            })
            .collect()
    }

    fn factor(&self) -> Result<Lu<usize, f64>> {
        let n = self.diag.len();
        let mut t = Vec::with_capacity(n + self.cols.len());
        for r in 0..n {
            t.push(Triplet::new(r, r, self.diag[r]));
            for e in self.start[r]..self.start[r + 1] {
                t.push(Triplet::new(r, self.cols[e], self.vals[e]));
            }
        }
        let m = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &t)
            .map_err(|e| Error::Input(format!("sparse assembly failed: {e:?}")))?;
        m.sp_lu().map_err(|e| Error::Input(format!("sparse LU failed: {e:?}")))
    }
}

fn lu_solve(lu: &Lu<usize, f64>, b: &[f64]) -> Vec<f64> {
    use faer::prelude::Solve;
    let col = faer::col::Col::from_fn(b.len(), |i| b[i]);
    let x = lu.solve(&col);
    (0..b.len()).map(|i| x[i]).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Right-preconditioned GMRES, one cycle of at most `m` steps, preconditioned by
/// a factorization of a nearby matrix. Returns the step count and the true
/// residual max-norm.
fn gmres(sys: &System, pre: &Lu<usize, f64>, x: &mut [f64], target: f64, m: usize) -> (usize, f64) {
    let r0 = sys.residual(x);
    let beta = dot(&r0, &r0).sqrt();
    if inf_norm(&r0) <= target {
        return (0, inf_norm(&r0));
    }
    let mut v: Vec<Vec<f64>> = vec![r0.iter().map(|r| r / beta).collect()];
    let mut h = vec![vec![0.0; m]; m + 1];
    let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
    let mut g = vec![0.0; m + 1];
    g[0] = beta;
    let mut steps = 0;
    for j in 0..m {
        let z = lu_solve(pre, &v[j]);
        let mut w = sys.apply(&z);
        for i in 0..=j {
            h[i][j] = dot(&w, &v[i]);
            for (wk, vk) in w.iter_mut().zip(&v[i]) {
                *wk -= h[i][j] * vk;
            }
        }
        let hn = dot(&w, &w).sqrt();
        h[j + 1][j] = hn;
        for i in 0..j {
            let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
            h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
            h[i][j] = t;
        }
        let rho = h[j][j].hypot(h[j + 1][j]);
        cs[j] = h[j][j] / rho;
        sn[j] = h[j + 1][j] / rho;
        h[j][j] = rho;
        h[j + 1][j] = 0.0;
        g[j + 1] = -sn[j] * g[j];
        g[j] *= cs[j];
        steps = j + 1;
        if g[j + 1].abs() <= 0.1 * target || hn == 0.0 {
            break;
        }
        v.push(w.iter().map(|wk| wk / hn).collect());
    }
    let mut y = vec![0.0; steps];
    for i in (0..steps).rev() {
        let mut s = g[i];
        for k in i + 1..steps {
            s -= h[i][k] * y[k];
        }
        y[i] = s / h[i][i];
    }
    let mut vy = vec![0.0; x.len()];
    for (yi, vi) in y.iter().zip(&v) {
        for (a, b) in vy.iter_mut().zip(vi) {
            *a += yi * b;
        }
    }
    for (xi, di) in x.iter_mut().zip(lu_solve(pre, &vy)) {
        *xi += di;
    }
    (steps, inf_norm(&sys.residual(x)))
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub(crate) fn resolution_check(h: f64, eps: f64, p: &PucciParams, allow: bool) -> Result<()> {
    let hmax = eps * p.lambda.sqrt() / 4.0;
    if !allow && h > hmax * (1.0 + 1e-12) {
        return Err(Error::Config(format!(
            "grid spacing {h} exceeds eps sqrt(lambda) / 4 = {hmax}; refine or set allow_coarse"
        )));
    }
    Ok(())
}

/// Nonlinear residual `u - eps^2 M_h(u)` at unknown nodes, plus the extremal choices.
fn evaluate(
    grid: &Grid,
    u: &[f64],
    unknowns: &[usize],
    sign: Sign,
    p: &PucciParams,
    eps2: f64,
    policy: &mut [(usize, [f64; 2])],
) -> Vec<f64> {
    unknowns
        .iter()
        .enumerate()
        .map(|(r, &n)| {
            let c = choose(grid, u, n, sign, p, Some(policy[r].0));
            policy[r] = (c.frame, c.coef);
            u[n] - eps2 * c.value
        })
        .collect()
}

fn assemble(grid: &Grid, u: &[f64], unknowns: &[usize], index: &[u32], policy: &[(usize, [f64; 2])], eps2: f64) -> System {
    let nu = unknowns.len();
    let mut sys = System {
        diag: vec![1.0; nu],
        start: Vec::with_capacity(nu + 1),
        cols: Vec::with_capacity(4 * nu),
        vals: Vec::with_capacity(4 * nu),
        rhs: vec![0.0; nu],
    };
    sys.start.push(0);
    for (r, &n) in unknowns.iter().enumerate() {
        let (k, coef) = policy[r];
        for (m, &c) in coef.iter().enumerate() {
            let (_, wp, wm, ap, am) = grid.second_difference(u, n, k, m);
            for (w, arm) in [(wp, ap), (wm, am)] {
                let a = eps2 * c * w;
                sys.diag[r] += a;
                if arm.target == BOUNDARY {
                    sys.rhs[r] += a;
                    continue;
                }
                let t = arm.target as usize;
                match grid.kind[t] {
                    NodeKind::Interior => {
                        sys.cols.push(index[t] as usize);
                        sys.vals.push(-a);
                    }
                    NodeKind::Exterior => sys.rhs[r] += a,
                    NodeKind::Frozen => {}
                }
            }
        }
        sys.start.push(sys.cols.len());
    }
    sys
}

/// Solves `-eps^2 M^∓_h(u) + u = 0` in Ω, `u = 1` on Γ, by Howard's algorithm.
pub fn solve_elliptic(
    dom: &Domain,
    sign: Sign,
    eps: f64,
    params: &PucciParams,
    cfg: &GridConfig,
    opts: &EllipticOptions,
) -> Result<EllipticSolution> {
    params.validate()?;
    if params.dim != 2 {
        return Err(Error::Parameter("the grid solver needs dim = 2".into()));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Parameter(format!("eps must be positive, got {eps}")));
    }
    resolution_check(cfg.h, eps, params, opts.allow_coarse)?;
    let grid = Grid::build(dom, cfg, ELLIPTIC_SNAP)?;
    let eps2 = eps * eps;

    let mut index = vec![u32::MAX; grid.len()];
    let unknowns: Vec<usize> = (0..grid.len()).filter(|&n| grid.kind[n] == NodeKind::Interior).collect();
    for (r, &n) in unknowns.iter().enumerate() {
        index[n] = r as u32;
    }
    let rate = 1.0 / (params.ell(sign).sqrt() * eps);
    let mut u = grid.boundary_field();
    for &n in &unknowns {
        u[n] = (-grid.dist[n] * rate).exp();
    }

    let mut policy = vec![(0usize, [params.lambda; 2]); unknowns.len()];
    let mut report = ResidualReport {
        max_residual: f64::INFINITY,
        mean_residual: f64::INFINITY,
        tolerance: opts.tolerance,
        converged: false,
        iterations: 0,
        factorizations: 0,
        linear_iterations: 0,
        unknowns: unknowns.len(),
        history: Vec::new(),
    };
    let mut lu: Option<Lu<usize, f64>> = None;

    loop {
        let res = evaluate(&grid, &u, &unknowns, sign, params, eps2, &mut policy);
        let rmax = inf_norm(&res);
        report.max_residual = rmax;
        report.mean_residual = res.iter().map(|r| r.abs()).sum::<f64>() / res.len().max(1) as f64;
        report.history.push(rmax);
        if rmax <= opts.tolerance || unknowns.is_empty() {
            report.converged = true;
            break;
        }
        if report.iterations >= opts.max_iterations {
            return Err(Error::NonConvergence {
                iterations: report.iterations,
                residual: rmax,
            });
        }
        report.iterations += 1;

        let sys = assemble(&grid, &u, &unknowns, &index, &policy, eps2);
        let mut x: Vec<f64> = unknowns.iter().map(|&n| u[n]).collect();
        let target = (1e-3 * rmax).max(1e-2 * opts.tolerance);
        let mut solved = false;
        if let Some(f) = &lu {
            let (its, rn) = gmres(&sys, f, &mut x, target, 30);
            report.linear_iterations += its;
            solved = rn <= target;
        }
        if !solved {
            let f = sys.factor()?;
            report.factorizations += 1;
            x = lu_solve(&f, &sys.rhs);
            report.linear_iterations += 1;
            for _ in 0..2 {
                let r = sys.residual(&x);
                if inf_norm(&r) <= target {
                    break;
                }
                let d = lu_solve(&f, &r);
                for (xi, di) in x.iter_mut().zip(&d) {
                    *xi += di;
                }
                report.linear_iterations += 1;
            }
            lu = Some(f);
        }
        for (r, &n) in unknowns.iter().enumerate() {
            u[n] = x[r];
        }
    }

    let field = ScalarField {
        grid: Arc::new(grid),
        values: u,
        meta: FieldMeta {
            kind: ProblemKind::Elliptic,
            sign,
            parameter: eps,
            params: *params,
        },
    };
    Ok(EllipticSolution { field, report })
}
