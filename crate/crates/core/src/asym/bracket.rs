//! Barrier bracketing of grid solutions, with the distance argument shifted by `2h`.

use crate::error::{Error, Result};
use crate::fd::{NodeKind, ProblemKind, ScalarField};
use crate::geometry::{Domain, Shape};
use crate::pucci::{pucci, radial_hessian, PucciParams, Sign};
use crate::radial::{
    elliptic_barrier_above, elliptic_barrier_below_radial, parabolic_barrier_above, parabolic_barrier_below_radial,
    phi_exponent, phi_global,
};
use serde::{Deserialize, Serialize};

/// Smallest log value compared against the lower barrier.
const LOG_FLOOR: f64 = -690.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketReport {
    pub kind: ProblemKind,
    pub nodes: usize,
    pub skipped: usize,
    pub upper_violations: usize,
    pub lower_violations: usize,
    /// Largest `log u - upper` and `lower - log u` seen (negative when bracketed).
    pub max_upper_excess: f64,
    pub max_lower_excess: f64,
    pub slack: f64,
    pub delta: f64,
}

impl BracketReport {
    pub fn bracketed(&self) -> bool {
        self.upper_violations == 0 && self.lower_violations == 0
    }
}

fn convex(dom: &Domain) -> bool {
    matches!(dom.shape, Shape::Ball { .. } | Shape::Polygon { .. })
}

/// Checks `lower(d + 2h) <= log u <= upper(max(d - 2h, 0))` at every interior
/// node. The lower barrier is anchored at `z = p + delta n`, with `p` the
/// nearest boundary point and `n` the outward normal, so `|x - z| = d + delta`
/// on convex domains.
pub fn bracket_field(field: &ScalarField, dom: &Domain, delta: f64) -> Result<BracketReport> {
    if !convex(dom) {
        return Err(Error::Geometry("barrier anchors need a convex domain".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::Parameter(format!("delta must be positive, got {delta}")));
    }
    let g = &field.grid;
    let m = &field.meta;
    let (sign, p, s) = (m.sign, &m.params, m.parameter);
    let ell = p.ell(sign);
    let slack = 2.0 * g.h;
    let mut rep = BracketReport {
        kind: m.kind,
        nodes: 0,
        skipped: 0,
        upper_violations: 0,
        lower_violations: 0,
        max_upper_excess: f64::NEG_INFINITY,
        max_lower_excess: f64::NEG_INFINITY,
        slack,
        delta,
    };
    for n in 0..g.len() {
        if g.kind[n] != NodeKind::Interior {
            continue;
        }
        let d = g.dist[n];
        let v = field.values[n];
        let lv = if v > 0.0 { v.ln() } else { f64::NEG_INFINITY };
        let (du, dl) = ((d - slack).max(0.0), d + slack);
        let (upper, lower) = match m.kind {
            ProblemKind::Elliptic => (
                (-du / ell.sqrt() + elliptic_barrier_above(sign, du, s, p)?) / s,
                (-dl / ell.sqrt() + elliptic_barrier_below_radial(sign, dl + delta, delta, s, p)?) / s,
            ),
            ProblemKind::Parabolic => (
                parabolic_barrier_above(sign, du, s, p)? / (4.0 * s),
                parabolic_barrier_below_radial(sign, dl + delta, delta, s, p)?,
            ),
        };
        if lv < LOG_FLOOR && lower < LOG_FLOOR {
            rep.skipped += 1;
            continue;
        }
        rep.nodes += 1;
        let up_ex = lv - upper;
        let lo_ex = lower - lv;
        rep.max_upper_excess = rep.max_upper_excess.max(up_ex);
        rep.max_lower_excess = rep.max_lower_excess.max(lo_ex);
        let tol = 1e-9 * (1.0 + lv.abs());
        if up_ex > tol {
            rep.upper_violations += 1;
        }
        if lo_ex > tol {
            rep.lower_violations += 1;
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiResidualScan {
    pub sign: Sign,
    pub samples: usize,
    /// Largest residual relative to the size of the terms in `Phi_t` and `M(D^2 Phi)`.
    pub max_relative_residual: f64,
    /// Samples in the region where the residual vanishes identically.
    pub zero_region_samples: usize,
    pub zero_region_max_abs: f64,
    /// Largest gap between the case formula and the residual evaluated
    /// through the eigenvalues of the Hessian, relative to the same scale.
    pub max_formula_gap: f64,
}

impl PhiResidualScan {
    pub fn passed(&self) -> bool {
        self.max_relative_residual <= 0.0 && self.zero_region_max_abs == 0.0 && self.max_formula_gap < 1e-12
    }
}

/// Samples `Phi_t - M(D^2 Phi)` on `x = (r, 0, ..)` for every `r` and `t`.
/// The zero region is `|x|^2 >= 2 Lambda t` for the plus sign and, when
/// `lambda = Lambda`, all of space for the minus sign.
pub fn phi_residual_scan(sign: Sign, p: &PucciParams, radii: &[f64], times: &[f64]) -> Result<PhiResidualScan> {
    p.validate()?;
    let ell = p.ell(sign);
    let c = phi_exponent(sign, p);
    let mut scan = PhiResidualScan {
        sign,
        samples: 0,
        max_relative_residual: f64::NEG_INFINITY,
        zero_region_samples: 0,
        zero_region_max_abs: 0.0,
        max_formula_gap: 0.0,
    };
    let mut xhat = vec![0.0; p.dim];
    xhat[0] = 1.0;
    for &t in times {
        for &r in radii {
            if !(r > 0.0) {
                return Err(Error::Parameter(format!("radii must be positive, got {r}")));
            }
            let phi = phi_global(sign, r, t, p)?;
            let v = phi.value;
            let phi_t = (-c / t + r * r / (4.0 * ell * t * t)) * v;
            let phi_r = -r / (2.0 * ell * t) * v;
            let phi_rr = (r * r / (4.0 * ell * ell * t * t) - 1.0 / (2.0 * ell * t)) * v;
            let m = pucci(&radial_hessian(phi_r, phi_rr, r, &xhat), p, sign)?;
            // Both sides vanish on spheres such as r^2 = 4 ell c t, so scale by the terms.
            let scale = (c / t + r * r / (4.0 * ell * t * t)) * v
                + p.big_lambda * (phi_rr.abs() + (p.dim as f64 - 1.0) * (phi_r / r).abs());
            if scale == 0.0 {
                continue;
            }
            scan.samples += 1;
            scan.max_relative_residual = scan.max_relative_residual.max(phi.residual / scale);
            scan.max_formula_gap = scan.max_formula_gap.max((phi.residual - (phi_t - m)).abs() / scale);
            let zero = match sign {
                Sign::Plus => r * r >= 2.0 * p.big_lambda * t,
                Sign::Minus => p.lambda == p.big_lambda,
            };
            if zero {
                scan.zero_region_samples += 1;
                scan.zero_region_max_abs = scan.zero_region_max_abs.max(phi.residual.abs());
            }
        }
    }
    Ok(scan)
}
