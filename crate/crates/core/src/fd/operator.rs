//! The discrete extremal operator and its policies.

use super::grid::{Grid, NodeKind};
use crate::error::{Error, Result};
use crate::pucci::{beta_gamma, PucciParams, Sign};

/// Frame index and per-direction coefficient (`lambda` or `Lambda`) attaining
/// the extremum at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Choice {
    pub frame: usize,
    pub coef: [f64; 2],
    /// `sum_m coef_m D_m`, the discrete operator value.
    pub value: f64,
}

#[inline]
fn branch(d: f64, sign: Sign, p: &PucciParams) -> (f64, f64) {
    let (b, g) = beta_gamma(d, p);
    match sign {
        Sign::Minus => (b, if d < 0.0 { p.big_lambda } else { p.lambda }),
        Sign::Plus => (g, if d > 0.0 { p.big_lambda } else { p.lambda }),
    }
}

/// Extremal frame at node `n`. Ties and near-ties keep `prefer` when given,
/// otherwise the smallest frame index wins.
#[inline]
pub(crate) fn choose(grid: &Grid, u: &[f64], n: usize, sign: Sign, p: &PucciParams, prefer: Option<usize>) -> Choice {
    let mut best: Option<Choice> = None;
    let mut preferred: Option<Choice> = None;
    let mut scale: f64 = 0.0;
    for k in 0..grid.frames.len() {
        let mut value = 0.0;
        let mut coef = [0.0; 2];
        for (m, c) in coef.iter_mut().enumerate() {
            let (d, ..) = grid.second_difference(u, n, k, m);
            let (v, cm) = branch(d, sign, p);
            value += v;
            *c = cm;
            scale = scale.max(v.abs());
        }
        let cand = Choice { frame: k, coef, value };
        let better = match (&best, sign) {
            (None, _) => true,
            (Some(b), Sign::Minus) => value < b.value,
            (Some(b), Sign::Plus) => value > b.value,
        };
        if better {
            best = Some(cand);
        }
        if prefer == Some(k) {
            preferred = Some(cand);
        }
    }
    let best = best.expect("at least one frame");
    match preferred {
        Some(pc) if (pc.value - best.value).abs() <= 1e-13 * scale => pc,
        _ => best,
    }
}

/// `M_h(u)` at an interior node: extremum over frames of
/// `sum_m [lambda (D_m)^+ - Lambda (D_m)^-]` (minus) or the swapped form (plus).
pub fn discrete_pucci(grid: &Grid, u: &[f64], n: usize, sign: Sign, p: &PucciParams) -> Result<f64> {
    if u.len() != grid.len() {
        return Err(Error::Input("field length does not match the grid".into()));
    }
    if grid.kind.get(n) != Some(&NodeKind::Interior) {
        return Err(Error::Input(format!("node {n} is not an interior node")));
    }
    Ok(choose(grid, u, n, sign, p, None).value)
}
