//! q-means: the minimizer of `mu -> || u - mu ||_{L^q}` over a weighted sample.

use crate::error::{Error, Result};
use crate::fd::ScalarField;
use serde::{Deserialize, Serialize};

/// Weighted sample of a field on a ball.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QSample {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QSample {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let s = Self { values, weights };
        s.validate()?;
        Ok(s)
    }

    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::new(values, vec![1.0; n])
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() || self.values.len() != self.weights.len() {
            return Err(Error::Input("q-mean sample is empty or has mismatched weights".into()));
        }
        if self.weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::Input("q-mean weights must be nonnegative".into()));
        }
        if !self.weights.iter().any(|w| *w > 0.0) {
            return Err(Error::Input("q-mean sample has no positive weight".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("q-mean sample has non-finite values".into()));
        }
        Ok(())
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

/// `sum w |u - mu|^q`.
pub fn q_objective(s: &QSample, q: f64, mu: f64) -> f64 {
    s.values
        .iter()
        .zip(&s.weights)
        .map(|(u, w)| w * (u - mu).abs().powf(q))
        .sum()
}

fn stationarity(s: &QSample, q: f64, mu: f64) -> (f64, f64) {
    let mut phi = 0.0;
    let mut dphi = 0.0;
    for (u, w) in s.values.iter().zip(&s.weights) {
        let d = u - mu;
        let a = d.abs();
        if a > 0.0 {
            phi += w * d.signum() * a.powf(q - 1.0);
            dphi -= w * (q - 1.0) * a.powf(q - 2.0);
        }
    }
    (phi, dphi)
}

/// The unique minimizer of `mu -> sum w |u - mu|^q`. For `q = inf` this is the
/// midrange `(max + min) / 2`, taken over every point including zero weights.
pub fn q_mean(s: &QSample, q: f64) -> Result<f64> {
    if !(q > 1.0) {
        return Err(Error::Parameter(format!("unsupported exponent q = {q}; need q > 1")));
    }
    s.validate()?;
    let (lo, hi) = s.min_max();
    if q.is_infinite() {
        return Ok(0.5 * (lo + hi));
    }
    if hi - lo == 0.0 {
        return Ok(lo);
    }
    if q == 2.0 {
        let wsum: f64 = s.weights.iter().sum();
        return Ok(s.values.iter().zip(&s.weights).map(|(u, w)| u * w).sum::<f64>() / wsum);
    }
    let (mut a, mut b) = (lo, hi);
    let tol = 1e-12 * (hi - lo);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if stationarity(s, q, m).0 > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let mut mu = 0.5 * (a + b);
    if q >= 2.0 {
        for _ in 0..3 {
            let (phi, dphi) = stationarity(s, q, mu);
            if dphi == 0.0 {
                break;
            }
            let next = mu - phi / dphi;
            if !(next >= a && next <= b) {
                break;
            }
            mu = next;
        }
    }
    Ok(mu)
}

/// Grid nodes of `field` in the closed ball `B_R(center)` with weights `h^2`.
/// Lattice nodes of the same alignment that fall outside the computational box
/// are counted as frozen (value 0). `with_contact` adds a zero-weight point of
/// value 1 for the contact point, so the midrange sees the boundary datum.
pub fn ball_sample(field: &ScalarField, center: &[f64], radius: f64, with_contact: bool) -> Result<QSample> {
    if center.len() != 2 || !(radius > 0.0) {
        return Err(Error::Input("ball sampling needs a 2D centre and a positive radius".into()));
    }
    let g = &field.grid;
    let h = g.h;
    let i0 = ((center[0] - radius - g.origin[0]) / h).floor() as i64;
    let i1 = ((center[0] + radius - g.origin[0]) / h).ceil() as i64;
    let j0 = ((center[1] - radius - g.origin[1]) / h).floor() as i64;
    let j1 = ((center[1] + radius - g.origin[1]) / h).ceil() as i64;
    let r2 = radius * radius * (1.0 + 1e-12);
    let mut values = Vec::new();
    for j in j0..=j1 {
        let y = g.origin[1] + j as f64 * h;
        for i in i0..=i1 {
            let x = g.origin[0] + i as f64 * h;
            if (x - center[0]).powi(2) + (y - center[1]).powi(2) > r2 {
                continue;
            }
            let inside = i >= 0 && j >= 0 && (i as usize) < g.nx && (j as usize) < g.ny;
            values.push(if inside { field.values[g.index(i as usize, j as usize)] } else { 0.0 });
        }
    }
    let mut weights = vec![h * h; values.len()];
    if with_contact {
        values.push(1.0);
        weights.push(0.0);
    }
    QSample::new(values, weights)
}
