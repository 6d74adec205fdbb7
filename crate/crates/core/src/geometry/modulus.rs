use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Modulus of continuity `omega` of the boundary charts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Modulus {
    /// `L s`
    Lipschitz { l: f64 },
    /// `C s^alpha`, `0 < alpha <= 1`
    Holder { alpha: f64, c: f64 },
    /// `C s (1 + ln(1 + 1/s))`
    LogLipschitz { c: f64 },
    /// Piecewise linear through `(s_i, omega_i)`, starting at `(0, 0)`;
    /// extended past the last knot with the last slope.
    Tabulated { points: Vec<[f64; 2]> },
}

impl Modulus {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Parameter(format!("invalid modulus: {m}")));
        match self {
            Modulus::Lipschitz { l } if !(*l > 0.0 && l.is_finite()) => bad("L must be positive"),
            Modulus::Holder { alpha, c } if !(*alpha > 0.0 && *alpha <= 1.0 && *c > 0.0) => {
                bad("need 0 < alpha <= 1 and C > 0")
            }
            Modulus::LogLipschitz { c } if !(*c > 0.0 && c.is_finite()) => bad("C must be positive"),
            Modulus::Tabulated { points } => {
                if points.len() < 2 {
                    return bad("need at least two knots");
                }
                if points[0] != [0.0, 0.0] {
                    return bad("first knot must be (0, 0)");
                }
                for w in points.windows(2) {
                    if !(w[1][0] > w[0][0] && w[1][1] > w[0][1]) || !w[1][0].is_finite() || !w[1][1].is_finite() {
                        return bad("knots must be strictly increasing in s and omega");
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match self {
            Modulus::Lipschitz { l } => l * s,
            Modulus::Holder { alpha, c } => c * s.powf(*alpha),
            Modulus::LogLipschitz { c } => c * s * (1.0 + (1.0 / s).ln_1p()),
            Modulus::Tabulated { points } => {
                let k = points.partition_point(|p| p[0] <= s).clamp(1, points.len() - 1);
                let (p0, p1) = (points[k - 1], points[k]);
                p0[1] + (p1[1] - p0[1]) * (s - p0[0]) / (p1[0] - p0[0])
            }
        }
    }

    /// `omega^{-1}(y)` by bracketing and bisection.
    pub fn inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        if let Modulus::Lipschitz { l } = self {
            return y / l;
        }
        let mut hi: f64 = 1.0;
        while self.eval(hi) < y {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..1100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// `psi(sigma) = inf_{s >= 0} sqrt(s^2 + (omega(s) - sigma)^2)`, the distance
/// from `(0, sigma)` to the graph of `omega`.
pub fn psi_omega(m: &Modulus, sigma: f64) -> Result<f64> {
    m.validate()?;
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!("sigma must be nonnegative, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(0.0);
    }
    if let Modulus::Lipschitz { l } = m {
        return Ok(sigma / (1.0 + l * l).sqrt());
    }
    let obj = |s: f64| {
        let d = m.eval(s) - sigma;
        s * s + d * d
    };
    let s_max = m.inverse(2.0 * sigma).min(sigma);
    const SCAN: usize = 256;
    let step = s_max / SCAN as f64;
    let mut best = 0;
    let mut best_val = obj(0.0);
    for i in 1..=SCAN {
        let v = obj(i as f64 * step);
        if v < best_val {
            best_val = v;
            best = i;
        }
    }
    let mut lo = (best.saturating_sub(1)) as f64 * step;
    let mut hi = ((best + 1).min(SCAN)) as f64 * step;
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (obj(x1), obj(x2));
    for _ in 0..200 {
        if hi - lo <= 1e-15 * s_max.max(1e-300) {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = obj(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = obj(x2);
        }
    }
    Ok(best_val.min(f1).min(f2).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lipschitz_closed_form() {
        let m = Modulus::Lipschitz { l: 1.0 };
        assert!((psi_omega(&m, 1.0).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(psi_omega(&m, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn tabulated_lipschitz_matches_closed_form() {
        let m = Modulus::Tabulated {
            points: vec![[0.0, 0.0], [1.0, 2.0], [3.0, 6.0]],
        };
        for sigma in [1e-3, 0.2, 1.7] {
            let want = sigma / 5f64.sqrt();
            assert!((psi_omega(&m, sigma).unwrap() - want).abs() < 1e-10);
        }
    }

    #[test]
    fn holder_against_dense_scan() {
        let m = Modulus::Holder { alpha: 0.5, c: 1.0 };
        let sigma = 1e-4;
        let psi = psi_omega(&m, sigma).unwrap();
        let n = 2_000_000;
        let top = m.inverse(2.0 * sigma);
        let brute = (0..=n)
            .map(|i| {
                let s = top * i as f64 / n as f64;
                (s * s + (s.sqrt() - sigma).powi(2)).sqrt()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((psi - brute).abs() < 1e-10, "{psi} vs {brute}");
        assert!(psi <= sigma);
    }

    #[test]
    fn validation() {
        assert!(Modulus::Tabulated { points: vec![[0.0, 0.0], [1.0, 1.0], [0.5, 2.0]] }.validate().is_err());
        assert!(Modulus::Tabulated { points: vec![[0.1, 0.0], [1.0, 1.0]] }.validate().is_err());
        assert!(Modulus::Holder { alpha: 1.5, c: 1.0 }.validate().is_err());
        assert!(Modulus::LogLipschitz { c: 1.0 }.validate().is_ok());
    }
}
