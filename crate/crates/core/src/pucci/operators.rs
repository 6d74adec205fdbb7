use super::{PucciParams, Sign, SymMatrix};
use crate::error::{Error, Result};

fn check_dim(x: &SymMatrix, p: &PucciParams) -> Result<()> {
    if x.order() != p.dim {
        return Err(Error::Input(format!(
            "matrix order {} does not match dimension {}",
            x.order(),
            p.dim
        )));
    }
    Ok(())
}

/// Sums of strictly negative and strictly positive eigenvalues, with a
/// relative zero threshold.
fn signed_sums(x: &SymMatrix) -> Result<(f64, f64)> {
    let ev = x.eigenvalues()?;
    let zero = 1e-13 * x.norm();
    let mut neg = 0.0;
    let mut pos = 0.0;
    for v in ev {
        if v < -zero {
            neg += v;
        } else if v > zero {
            pos += v;
        }
    }
    Ok((neg, pos))
}

/// `M^-(X) = Lambda * sum(neg eigenvalues) + lambda * sum(pos eigenvalues)`.
pub fn pucci_minus(x: &SymMatrix, p: &PucciParams) -> Result<f64> {
    check_dim(x, p)?;
    let (neg, pos) = signed_sums(x)?;
    Ok(p.big_lambda * neg + p.lambda * pos)
}

/// `M^+(X) = lambda * sum(neg eigenvalues) + Lambda * sum(pos eigenvalues)`.
pub fn pucci_plus(x: &SymMatrix, p: &PucciParams) -> Result<f64> {
    check_dim(x, p)?;
    let (neg, pos) = signed_sums(x)?;
    Ok(p.lambda * neg + p.big_lambda * pos)
}

pub fn pucci(x: &SymMatrix, p: &PucciParams, sign: Sign) -> Result<f64> {
    match sign {
        Sign::Minus => pucci_minus(x, p),
        Sign::Plus => pucci_plus(x, p),
    }
}

/// `tr(A X)` for the extremal `A = Q diag(c) Q^T`, where `c_i` picks
/// `Lambda` or `lambda` from the sign of the eigenvalue.
fn extremal_trace(x: &SymMatrix, p: &PucciParams, frames: usize, minimize: bool) -> Result<f64> {
    check_dim(x, p)?;
    if frames == 0 {
        return Err(Error::Input("frames must be >= 1".into()));
    }
    let e = x.eigen()?;
    let coeffs: Vec<f64> = e
        .values
        .iter()
        .map(|&v| {
            let neg = v < 0.0;
            if neg == minimize {
                p.big_lambda
            } else {
                p.lambda
            }
        })
        .collect();
    let a = super::Eigen {
        values: coeffs,
        vectors: e.vectors,
    }
    .reconstruct();
    let n = x.order();
    let mut tr = 0.0;
    for i in 0..n {
        for j in 0..n {
            tr += a.get(i, j) * x.get(j, i);
        }
    }
    Ok(tr)
}

/// `inf { tr(AX) : lambda I <= A <= Lambda I }`, attained in the eigenframe of `X`.
pub fn pucci_minus_sup_inf(x: &SymMatrix, p: &PucciParams, frames: usize) -> Result<f64> {
    extremal_trace(x, p, frames, true)
}

/// `sup { tr(AX) : lambda I <= A <= Lambda I }`.
pub fn pucci_plus_inf_sup(x: &SymMatrix, p: &PucciParams, frames: usize) -> Result<f64> {
    extremal_trace(x, p, frames, false)
}

/// `(beta(sigma), gamma(sigma)) = (min(lambda s, Lambda s), max(lambda s, Lambda s))`.
pub fn beta_gamma(sigma: f64, p: &PucciParams) -> (f64, f64) {
    let a = p.lambda * sigma;
    let b = p.big_lambda * sigma;
    (a.min(b), a.max(b))
}

/// Pucci operator of a radial function from its radial derivatives.
pub fn radial_pucci(u_r: f64, u_rr: f64, r: f64, p: &PucciParams, sign: Sign) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Input(format!("radius must be positive, got {r}")));
    }
    let k = (p.dim as f64 - 1.0) / r;
    let pick = |s: f64| {
        let (b, g) = beta_gamma(s, p);
        match sign {
            Sign::Minus => b,
            Sign::Plus => g,
        }
    };
    Ok(pick(u_rr) + k * pick(u_r))
}

/// Hessian `u_rr xhat xhat^T + (u_r / r)(I - xhat xhat^T)` of a radial function.
pub fn radial_hessian(u_r: f64, u_rr: f64, r: f64, xhat: &[f64]) -> SymMatrix {
    let n = xhat.len();
    let outer = SymMatrix::outer(xhat);
    let tangential = SymMatrix::identity(n).sub(&outer);
    outer.scaled(u_rr).add(&tangential.scaled(u_r / r))
}

/// Normalized game p-Laplacian
/// `(Delta u + (p - 2) <D^2u g, g> / |g|^2) / p`.
pub fn game_p_laplacian(grad: &[f64], hess: &SymMatrix, p_exp: f64) -> Result<f64> {
    if grad.len() != hess.order() {
        return Err(Error::Input("gradient and Hessian dimensions differ".into()));
    }
    if !(p_exp > 1.0) {
        return Err(Error::Parameter(format!("p must exceed 1, got {p_exp}")));
    }
    let g2: f64 = grad.iter().map(|g| g * g).sum();
    if g2.sqrt() < 1e-12 {
        return Err(Error::Domain("gradient vanishes; direction undefined".into()));
    }
    let hg = hess.mat_vec(grad);
    let quad: f64 = hg.iter().zip(grad).map(|(a, b)| a * b).sum();
    Ok((hess.trace() + (p_exp - 2.0) * quad / g2) / p_exp)
}

/// Ellipticity pair `(min(1/p, (p-1)/p), max(..))` bracketing the game p-Laplacian.
pub fn sandwich_params(p_exp: f64, dim: usize) -> Result<PucciParams> {
    if !(p_exp > 1.0) {
        return Err(Error::Parameter(format!("p must exceed 1, got {p_exp}")));
    }
    let a = 1.0 / p_exp;
    let b = (p_exp - 1.0) / p_exp;
    PucciParams::new(a.min(b), a.max(b), dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(l: f64, u: f64, n: usize) -> PucciParams {
        PucciParams::new(l, u, n).unwrap()
    }

    #[test]
    fn diagonal_examples() {
        let x = SymMatrix::diag(&[2.0, -3.0]);
        let p = pp(1.0, 2.0, 2);
        assert_eq!(pucci_minus(&x, &p).unwrap(), -4.0);
        assert_eq!(pucci_plus(&x, &p).unwrap(), 1.0);
        assert_eq!(pucci_plus(&SymMatrix::zeros(2), &p).unwrap(), 0.0);
        assert_eq!(pucci_minus(&SymMatrix::identity(4), &pp(0.3, 2.0, 4)).unwrap(), 4.0 * 0.3);
    }

    #[test]
    fn sup_inf_examples() {
        let p = pp(1.0, 2.0, 2);
        let v = pucci_minus_sup_inf(&SymMatrix::diag(&[1.0, -1.0]), &p, 1).unwrap();
        assert!((v + 1.0).abs() < 1e-15);
        let v = pucci_minus_sup_inf(&SymMatrix::identity(2).scaled(5.0), &pp(0.5, 3.0, 2), 1).unwrap();
        assert!((v - 5.0).abs() < 1e-14);
        assert!(pucci_minus_sup_inf(&SymMatrix::identity(2), &p, 0).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            pucci_minus(&SymMatrix::identity(3), &pp(1.0, 1.0, 2)),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn beta_gamma_examples() {
        let p = pp(1.0, 3.0, 2);
        assert_eq!(beta_gamma(2.0, &p), (2.0, 6.0));
        assert_eq!(beta_gamma(-1.0, &p), (-3.0, -1.0));
        assert_eq!(beta_gamma(0.0, &p), (0.0, 0.0));
    }

    #[test]
    fn radial_examples() {
        let v = radial_pucci(1.0, 1.0, 1.0, &pp(1.0, 1.0, 3), Sign::Minus).unwrap();
        assert_eq!(v, 3.0);
        let v = radial_pucci(-1.0, 1.0, 2.0, &pp(1.0, 2.0, 2), Sign::Minus).unwrap();
        assert_eq!(v, 0.0);
        assert!(radial_pucci(1.0, 1.0, 0.0, &pp(1.0, 2.0, 2), Sign::Minus).is_err());
    }

    #[test]
    fn game_p_laplacian_examples() {
        let h = SymMatrix::diag(&[3.0, -1.5]);
        let v = game_p_laplacian(&[1.0, 0.0], &h, 2.0).unwrap();
        assert!((v - 0.75).abs() < 1e-15);
        let p = 3.5;
        let v = game_p_laplacian(&[1.0, 0.0], &h, p).unwrap();
        assert!((v - ((3.0 - 1.5) / p + (p - 2.0) * 3.0 / p)).abs() < 1e-14);
        assert!(matches!(game_p_laplacian(&[0.0, 0.0], &h, p), Err(Error::Domain(_))));
    }
}
