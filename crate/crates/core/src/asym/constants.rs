//! Limit constants of the q-mean formulas.

use crate::error::{Error, Result};
use crate::special::quadrature::tanh_sinh_pieces;
use crate::special::{erfc_fn, gamma_fn, ln_gamma};

fn check(n: usize, q: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::Parameter(format!("need N >= 2, got {n}")));
    }
    if !(q > 1.0) || !q.is_finite() {
        return Err(Error::Parameter(format!("need finite q > 1, got {q}")));
    }
    Ok(())
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `c_{N,q} = [2^{-(N+1)/2} N! / ((q-1)^{(N+1)/2} Gamma((N+1)/2))]^{1/(q-1)}`.
pub fn c_constant(n: usize, q: f64) -> Result<f64> {
    check(n, q)?;
    let m = (n as f64 + 1.0) / 2.0;
    let ln = -m * 2f64.ln() + factorial(n).ln() - m * (q - 1.0).ln() - ln_gamma(m)?;
    Ok((ln / (q - 1.0)).exp())
}

/// `int_0^inf erfc(s)^{q-1} s^{(N-1)/2} ds`, truncated at 8 where `erfc < 1e-28`.
pub fn erfc_moment(n: usize, q: f64) -> Result<f64> {
    check(n, q)?;
    let k = (n as f64 - 1.0) / 2.0;
    let r = tanh_sinh_pieces(
        |x, dl, _dr, piece| {
            let s = if piece == 0 { dl } else { x };
            erfc_fn(s).powf(q - 1.0) * s.powf(k)
        },
        &[0.0, 1.0, 3.0, 8.0],
        1e-14,
    );
    Ok(r.value)
}

/// `C_{N,q} = [N! int_0^inf erfc(s)^{q-1} s^{(N-1)/2} ds / Gamma((N+1)/2)^2]^{1/(q-1)}`.
pub fn big_c_constant(n: usize, q: f64) -> Result<f64> {
    let moment = erfc_moment(n, q)?;
    let g = gamma_fn((n as f64 + 1.0) / 2.0)?;
    Ok((factorial(n) * moment / (g * g)).powf(1.0 / (q - 1.0)))
}
