//! Pucci extremal operators on symmetric matrices and their radial forms.

mod operators;
mod sym;

pub use operators::{
    beta_gamma, game_p_laplacian, pucci, pucci_minus, pucci_minus_sup_inf, pucci_plus,
    pucci_plus_inf_sup, radial_hessian, radial_pucci, sandwich_params,
};
pub use sym::{Eigen, SymMatrix};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which extremal operator: `Minus` is the infimum over the ellipticity class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Minus, Sign::Plus];

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Minus => "minus",
            Sign::Plus => "plus",
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minus" | "-" => Ok(Sign::Minus),
            "plus" | "+" => Ok(Sign::Plus),
            _ => Err(Error::Input(format!("unknown sign '{s}'"))),
        }
    }
}

/// Ellipticity pair `0 < lambda <= Lambda` and space dimension `N >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PucciParams {
    pub lambda: f64,
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
    pub dim: usize,
}

impl PucciParams {
    pub fn new(lambda: f64, big_lambda: f64, dim: usize) -> Result<Self> {
        let p = Self {
            lambda,
            big_lambda,
            dim,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.big_lambda.is_finite()) {
            return Err(Error::Parameter("lambda and Lambda must be finite".into()));
        }
        if !(self.lambda > 0.0 && self.lambda <= self.big_lambda) {
            return Err(Error::Parameter(format!(
                "need 0 < lambda <= Lambda, got lambda = {}, Lambda = {}",
                self.lambda, self.big_lambda
            )));
        }
        if self.dim < 2 {
            return Err(Error::Parameter(format!("dim must be >= 2, got {}", self.dim)));
        }
        Ok(())
    }

    /// The ellipticity constant that governs the Varadhan limit for `sign`:
    /// `lambda` for the minus operator, `Lambda` for the plus operator.
    pub fn ell(&self, sign: Sign) -> f64 {
        match sign {
            Sign::Minus => self.lambda,
            Sign::Plus => self.big_lambda,
        }
    }

    /// Same pair with a different dimension.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        Self::new(self.lambda, self.big_lambda, dim)
    }
}
