use serde::{Deserialize, Serialize};

/// Convergence summary of a grid solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// `max |F_h(u)|` over unknowns at exit.
    pub max_residual: f64,
    pub mean_residual: f64,
    pub tolerance: f64,
    pub converged: bool,
    /// Policy rounds (elliptic) or time steps (parabolic).
    pub iterations: usize,
    pub factorizations: usize,
    pub linear_iterations: usize,
    pub unknowns: usize,
    pub history: Vec<f64>,
}
