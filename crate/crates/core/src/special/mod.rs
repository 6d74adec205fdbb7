//! Profile integrals `f`, `g`, their expansions, and the Gamma/Erfc kernels.

mod gamma;
mod profile;
pub mod quadrature;

pub use gamma::{erf_fn, erfc_fn, gamma_fn, ln_gamma};
pub use profile::{
    f_asymptotic_large, f_asymptotic_small, f_profile, f_zero_limit, g_asymptotic_large,
    g_at_zero, g_profile, ln_f_asymptotic_large, ln_f_reduced, ln_g_asymptotic_large,
    ln_g_at_zero, ln_g_reduced, ode_residual_check, profile, ProfileKind, ProfileParams,
    QuadratureReport,
};
