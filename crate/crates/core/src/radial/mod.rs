//! Exact radial solutions in balls and ball exteriors, the global parabolic
//! sub-solutions, and the elliptic and parabolic barriers built from them.
//! Everything is returned in log form.

mod elliptic;
mod parabolic;

pub use elliptic::{
    ball_power, ball_solution, elliptic_barrier_above, elliptic_barrier_below,
    elliptic_barrier_below_radial, exterior_power, exterior_solution, profile_rate,
    RadialEllipticSolution, RadialKind,
};
pub use parabolic::{
    barrier_prefactor, ln_barrier_prefactor, parabolic_barrier_above, parabolic_barrier_below,
    parabolic_barrier_below_radial, phi_exponent, phi_global, ParabolicBarrier, PhiEval,
};
