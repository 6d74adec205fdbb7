//! Pucci extremal operators, exact radial solutions and barriers, a monotone
//! finite-difference solver, and an asymptotics harness for the small
//! diffusion and short-time limits of the associated singular problems.

pub mod asym;
pub mod error;
pub mod fd;
pub mod geometry;
pub mod pucci;
pub mod radial;
pub mod selftest;
pub mod special;

pub use error::{Error, Result};
pub use pucci::{PucciParams, Sign, SymMatrix};
