//! Monotone wide-stencil finite differences for the extremal operators in 2D.

mod elliptic;
mod field;
mod frames;
mod grid;
mod operator;
mod parabolic;
mod report;

pub use elliptic::{solve_elliptic, EllipticOptions, EllipticSolution, ELLIPTIC_SNAP};
pub use field::{read_binary, FieldMeta, ProblemKind, ScalarField};
pub use frames::{lattice_frames, select_frames, Frame};
pub use grid::{Grid, GridConfig, NodeKind, Window};
pub use operator::discrete_pucci;
pub use parabolic::{solve_parabolic, ParabolicOptions, ParabolicSolution, PARABOLIC_SNAP};
pub use report::ResidualReport;
