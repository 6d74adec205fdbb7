//! Domains, distance to the boundary, contact data for touching balls, and
//! moduli of continuity with the associated `psi_omega`.

mod contact;
mod implicit;
mod modulus;
mod shape;

pub use contact::{classify_regularity, contact_ball, ContactData};
pub use implicit::{ImplicitGrid, ImplicitHeader};
pub use modulus::{psi_omega, Modulus};
pub use shape::{Domain, DomainSpec, Shape, ShapeSpec};
