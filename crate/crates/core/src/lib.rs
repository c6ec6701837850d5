//! Prestressed isotropic hyperelasticity.
//!
//! The crate covers the algebra of strain and stretch invariants, stored
//! energies written in dilational and distortional variables, the wave
//! speeds and null condition they induce, the quadratic and cubic
//! coefficient tensors of the truncated elastodynamics system, the
//! Klainerman-type vector fields and norms used to study it, and an
//! explicit finite-difference simulator in one and three dimensions.
//!
//! Start with [`constitutive::construct_null_material`] and
//! [`tensors::MaterialTensors`]; the `examples/` directory has one
//! runnable program per capability.

// `!(x > 0.0)` rejects NaN; index loops mirror tensor notation; `Expr::add`
// and friends are simplifying constructors, not operator impls.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::should_implement_trait
)]

pub mod constitutive;
pub mod error;
pub mod expr;
pub mod fields;
pub mod invariants;
pub mod sampling;
pub mod simulator;
pub mod tabulate;
pub mod tensors;
pub mod verify;

pub use error::{Error, Result};
pub use invariants::{InvariantSystem, InvariantTriple, Mat3};
