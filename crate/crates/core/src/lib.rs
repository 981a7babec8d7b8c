//! Cyclic orbit subspace codes over finite fields.
//!
//! The crate is organised bottom-up: [`field`] provides log-table arithmetic
//! in `F_{q^n}`, [`subspace`] canonical subspaces and their shifts, and the
//! remaining modules compute orbit distributions, linear-set weights, the
//! `U_{s,γ}` family and its equivalence classes.

pub mod arith;
pub mod census;
pub mod equivalence;
pub mod error;
pub mod field;
pub mod linalg;
pub mod linear_set;
pub mod orbit;
pub mod subspace;
pub mod usg;

pub use error::{Error, Result};
pub use field::{build_field, FieldCtx, FieldElem};
pub use subspace::Subspace;
