//! Adjoint invariants, exact adjoint matrices and one-dimensional optimal
//! systems for finite-dimensional Lie algebras given by structure constants.

pub mod adjoint;
pub mod cli;
pub mod equivalence;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod invariants;
pub mod liealg;
pub mod optsys;
pub mod report;
pub mod symkernel;

pub use error::{Error, Result};
