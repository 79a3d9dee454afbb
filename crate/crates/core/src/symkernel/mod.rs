//! Exact arithmetic kernel.

pub mod apply;
pub mod expoly;
pub mod linalg;
pub mod poly;
pub mod rational;
pub mod ring;
pub mod surd;
pub mod upoly;

pub use apply::poly_apply_linear_map;
pub use expoly::{ExactParam, ExpKey, MultiExpPoly};
pub use linalg::{Matrix, SparseEchelon};
pub use poly::{indexed_vars, poly_arith, Monomial, MultiPoly, PolyOp, Vars};
pub use rational::{format_rational, parse_rational, Rational};
pub use ring::Coeff;
pub use surd::Surd;
pub use upoly::UPoly;
