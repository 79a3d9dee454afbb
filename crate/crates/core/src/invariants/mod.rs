//! Invariants and semi-invariants of the adjoint action, and signatures
//! built from them.

pub mod basis;
pub mod operators;
pub mod semi;
pub mod signature;
pub mod strata;

pub use basis::{
    block_matrix, block_nullity_bareiss, fundamental, invariant_basis, is_invariant, BlockStats, Denominator,
    InvariantEntry, InvariantSet, SearchOptions,
};
pub use operators::{coefficient_vars, derive_operators, restricted_operators, Chart, InvariantOperator, RestrictedOperator};
pub use semi::{fundamental_semi, is_semi_invariant, semi_invariants, SemiInvariant};
pub use signature::{canonical_signature, SigEntry, Signature};
pub use strata::{merge_uniform, orbit_rank, stratify_tree, StratumNode};

use crate::error::Error;
use crate::liealg::LieAlgebra;
use crate::symkernel::{MultiPoly, Rational, Surd};

/// Fundamental global invariants up to `degree`.
pub fn global_invariants(alg: &LieAlgebra, degree: u32) -> Result<Vec<InvariantEntry>, Error> {
    let set = invariant_basis(alg, &SearchOptions::global(alg.dim(), degree))?;
    Ok(fundamental(&set))
}

pub fn to_surd(v: &[Rational]) -> Vec<Surd> {
    v.iter().cloned().map(Surd::rational).collect()
}

/// Exact value of a Laurent polynomial; `None` when a negative power meets a
/// zero coordinate.
pub fn eval_surd(p: &MultiPoly<Rational>, point: &[Surd]) -> Option<Surd> {
    let mut acc = Surd::zero();
    for (m, q) in p.terms() {
        let mut t = Surd::rational(q.clone());
        for (i, &e) in m.0.iter().enumerate() {
            if e != 0 {
                t = t.mul(&point[i].powi(e)?);
            }
        }
        acc = acc.add(&t);
    }
    Some(acc)
}

/// Value of a polynomial with surd coefficients at a surd point.
pub fn eval_surd_poly(p: &MultiPoly<Surd>, point: &[Surd]) -> Option<Surd> {
    let mut acc = Surd::zero();
    for (m, q) in p.terms() {
        let mut t = q.clone();
        for (i, &e) in m.0.iter().enumerate() {
            if e != 0 {
                t = t.mul(&point[i].powi(e)?);
            }
        }
        acc = acc.add(&t);
    }
    Some(acc)
}
