//! Substitution of a linear change of coordinates into a polynomial.

use num::traits::{One, Zero};

use super::expoly::{ExpKey, MultiExpPoly};
use super::linalg::Matrix;
use super::poly::{Monomial, MultiPoly};
use super::rational::Rational;
use crate::error::Error;

/// `P(a * M)` expanded in normal form, with exp-polynomial coefficients.
///
/// The new coordinates are `a~_k = sum_i a_i M[i][k]`; variables of the result
/// are the variables of `p`.
pub fn poly_apply_linear_map(p: &MultiPoly<Rational>, m: &Matrix<MultiExpPoly>) -> Result<MultiPoly<MultiExpPoly>, Error> {
    let n = p.nvars();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            found: if m.nrows() != n { m.nrows() } else { m.ncols() },
        });
    }
    let vars = p.vars().clone();
    let images: Vec<MultiPoly<MultiExpPoly>> = (0..n)
        .map(|k| {
            MultiPoly::from_terms(
                &vars,
                (0..n).map(|i| (Monomial::var(n, i), m[(i, k)].clone())),
            )
        })
        .collect();
    p.compose(&images, |q| MultiExpPoly::constant(q.clone()), invert_exp_monomial)
}

/// Inverse of `q * exp(l.e)`; other shapes have no exp-polynomial inverse.
pub fn invert_exp_monomial(e: &MultiExpPoly) -> Option<MultiExpPoly> {
    if e.nterms() != 1 {
        return None;
    }
    let (k, q) = e.terms().next()?;
    if !k.mono.is_empty() || q.is_zero() {
        return None;
    }
    let freq: Vec<Rational> = k.freq.iter().map(|l| -l).collect();
    Some(MultiExpPoly::term(ExpKey::new(vec![], freq), Rational::one() / q))
}

/// Lifts a rational polynomial to exp-polynomial coefficients.
pub fn lift(p: &MultiPoly<Rational>) -> MultiPoly<MultiExpPoly> {
    p.map_coeffs(|q| MultiExpPoly::constant(q.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::poly::indexed_vars;
    use crate::symkernel::rational::int;

    #[test]
    fn identity_map_is_noop() {
        let v = indexed_vars("a", 3);
        let x = |i| MultiPoly::<Rational>::var(&v, i);
        let p = &(&x(0) * &x(1)) + &x(2).pow(3);
        let out = poly_apply_linear_map(&p, &Matrix::identity(3)).unwrap();
        assert_eq!(out, lift(&p));
    }

    #[test]
    fn diagonal_scaling_cancels() {
        // a1 * a2 under diag(e^t, e^{-t})
        let v = indexed_vars("a", 2);
        let p = &MultiPoly::<Rational>::var(&v, 0) * &MultiPoly::var(&v, 1);
        let mut m = Matrix::<MultiExpPoly>::identity(2);
        m[(0, 0)] = MultiExpPoly::exp(0, int(1));
        m[(1, 1)] = MultiExpPoly::exp(0, int(-1));
        assert_eq!(poly_apply_linear_map(&p, &m).unwrap(), lift(&p));
        let bad = Matrix::<MultiExpPoly>::identity(3);
        assert!(poly_apply_linear_map(&p, &bad).is_err());
    }
}
