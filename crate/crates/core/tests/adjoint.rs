mod common;

use common::*;
use liesym::adjoint::{adjoint_chain, eval_matrix, exp_ad};
use liesym::fixtures;
use liesym::liealg::LieAlgebra;
use liesym::symkernel::rational::to_f64;
use liesym::symkernel::{ExactParam, Matrix, MultiExpPoly, Rational};
use liesym::Error;
use num::traits::Zero;

fn so3() -> LieAlgebra {
    let mut c = vec![vec![vec![Rational::zero(); 3]; 3]; 3];
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        c[i][j][k] = q(1, 1);
        c[j][i][k] = q(-1, 1);
    }
    LieAlgebra::from_dense("so3", &c).unwrap()
}

fn det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    nalgebra::DMatrix::from_fn(n, n, |r, c| m[r][c]).determinant()
}

#[test]
fn abelian_factors_are_identity() {
    let ab = LieAlgebra::abelian(3);
    for i in 1..=3 {
        assert_eq!(exp_ad(&ab, i).unwrap().entries, Matrix::identity(3));
    }
}

#[test]
fn irrational_spectrum_is_rejected() {
    match exp_ad(&so3(), 1) {
        Err(Error::NonRationalSpectrum { generator, minimal_polynomial }) => {
            assert_eq!(generator, 1);
            assert!(minimal_polynomial.contains("x"), "{minimal_polynomial}");
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(adjoint_chain(&so3(), &[1, 2, 3]).is_err());
}

#[test]
fn chain_orders() {
    let kdv = fixtures::kdv();
    let empty = adjoint_chain(&kdv, &[]).unwrap();
    assert_eq!(empty.entries, Matrix::identity(4));
    for bad in [&[1, 2, 3][..], &[1, 1, 2, 3], &[0, 1, 2, 3], &[1, 2, 3, 5]] {
        assert!(matches!(adjoint_chain(&kdv, bad), Err(Error::InvalidPermutation(_))), "{bad:?}");
    }
}

#[test]
fn chain_is_the_product_of_its_factors() {
    for (alg, order) in [(fixtures::kdv(), vec![1, 2, 3, 4]), (fixtures::heat(), fixtures::HEAT_ORDER.to_vec())] {
        let chain = adjoint_chain(&alg, &order).unwrap();
        let eps: Vec<f64> = (0..alg.dim()).map(|k| 0.3 * k as f64 - 0.7).collect();
        let mut prod = nalgebra::DMatrix::<f64>::identity(alg.dim(), alg.dim());
        for &k in &order {
            let f = eval_matrix(&exp_ad(&alg, k).unwrap().entries, &eps).unwrap();
            prod *= nalgebra::DMatrix::from_fn(alg.dim(), alg.dim(), |r, c| f[r][c]);
        }
        let m = chain.eval(&eps).unwrap();
        for r in 0..alg.dim() {
            for c in 0..alg.dim() {
                assert!((m[r][c] - prod[(r, c)]).abs() < 1e-10 * (1.0 + prod[(r, c)].abs()));
            }
        }
    }
}

#[test]
fn zero_parameters_give_identity() {
    for alg in property_algebras() {
        let n = alg.dim();
        let chain = adjoint_chain(&alg, &fixtures::preferred_order(&alg)).unwrap();
        let a: Vec<f64> = (0..n).map(|k| k as f64 + 0.5).collect();
        let b = chain.apply(&a, &vec![0.0; n]).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12), "{b:?}");
        for i in 1..=n {
            let m = exp_ad(&alg, i).unwrap().entries;
            let zero: Vec<ExactParam> = (0..n).map(|_| ExactParam::Rational(q(0, 1))).collect();
            for r in 0..n {
                for c in 0..n {
                    let want = if r == c { q(1, 1) } else { q(0, 1) };
                    assert_eq!(m[(r, c)].eval_exact(&zero).unwrap(), Some(want));
                }
            }
        }
    }
}

#[test]
fn determinant_matches_trace() {
    for alg in property_algebras() {
        for i in 1..=alg.dim() {
            let tr = to_f64(&alg.ad_matrix(i).unwrap().trace());
            let m = exp_ad(&alg, i).unwrap().entries;
            for e in [-1.3, 0.4, 2.0] {
                let mut eps = vec![0.0; alg.dim()];
                eps[i - 1] = e;
                let d = det(&eval_matrix(&m, &eps).unwrap());
                let want = (-e * tr).exp();
                assert!((d - want).abs() < 1e-10 * want.max(1.0), "{} ad{i}: {d} vs {want}", alg.name());
            }
        }
    }
}

#[test]
fn derivative_at_zero_is_minus_ad() {
    for alg in property_algebras() {
        let n = alg.dim();
        let zero: Vec<ExactParam> = (0..n).map(|_| ExactParam::Rational(q(0, 1))).collect();
        for i in 1..=n {
            let ad = alg.ad_matrix(i).unwrap();
            let m = exp_ad(&alg, i).unwrap().entries;
            for r in 0..n {
                for c in 0..n {
                    let d: MultiExpPoly = m[(r, c)].derivative(i - 1);
                    assert_eq!(d.eval_exact(&zero).unwrap(), Some(-ad[(r, c)].clone()));
                }
            }
        }
    }
}

#[test]
fn kdv_normal_form_substitution_is_exact() {
    let chain = adjoint_chain(&fixtures::kdv(), &[1, 2, 3, 4]).unwrap();
    for (a1, a2, a3) in [(q(1, 1), q(2, 1), q(3, 1)), (q(-5, 2), q(1, 3), q(7, 4)), (q(0, 1), q(0, 1), q(0, 1))] {
        let eps = [&a1 - &a2 * &a3 / q(3, 1), &a2 / q(3, 1), -&a3 / q(2, 1), q(0, 1)];
        let eps: Vec<ExactParam> = eps.into_iter().map(ExactParam::Rational).collect();
        let out = chain.apply_exact(&[a1, a2, a3, q(1, 1)], &eps).unwrap().unwrap();
        assert_eq!(out, ints(&[0, 0, 0, 1]));
    }
}

#[test]
fn row_convention_of_the_representation() {
    // ad_[x,y] = ad_y ad_x - ad_x ad_y for row vectors; transposes flip it
    let kdv = fixtures::kdv();
    let (x, y) = (2, 3);
    let adx = kdv.ad_matrix(x).unwrap();
    let ady = kdv.ad_matrix(y).unwrap();
    let mut ex = vec![Rational::zero(); 4];
    ex[x - 1] = q(1, 1);
    let mut ey = vec![Rational::zero(); 4];
    ey[y - 1] = q(1, 1);
    let z = kdv.bracket(&ex, &ey).unwrap();
    let mut adz = Matrix::<Rational>::zeros(4, 4);
    for (k, zk) in z.iter().enumerate() {
        adz = adz.add(&kdv.ad_matrix(k + 1).unwrap().scale(zk));
    }
    let row = ady.try_mul(&adx).unwrap().sub(&adx.try_mul(&ady).unwrap());
    assert_eq!(adz, row);
    let (tx, ty) = (adx.transpose(), ady.transpose());
    assert_eq!(adz.transpose(), tx.try_mul(&ty).unwrap().sub(&ty.try_mul(&tx).unwrap()));
}
