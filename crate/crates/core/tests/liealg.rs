mod common;

use common::*;
use liesym::fixtures;
use liesym::liealg::LieAlgebra;
use liesym::symkernel::{Matrix, MultiPoly, Rational};
use liesym::Error;
use num::traits::Zero;

#[test]
fn fixtures_load_and_validate() {
    let kdv = fixtures::kdv();
    assert_eq!((kdv.name(), kdv.dim()), ("kdv", 4));
    assert_eq!(kdv.generator_names(), ["v1", "v2", "v3", "v4"]);
    assert_eq!(fixtures::heat().dim(), 6);
    let ab = LieAlgebra::from_json(r#"{"name": "ab", "dim": 3, "generators": ["x", "y", "z"], "brackets": []}"#).unwrap();
    assert_eq!(ab.table(), LieAlgebra::abelian(3).table());
}

/// Exhaustive Jacobi scan written against the dense table only.
fn brute_force_jacobi_ok(c: &[Vec<Vec<Rational>>]) -> bool {
    let n = c.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut s = Rational::zero();
                    for m in 0..n {
                        s += &c[i][j][m] * &c[m][k][l] + &c[j][k][m] * &c[m][i][l] + &c[k][i][m] * &c[m][j][l];
                    }
                    if !s.is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[test]
fn corrupted_bracket_violates_jacobi() {
    let text = fixtures::KDV_JSON.replace(
        r#"{"i": 2, "j": 3, "coeffs": ["1", "0", "0", "0"]}"#,
        r#"{"i": 2, "j": 3, "coeffs": ["0", "1", "0", "0"]}"#,
    );
    assert_ne!(text, fixtures::KDV_JSON, "fixture layout changed");
    let err = LieAlgebra::from_json(&text).unwrap_err();
    assert!(matches!(err, Error::JacobiViolation { .. }), "{err}");

    let mut c = fixtures::kdv().table();
    c[1][2] = ints(&[0, 1, 0, 0]);
    c[2][1] = ints(&[0, -1, 0, 0]);
    assert!(!brute_force_jacobi_ok(&c));
    assert!(brute_force_jacobi_ok(&fixtures::kdv().table()));
    assert!(brute_force_jacobi_ok(&fixtures::heat().table()));
}

#[test]
fn malformed_input_is_reported() {
    let bad_index = r#"{"name": "x", "dim": 2, "generators": ["a", "b"], "brackets": [{"i": 2, "j": 1, "coeffs": ["1", "0"]}]}"#;
    let e = LieAlgebra::from_json(bad_index).unwrap_err().to_string();
    assert!(e.contains("brackets[0]"), "{e}");
    let bad_len = r#"{"name": "x", "dim": 2, "generators": ["a"], "brackets": []}"#;
    assert!(LieAlgebra::from_json(bad_len).unwrap_err().to_string().contains("generators"));
    let missing = r#"{"name": "x", "generators": ["a"], "brackets": []}"#;
    assert!(LieAlgebra::from_json(missing).unwrap_err().to_string().contains("dim"));
}

#[test]
fn brackets_of_generators() {
    let kdv = fixtures::kdv();
    let heat = fixtures::heat();
    let e = |n: usize, i: usize| {
        let mut v = vec![Rational::zero(); n];
        v[i - 1] = q(1, 1);
        v
    };
    assert_eq!(kdv.bracket(&e(4, 2), &e(4, 3)).unwrap(), element("v1", 4));
    assert_eq!(heat.bracket(&e(6, 2), &e(6, 6)).unwrap(), element("4*v4-2*v3", 6));
    let x = ints(&[3, -1, 2, 5]);
    assert!(kdv.bracket(&x, &x).unwrap().iter().all(Zero::is_zero));
    assert!(kdv.bracket(&x, &ints(&[1, 2])).is_err());
}

#[test]
fn ad_matrices() {
    let kdv = fixtures::kdv();
    let ad1 = kdv.ad_matrix(1).unwrap();
    for r in 0..4 {
        for c in 0..4 {
            let want = if (r, c) == (3, 0) { q(1, 1) } else { q(0, 1) };
            assert_eq!(ad1[(r, c)], want, "({r},{c})");
        }
    }
    let ad4 = kdv.ad_matrix(4).unwrap();
    let mut diag = Matrix::<Rational>::zeros(4, 4);
    for (i, d) in [-1, -3, 2, 0].into_iter().enumerate() {
        diag[(i, i)] = q(d, 1);
    }
    assert_eq!(ad4, diag);
    assert!(LieAlgebra::abelian(3).ad_matrix(2).unwrap().is_zero());
    assert!(matches!(kdv.ad_matrix(5), Err(Error::Index { index: 5, bound: 4 })));
    assert!(kdv.ad_matrix(0).is_err());
}

#[test]
fn killing_form_values() {
    let ab = LieAlgebra::abelian(3);
    assert!(ab.killing_form(&ints(&[1, 2, 3]), &ints(&[-1, 0, 4])).unwrap().is_zero());
    let kdv = fixtures::kdv();
    let v4 = ints(&[0, 0, 0, 1]);
    // trace oracle: ad4 is diagonal with entries -1, -3, 2, 0
    let oracle: i64 = [-1i64, -3, 2, 0].iter().map(|d| d * d).sum();
    assert_eq!(kdv.killing_form(&v4, &v4).unwrap(), q(oracle, 1));
    assert_eq!(oracle, 14);
}

#[test]
fn kdv_killing_quadratic_is_a_function_of_a4() {
    let kdv = fixtures::kdv();
    let k = kdv.killing_matrix();
    let vars = liesym::invariants::coefficient_vars(4);
    let mut form = MultiPoly::zero(&vars);
    for i in 0..4 {
        for j in 0..4 {
            let term = MultiPoly::var(&vars, i).try_mul(&MultiPoly::var(&vars, j)).unwrap().scale(&k[(i, j)]);
            form = form.try_add(&term).unwrap();
        }
    }
    assert!(!form.is_zero());
    assert!(in_span(&[poly("a4^2", 4)], &form), "{form}");
}
