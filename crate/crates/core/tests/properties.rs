//! Randomized algebraic identities over the fixture algebras and a rebased
//! KdV algebra.

mod common;

use std::sync::OnceLock;

use common::*;
use liesym::equivalence::Engine;
use liesym::fixtures;
use liesym::liealg::LieAlgebra;
use liesym::symkernel::Rational;
use proptest::prelude::*;

fn algebras() -> &'static [LieAlgebra] {
    static ALGS: OnceLock<Vec<LieAlgebra>> = OnceLock::new();
    ALGS.get_or_init(property_algebras)
}

fn signature_data() -> &'static [SignatureData] {
    static DATA: OnceLock<Vec<SignatureData>> = OnceLock::new();
    DATA.get_or_init(|| algebras().iter().map(SignatureData::new).collect())
}

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (prop_oneof![-6i64..=-1, 1i64..=6], 1i64..=4).prop_map(|(n, d)| q(n, d))
}

fn exact_vec() -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(rational(), 6)
}

fn float_vec(r: f64) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-r..r, 6)
}

fn positive_log() -> impl Strategy<Value = Rational> {
    prop_oneof![Just(q(1, 3)), Just(q(1, 2)), Just(q(2, 1)), Just(q(3, 1)), Just(q(5, 2))]
}

fn cut<T: Clone>(v: &[T], n: usize) -> Vec<T> {
    v[..n].to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_is_antisymmetric_and_satisfies_jacobi(k in 0..4usize, x in exact_vec(), y in exact_vec(), z in exact_vec()) {
        let alg = &algebras()[k];
        let n = alg.dim();
        prop_assert_eq!(check_bracket(alg, &cut(&x, n), &cut(&y, n), &cut(&z, n)), Ok(()));
    }

    #[test]
    fn ad_is_a_representation(k in 0..4usize, x in exact_vec(), y in exact_vec()) {
        let alg = &algebras()[k];
        let n = alg.dim();
        prop_assert_eq!(check_representation(alg, &cut(&x, n), &cut(&y, n)), Ok(()));
    }

    #[test]
    fn killing_form_is_symmetric_and_invariant(k in 0..4usize, x in exact_vec(), y in exact_vec(), z in exact_vec()) {
        let alg = &algebras()[k];
        let n = alg.dim();
        prop_assert_eq!(check_killing(alg, &cut(&x, n), &cut(&y, n), &cut(&z, n)), Ok(()));
    }

    #[test]
    fn one_parameter_group_law(k in 0..4usize, i in 1..=6usize, s in -2.0..2.0f64, t in -2.0..2.0f64) {
        let alg = &algebras()[k];
        let i = (i - 1) % alg.dim() + 1;
        prop_assert_eq!(check_group_law(alg, i, s, t), Ok(()));
    }

    #[test]
    fn chain_matches_truncated_series(k in 0..4usize, a in float_vec(3.0), eps in float_vec(1.0)) {
        let alg = &algebras()[k];
        let n = alg.dim();
        let order = fixtures::preferred_order(alg);
        prop_assert_eq!(check_series(alg, &order, &cut(&a, n), &cut(&eps, n)), Ok(()));
    }

    #[test]
    fn reversed_chain_matches_truncated_series(k in 0..4usize, a in float_vec(3.0), eps in float_vec(1.0)) {
        let alg = &algebras()[k];
        let n = alg.dim();
        let order: Vec<usize> = (1..=n).rev().collect();
        prop_assert_eq!(check_series(alg, &order, &cut(&a, n), &cut(&eps, n)), Ok(()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn signature_survives_adjoint_action_and_rescaling(
        k in 0..4usize,
        a in exact_vec(),
        eps in exact_vec(),
        logs in proptest::collection::vec(positive_log(), 6),
        c in nonzero_rational(),
    ) {
        let alg = &algebras()[k];
        let n = alg.dim();
        prop_assert_eq!(
            check_signature(alg, &signature_data()[k], &cut(&a, n), &cut(&eps, n), &cut(&logs, n), &c),
            Ok(())
        );
    }
}

fn engines() -> &'static [Engine] {
    static E: OnceLock<Vec<Engine>> = OnceLock::new();
    E.get_or_init(|| {
        [fixtures::kdv(), fixtures::heat()]
            .iter()
            .map(|a| Engine::for_algebra(a).unwrap())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn decisions_are_deterministic(
        k in 0..2usize,
        a in proptest::collection::vec(-3i64..=3, 6),
        t in proptest::collection::vec(-2i64..=2, 6),
        seed in any::<u64>(),
    ) {
        let e = &engines()[k];
        let n = e.alg.dim();
        let (a, t) = (ints(&a[..n]), ints(&t[..n]));
        prop_assume!(a.iter().any(|x| *x != q(0, 1)) && t.iter().any(|x| *x != q(0, 1)));
        prop_assert_eq!(check_determinism(e, &a, &t, seed), Ok(()));
    }
}
