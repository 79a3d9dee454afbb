//! Helpers shared by the integration tests: literal parsing, reference
//! data, and the randomized algebraic property checks.

#![allow(dead_code)]

use liesym::adjoint::{adjoint_chain, exp_ad};
use liesym::equivalence::{EquivOptions, Engine, TargetFamily};
use liesym::expr::{Expr, Func};
use liesym::fixtures;
use liesym::invariants::{
    canonical_signature, coefficient_vars, fundamental_semi, global_invariants, semi_invariants, InvariantEntry,
    SearchOptions, SemiInvariant,
};
use liesym::liealg::LieAlgebra;
use liesym::report::to_json;
use liesym::symkernel::{indexed_vars, ExactParam, Matrix, Monomial, MultiExpPoly, MultiPoly, Rational, Surd};
use num::traits::{One, Zero};
use num::BigInt;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| q(x, 1)).collect()
}

pub fn surds(v: &[Rational]) -> Vec<Surd> {
    v.iter().cloned().map(Surd::rational).collect()
}

pub fn poly(s: &str, n: usize) -> MultiPoly<Rational> {
    Expr::parse(s).unwrap().to_laurent(&coefficient_vars(n)).unwrap()
}

/// Linear combination like `4*v4-2*v3` as a coefficient vector.
pub fn element(s: &str, n: usize) -> Vec<Rational> {
    let p = Expr::parse(s).unwrap().to_laurent(&indexed_vars("v", n)).unwrap();
    assert!(p.terms().all(|(m, _)| m.degree() == 1), "{s} is not linear");
    (0..n).map(|i| p.coeff(&Monomial::var(n, i))).collect()
}

/// Exp-polynomial in `e1..en` written with `exp(linear form)` factors.
pub fn expoly(s: &str) -> MultiExpPoly {
    fn go(e: &Expr) -> MultiExpPoly {
        match e {
            Expr::Num(r) => MultiExpPoly::constant(r.clone()),
            Expr::Var(v) => {
                let k: usize = v.strip_prefix('e').and_then(|x| x.parse().ok()).expect("parameter eK");
                MultiExpPoly::param(k - 1)
            }
            Expr::Neg(a) => go(a).neg(),
            Expr::Add(a, b) => go(a).add(&go(b)),
            Expr::Sub(a, b) => go(a).sub(&go(b)),
            Expr::Mul(a, b) => go(a).mul(&go(b)),
            Expr::Div(a, b) => {
                let d = go(b).constant_value().expect("constant divisor");
                go(a).scale(&(Rational::one() / d))
            }
            Expr::Pow(a, k) => go(a).pow(u32::try_from(*k).expect("nonnegative power")),
            Expr::Call(Func::Exp, a) => {
                let arg = go(a);
                let mut out = MultiExpPoly::one();
                for (key, c) in arg.terms() {
                    assert!(key.freq.is_empty() && key.degree() == 1, "exponent must be linear");
                    let i = key.mono.iter().position(|&m| m == 1).unwrap();
                    out = out.mul(&MultiExpPoly::exp(i, c.clone()));
                }
                out
            }
            Expr::Call(..) => panic!("unsupported function in {e:?}"),
        }
    }
    go(&Expr::parse(s).unwrap())
}

pub fn expoly_matrix(rows: &[&[&str]]) -> Matrix<MultiExpPoly> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|s| expoly(s)).collect()).collect()).unwrap()
}

pub const KDV_TABLE: [[&str; 4]; 4] = [
    ["0", "0", "0", "v1"],
    ["0", "0", "v1", "3*v2"],
    ["0", "-v1", "0", "-2*v3"],
    ["-v1", "-3*v2", "2*v3", "0"],
];

pub const HEAT_TABLE: [[&str; 6]; 6] = [
    ["0", "0", "0", "v1", "-v3", "2*v5"],
    ["0", "0", "0", "2*v2", "2*v1", "4*v4-2*v3"],
    ["0", "0", "0", "0", "0", "0"],
    ["-v1", "-2*v2", "0", "0", "v5", "2*v6"],
    ["v3", "-2*v1", "0", "-v5", "0", "0"],
    ["-2*v5", "2*v3-4*v4", "0", "-2*v6", "0", "0"],
];

pub fn kdv_single() -> Vec<Matrix<MultiExpPoly>> {
    vec![
        expoly_matrix(&[&["1", "0", "0", "0"], &["0", "1", "0", "0"], &["0", "0", "1", "0"], &["-e1", "0", "0", "1"]]),
        expoly_matrix(&[&["1", "0", "0", "0"], &["0", "1", "0", "0"], &["-e2", "0", "1", "0"], &["0", "-3*e2", "0", "1"]]),
        expoly_matrix(&[&["1", "0", "0", "0"], &["e3", "1", "0", "0"], &["0", "0", "1", "0"], &["0", "0", "2*e3", "1"]]),
        expoly_matrix(&[
            &["exp(e4)", "0", "0", "0"],
            &["0", "exp(3*e4)", "0", "0"],
            &["0", "0", "exp(-2*e4)", "0"],
            &["0", "0", "0", "1"],
        ]),
    ]
}

pub fn kdv_chain() -> Matrix<MultiExpPoly> {
    expoly_matrix(&[
        &["exp(e4)", "0", "0", "0"],
        &["e3*exp(e4)", "exp(3*e4)", "0", "0"],
        &["-e2*exp(e4)", "0", "exp(-2*e4)", "0"],
        &["(-e1-3*e2*e3)*exp(e4)", "-3*e2*exp(3*e4)", "2*e3*exp(-2*e4)", "1"],
    ])
}

/// Heat one-parameter matrices. Row 6 of `A1` reads `(0,0,-e1^2,0,-2e1,1)`:
/// with `+e1^2` or a zero diagonal the matrix is not `exp(-e1 ad v1)`.
pub fn heat_single() -> Vec<Matrix<MultiExpPoly>> {
    let id: Vec<Vec<&str>> = (0..6).map(|i| (0..6).map(|j| if i == j { "1" } else { "0" }).collect()).collect();
    let id_rows: Vec<&[&str]> = id.iter().map(|r| r.as_slice()).collect();
    vec![
        expoly_matrix(&[
            &["1", "0", "0", "0", "0", "0"],
            &["0", "1", "0", "0", "0", "0"],
            &["0", "0", "1", "0", "0", "0"],
            &["-e1", "0", "0", "1", "0", "0"],
            &["0", "0", "e1", "0", "1", "0"],
            &["0", "0", "-e1^2", "0", "-2*e1", "1"],
        ]),
        expoly_matrix(&[
            &["1", "0", "0", "0", "0", "0"],
            &["0", "1", "0", "0", "0", "0"],
            &["0", "0", "1", "0", "0", "0"],
            &["0", "-2*e2", "0", "1", "0", "0"],
            &["-2*e2", "0", "0", "0", "1", "0"],
            &["0", "4*e2^2", "2*e2", "-4*e2", "0", "1"],
        ]),
        expoly_matrix(&id_rows),
        expoly_matrix(&[
            &["exp(e4)", "0", "0", "0", "0", "0"],
            &["0", "exp(2*e4)", "0", "0", "0", "0"],
            &["0", "0", "1", "0", "0", "0"],
            &["0", "0", "0", "1", "0", "0"],
            &["0", "0", "0", "0", "exp(-e4)", "0"],
            &["0", "0", "0", "0", "0", "exp(-2*e4)"],
        ]),
        expoly_matrix(&[
            &["1", "0", "-e5", "0", "0", "0"],
            &["2*e5", "1", "-e5^2", "0", "0", "0"],
            &["0", "0", "1", "0", "0", "0"],
            &["0", "0", "0", "1", "e5", "0"],
            &["0", "0", "0", "0", "1", "0"],
            &["0", "0", "0", "0", "0", "1"],
        ]),
        expoly_matrix(&[
            &["1", "0", "0", "0", "2*e6", "0"],
            &["0", "1", "-2*e6", "4*e6", "0", "4*e6^2"],
            &["0", "0", "1", "0", "0", "0"],
            &["0", "0", "0", "1", "0", "2*e6"],
            &["0", "0", "0", "0", "1", "0"],
            &["0", "0", "0", "0", "0", "1"],
        ]),
    ]
}

/// Heat chain in the order 4,5,3,1,2,6 with `X = 4 e2 e6 - 1` expanded.
/// Entry (2,1) carries `exp(2 e4)`, as the A4 diagonal forces.
pub fn heat_chain() -> Matrix<MultiExpPoly> {
    let x = "(4*e2*e6-1)";
    let s = |t: &str| t.replace('X', x);
    let rows: Vec<Vec<String>> = vec![
        vec!["exp(e4)", "0", "-e5*exp(e4)", "0", "2*e6*exp(e4)", "0"],
        vec![
            "2*e5*exp(2*e4)",
            "exp(2*e4)",
            "-(e5^2+2*e6)*exp(2*e4)",
            "4*e6*exp(2*e4)",
            "4*e5*e6*exp(2*e4)",
            "4*e6^2*exp(2*e4)",
        ],
        vec!["0", "0", "1", "0", "0", "0"],
        vec!["-e1-2*e2*e5", "-2*e2", "e1*e5+4*e2*e6", "1-8*e2*e6", "-2*e1*e6-e5*X", "-2*e6*X"],
        vec!["-2*e2*exp(-e4)", "0", "e1*exp(-e4)", "0", "-X*exp(-e4)", "0"],
        vec![
            "4*e1*e2*exp(-2*e4)",
            "4*e2^2*exp(-2*e4)",
            "-(e1^2+2*e2*X)*exp(-2*e4)",
            "4*e2*X*exp(-2*e4)",
            "2*e1*X*exp(-2*e4)",
            "X^2*exp(-2*e4)",
        ],
    ]
    .into_iter()
    .map(|r| r.into_iter().map(s).collect())
    .collect();
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|e| expoly(e)).collect()).collect()).unwrap()
}

/// Span equality of two polynomial lists over the rationals.
pub fn same_span(a: &[MultiPoly<Rational>], b: &[MultiPoly<Rational>]) -> bool {
    let ra = rank(a);
    ra == rank(b) && ra == rank(&[a, b].concat())
}

pub fn in_span(basis: &[MultiPoly<Rational>], p: &MultiPoly<Rational>) -> bool {
    rank(basis) == rank(&[basis, std::slice::from_ref(p)].concat())
}

fn rank(ps: &[MultiPoly<Rational>]) -> usize {
    let mut monos: Vec<Monomial> = ps.iter().flat_map(|p| p.terms().map(|(m, _)| m.clone())).collect();
    monos.sort_by(|x, y| x.0.cmp(&y.0));
    monos.dedup();
    let rows: Vec<Vec<Rational>> = ps.iter().map(|p| monos.iter().map(|m| p.coeff(m)).collect()).collect();
    if rows.is_empty() || monos.is_empty() {
        return 0;
    }
    Matrix::from_rows(rows).unwrap().rank()
}

/// KdV rewritten in the basis `w_i = sum_p P_ip v_p`; Jacobi-valid by
/// construction, with integer spectra when `P` is integral.
pub fn rebased_kdv(p: &[Vec<i64>]) -> Option<LieAlgebra> {
    let kdv = fixtures::kdv();
    let n = kdv.dim();
    let pm = Matrix::from_rows(p.iter().map(|r| ints(r)).collect()).ok()?;
    let inv = pm.inverse()?;
    let mut c = vec![vec![vec![Rational::zero(); n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            let wi = pm.row(i).to_vec();
            let wj = pm.row(j).to_vec();
            let br = kdv.bracket(&wi, &wj).unwrap();
            c[i][j] = inv.left_apply(&br).unwrap();
        }
    }
    LieAlgebra::from_dense("rebased-kdv", &c).ok()
}

/// Fixture algebras for the property suites plus one rebased KdV.
pub fn property_algebras() -> Vec<LieAlgebra> {
    let p = vec![vec![1, 1, 0, 0], vec![0, 1, 2, 0], vec![0, 0, 1, -1], vec![1, 0, 0, 1]];
    vec![
        fixtures::kdv(),
        fixtures::heat(),
        LieAlgebra::abelian(3),
        rebased_kdv(&p).expect("invertible basis change"),
    ]
}

pub fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> (f64, f64) {
    let mut d: f64 = 0.0;
    let mut m: f64 = 0.0;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            d = d.max((x - y).abs());
            m = m.max(y.abs());
        }
    }
    (d, m)
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

fn to_f64(m: &Matrix<Rational>) -> Vec<Vec<f64>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(liesym::symkernel::rational::to_f64).collect())
        .collect()
}

/// Exact bracket antisymmetry and Jacobi on a triple.
pub fn check_bracket(alg: &LieAlgebra, x: &[Rational], y: &[Rational], z: &[Rational]) -> Result<(), String> {
    let b = |u: &[Rational], v: &[Rational]| alg.bracket(u, v).unwrap();
    let xy = b(x, y);
    let yx = b(y, x);
    if xy.iter().zip(&yx).any(|(p, q)| !(p + q).is_zero()) {
        return Err(format!("{}: [x,y] + [y,x] != 0", alg.name()));
    }
    let j1 = b(x, &b(y, z));
    let j2 = b(y, &b(z, x));
    let j3 = b(z, &xy);
    if (0..x.len()).any(|k| !(&j1[k] + &j2[k] + &j3[k]).is_zero()) {
        return Err(format!("{}: Jacobi fails", alg.name()));
    }
    Ok(())
}

/// `ad` is a representation. With row-vector matrices `z ad_x = [x, z]`,
/// so `ad_[x,y] = ad_y ad_x - ad_x ad_y`; the transposes satisfy the
/// column-convention identity `ad_x ad_y - ad_y ad_x`.
pub fn check_representation(alg: &LieAlgebra, x: &[Rational], y: &[Rational]) -> Result<(), String> {
    let ax = alg.ad_of(x).unwrap();
    let ay = alg.ad_of(y).unwrap();
    let lhs = alg.ad_of(&alg.bracket(x, y).unwrap()).unwrap();
    let rhs = ay.try_mul(&ax).unwrap().sub(&ax.try_mul(&ay).unwrap());
    if lhs != rhs {
        return Err(format!("{}: ad_[x,y] mismatch", alg.name()));
    }
    let (axt, ayt) = (ax.transpose(), ay.transpose());
    if lhs.transpose() != axt.try_mul(&ayt).unwrap().sub(&ayt.try_mul(&axt).unwrap()) {
        return Err(format!("{}: column-convention identity fails", alg.name()));
    }
    Ok(())
}

pub fn check_killing(alg: &LieAlgebra, x: &[Rational], y: &[Rational], z: &[Rational]) -> Result<(), String> {
    let k = |u: &[Rational], v: &[Rational]| alg.killing_form(u, v).unwrap();
    if k(x, y) != k(y, x) {
        return Err(format!("{}: Killing form not symmetric", alg.name()));
    }
    let zx = alg.bracket(z, x).unwrap();
    let zy = alg.bracket(z, y).unwrap();
    if !(k(&zx, y) + k(x, &zy)).is_zero() {
        return Err(format!("{}: Killing form not ad-invariant", alg.name()));
    }
    Ok(())
}

/// `A_i(s) A_i(t) = A_i(s + t)` entrywise within `1e-10` relative.
pub fn check_group_law(alg: &LieAlgebra, i: usize, s: f64, t: f64) -> Result<(), String> {
    let m = exp_ad(alg, i).unwrap();
    let at = |e: f64| {
        let mut p = vec![0.0; i];
        p[i - 1] = e;
        liesym::adjoint::eval_matrix(&m.entries, &p).unwrap()
    };
    let prod = matmul(&at(s), &at(t));
    let (d, mag) = max_abs_diff(&prod, &at(s + t));
    if d > 1e-10 * mag.max(1.0) {
        return Err(format!("{}: group law of A{i} off by {d:e} at s={s}, t={t}", alg.name()));
    }
    Ok(())
}

/// Chain application against products of truncated exponential series.
pub fn check_series(alg: &LieAlgebra, order: &[usize], a: &[f64], eps: &[f64]) -> Result<(), String> {
    let n = alg.dim();
    let chain = adjoint_chain(alg, order).unwrap();
    let got = chain.apply(a, eps).unwrap();
    let mut v = a.to_vec();
    for &g in order {
        let ad = to_f64(&alg.ad_matrix(g).unwrap());
        let e = eps[g - 1];
        let mut term = v.clone();
        let mut acc = v.clone();
        for k in 1..=30 {
            // term <- term * (-e ad) / k
            term = (0..n)
                .map(|c| (0..n).map(|r| term[r] * ad[r][c]).sum::<f64>() * (-e) / k as f64)
                .collect();
            for c in 0..n {
                acc[c] += term[c];
            }
        }
        v = acc;
    }
    let scale = v.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    let d = got.iter().zip(&v).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    if d > 1e-10 * scale {
        return Err(format!("{}: series oracle off by {d:e} at eps={eps:?}", alg.name()));
    }
    Ok(())
}

/// Invariants and semi-invariants used for signature checks.
pub struct SignatureData {
    pub invariants: Vec<InvariantEntry>,
    pub semis: Vec<SemiInvariant>,
    pub spectral: Vec<bool>,
}

impl SignatureData {
    pub fn new(alg: &LieAlgebra) -> Self {
        let n = alg.dim();
        let d = n as u32;
        let semis = fundamental_semi(&semi_invariants(alg, &SearchOptions::global(n, d)).unwrap());
        let spectral = (1..=n)
            .map(|i| {
                let m = alg.ad_matrix(i).unwrap();
                let mut p = m.clone();
                for _ in 0..n {
                    p = p.try_mul(&m).unwrap();
                }
                !p.is_zero()
            })
            .collect();
        SignatureData {
            invariants: global_invariants(alg, d).unwrap(),
            semis,
            spectral,
        }
    }
}

/// `signature(c * a A(e)) = signature(a)` with exact arithmetic; spectral
/// parameters enter as logarithms of rationals so every entry stays rational.
pub fn check_signature(
    alg: &LieAlgebra,
    data: &SignatureData,
    a: &[Rational],
    eps: &[Rational],
    logs: &[Rational],
    c: &Rational,
) -> Result<(), String> {
    let order = fixtures::preferred_order(alg);
    let chain = adjoint_chain(alg, &order).unwrap();
    let params: Vec<ExactParam> = (0..alg.dim())
        .map(|i| {
            if data.spectral[i] {
                ExactParam::LogOf(logs[i].clone())
            } else {
                ExactParam::Rational(eps[i].clone())
            }
        })
        .collect();
    let moved = chain.apply_exact(a, &params).unwrap().ok_or("irrational chain value")?;
    let moved: Vec<Rational> = moved.iter().map(|x| x * c).collect();
    let s0 = canonical_signature(&surds(a), &data.invariants, &data.semis);
    let s1 = canonical_signature(&surds(&moved), &data.invariants, &data.semis);
    if s0 != s1 {
        return Err(format!("{}: signature {s0} became {s1}", alg.name()));
    }
    Ok(())
}

/// Two decisions with the same seed serialize identically.
pub fn check_determinism(engine: &Engine, a: &[Rational], target: &[Rational], seed: u64) -> Result<(), String> {
    let t = TargetFamily::fixed("t", target);
    let opts = EquivOptions {
        restarts: 8,
        seed,
        ..EquivOptions::default()
    };
    let run = || to_json(&engine.decide(&surds(a), &t, &opts).unwrap()).unwrap();
    let (x, y) = (run(), run());
    if x != y {
        return Err(format!("{}: decision differs between runs", engine.alg.name()));
    }
    Ok(())
}

/// Largest relative deviation between the analytic Jacobian and central
/// differences at `x`.
pub fn jacobian_error(problem: &liesym::equivalence::WitnessProblem<'_>, x: &[f64]) -> f64 {
    let (_, jac) = problem.residual_and_jacobian(x);
    let mut worst: f64 = 0.0;
    for j in 0..x.len() {
        let h = 1e-6 * x[j].abs().max(1.0);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        let (rp, rm) = (problem.residual(&xp), problem.residual(&xm));
        for k in 0..rp.len() {
            let fd = (rp[k] - rm[k]) / (2.0 * h);
            let err = (jac[k][j] - fd).abs() / jac[k][j].abs().max(1.0);
            worst = worst.max(err);
        }
    }
    worst
}
