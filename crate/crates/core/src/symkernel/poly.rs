//! Sparse multivariate Laurent polynomials with exact coefficients.
//!
//! Exponents are signed so that monomial denominators (needed for invariants
//! on charts such as `a6 != 0`) live in the same normal form as ordinary
//! polynomials. Terms are kept in a `BTreeMap` under graded lexicographic
//! order with `x1 > x2 > ... > xn`; zero coefficients are never stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::traits::{One, Signed, Zero};
use num::{BigInt, Integer};

use super::rational::Rational;
use super::ring::Coeff;
use crate::error::Error;

pub type Vars = Arc<[String]>;

pub fn vars(names: &[&str]) -> Vars {
    names.iter().map(|s| s.to_string()).collect::<Vec<_>>().into()
}

/// `prefix1, ..., prefixN`
pub fn indexed_vars(prefix: &str, n: usize) -> Vars {
    (1..=n).map(|i| format!("{prefix}{i}")).collect::<Vec<_>>().into()
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<i32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> i32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn is_polynomial(&self) -> bool {
        self.0.iter().all(|&e| e >= 0)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent vectors of `n` variables with total degree exactly `d >= 0`,
/// in descending graded-lex order.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Monomial> {
    fn rec(n: usize, left: u32, cur: &mut Vec<i32>, out: &mut Vec<Monomial>) {
        if cur.len() + 1 == n {
            cur.push(left as i32);
            out.push(Monomial(cur.clone()));
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e as i32);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Monomial(vec![]));
        }
        return out;
    }
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct MultiPoly<C: Coeff> {
    vars: Vars,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> PartialEq for MultiPoly<C> {
    fn eq(&self, other: &Self) -> bool {
        same_vars(&self.vars, &other.vars) && self.terms == other.terms
    }
}

fn same_vars(a: &Vars, b: &Vars) -> bool {
    Arc::ptr_eq(a, b) || a[..] == b[..]
}

impl<C: Coeff> MultiPoly<C> {
    pub fn zero(vars: &Vars) -> Self {
        MultiPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Vars, c: C) -> Self {
        Self::monomial(vars, Monomial::one(vars.len()), c)
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, C::ring_one())
    }

    /// The variable with 0-based index `i`.
    pub fn var(vars: &Vars, i: usize) -> Self {
        Self::monomial(vars, Monomial::var(vars.len(), i), C::ring_one())
    }

    pub fn monomial(vars: &Vars, m: Monomial, c: C) -> Self {
        assert_eq!(m.0.len(), vars.len(), "exponent vector length");
        let mut terms = BTreeMap::new();
        if !c.is_ring_zero() {
            terms.insert(m, c);
        }
        MultiPoly {
            vars: vars.clone(),
            terms,
        }
    }

    /// Builds a normal form from raw terms, merging duplicates and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(vars: &Vars, raw: I) -> Self {
        let mut p = Self::zero(vars);
        for (m, c) in raw {
            assert_eq!(m.0.len(), vars.len(), "exponent vector length");
            p.add_term(m, c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_ring_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let s = existing.add_ref(&c);
                if s.is_ring_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn same_vars(&self, other: &Self) -> bool {
        same_vars(&self.vars, &other.vars)
    }

    /// Terms, leading (largest) first.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter().rev()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::ring_zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_value(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::ring_zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn leading(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    pub fn trailing(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next()
    }

    pub fn degree(&self) -> Option<i32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// The common total degree of all terms, when there is one.
    pub fn homogeneous_degree(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(Monomial::degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(Monomial::is_polynomial)
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.0[i] != 0)
    }

    /// Largest power of variable `i` dividing every term (may be negative).
    pub fn min_var_exponent(&self, i: usize) -> Option<i32> {
        self.terms.keys().map(|m| m.0[i]).min()
    }

    pub fn max_var_exponent(&self, i: usize) -> Option<i32> {
        self.terms.keys().map(|m| m.0[i]).max()
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg_ref())).collect(),
        }
    }

    pub fn scale(&self, k: &C) -> Self {
        if k.is_ring_zero() {
            return Self::zero(&self.vars);
        }
        let mut p = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            p.add_term(m.clone(), c.mul_ref(k));
        }
        p
    }

    /// Multiplies by the monomial with exponent vector `shift`.
    pub fn shift(&self, shift: &Monomial) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.mul(shift), c.clone())).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, Error> {
        if !self.same_vars(other) {
            return Err(Error::VariableMismatch);
        }
        let (mut acc, small) = if self.terms.len() >= other.terms.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            acc.add_term(m.clone(), c.clone());
        }
        Ok(acc)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, Error> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, Error> {
        if !self.same_vars(other) {
            return Err(Error::VariableMismatch);
        }
        let mut acc = Self::zero(&self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                acc.add_term(m1.mul(m2), c1.mul_ref(c2));
            }
        }
        Ok(acc)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one(&self.vars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Partial derivative with respect to the 0-based variable `i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut p = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            p.add_term(m2, c.mul_ref(&C::from_rational(&Rational::from_integer(BigInt::from(e)))));
        }
        p
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> MultiPoly<D> {
        let mut p = MultiPoly::<D>::zero(&self.vars);
        for (m, c) in &self.terms {
            p.add_term(m.clone(), f(c));
        }
        p
    }

    /// Replaces variable `i` by `value` (which must share the variable set).
    /// Variable `i` must occur with nonnegative exponents only.
    pub fn substitute(&self, i: usize, value: &Self) -> Result<Self, Error> {
        if !self.same_vars(value) {
            return Err(Error::VariableMismatch);
        }
        if self.min_var_exponent(i).unwrap_or(0) < 0 {
            return Err(Error::Unsupported(format!(
                "substituting {} which occurs with a negative exponent",
                self.vars[i]
            )));
        }
        let maxe = self.max_var_exponent(i).unwrap_or(0).max(0) as usize;
        let mut powers = vec![Self::one(&self.vars)];
        for k in 1..=maxe {
            let next = &powers[k - 1] * value;
            powers.push(next);
        }
        let mut acc = Self::zero(&self.vars);
        let mut groups: BTreeMap<i32, MultiPoly<C>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[i];
            let mut m2 = m.clone();
            m2.0[i] = 0;
            groups
                .entry(e)
                .or_insert_with(|| Self::zero(&self.vars))
                .add_term(m2, c.clone());
        }
        for (e, g) in groups {
            acc = &acc + &(&g * &powers[e as usize]);
        }
        Ok(acc)
    }

    /// Substitutes every variable: `x_i -> values[i]` with coefficients lifted
    /// by `lift`. Negative exponents require the value to be a single
    /// monomial whose coefficient `invert` can invert.
    pub fn compose<D: Coeff>(
        &self,
        values: &[MultiPoly<D>],
        lift: impl Fn(&C) -> D,
        invert: impl Fn(&D) -> Option<D>,
    ) -> Result<MultiPoly<D>, Error> {
        if values.len() != self.nvars() {
            return Err(Error::Dimension {
                expected: self.nvars(),
                found: values.len(),
            });
        }
        let target_vars = match values.first() {
            Some(v) => v.vars.clone(),
            None => {
                let c = self.constant_value().unwrap_or_else(C::ring_zero);
                return Ok(MultiPoly::constant(&Arc::from(Vec::<String>::new()), lift(&c)));
            }
        };
        if values.iter().any(|v| !same_vars(&v.vars, &target_vars)) {
            return Err(Error::VariableMismatch);
        }
        let mut cache: BTreeMap<(usize, i32), MultiPoly<D>> = BTreeMap::new();
        let mut acc = MultiPoly::<D>::zero(&target_vars);
        for (m, c) in &self.terms {
            let mut term = MultiPoly::constant(&target_vars, lift(c));
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let key = (i, e);
                if !cache.contains_key(&key) {
                    let p = if e > 0 {
                        values[i].pow(e as u32)
                    } else {
                        let inv = values[i].invert_monomial(&invert).ok_or_else(|| {
                            Error::Unsupported(format!(
                                "negative power of non-monomial value for {}",
                                self.vars[i]
                            ))
                        })?;
                        inv.pow((-e) as u32)
                    };
                    cache.insert(key, p);
                }
                term = &term * &cache[&key];
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    fn invert_monomial(&self, invert: &impl Fn(&C) -> Option<C>) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        let ci = invert(c)?;
        Some(Self::monomial(
            &self.vars,
            Monomial(m.0.iter().map(|e| -e).collect()),
            ci,
        ))
    }

    /// Evaluates with a caller-supplied coefficient conversion.
    pub fn eval_f64(&self, point: &[f64], coeff: impl Fn(&C) -> f64) -> f64 {
        let mut s = 0.0;
        for (m, c) in &self.terms {
            let mut t = coeff(c);
            for (x, &e) in point.iter().zip(&m.0) {
                if e != 0 {
                    t *= x.powi(e);
                }
            }
            s += t;
        }
        s
    }

    pub fn fmt_with(&self, f: &mut fmt::Formatter<'_>, names: &[String]) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let d = c.display_parts();
            if k == 0 {
                if d.negative {
                    write!(f, "-")?;
                }
            } else if d.negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono = format_monomial(m, names);
            match (mono.is_empty(), d.is_unit) {
                (true, _) => write!(f, "{}", d.body)?,
                (false, true) => write!(f, "{mono}")?,
                (false, false) => {
                    if d.atomic {
                        write!(f, "{}*{mono}", d.body)?
                    } else {
                        write!(f, "({})*{mono}", d.body)?
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn format_monomial(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

impl<C: Coeff> fmt::Display for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.vars.clone();
        self.fmt_with(f, &names)
    }
}

impl<'a, C: Coeff> std::ops::Add for &'a MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn add(self, rhs: Self) -> MultiPoly<C> {
        self.try_add(rhs).expect("polynomial variable sets differ")
    }
}

impl<'a, C: Coeff> std::ops::Sub for &'a MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn sub(self, rhs: Self) -> MultiPoly<C> {
        self.try_sub(rhs).expect("polynomial variable sets differ")
    }
}

impl<'a, C: Coeff> std::ops::Mul for &'a MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn mul(self, rhs: Self) -> MultiPoly<C> {
        self.try_mul(rhs).expect("polynomial variable sets differ")
    }
}

impl<C: Coeff> std::ops::Neg for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn neg(self) -> MultiPoly<C> {
        MultiPoly::neg(self)
    }
}

/// Polynomial arithmetic selector for [`poly_arith`].
#[derive(Clone, Copy, Debug)]
pub enum PolyOp {
    Add,
    Mul,
    /// Partial derivative with respect to a 0-based variable index.
    Partial(usize),
}

/// Checked polynomial arithmetic. The derivative ignores `q`.
pub fn poly_arith<C: Coeff>(p: &MultiPoly<C>, q: &MultiPoly<C>, op: PolyOp) -> Result<MultiPoly<C>, Error> {
    match op {
        PolyOp::Add => p.try_add(q),
        PolyOp::Mul => p.try_mul(q),
        PolyOp::Partial(i) => {
            if i >= p.nvars() {
                return Err(Error::Index {
                    index: i + 1,
                    bound: p.nvars(),
                });
            }
            Ok(p.partial(i))
        }
    }
}

impl MultiPoly<Rational> {
    pub fn eval_rational(&self, point: &[Rational]) -> Result<Rational, Error> {
        if point.len() != self.nvars() {
            return Err(Error::Dimension {
                expected: self.nvars(),
                found: point.len(),
            });
        }
        let mut s = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num::pow(x.clone(), e as usize);
                } else if e < 0 {
                    if x.is_zero() {
                        return Err(Error::Domain("division by zero variable".into()));
                    }
                    t /= num::pow(x.clone(), (-e) as usize);
                }
            }
            s += t;
        }
        Ok(s)
    }

    pub fn to_f64(&self, point: &[f64]) -> f64 {
        self.eval_f64(point, super::rational::to_f64)
    }

    /// Integer-primitive representative: integer coefficients with trivial
    /// content and a positive trailing (smallest) coefficient.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut den = BigInt::one();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            let n = c.numer() * (&den / c.denom());
            g = g.gcd(&n);
        }
        let mut k = Rational::new(den, g);
        if self.trailing().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            k = -k;
        }
        self.scale(&k)
    }

    /// Exact square root when `self = ±s^2` for a polynomial `s`; returns
    /// `(s, sign)`.
    pub fn sqrt_exact(&self) -> Option<(Self, i8)> {
        if self.is_zero() {
            return None;
        }
        for sign in [1i8, -1] {
            let target = if sign == 1 { self.clone() } else { self.neg() };
            if let Some(s) = target.sqrt_signed() {
                return Some((s, sign));
            }
        }
        None
    }

    fn sqrt_signed(&self) -> Option<Self> {
        let (lm, lc) = self.leading()?;
        if lm.0.iter().any(|e| e % 2 != 0) || lc.is_negative() {
            return None;
        }
        let rc = rational_sqrt(lc)?;
        let lead = Self::monomial(&self.vars, Monomial(lm.0.iter().map(|e| e / 2).collect()), rc);
        let mut root = lead.clone();
        let two_lead = lead.scale(&Rational::from_integer(BigInt::from(2)));
        let (tl_m, tl_c) = two_lead.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        for _ in 0..=self.nterms() * 2 + 4 {
            let rem = self - &root.pow(2);
            if rem.is_zero() {
                return Some(root);
            }
            let (rm, rc) = rem.leading()?;
            let q = Monomial(rm.0.iter().zip(&tl_m.0).map(|(a, b)| a - b).collect());
            if q >= *lead.leading()?.0 {
                return None;
            }
            let t = Self::monomial(&self.vars, q, rc / &tl_c);
            root = &root + &t;
        }
        None
    }
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::rational::int;

    fn avars() -> Vars {
        indexed_vars("a", 6)
    }

    fn a(i: usize) -> MultiPoly<Rational> {
        MultiPoly::var(&avars(), i - 1)
    }

    fn k(n: i64) -> MultiPoly<Rational> {
        MultiPoly::constant(&avars(), int(n))
    }

    #[test]
    fn difference_of_squares() {
        let p = &a(1) + &a(2);
        let q = &a(1) - &a(2);
        let expected = &a(1).pow(2) - &a(2).pow(2);
        assert_eq!(&p * &q, expected);
        assert_eq!(expected.nterms(), 2);
    }

    #[test]
    fn power_rule() {
        let p = &a(4).pow(2) - &(&k(4) * &(&a(2) * &a(6)));
        assert_eq!(poly_arith(&p, &p, PolyOp::Partial(3)).unwrap(), &k(2) * &a(4));
    }

    #[test]
    fn additive_identity_keeps_terms() {
        let d2 = delta2();
        let z = MultiPoly::zero(&avars());
        let s = poly_arith(&d2, &z, PolyOp::Add).unwrap();
        assert_eq!(s, d2);
        assert_eq!(s.nterms(), 7);
    }

    #[test]
    fn mismatched_variables_error() {
        let p = MultiPoly::<Rational>::var(&indexed_vars("a", 2), 0);
        let q = MultiPoly::<Rational>::var(&indexed_vars("b", 2), 0);
        assert!(matches!(poly_arith(&p, &q, PolyOp::Add), Err(Error::VariableMismatch)));
        assert!(matches!(poly_arith(&p, &q, PolyOp::Mul), Err(Error::VariableMismatch)));
    }

    pub(crate) fn delta2() -> MultiPoly<Rational> {
        let t = |c: i64, f: &[usize]| {
            let mut p = k(c);
            for &i in f {
                p = &p * &a(i);
            }
            p
        };
        [
            t(1, &[4, 4, 4]),
            t(2, &[3, 4, 4]),
            t(-4, &[4, 2, 6]),
            t(2, &[4, 1, 5]),
            t(-8, &[2, 3, 6]),
            t(-2, &[2, 5, 5]),
            t(-2, &[1, 1, 6]),
        ]
        .iter()
        .fold(MultiPoly::zero(&avars()), |acc, x| &acc + x)
    }

    #[test]
    fn display_and_order() {
        let d1 = &a(4).pow(2) - &(&k(4) * &(&a(2) * &a(6)));
        assert_eq!(d1.to_string(), "-4*a2*a6 + a4^2");
        assert_eq!(d1.primitive(), d1);
        assert_eq!(d1.neg().primitive(), d1);
        let laurent = a(5).pow(2).shift(&Monomial(vec![0, 0, 0, 0, 0, -1]));
        assert_eq!(laurent.to_string(), "a5^2*a6^-1");
        assert_eq!(laurent.homogeneous_degree(), Some(1));
        assert!(!laurent.is_polynomial());
    }

    #[test]
    fn substitution_and_sqrt() {
        // (2 a1 a6 - a4 a5)^2 recovered up to sign.
        let s = &(&k(2) * &(&a(1) * &a(6))) - &(&a(4) * &a(5));
        let sq = s.pow(2).neg();
        let (r, sign) = sq.sqrt_exact().unwrap();
        assert_eq!(sign, -1);
        assert!(r == s || r == s.neg());
        assert!((&a(1).pow(2) + &a(2)).sqrt_exact().is_none());
        let sub = delta2().substitute(3, &k(0)).unwrap();
        assert!(!sub.uses_var(3));
    }

    #[test]
    fn monomial_enumeration() {
        let ms = monomials_of_degree(3, 2);
        assert_eq!(ms.len(), 6);
        assert!(ms.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(monomials_of_degree(6, 6).len(), 462);
    }
}
