//! Exp-polynomials in group parameters: finite sums of
//! `q * e1^m1 ... en^mn * exp(l1*e1 + ... + ln*en)` with rational `q` and
//! rational frequencies `l`.
//!
//! Functions with distinct `(m, l)` are linearly independent, so the merged,
//! zero-free term map is a canonical form and equality is structural.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::traits::{One, Signed, ToPrimitive, Zero};
use num::BigInt;
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use super::rational::{format_rational, to_f64, Rational};
use super::ring::{Coeff, CoeffDisplay};
use crate::error::Error;

/// `(monomial exponents, frequency vector)`, both stored without trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExpKey {
    pub mono: Vec<u32>,
    pub freq: Vec<Rational>,
}

fn trim_u32(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn trim_rat(mut v: Vec<Rational>) -> Vec<Rational> {
    while v.last().is_some_and(|x| x.is_zero()) {
        v.pop();
    }
    v
}

impl ExpKey {
    pub fn new(mono: Vec<u32>, freq: Vec<Rational>) -> Self {
        ExpKey {
            mono: trim_u32(mono),
            freq: trim_rat(freq),
        }
    }

    pub fn one() -> Self {
        ExpKey {
            mono: vec![],
            freq: vec![],
        }
    }

    pub fn degree(&self) -> u32 {
        self.mono.iter().sum()
    }

    pub fn mono_at(&self, i: usize) -> u32 {
        self.mono.get(i).copied().unwrap_or(0)
    }

    pub fn freq_at(&self, i: usize) -> Rational {
        self.freq.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    /// Number of parameters this key mentions.
    pub fn span(&self) -> usize {
        self.mono.len().max(self.freq.len())
    }

    fn mul(&self, other: &ExpKey) -> ExpKey {
        let n = self.mono.len().max(other.mono.len());
        let mono = (0..n).map(|i| self.mono_at(i) + other.mono_at(i)).collect();
        let m = self.freq.len().max(other.freq.len());
        let freq = (0..m).map(|i| self.freq_at(i) + other.freq_at(i)).collect();
        ExpKey::new(mono, freq)
    }
}

impl Ord for ExpKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.mono.len().max(other.mono.len());
            for i in 0..n {
                match self.mono_at(i).cmp(&other.mono_at(i)) {
                    Ordering::Equal => {}
                    o => return o,
                }
            }
            let m = self.freq.len().max(other.freq.len());
            for i in 0..m {
                match self.freq_at(i).cmp(&other.freq_at(i)) {
                    Ordering::Equal => {}
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for ExpKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MultiExpPoly {
    terms: BTreeMap<ExpKey, Rational>,
}

/// A point at which an exp-polynomial can be evaluated exactly.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactParam {
    Rational(Rational),
    /// `ln q` for a positive rational `q`.
    LogOf(Rational),
}

impl MultiExpPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(q: Rational) -> Self {
        Self::term(ExpKey::one(), q)
    }

    pub fn term(key: ExpKey, q: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(key, q);
        p
    }

    /// The parameter `e_{i+1}` (0-based `i`).
    pub fn param(i: usize) -> Self {
        let mut mono = vec![0; i + 1];
        mono[i] = 1;
        Self::term(ExpKey::new(mono, vec![]), Rational::one())
    }

    /// `exp(l * e_{i+1})`.
    pub fn exp(i: usize, l: Rational) -> Self {
        let mut freq = vec![Rational::zero(); i + 1];
        freq[i] = l;
        Self::term(ExpKey::new(vec![], freq), Rational::one())
    }

    /// Canonical form of an arbitrary raw term list.
    pub fn from_raw<I: IntoIterator<Item = (Vec<u32>, Vec<Rational>, Rational)>>(raw: I) -> Self {
        let mut p = Self::zero();
        for (m, f, q) in raw {
            p.add_term(ExpKey::new(m, f), q);
        }
        p
    }

    fn add_term(&mut self, key: ExpKey, q: Rational) {
        if q.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(c) => {
                *c += q;
                if c.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, q);
            }
        }
    }

    /// Terms in descending order.
    pub fn terms(&self) -> impl Iterator<Item = (&ExpKey, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (k, q) = self.terms.iter().next().unwrap();
                (*k == ExpKey::one()).then(|| q.clone())
            }
            _ => None,
        }
    }

    /// Number of parameters mentioned by any term.
    pub fn span(&self) -> usize {
        self.terms.keys().map(ExpKey::span).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (k, q) in &other.terms {
            p.add_term(k.clone(), q.clone());
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        MultiExpPoly {
            terms: self.terms.iter().map(|(k, q)| (k.clone(), -q)).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut p = Self::zero();
        for (k, q) in &self.terms {
            p.add_term(k.clone(), q * s);
        }
        p
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for (k1, q1) in &self.terms {
            for (k2, q2) in &other.terms {
                p.add_term(k1.mul(k2), q1 * q2);
            }
        }
        p
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Derivative with respect to the 0-based parameter `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut p = Self::zero();
        for (k, q) in &self.terms {
            let l = k.freq_at(i);
            if !l.is_zero() {
                p.add_term(k.clone(), q * &l);
            }
            let m = k.mono_at(i);
            if m > 0 {
                let mut mono = k.mono.clone();
                mono[i] -= 1;
                p.add_term(ExpKey::new(mono, k.freq.clone()), q * Rational::from_integer(BigInt::from(m)));
            }
        }
        p
    }

    /// Floating evaluation. `point[i]` is the value of `e_{i+1}`; the point
    /// must cover every parameter that occurs.
    pub fn eval(&self, point: &[f64]) -> Result<f64, Error> {
        let span = self.span();
        if point.len() < span {
            return Err(Error::MissingAssignment(format!("e{}", point.len() + 1)));
        }
        let mut s = 0.0;
        for (k, q) in &self.terms {
            let mut t = to_f64(q);
            for (i, &m) in k.mono.iter().enumerate() {
                if m > 0 {
                    t *= point[i].powi(m as i32);
                }
            }
            let mut arg = 0.0;
            for (i, l) in k.freq.iter().enumerate() {
                if !l.is_zero() {
                    arg += to_f64(l) * point[i];
                }
            }
            if arg != 0.0 {
                t *= arg.exp();
            }
            s += t;
        }
        Ok(s)
    }

    /// Exact evaluation; `None` when some surviving exponential is irrational
    /// at the point.
    pub fn eval_exact(&self, point: &[ExactParam]) -> Result<Option<Rational>, Error> {
        let span = self.span();
        if point.len() < span {
            return Err(Error::MissingAssignment(format!("e{}", point.len() + 1)));
        }
        let mut s = Rational::zero();
        for (k, q) in &self.terms {
            let mut t = q.clone();
            for (i, &m) in k.mono.iter().enumerate() {
                if m == 0 {
                    continue;
                }
                match &point[i] {
                    ExactParam::Rational(x) => t *= num::pow(x.clone(), m as usize),
                    // Powers of a logarithm are transcendental unless it is ln 1.
                    ExactParam::LogOf(x) if x.is_one() => t = Rational::zero(),
                    ExactParam::LogOf(_) => return Ok(None),
                }
            }
            for (i, l) in k.freq.iter().enumerate() {
                if l.is_zero() || t.is_zero() {
                    continue;
                }
                match &point[i] {
                    ExactParam::Rational(x) if x.is_zero() => {}
                    ExactParam::Rational(_) => return Ok(None),
                    ExactParam::LogOf(x) => {
                        if !x.is_positive() {
                            return Err(Error::Domain("logarithm of a non-positive value".into()));
                        }
                        match rational_power(x, l) {
                            Some(v) => t *= v,
                            None => return Ok(None),
                        }
                    }
                }
            }
            s += t;
        }
        Ok(Some(s))
    }

    pub fn fmt_named(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        // group by frequency, polynomial parts in descending monomial order
        let mut groups: Vec<(Vec<Rational>, Vec<(Vec<u32>, Rational)>)> = Vec::new();
        for (k, q) in self.terms() {
            match groups.iter_mut().find(|(f, _)| *f == k.freq) {
                Some((_, v)) => v.push((k.mono.clone(), q.clone())),
                None => groups.push((k.freq.clone(), vec![(k.mono.clone(), q.clone())])),
            }
        }
        let mut out = String::new();
        for (gi, (freq, poly)) in groups.iter().enumerate() {
            let exp = format_exponent(freq, names);
            let (neg, body) = if poly.len() == 1 {
                let (m, q) = &poly[0];
                let mono = format_mono(m, names);
                let aq = q.abs();
                let body = match (mono.is_empty(), aq.is_one()) {
                    (true, _) => format_rational(&aq),
                    (false, true) => mono,
                    (false, false) => format!("{}*{}", format_rational(&aq), mono),
                };
                (q.is_negative(), body)
            } else {
                let mut s = String::new();
                for (ti, (m, q)) in poly.iter().enumerate() {
                    let mono = format_mono(m, names);
                    let aq = q.abs();
                    let sign = match (ti, q.is_negative()) {
                        (0, true) => "-",
                        (0, false) => "",
                        (_, true) => " - ",
                        (_, false) => " + ",
                    };
                    let t = match (mono.is_empty(), aq.is_one()) {
                        (true, _) => format_rational(&aq),
                        (false, true) => mono,
                        (false, false) => format!("{}*{}", format_rational(&aq), mono),
                    };
                    s.push_str(sign);
                    s.push_str(&t);
                }
                (false, format!("({s})"))
            };
            let sign = match (gi, neg) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            out.push_str(sign);
            match exp {
                None => out.push_str(&body),
                Some(e) if body == "1" => out.push_str(&e),
                Some(e) => {
                    out.push_str(&body);
                    out.push('*');
                    out.push_str(&e);
                }
            }
        }
        out
    }
}

fn param_name(names: &[String], i: usize) -> String {
    names.get(i).cloned().unwrap_or_else(|| format!("e{}", i + 1))
}

fn format_mono(m: &[u32], names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(param_name(names, i)),
            _ => parts.push(format!("{}^{}", param_name(names, i), e)),
        }
    }
    parts.join("*")
}

fn format_exponent(freq: &[Rational], names: &[String]) -> Option<String> {
    if freq.is_empty() {
        return None;
    }
    let mut s = String::new();
    for (i, l) in freq.iter().enumerate() {
        if l.is_zero() {
            continue;
        }
        let a = l.abs();
        let sign = match (s.is_empty(), l.is_negative()) {
            (true, true) => "-",
            (true, false) => "",
            (false, true) => " - ",
            (false, false) => " + ",
        };
        s.push_str(sign);
        if !a.is_one() {
            s.push_str(&format_rational(&a));
            s.push('*');
        }
        s.push_str(&param_name(names, i));
    }
    Some(format!("exp({s})"))
}

/// `x^l` when it is rational (integer `l`, or `x` a perfect power).
fn rational_power(x: &Rational, l: &Rational) -> Option<Rational> {
    let q = l.denom().to_u32()?;
    let p = l.numer().to_i64()?;
    let root = |n: &BigInt| -> Option<BigInt> {
        let r = n.nth_root(q);
        (num::pow(r.clone(), q as usize) == *n).then_some(r)
    };
    let base = Rational::new(root(x.numer())?, root(x.denom())?);
    let e = p.unsigned_abs() as usize;
    let v = num::pow(base, e);
    Some(if p < 0 { v.recip() } else { v })
}

impl fmt::Display for MultiExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_named(&[]))
    }
}

/// Serialized as a term list `[{"coeff": "p/q", "mono": [..], "freq": ["p/q", ..]}]`,
/// descending order.
impl Serialize for MultiExpPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Term<'a>(&'a ExpKey, &'a Rational);
        impl Serialize for Term<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(3))?;
                m.serialize_entry("coeff", &format_rational(self.1))?;
                let freq: Vec<String> = self.0.freq.iter().map(format_rational).collect();
                m.serialize_entry("freq", &freq)?;
                m.serialize_entry("mono", &self.0.mono)?;
                m.end()
            }
        }
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (k, q) in self.terms() {
            seq.serialize_element(&Term(k, q))?;
        }
        seq.end()
    }
}

impl Coeff for MultiExpPoly {
    fn ring_zero() -> Self {
        MultiExpPoly::zero()
    }
    fn ring_one() -> Self {
        MultiExpPoly::one()
    }
    fn is_ring_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn from_rational(q: &Rational) -> Self {
        MultiExpPoly::constant(q.clone())
    }
    fn display_parts(&self) -> CoeffDisplay {
        if self.terms.len() == 1 {
            let (_, q) = self.terms.iter().next().unwrap();
            let abs = self.scale(&if q.is_negative() { -Rational::one() } else { Rational::one() });
            let body = abs.to_string();
            return CoeffDisplay {
                negative: q.is_negative(),
                is_unit: body == "1",
                body,
                atomic: true,
            };
        }
        CoeffDisplay {
            negative: false,
            is_unit: false,
            body: self.to_string(),
            atomic: false,
        }
    }
}
