//! Exact numbers of the form `q0 + q1*sqrt(r1) + ...` with rational `q` and
//! distinct squarefree radicands `r`.
//!
//! This is the closure of the rationals under the square roots that appear in
//! representative elements (e.g. `sqrt(2)/2`). Sign and inverse are exact.

use std::collections::BTreeMap;
use std::fmt;

use num::traits::{One, Signed, ToPrimitive, Zero};
use num::{BigInt, Integer};

use super::rational::{format_rational, to_f64, Rational};
use super::ring::{Coeff, CoeffDisplay};
use crate::error::Error;

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Surd {
    /// radicand -> coefficient; radicand 1 is the rational part
    terms: BTreeMap<u64, Rational>,
}

/// Splits `n` into `(s, r)` with `n = s^2 * r` and `r` squarefree.
fn square_split(mut n: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut r = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            r *= p;
        }
        p += 1;
    }
    r *= n;
    (s, r)
}

fn smallest_prime(n: u64) -> u64 {
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            return p;
        }
        p += 1;
    }
    n
}

impl Surd {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(q: Rational) -> Self {
        let mut s = Self::zero();
        s.add_term(1, q);
        s
    }

    /// `sqrt(q)` for a nonnegative rational with machine-sized parts.
    pub fn sqrt(q: &Rational) -> Result<Self, Error> {
        if q.is_negative() {
            return Err(Error::Domain(format!("sqrt of negative value {}", format_rational(q))));
        }
        if q.is_zero() {
            return Ok(Self::zero());
        }
        let too_big = || Error::Unsupported(format!("sqrt argument {} is too large", format_rational(q)));
        let n = q.numer().to_u64().ok_or_else(too_big)?;
        let d = q.denom().to_u64().ok_or_else(too_big)?;
        let nd = n.checked_mul(d).ok_or_else(too_big)?;
        // sqrt(n/d) = sqrt(n*d)/d
        let (s, r) = square_split(nd);
        let mut out = Self::zero();
        out.add_term(r, Rational::new(BigInt::from(s), BigInt::from(d)));
        Ok(out)
    }

    fn add_term(&mut self, r: u64, q: Rational) {
        if q.is_zero() {
            return;
        }
        let e = self.terms.entry(r).or_insert_with(Rational::zero);
        *e += q;
        if e.is_zero() {
            self.terms.remove(&r);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&1).cloned(),
            _ => None,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut s = self.clone();
        for (r, q) in &o.terms {
            s.add_term(*r, q.clone());
        }
        s
    }

    pub fn neg(&self) -> Self {
        Surd {
            terms: self.terms.iter().map(|(r, q)| (*r, -q)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut s = Self::zero();
        for (r1, q1) in &self.terms {
            for (r2, q2) in &o.terms {
                let g = r1.gcd(r2);
                let r = (r1 / g) * (r2 / g);
                s.add_term(r, q1 * q2 * Rational::from_integer(BigInt::from(g)));
            }
        }
        s
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let mut s = Self::zero();
        for (r, q) in &self.terms {
            s.add_term(*r, q * k);
        }
        s
    }

    /// Splits on prime `p`: `self = u + v*sqrt(p)` with `u`, `v` free of `p`.
    fn split(&self, p: u64) -> (Surd, Surd) {
        let mut u = Surd::zero();
        let mut v = Surd::zero();
        for (r, q) in &self.terms {
            if r % p == 0 {
                v.add_term(r / p, q.clone());
            } else {
                u.add_term(*r, q.clone());
            }
        }
        (u, v)
    }

    fn pivot_prime(&self) -> Option<u64> {
        self.terms.keys().find(|&&r| r > 1).map(|&r| smallest_prime(r))
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let Some(p) = self.pivot_prime() else {
            return match self.terms.get(&1) {
                Some(q) if q.is_positive() => 1,
                Some(_) => -1,
                None => 0,
            };
        };
        let (u, v) = self.split(p);
        let (su, sv) = (u.signum(), v.signum());
        if sv == 0 {
            return su;
        }
        if su == 0 || su == sv {
            return if su == 0 { sv } else { su };
        }
        // u and v*sqrt(p) have opposite signs; compare squares.
        let d = u.mul(&u).sub(&v.mul(&v).scale(&Rational::from_integer(BigInt::from(p))));
        su * d.signum()
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let Some(p) = self.pivot_prime() else {
            return Some(Surd::rational(self.terms[&1].recip()));
        };
        let (u, v) = self.split(p);
        let conj = u.sub(&v.mul(&Surd::sqrt(&Rational::from_integer(BigInt::from(p))).ok()?));
        let norm = u.mul(&u).sub(&v.mul(&v).scale(&Rational::from_integer(BigInt::from(p))));
        Some(conj.mul(&norm.inverse()?))
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(r, q)| to_f64(q) * (*r as f64).sqrt())
            .sum()
    }

    /// Integer power.
    pub fn powi(&self, e: i32) -> Option<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut r = Surd::rational(Rational::one());
        for _ in 0..e.unsigned_abs() {
            r = r.mul(&base);
        }
        Some(r)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (r, q)) in self.terms.iter().enumerate() {
            let a = q.abs();
            match (i, q.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            match (*r == 1, a.is_one()) {
                (true, _) => write!(f, "{}", format_rational(&a))?,
                (false, true) => write!(f, "sqrt({r})")?,
                (false, false) => write!(f, "{}*sqrt({r})", format_rational(&a))?,
            }
        }
        Ok(())
    }
}

impl Coeff for Surd {
    fn ring_zero() -> Self {
        Surd::zero()
    }
    fn ring_one() -> Self {
        Surd::rational(Rational::one())
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
        Surd::rational(q.clone())
    }
    fn display_parts(&self) -> CoeffDisplay {
        let single = self.terms.len() == 1;
        let negative = single && self.signum() < 0;
        let abs = if negative { self.neg() } else { self.clone() };
        let body = abs.to_string();
        CoeffDisplay {
            negative,
            is_unit: body == "1",
            body,
            atomic: single,
        }
    }
}
