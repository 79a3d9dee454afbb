//! Dense univariate polynomials over the rationals, enough for minimal
//! polynomials and their rational roots.

use num::traits::{One, Signed, ToPrimitive, Zero};
use num::{BigInt, Integer};

use super::rational::Rational;
use crate::error::Error;

/// Coefficients in ascending order, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UPoly(Vec<Rational>);

impl UPoly {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn zero() -> Self {
        UPoly(vec![])
    }

    pub fn one() -> Self {
        UPoly(vec![Rational::one()])
    }

    /// `x - r`
    pub fn linear(r: &Rational) -> Self {
        UPoly(vec![-r, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.0.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        UPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        UPoly::new(self.0.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UPoly::new(c)
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.0[dd].clone();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = &r[i] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.0.iter().enumerate() {
                r[i - dd + j] -= &c * dj;
            }
            q[i - dd] = c;
        }
        (UPoly::new(q), UPoly::new(r))
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Coefficients of `p(y + r)` in powers of `y`.
    pub fn taylor_at(&self, r: &Rational) -> Vec<Rational> {
        let mut c = self.0.clone();
        let n = c.len();
        // repeated synthetic division
        for k in 0..n {
            for i in (k..n - 1).rev() {
                let t = &c[i + 1] * r;
                c[i] += t;
            }
        }
        c
    }

    /// Inverse of `self` modulo `(x - r)^m`, assuming `self(r) != 0`.
    pub fn inverse_mod_power(&self, r: &Rational, m: usize) -> UPoly {
        let t = self.taylor_at(r);
        let mut inv = vec![Rational::zero(); m];
        inv[0] = t[0].recip();
        for k in 1..m {
            let mut s = Rational::zero();
            for j in 1..=k.min(t.len() - 1) {
                s += &t[j] * &inv[k - j];
            }
            inv[k] = -s * &inv[0];
        }
        // back to powers of x
        let shift = UPoly::linear(r);
        let mut acc = UPoly::zero();
        let mut pw = UPoly::one();
        for c in inv {
            acc = acc.add(&pw.scale(&c));
            pw = pw.mul(&shift);
        }
        acc
    }

    /// All rational roots with multiplicities, plus the part without rational roots.
    pub fn rational_roots(&self) -> Result<(Vec<(Rational, usize)>, UPoly), Error> {
        let mut p = self.clone();
        let mut roots = Vec::new();
        if p.is_zero() {
            return Ok((roots, p));
        }
        let mut zero_mult = 0;
        while p.0.len() > 1 && p.0[0].is_zero() {
            p.0.remove(0);
            zero_mult += 1;
        }
        if zero_mult > 0 {
            roots.push((Rational::zero(), zero_mult));
        }
        if p.degree() == Some(0) {
            return Ok((roots, p));
        }
        let ints = p.integer_coeffs();
        let lead = ints.last().unwrap().abs();
        let trail = ints[0].abs();
        let ps = divisors(&trail)?;
        let qs = divisors(&lead)?;
        let mut cands: Vec<Rational> = Vec::new();
        for a in &ps {
            for b in &qs {
                let r = Rational::new(a.clone(), b.clone());
                for s in [r.clone(), -r] {
                    if !cands.contains(&s) {
                        cands.push(s);
                    }
                }
            }
        }
        cands.sort();
        for r in cands {
            let mut m = 0;
            while p.degree().unwrap_or(0) >= 1 && p.eval(&r).is_zero() {
                p = p.divrem(&UPoly::linear(&r)).0;
                m += 1;
            }
            if m > 0 {
                roots.push((r, m));
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        Ok((roots, p))
    }

    fn integer_coeffs(&self) -> Vec<BigInt> {
        let mut l = BigInt::one();
        for c in &self.0 {
            l = l.lcm(c.denom());
        }
        self.0.iter().map(|c| c.numer() * (&l / c.denom())).collect()
    }

    pub fn to_display(&self, var: &str) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let a = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            let body = match (i, a.is_one()) {
                (0, _) => super::rational::format_rational(&a),
                (1, true) => var.to_string(),
                (1, false) => format!("{}*{var}", super::rational::format_rational(&a)),
                (_, true) => format!("{var}^{i}"),
                (_, false) => format!("{}*{var}^{i}", super::rational::format_rational(&a)),
            };
            parts.push(format!("{sign} {body}"));
        }
        if parts.is_empty() {
            return "0".into();
        }
        let s = parts.join(" ");
        s.strip_prefix("+ ").map(str::to_string).unwrap_or_else(|| format!("-{}", &s[2..]))
    }
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>, Error> {
    let n = n
        .to_u64()
        .ok_or_else(|| Error::Unsupported("coefficient too large for rational root search".into()))?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d != n / d {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Ok(out)
}
