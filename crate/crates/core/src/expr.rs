//! A small expression language for coefficients, constraints and closed-form
//! witness formulas.
//!
//! Grammar: numbers (integer or decimal), identifiers, `+ - * /`, integer
//! powers `^`, parentheses and the functions `sqrt`, `ln`, `exp`.

use std::collections::BTreeSet;
use std::fmt;

use num::traits::{One, Signed, Zero};

use crate::error::Error;
use crate::symkernel::rational::{format_rational, parse_rational, to_f64, Rational};
use crate::symkernel::{Monomial, MultiPoly, Surd, Vars};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Ln,
    Exp,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>, Error> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            out.push(Tok::Num(cs[st..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character '{c}' in '{s}'")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} in '{}'", self.src))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr, Error> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, Error> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, Error> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, Error> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let e: i32 = match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                n.parse().map_err(|_| self.err("exponent must be an integer"))?
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let neg_inner = self.eat('-');
                let v: i32 = match self.peek().cloned() {
                    Some(Tok::Num(n)) => {
                        self.pos += 1;
                        n.parse().map_err(|_| self.err("exponent must be an integer"))?
                    }
                    _ => return Err(self.err("exponent must be an integer")),
                };
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                if neg_inner {
                    -v
                } else {
                    v
                }
            }
            _ => return Err(self.err("exponent must be an integer")),
        };
        Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }))
    }

    fn atom(&mut self) -> Result<Expr, Error> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(parse_rational(&n)?))
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                let func = match id.as_str() {
                    "sqrt" => Some(Func::Sqrt),
                    "ln" | "log" => Some(Func::Ln),
                    "exp" => Some(Func::Exp),
                    _ => None,
                };
                match func {
                    Some(f) if self.eat('(') => {
                        let arg = self.sum()?;
                        if !self.eat(')') {
                            return Err(self.err("expected ')'"));
                        }
                        Ok(Expr::Call(f, Box::new(arg)))
                    }
                    Some(_) => Err(self.err(&format!("function '{id}' needs an argument"))),
                    None => Ok(Expr::Var(id)),
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(t) => Err(self.err(&format!("unexpected token {t:?}"))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Splits at commas that are not nested inside parentheses.
pub fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    out.push(cur.trim().to_string());
    out
}

impl Expr {
    pub fn parse(s: &str) -> Result<Expr, Error> {
        let toks = tokenize(s)?;
        let mut p = Parser { toks, pos: 0, src: s };
        let e = p.sum()?;
        if p.pos != p.toks.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }

    pub fn parse_list(s: &str) -> Result<Vec<Expr>, Error> {
        split_top_level(s).iter().map(|t| Expr::parse(t)).collect()
    }

    pub fn num(q: Rational) -> Expr {
        Expr::Num(q)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut s = BTreeSet::new();
        self.collect_vars(&mut s);
        s
    }

    fn collect_vars(&self, s: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => {
                s.insert(v.clone());
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.collect_vars(s),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(s);
                b.collect_vars(s);
            }
        }
    }

    /// Floating evaluation; `env` resolves variables.
    pub fn eval_f64(&self, env: &dyn Fn(&str) -> Option<f64>) -> Result<f64, Error> {
        Ok(match self {
            Expr::Num(q) => to_f64(q),
            Expr::Var(v) => env(v).ok_or_else(|| Error::MissingAssignment(v.clone()))?,
            Expr::Neg(a) => -a.eval_f64(env)?,
            Expr::Add(a, b) => a.eval_f64(env)? + b.eval_f64(env)?,
            Expr::Sub(a, b) => a.eval_f64(env)? - b.eval_f64(env)?,
            Expr::Mul(a, b) => a.eval_f64(env)? * b.eval_f64(env)?,
            Expr::Div(a, b) => {
                let d = b.eval_f64(env)?;
                if d == 0.0 {
                    return Err(Error::Domain(format!("division by zero in {self}")));
                }
                a.eval_f64(env)? / d
            }
            Expr::Pow(a, e) => {
                let x = a.eval_f64(env)?;
                if x == 0.0 && *e < 0 {
                    return Err(Error::Domain(format!("negative power of zero in {self}")));
                }
                x.powi(*e)
            }
            Expr::Call(f, a) => {
                let x = a.eval_f64(env)?;
                match f {
                    Func::Sqrt if x < 0.0 => return Err(Error::Domain(format!("sqrt of negative value in {self}"))),
                    Func::Sqrt => x.sqrt(),
                    Func::Ln if x <= 0.0 => return Err(Error::Domain(format!("ln of non-positive value in {self}"))),
                    Func::Ln => x.ln(),
                    Func::Exp => x.exp(),
                }
            }
        })
    }

    /// Exact value as a polynomial in `vars` with surd coefficients.
    /// Division is allowed only by nonzero constants; square roots only of
    /// nonnegative rational constants.
    pub fn to_surd_poly(&self, vars: &Vars) -> Result<MultiPoly<Surd>, Error> {
        let not_exact = |why: &str| Error::NotExact(format!("{why} in {self}"));
        Ok(match self {
            Expr::Num(q) => MultiPoly::constant(vars, Surd::rational(q.clone())),
            Expr::Var(v) => {
                let i = vars
                    .iter()
                    .position(|n| n == v)
                    .ok_or_else(|| Error::MissingAssignment(v.clone()))?;
                MultiPoly::var(vars, i)
            }
            Expr::Neg(a) => a.to_surd_poly(vars)?.neg(),
            Expr::Add(a, b) => &a.to_surd_poly(vars)? + &b.to_surd_poly(vars)?,
            Expr::Sub(a, b) => &a.to_surd_poly(vars)? - &b.to_surd_poly(vars)?,
            Expr::Mul(a, b) => &a.to_surd_poly(vars)? * &b.to_surd_poly(vars)?,
            Expr::Div(a, b) => {
                let d = b
                    .to_surd_poly(vars)?
                    .constant_value()
                    .ok_or_else(|| not_exact("division by a non-constant"))?;
                let inv = d
                    .inverse()
                    .ok_or_else(|| Error::Domain(format!("division by zero in {self}")))?;
                a.to_surd_poly(vars)?.scale(&inv)
            }
            Expr::Pow(a, e) => {
                let base = a.to_surd_poly(vars)?;
                if *e >= 0 {
                    base.pow(*e as u32)
                } else {
                    let c = base
                        .constant_value()
                        .ok_or_else(|| not_exact("negative power of a non-constant"))?;
                    let v = c
                        .powi(*e)
                        .ok_or_else(|| Error::Domain(format!("negative power of zero in {self}")))?;
                    MultiPoly::constant(vars, v)
                }
            }
            Expr::Call(Func::Sqrt, a) => {
                let q = a
                    .to_surd_poly(vars)?
                    .constant_value()
                    .and_then(|c| c.as_rational())
                    .ok_or_else(|| not_exact("sqrt of a non-rational argument"))?;
                MultiPoly::constant(vars, Surd::sqrt(&q)?)
            }
            Expr::Call(_, _) => return Err(not_exact("transcendental function")),
        })
    }

    /// Exact Laurent polynomial in `vars` with rational coefficients.
    /// Division is allowed by nonzero constants and by single monomials.
    pub fn to_laurent(&self, vars: &Vars) -> Result<MultiPoly<Rational>, Error> {
        let not_exact = |why: &str| Error::NotExact(format!("{why} in {self}"));
        Ok(match self {
            Expr::Num(q) => MultiPoly::constant(vars, q.clone()),
            Expr::Var(v) => {
                let i = vars
                    .iter()
                    .position(|n| n == v)
                    .ok_or_else(|| Error::Parse(format!("unknown variable '{v}'")))?;
                MultiPoly::var(vars, i)
            }
            Expr::Neg(a) => a.to_laurent(vars)?.neg(),
            Expr::Add(a, b) => &a.to_laurent(vars)? + &b.to_laurent(vars)?,
            Expr::Sub(a, b) => &a.to_laurent(vars)? - &b.to_laurent(vars)?,
            Expr::Mul(a, b) => &a.to_laurent(vars)? * &b.to_laurent(vars)?,
            Expr::Div(a, b) => {
                let inv = invert_laurent_monomial(&b.to_laurent(vars)?)
                    .ok_or_else(|| not_exact("division by a non-monomial"))?;
                &a.to_laurent(vars)? * &inv
            }
            Expr::Pow(a, e) => {
                let base = a.to_laurent(vars)?;
                if *e >= 0 {
                    base.pow(*e as u32)
                } else {
                    invert_laurent_monomial(&base)
                        .ok_or_else(|| not_exact("negative power of a non-monomial"))?
                        .pow(e.unsigned_abs())
                }
            }
            Expr::Call(Func::Sqrt, a) => {
                let q = a
                    .to_laurent(vars)?
                    .constant_value()
                    .ok_or_else(|| not_exact("sqrt of a non-constant"))?;
                let s = Surd::sqrt(&q)?;
                MultiPoly::constant(vars, s.as_rational().ok_or_else(|| not_exact("irrational square root"))?)
            }
            Expr::Call(_, _) => return Err(not_exact("transcendental function")),
        })
    }
}

fn invert_laurent_monomial(p: &MultiPoly<Rational>) -> Option<MultiPoly<Rational>> {
    if p.nterms() != 1 {
        return None;
    }
    let (m, c) = p.terms().next()?;
    if c.is_zero() {
        return None;
    }
    Some(MultiPoly::monomial(
        p.vars(),
        Monomial(m.0.iter().map(|e| -e).collect()),
        Rational::one() / c,
    ))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn prec(e: &Expr) -> u8 {
            match e {
                Expr::Add(..) | Expr::Sub(..) => 1,
                Expr::Mul(..) | Expr::Div(..) => 2,
                Expr::Neg(..) => 3,
                Expr::Pow(..) => 4,
                Expr::Num(q) if q.is_negative() || !q.denom().is_one() => 2,
                _ => 5,
            }
        }
        fn wrap(e: &Expr, min: u8) -> String {
            if prec(e) < min {
                format!("({e})")
            } else {
                e.to_string()
            }
        }
        match self {
            Expr::Num(q) => write!(f, "{}", format_rational(q)),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(a) => write!(f, "-{}", wrap(a, 3)),
            Expr::Add(a, b) => write!(f, "{} + {}", a, wrap(b, 2)),
            Expr::Sub(a, b) => write!(f, "{} - {}", a, wrap(b, 2)),
            Expr::Mul(a, b) => write!(f, "{}*{}", wrap(a, 2), wrap(b, 3)),
            Expr::Div(a, b) => write!(f, "{}/{}", wrap(a, 2), wrap(b, 3)),
            Expr::Pow(a, e) => write!(f, "{}^{}", wrap(a, 5), e),
            Expr::Call(func, a) => {
                let name = match func {
                    Func::Sqrt => "sqrt",
                    Func::Ln => "ln",
                    Func::Exp => "exp",
                };
                write!(f, "{name}({a})")
            }
        }
    }
}
