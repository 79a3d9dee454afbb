//! First-order operators `D_j = sum_i Theta_i^(j) d/da_i` whose common kernel
//! is the ring of invariants, and the charts (substitutions) they can be
//! restricted to.

use std::fmt;

use num::traits::Zero;

use crate::error::Error;
use crate::expr::Expr;
use crate::liealg::LieAlgebra;
use crate::symkernel::poly::{indexed_vars, MultiPoly, Vars};
use crate::symkernel::rational::Rational;

/// `D_j` for one generator: `theta[i]` is the linear form `Theta_i` as a
/// coefficient vector over `a_1..a_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantOperator {
    /// 1-based generator index
    pub index: usize,
    pub theta: Vec<Vec<Rational>>,
}

pub fn coefficient_vars(n: usize) -> Vars {
    indexed_vars("a", n)
}

/// One operator per generator; zero operators are kept.
pub fn derive_operators(alg: &LieAlgebra) -> Vec<InvariantOperator> {
    let n = alg.dim();
    (0..n)
        .map(|j| InvariantOperator {
            index: j + 1,
            theta: (0..n)
                .map(|i| (0..n).map(|k| alg.structure_constant(j, k, i).clone()).collect())
                .collect(),
        })
        .collect()
}

impl InvariantOperator {
    pub fn is_zero(&self) -> bool {
        self.theta.iter().all(|f| f.iter().all(Zero::is_zero))
    }

    pub fn theta_poly(&self, vars: &Vars, i: usize) -> MultiPoly<Rational> {
        let n = vars.len();
        MultiPoly::from_terms(
            vars,
            self.theta[i]
                .iter()
                .enumerate()
                .map(|(k, q)| (crate::symkernel::Monomial::var(n, k), q.clone())),
        )
    }

    pub fn apply(&self, p: &MultiPoly<Rational>) -> MultiPoly<Rational> {
        let vars = p.vars().clone();
        let mut acc = MultiPoly::zero(&vars);
        for i in 0..vars.len() {
            if !p.uses_var(i) {
                continue;
            }
            let t = self.theta_poly(&vars, i);
            if t.is_zero() {
                continue;
            }
            acc = &acc + &(&t * &p.partial(i));
        }
        acc
    }
}

impl fmt::Display for InvariantOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.theta.len();
        let vars = coefficient_vars(n);
        let mut parts = Vec::new();
        for i in 0..n {
            let t = self.theta_poly(&vars, i);
            if t.is_zero() {
                continue;
            }
            let s = t.to_string();
            if t.nterms() == 1 {
                parts.push(format!("{s}*d/da{}", i + 1));
            } else {
                parts.push(format!("({s})*d/da{}", i + 1));
            }
        }
        if parts.is_empty() {
            write!(f, "D{} = 0", self.index)
        } else {
            write!(f, "D{} = {}", self.index, parts.join(" + ").replace("+ -", "- "))
        }
    }
}

/// A chart: coordinates `a_i` replaced by Laurent polynomials in the
/// remaining (free) coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub vars: Vars,
    /// `(index, value)`, values free of substituted variables
    pub subs: Vec<(usize, MultiPoly<Rational>)>,
}

impl Chart {
    pub fn global(n: usize) -> Self {
        Chart {
            vars: coefficient_vars(n),
            subs: vec![],
        }
    }

    pub fn is_global(&self) -> bool {
        self.subs.is_empty()
    }

    /// Parses constraints such as `a4=0`, `a2=a4^2/(4*a6)`.
    /// Later constraints may refer to earlier substituted variables; they are
    /// resolved in order.
    pub fn parse(n: usize, constraints: &[String]) -> Result<Self, Error> {
        let mut chart = Self::global(n);
        for c in constraints {
            let (lhs, rhs) = c
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("constraint '{c}' must look like ai=expr")))?;
            let lhs = lhs.trim();
            let idx = chart
                .vars
                .iter()
                .position(|v| v == lhs)
                .ok_or_else(|| Error::Parse(format!("unknown coordinate '{lhs}' in constraint '{c}'")))?;
            let value = Expr::parse(rhs)?.to_laurent(&chart.vars)?;
            chart.push(idx, value)?;
        }
        Ok(chart)
    }

    pub fn push(&mut self, idx: usize, value: MultiPoly<Rational>) -> Result<(), Error> {
        if self.is_substituted(idx) {
            return Err(Error::Parse(format!("{} is constrained twice", self.vars[idx])));
        }
        let value = self.restrict(&value)?;
        if value.uses_var(idx) {
            return Err(Error::Parse(format!("constraint for {} refers to itself", self.vars[idx])));
        }
        // keep earlier values free of the new substituted variable
        for (_, v) in self.subs.iter_mut() {
            if v.uses_var(idx) {
                *v = v.substitute(idx, &value)?;
            }
        }
        self.subs.push((idx, value));
        Ok(())
    }

    pub fn is_substituted(&self, i: usize) -> bool {
        self.subs.iter().any(|(j, _)| *j == i)
    }

    pub fn free_vars(&self) -> Vec<usize> {
        (0..self.vars.len()).filter(|&i| !self.is_substituted(i)).collect()
    }

    /// Substitutes the chart into `p`.
    pub fn restrict(&self, p: &MultiPoly<Rational>) -> Result<MultiPoly<Rational>, Error> {
        let mut out = p.clone();
        for (i, v) in &self.subs {
            if out.uses_var(*i) {
                out = out.substitute(*i, v)?;
            }
        }
        Ok(out)
    }

    /// True when every substituted value is homogeneous of degree one (or
    /// zero), so restricted operators preserve degree.
    pub fn is_homogeneous(&self) -> bool {
        self.subs
            .iter()
            .all(|(_, v)| v.is_zero() || v.homogeneous_degree() == Some(1))
    }

    /// True when every value is an ordinary polynomial.
    pub fn is_polynomial(&self) -> bool {
        self.subs.iter().all(|(_, v)| v.is_polynomial())
    }

    /// Point of the full space from values of the free coordinates.
    pub fn lift_point(&self, free: &[Rational]) -> Result<Vec<Rational>, Error> {
        let n = self.vars.len();
        let fv = self.free_vars();
        if free.len() != fv.len() {
            return Err(Error::Dimension {
                expected: fv.len(),
                found: free.len(),
            });
        }
        let mut pt = vec![Rational::zero(); n];
        for (k, &i) in fv.iter().enumerate() {
            pt[i] = free[k].clone();
        }
        for (i, v) in &self.subs {
            pt[*i] = v.eval_rational(&pt)?;
        }
        Ok(pt)
    }

    pub fn describe(&self) -> Vec<String> {
        self.subs
            .iter()
            .map(|(i, v)| format!("{}={}", self.vars[*i], v))
            .collect()
    }
}

/// `D_j` restricted to a chart, acting on polynomials in the free coordinates.
#[derive(Clone, Debug)]
pub struct RestrictedOperator {
    pub index: usize,
    /// `(free coordinate, restricted Theta)` with nonzero Theta only
    pub parts: Vec<(usize, MultiPoly<Rational>)>,
}

impl RestrictedOperator {
    pub fn new(op: &InvariantOperator, chart: &Chart) -> Result<Self, Error> {
        let mut parts = Vec::new();
        for i in chart.free_vars() {
            let t = chart.restrict(&op.theta_poly(&chart.vars, i))?;
            if !t.is_zero() {
                parts.push((i, t));
            }
        }
        Ok(RestrictedOperator { index: op.index, parts })
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn apply(&self, p: &MultiPoly<Rational>) -> MultiPoly<Rational> {
        let mut acc = MultiPoly::zero(p.vars());
        for (i, t) in &self.parts {
            if p.uses_var(*i) {
                acc = &acc + &(t * &p.partial(*i));
            }
        }
        acc
    }
}

impl Chart {
    /// Whether every operator is tangent to the chart: for each substitution
    /// `a_i := s`, `D_j(a_i - s)` vanishes on the chart.
    pub fn is_tangent(&self, alg: &LieAlgebra) -> Result<bool, Error> {
        let ops = derive_operators(alg);
        for op in &ops {
            let r = RestrictedOperator::new(op, self)?;
            for (i, s) in &self.subs {
                let lhs = self.restrict(&op.theta_poly(&self.vars, *i))?;
                if lhs != r.apply(s) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

pub fn restricted_operators(alg: &LieAlgebra, chart: &Chart) -> Result<Vec<RestrictedOperator>, Error> {
    derive_operators(alg)
        .iter()
        .map(|op| RestrictedOperator::new(op, chart))
        .collect()
}
