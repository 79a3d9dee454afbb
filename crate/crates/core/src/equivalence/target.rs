//! Target families: coefficient vectors given by expressions in free
//! parameters, with exact surd coefficients.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::expr::Expr;
use crate::invariants::eval_surd_poly;
use crate::symkernel::{format_rational, MultiPoly, Rational, Surd, Vars};

#[derive(Clone, Debug)]
pub struct TargetFamily {
    pub name: String,
    pub params: Vec<String>,
    pub coeffs: Vec<String>,
    /// optional sampling/search box per parameter
    pub domain: BTreeMap<String, [f64; 2]>,
    vars: Vars,
    polys: Vec<MultiPoly<Surd>>,
    /// `grads[k][m] = d t_k / d p_m`
    grads: Vec<Vec<MultiPoly<Surd>>>,
}

impl PartialEq for TargetFamily {
    fn eq(&self, o: &Self) -> bool {
        self.params == o.params && self.polys == o.polys
    }
}

impl TargetFamily {
    pub fn new(name: &str, coeffs: &[String], params: &[String]) -> Result<Self, Error> {
        let vars: Vars = params.to_vec().into();
        let mut polys = Vec::with_capacity(coeffs.len());
        for (k, c) in coeffs.iter().enumerate() {
            let e = Expr::parse(c).map_err(|e| Error::Field {
                field: format!("coeffs[{k}]"),
                message: e.to_string(),
            })?;
            polys.push(e.to_surd_poly(&vars).map_err(|e| Error::Field {
                field: format!("coeffs[{k}]"),
                message: e.to_string(),
            })?);
        }
        let grads = polys
            .iter()
            .map(|p| (0..params.len()).map(|m| p.partial(m)).collect())
            .collect();
        Ok(TargetFamily {
            name: name.to_string(),
            params: params.to_vec(),
            coeffs: coeffs.to_vec(),
            domain: BTreeMap::new(),
            vars,
            polys,
            grads,
        })
    }

    pub fn fixed(name: &str, v: &[Rational]) -> Self {
        let coeffs: Vec<String> = v.iter().map(format_rational).collect();
        Self::new(name, &coeffs, &[]).expect("rational literals parse")
    }

    /// Parses `"a1,...,an"` (a fixed element, no parameters).
    pub fn parse_vector(name: &str, s: &str, n: usize) -> Result<Self, Error> {
        let parts = crate::expr::split_top_level(s);
        if parts.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: parts.len(),
            });
        }
        Self::new(name, &parts, &[])
    }

    pub fn with_domain(mut self, domain: BTreeMap<String, [f64; 2]>) -> Result<Self, Error> {
        for (k, [lo, hi]) in &domain {
            if !self.params.contains(k) {
                return Err(Error::Field {
                    field: format!("param_domain.{k}"),
                    message: "not a declared parameter".into(),
                });
            }
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::Field {
                    field: format!("param_domain.{k}"),
                    message: "expected [lo, hi] with lo <= hi".into(),
                });
            }
        }
        self.domain = domain;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.polys.len()
    }

    pub fn nparams(&self) -> usize {
        self.params.len()
    }

    pub fn is_parametric(&self) -> bool {
        !self.params.is_empty()
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn symbolic(&self) -> &[MultiPoly<Surd>] {
        &self.polys
    }

    /// Search/sampling interval for parameter `m`.
    pub fn range(&self, m: usize, default: [f64; 2]) -> [f64; 2] {
        self.domain.get(&self.params[m]).copied().unwrap_or(default)
    }

    pub fn eval(&self, p: &[f64]) -> Vec<f64> {
        self.polys.iter().map(|q| q.eval_f64(p, Surd::to_f64)).collect()
    }

    pub fn jacobian(&self, p: &[f64]) -> Vec<Vec<f64>> {
        self.grads
            .iter()
            .map(|row| row.iter().map(|q| q.eval_f64(p, Surd::to_f64)).collect())
            .collect()
    }

    pub fn exact(&self, p: &[Surd]) -> Option<Vec<Surd>> {
        self.polys.iter().map(|q| eval_surd_poly(q, p)).collect()
    }

    /// The fixed element at rational parameter values.
    pub fn instantiate(&self, p: &[Rational]) -> Result<TargetFamily, Error> {
        if p.len() != self.nparams() {
            return Err(Error::Dimension {
                expected: self.nparams(),
                found: p.len(),
            });
        }
        let point: Vec<Surd> = p.iter().cloned().map(Surd::rational).collect();
        let v = self.exact(&point).expect("polynomial");
        let coeffs: Vec<String> = v.iter().map(|s| s.to_string()).collect();
        let label = if p.is_empty() {
            self.name.clone()
        } else {
            let a: Vec<String> = self
                .params
                .iter()
                .zip(p)
                .map(|(k, v)| format!("{k}={}", format_rational(v)))
                .collect();
            format!("{}({})", self.name, a.join(","))
        };
        Self::new(&label, &coeffs, &[])
    }

    pub fn is_zero_vector(&self) -> bool {
        self.polys.iter().all(|p| p.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::rational::int;

    #[test]
    fn family_eval_and_jacobian() {
        let t = TargetFamily::new("w2", &["0".into(), "1".into(), "beta".into()], &["beta".into()]).unwrap();
        assert_eq!(t.eval(&[3.0]), vec![0.0, 1.0, 3.0]);
        assert_eq!(t.jacobian(&[3.0]), vec![vec![0.0], vec![0.0], vec![1.0]]);
        let f = t.instantiate(&[int(2)]).unwrap();
        assert_eq!(f.coeffs, vec!["0", "1", "2"]);
        assert_eq!(f.name, "w2(beta=2)");
    }

    #[test]
    fn surd_coefficients() {
        let t = TargetFamily::new("w3", &["1".into(), "sqrt(2)/2".into()], &[]).unwrap();
        let v = t.eval(&[]);
        assert!((v[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(TargetFamily::new("bad", &["sqrt(x)".into()], &["x".into()]).is_err());
    }
}
