//! Replay of hand-derived witness formulas on sampled points of a
//! parametric source family.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::solver::{norm, restart_seed};
use crate::adjoint::{adjoint_chain, CompiledMatrix};
use crate::error::Error;
use crate::expr::Expr;
use crate::fixtures::{builtin_algebra, preferred_order};
use crate::liealg::LieAlgebra;

const DEFAULT_RANGE: [f64; 2] = [-2.0, 2.0];
const MAX_DIAGNOSTICS: usize = 5;

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ClosedForm {
    pub name: String,
    pub algebra: String,
    pub params: Vec<String>,
    #[serde(default)]
    pub ranges: BTreeMap<String, [f64; 2]>,
    /// every filter expression must be positive at an admissible sample
    #[serde(default)]
    pub filters: Vec<String>,
    pub source: Vec<String>,
    /// `e1..en`, each a formula in the parameters and possibly other `e`s
    pub epsilon: BTreeMap<String, String>,
    pub target: Vec<String>,
    #[serde(default)]
    pub scale: Option<String>,
    /// chain order; the algebra's preferred order when absent
    #[serde(default)]
    pub order: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedFormReport {
    pub name: String,
    pub requested: usize,
    pub evaluated: usize,
    pub skipped: usize,
    pub max_residual: f64,
    pub diagnostics: Vec<String>,
    pub passed: bool,
}

struct Parsed {
    source: Vec<Expr>,
    eps: Vec<Expr>,
    target: Vec<Expr>,
    scale: Expr,
    filters: Vec<Expr>,
}

fn parse_field(field: String, s: &str) -> Result<Expr, Error> {
    Expr::parse(s).map_err(|e| Error::Field {
        field,
        message: e.to_string(),
    })
}

impl ClosedForm {
    pub fn list_from_json(text: &str) -> Result<Vec<ClosedForm>, Error> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn resolve_algebra(&self) -> Result<LieAlgebra, Error> {
        builtin_algebra(&self.algebra)
    }

    fn parse(&self, n: usize) -> Result<Parsed, Error> {
        for (what, len) in [("source", self.source.len()), ("target", self.target.len())] {
            if len != n {
                return Err(Error::Field {
                    field: format!("{}.{what}", self.name),
                    message: format!("expected {n} entries, found {len}"),
                });
            }
        }
        let list = |what: &str, v: &[String]| {
            v.iter()
                .enumerate()
                .map(|(k, s)| parse_field(format!("{}.{what}[{k}]", self.name), s))
                .collect::<Result<Vec<_>, _>>()
        };
        let mut eps = Vec::with_capacity(n);
        for i in 1..=n {
            let key = format!("e{i}");
            let s = self.epsilon.get(&key).ok_or_else(|| Error::Field {
                field: format!("{}.epsilon", self.name),
                message: format!("missing {key}"),
            })?;
            eps.push(parse_field(format!("{}.epsilon.{key}", self.name), s)?);
        }
        Ok(Parsed {
            source: list("source", &self.source)?,
            eps,
            target: list("target", &self.target)?,
            scale: parse_field(format!("{}.scale", self.name), self.scale.as_deref().unwrap_or("1"))?,
            filters: list("filters", &self.filters)?,
        })
    }

    /// Evaluates at `p`; `Ok(None)` when a filter rejects the point.
    fn residual_at(&self, parsed: &Parsed, chain: &CompiledMatrix, p: &[f64]) -> Result<Option<f64>, Error> {
        let n = parsed.source.len();
        let base = |name: &str| self.params.iter().position(|q| q == name).map(|i| p[i]);
        for f in &parsed.filters {
            if f.eval_f64(&base)? <= 0.0 {
                return Ok(None);
            }
        }
        // epsilon formulas may reference each other in any order
        let mut eps: Vec<Option<f64>> = vec![None; n];
        loop {
            let mut progress = false;
            let mut pending = None;
            for i in 0..n {
                if eps[i].is_some() {
                    continue;
                }
                let env = |name: &str| {
                    base(name).or_else(|| {
                        let k: usize = name.strip_prefix('e')?.parse().ok()?;
                        eps.get(k.checked_sub(1)?).copied().flatten()
                    })
                };
                match parsed.eps[i].eval_f64(&env) {
                    Ok(v) => {
                        eps[i] = Some(v);
                        progress = true;
                    }
                    Err(Error::MissingAssignment(v)) => pending = Some(v),
                    Err(e) => return Err(e),
                }
            }
            if eps.iter().all(Option::is_some) {
                break;
            }
            if !progress {
                return Err(Error::MissingAssignment(pending.unwrap_or_default()));
            }
        }
        let eps: Vec<f64> = eps.into_iter().map(Option::unwrap).collect();
        let env = |name: &str| {
            base(name).or_else(|| {
                let k: usize = name.strip_prefix('e')?.parse().ok()?;
                eps.get(k.checked_sub(1)?).copied()
            })
        };
        let a = parsed.source.iter().map(|e| e.eval_f64(&env)).collect::<Result<Vec<_>, _>>()?;
        let t = parsed.target.iter().map(|e| e.eval_f64(&env)).collect::<Result<Vec<_>, _>>()?;
        let c = parsed.scale.eval_f64(&env)?;
        let m = chain.eval(&eps);
        let r: Vec<f64> = (0..n)
            .map(|k| (0..n).map(|i| a[i] * m[i * n + k]).sum::<f64>() - c * t[k])
            .collect();
        Ok(Some(norm(&r)))
    }

    /// Samples admissible parameter points and reports the largest residual
    /// of `a A(e) - c t`. Points where a formula leaves its domain are
    /// skipped and resampled.
    pub fn check(&self, alg: &LieAlgebra, samples: usize, seed: u64, tol: f64) -> Result<ClosedFormReport, Error> {
        let n = alg.dim();
        let parsed = self.parse(n)?;
        let order = self.order.clone().unwrap_or_else(|| preferred_order(alg));
        let chain = CompiledMatrix::new(&adjoint_chain(alg, &order)?.entries, n);
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(seed, 0));
        let ranges: Vec<[f64; 2]> = self
            .params
            .iter()
            .map(|p| self.ranges.get(p).copied().unwrap_or(DEFAULT_RANGE))
            .collect();
        let mut report = ClosedFormReport {
            name: self.name.clone(),
            requested: samples,
            evaluated: 0,
            skipped: 0,
            max_residual: 0.0,
            diagnostics: vec![],
            passed: false,
        };
        let mut attempts = 0;
        while report.evaluated < samples && attempts < samples * 100 {
            attempts += 1;
            let p: Vec<f64> = ranges.iter().map(|[lo, hi]| rng.random_range(*lo..=*hi)).collect();
            match self.residual_at(&parsed, &chain, &p) {
                Ok(Some(r)) => {
                    report.evaluated += 1;
                    report.max_residual = report.max_residual.max(r);
                }
                Ok(None) => {}
                Err(Error::Domain(msg)) => {
                    report.skipped += 1;
                    if report.diagnostics.len() < MAX_DIAGNOSTICS {
                        report.diagnostics.push(format!("skipped sample {p:?}: {msg}"));
                    }
                }
                Err(e) => return Err(e),
            }
        }
        report.passed = report.evaluated == samples && report.max_residual < tol;
        Ok(report)
    }
}
