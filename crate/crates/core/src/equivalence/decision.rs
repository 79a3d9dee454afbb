//! Three-stage equivalence decision: exact certificate, witness search,
//! otherwise Unknown.

use serde::Serialize;

use super::certificate::{Certificate, CertificateContext, SymPoint};
use super::solver::{norm, ChainProduct, WitnessProblem};
use super::target::TargetFamily;
use crate::adjoint::{adjoint_chain, AdjointChain, CompiledMatrix};
use crate::error::Error;
use crate::fixtures::preferred_order;
use crate::liealg::LieAlgebra;
use crate::symkernel::{ExactParam, Matrix, Rational, Surd};

#[derive(Clone, Debug, PartialEq)]
pub struct EquivOptions {
    pub allow_scale: bool,
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for EquivOptions {
    fn default() -> Self {
        EquivOptions {
            allow_scale: true,
            tol: 1e-9,
            restarts: 64,
            seed: 0,
        }
    }
}

impl EquivOptions {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidOptions(format!("tol must be positive, got {}", self.tol)));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidOptions("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "decision", rename_all = "snake_case")]
pub enum Decision {
    Equivalent {
        epsilon: Vec<f64>,
        scale: f64,
        params: Vec<f64>,
        residual: f64,
        restart: usize,
        /// copies of the chain in the witness (`epsilon` has `n` entries per copy)
        chain_copies: usize,
    },
    Inequivalent {
        certificate: Certificate,
    },
    Unknown {
        /// lowest `max(|a A - c t|, |a A / c - t|)` reached by any restart
        best_residual: f64,
        restarts: usize,
    },
}

impl Decision {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Decision::Equivalent { .. })
    }

    pub fn is_inequivalent(&self) -> bool {
        matches!(self, Decision::Inequivalent { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Decision::Equivalent { .. } => "equivalent",
            Decision::Inequivalent { .. } => "inequivalent",
            Decision::Unknown { .. } => "unknown",
        }
    }
}

fn is_nilpotent(m: &Matrix<Rational>) -> bool {
    let mut p = m.clone();
    for _ in 1..m.nrows() {
        p = p.try_mul(m).expect("square");
    }
    p.is_zero()
}

/// Everything needed to decide many pairs in one algebra: the compiled
/// chain and the precomputed certificate levels.
pub struct Engine {
    pub alg: LieAlgebra,
    pub chain: AdjointChain,
    compiled: CompiledMatrix,
    spectral: Vec<bool>,
    pub context: CertificateContext,
}

impl Engine {
    pub fn new(alg: &LieAlgebra, order: &[usize], degree: u32) -> Result<Self, Error> {
        let n = alg.dim();
        let chain = adjoint_chain(alg, order)?;
        let compiled = CompiledMatrix::new(&chain.entries, n);
        let spectral = (0..n)
            .map(|i| alg.ad_matrix(i + 1).map(|m| !is_nilpotent(&m)))
            .collect::<Result<_, _>>()?;
        Ok(Engine {
            alg: alg.clone(),
            chain,
            compiled,
            spectral,
            context: CertificateContext::new(alg, degree)?,
        })
    }

    /// Preferred chain order and invariant degree bound `n + 1`.
    pub fn for_algebra(alg: &LieAlgebra) -> Result<Self, Error> {
        Self::new(alg, &preferred_order(alg), alg.dim() as u32 + 1)
    }

    pub fn compiled(&self) -> &CompiledMatrix {
        &self.compiled
    }

    pub fn spectral(&self) -> &[bool] {
        &self.spectral
    }

    fn check_inputs(&self, a: &[Surd], target: &TargetFamily) -> Result<(), Error> {
        let n = self.alg.dim();
        for len in [a.len(), target.dim()] {
            if len != n {
                return Err(Error::Dimension { expected: n, found: len });
            }
        }
        if a.iter().all(Surd::is_zero) {
            return Err(Error::InvalidOptions("source element must be nonzero".into()));
        }
        if target.is_zero_vector() {
            return Err(Error::InvalidOptions("target element must be nonzero".into()));
        }
        Ok(())
    }

    pub fn certify(&self, a: &[Surd], target: &TargetFamily, allow_scale: bool) -> Option<Certificate> {
        self.context
            .certify(&SymPoint::fixed(a), &SymPoint::family(target), allow_scale)
    }

    pub fn problem<'a>(
        &'a self,
        a: &[Surd],
        target: &'a TargetFamily,
        allow_scale: bool,
        copies: usize,
    ) -> WitnessProblem<'a> {
        WitnessProblem {
            chain: ChainProduct {
                factor: &self.compiled,
                copies,
            },
            source: a.iter().map(Surd::to_f64).collect(),
            target,
            allow_scale,
            spectral: &self.spectral,
        }
    }

    pub fn decide(&self, a: &[Surd], target: &TargetFamily, opts: &EquivOptions) -> Result<Decision, Error> {
        opts.validate()?;
        self.check_inputs(a, target)?;
        if let Some(certificate) = self.certify(a, target, opts.allow_scale) {
            return Ok(Decision::Inequivalent { certificate });
        }
        self.search(a, target, opts)
    }

    /// Witness search only: one chain first, then a product of two chains
    /// for group elements a single ordered product cannot express.
    pub fn search(&self, a: &[Surd], target: &TargetFamily, opts: &EquivOptions) -> Result<Decision, Error> {
        let mut best_residual = f64::INFINITY;
        for copies in [1, 2] {
            let problem = self.problem(a, target, opts.allow_scale, copies);
            let seed = if copies == 1 { opts.seed } else { opts.seed ^ 0x9e3779b97f4a7c15 };
            match problem.search(opts.tol, opts.restarts, seed) {
                Ok((restart, s)) => {
                    let t = target.eval(&s.params);
                    let residual = self.verify_witness(&problem.source, &t, &s.epsilon, s.scale);
                    return Ok(Decision::Equivalent {
                        epsilon: s.epsilon,
                        scale: s.scale,
                        params: s.params,
                        residual,
                        restart,
                        chain_copies: copies,
                    });
                }
                Err(b) => best_residual = best_residual.min(b),
            }
        }
        Ok(Decision::Unknown {
            best_residual,
            restarts: 2 * opts.restarts,
        })
    }

    /// `|a A(e) - c t|` in floating point; `eps` may hold several chain
    /// copies back to back.
    pub fn verify_witness(&self, a: &[f64], t: &[f64], eps: &[f64], c: f64) -> f64 {
        let n = a.len();
        let chain = ChainProduct {
            factor: &self.compiled,
            copies: (eps.len() / n).max(1),
        };
        let m = chain.eval(eps);
        let r: Vec<f64> = (0..n)
            .map(|k| (0..n).map(|i| a[i] * m[i * n + k]).sum::<f64>() - c * t[k])
            .collect();
        norm(&r)
    }

    /// Exact residual vector `a A(e) - c t`, or `None` when an exponential
    /// is irrational at `e`.
    pub fn verify_witness_exact(
        &self,
        a: &[Rational],
        t: &[Rational],
        eps: &[ExactParam],
        c: &Rational,
    ) -> Result<Option<Vec<Rational>>, Error> {
        let n = self.alg.dim();
        if t.len() != n {
            return Err(Error::Dimension { expected: n, found: t.len() });
        }
        Ok(self
            .chain
            .apply_exact(a, eps)?
            .map(|v| v.iter().zip(t).map(|(x, y)| x - c * y).collect()))
    }
}

/// One-shot decision with a freshly built [`Engine`].
pub fn decide_equivalence(
    alg: &LieAlgebra,
    a: &[Surd],
    target: &TargetFamily,
    opts: &EquivOptions,
) -> Result<Decision, Error> {
    Engine::for_algebra(alg)?.decide(a, target, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::invariants::to_surd;
    use crate::symkernel::rational::int;

    fn v(x: &[i64]) -> Vec<Surd> {
        to_surd(&x.iter().map(|&q| int(q)).collect::<Vec<_>>())
    }

    #[test]
    fn kdv_generic_element_reaches_v4() {
        let e = Engine::for_algebra(&fixtures::kdv()).unwrap();
        let t = TargetFamily::parse_vector("v4", "0,0,0,1", 4).unwrap();
        let d = e.decide(&v(&[3, -2, 5, 2]), &t, &EquivOptions::default()).unwrap();
        assert!(d.is_equivalent(), "{d:?}");
    }

    #[test]
    fn minus_v3_is_v3() {
        let e = Engine::for_algebra(&fixtures::kdv()).unwrap();
        let t = TargetFamily::parse_vector("v3", "0,0,1,0", 4).unwrap();
        let d = e.decide(&v(&[0, 0, -1, 0]), &t, &EquivOptions::default()).unwrap();
        assert!(d.is_equivalent(), "{d:?}");
    }

    #[test]
    fn abelian_rescaling_needs_scale() {
        let alg = LieAlgebra::abelian(3);
        let e = Engine::for_algebra(&alg).unwrap();
        let t = TargetFamily::parse_vector("2a", "2,4,6", 3).unwrap();
        let a = v(&[1, 2, 3]);
        let no = EquivOptions {
            allow_scale: false,
            ..Default::default()
        };
        assert!(!e.decide(&a, &t, &no).unwrap().is_equivalent());
        assert!(e.decide(&a, &t, &EquivOptions::default()).unwrap().is_equivalent());
    }

    #[test]
    fn rejects_bad_options() {
        let e = Engine::for_algebra(&LieAlgebra::abelian(2)).unwrap();
        let t = TargetFamily::parse_vector("t", "1,0", 2).unwrap();
        let bad = EquivOptions {
            tol: 0.0,
            ..Default::default()
        };
        assert!(e.decide(&v(&[1, 0]), &t, &bad).is_err());
        assert!(e.decide(&v(&[0, 0]), &t, &EquivOptions::default()).is_err());
    }

    #[test]
    fn exact_identity_witness() {
        let e = Engine::for_algebra(&fixtures::kdv()).unwrap();
        let a: Vec<Rational> = [1, 2, 3, 4].iter().map(|&x| int(x)).collect();
        let zero = vec![ExactParam::Rational(int(0)); 4];
        let r = e.verify_witness_exact(&a, &a, &zero, &int(1)).unwrap().unwrap();
        assert!(r.iter().all(|x| *x == int(0)));
    }
}
