//! Witness search: Levenberg-Marquardt on `r = s a A(e) - t(p)` with the
//! analytic Jacobian of the compiled chain.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::target::TargetFamily;
use crate::adjoint::CompiledMatrix;

const MAX_ITER: usize = 200;
const CHUNK: usize = 16;

/// `A(e^(1)) A(e^(2)) ... A(e^(copies))`: one chain, or a product of copies
/// of it with independent parameters. A single ordered product of
/// one-parameter subgroups need not reach the whole group (for an `sl(2)`
/// part it misses `-I`); two copies do.
#[derive(Clone, Copy)]
pub struct ChainProduct<'a> {
    pub factor: &'a CompiledMatrix,
    pub copies: usize,
}

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x != 0.0 {
                for j in 0..n {
                    c[i * n + j] += x * b[k * n + j];
                }
            }
        }
    }
    c
}

impl ChainProduct<'_> {
    pub fn dim(&self) -> usize {
        self.factor.dims().0
    }

    pub fn nparams(&self) -> usize {
        self.factor.nparams() * self.copies
    }

    pub fn eval(&self, eps: &[f64]) -> Vec<f64> {
        let (n, p) = (self.dim(), self.factor.nparams());
        let mut m = self.factor.eval(&eps[..p]);
        for c in 1..self.copies {
            m = matmul(&m, &self.factor.eval(&eps[c * p..(c + 1) * p]), n);
        }
        m
    }

    /// Entrywise bound on the absolute values summed while evaluating.
    pub fn magnitude(&self, eps: &[f64]) -> Vec<f64> {
        let (n, p) = (self.dim(), self.factor.nparams());
        let mut m = self.factor.eval_magnitude(&eps[..p]);
        for c in 1..self.copies {
            m = matmul(&m, &self.factor.eval_magnitude(&eps[c * p..(c + 1) * p]), n);
        }
        m
    }

    pub fn eval_with_grad(&self, eps: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        if self.copies == 1 {
            return self.factor.eval_with_grad(eps);
        }
        let (n, p) = (self.dim(), self.factor.nparams());
        let parts: Vec<_> = (0..self.copies)
            .map(|c| self.factor.eval_with_grad(&eps[c * p..(c + 1) * p]))
            .collect();
        let ident: Vec<f64> = (0..n * n).map(|i| if i / n == i % n { 1.0 } else { 0.0 }).collect();
        // prefix[c] = M_0..M_{c-1}, suffix[c] = M_c+1..M_last
        let mut prefix = vec![ident.clone()];
        for part in &parts {
            let next = matmul(prefix.last().unwrap(), &part.0, n);
            prefix.push(next);
        }
        let mut suffix = vec![ident; self.copies];
        for c in (0..self.copies - 1).rev() {
            suffix[c] = matmul(&parts[c + 1].0, &suffix[c + 1], n);
        }
        let mut grad = Vec::with_capacity(self.nparams());
        for (c, part) in parts.iter().enumerate() {
            for g in &part.1 {
                grad.push(matmul(&matmul(&prefix[c], g, n), &suffix[c], n));
            }
        }
        (prefix.pop().unwrap(), grad)
    }
}

/// Least-squares problem for one (source, target) pair, posed in the
/// target's frame: `r = s a A(e) - t(p)` with `s = 1/c`. Unlike
/// `a A(e) - c t`, this has no spurious zero along `c -> 0`. Unknowns are
/// laid out as `[e (all chain copies), s (if scaling), p_1..p_m]`.
pub struct WitnessProblem<'a> {
    pub chain: ChainProduct<'a>,
    pub source: Vec<f64>,
    pub target: &'a TargetFamily,
    pub allow_scale: bool,
    /// generators whose `ad` is not nilpotent (sampled from a wider box)
    pub spectral: &'a [bool],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub epsilon: Vec<f64>,
    /// `c` in `a A(e) = c t`
    pub scale: f64,
    pub params: Vec<f64>,
    /// `|a A(e) - c t|`
    pub residual: f64,
    /// `max(|a A(e) - c t|, |a A(e)/c - t|)`: small only for a genuine witness
    pub score: f64,
    /// floating-point error bound of `score`
    pub rounding: f64,
    pub converged: bool,
}

impl WitnessProblem<'_> {
    pub fn n(&self) -> usize {
        self.source.len()
    }

    pub fn nunknowns(&self) -> usize {
        self.chain.nparams() + usize::from(self.allow_scale) + self.target.nparams()
    }

    fn split<'x>(&self, x: &'x [f64]) -> (&'x [f64], f64, &'x [f64]) {
        let n = self.chain.nparams();
        if self.allow_scale {
            (&x[..n], x[n], &x[n + 1..])
        } else {
            (&x[..n], 1.0, &x[n..])
        }
    }

    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        let (eps, s, p) = self.split(x);
        let m = self.chain.eval(eps);
        let t = self.target.eval(p);
        (0..n)
            .map(|k| s * (0..n).map(|i| self.source[i] * m[i * n + k]).sum::<f64>() - t[k])
            .collect()
    }

    /// Residual and its Jacobian (rows: components, columns: unknowns).
    pub fn residual_and_jacobian(&self, x: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = self.n();
        let (eps, s, p) = self.split(x);
        let (m, grad) = self.chain.eval_with_grad(eps);
        let t = self.target.eval(p);
        let tj = self.target.jacobian(p);
        let cols = self.nunknowns();
        let mut r = vec![0.0; n];
        let mut jac = vec![vec![0.0; cols]; n];
        for k in 0..n {
            let image: f64 = (0..n).map(|i| self.source[i] * m[i * n + k]).sum();
            r[k] = s * image - t[k];
            for (q, g) in grad.iter().enumerate() {
                jac[k][q] = s * (0..n).map(|i| self.source[i] * g[i * n + k]).sum::<f64>();
            }
            let mut col = self.chain.nparams();
            if self.allow_scale {
                jac[k][col] = image;
                col += 1;
            }
            for (mi, d) in tj[k].iter().enumerate() {
                jac[k][col + mi] = -d;
            }
        }
        (r, jac)
    }

    /// Success threshold `tol * max(1, |a|)`.
    pub fn threshold(&self, tol: f64) -> f64 {
        tol * norm(&self.source).max(1.0)
    }

    fn score(&self, x: &[f64], rho: f64) -> f64 {
        let (_, s, _) = self.split(x);
        rho * (1.0 / s.abs()).max(1.0)
    }

    /// Floating-point error bound for the residual at `x`, scaled like
    /// the score.
    pub fn rounding_bound(&self, x: &[f64]) -> f64 {
        let n = self.n();
        let (eps, s, p) = self.split(x);
        let mag = self.chain.magnitude(eps);
        let t = self.target.eval(p);
        let sum: f64 = (0..n)
            .map(|k| s.abs() * (0..n).map(|i| self.source[i].abs() * mag[i * n + k]).sum::<f64>() + t[k].abs())
            .sum();
        self.score(x, sum * f64::EPSILON * (4 * n * self.chain.copies) as f64)
    }

    fn credible(&self, x: &[f64], rho: f64, tol: f64) -> bool {
        let th = self.threshold(tol);
        self.score(x, rho) < th && self.rounding_bound(x) < 0.1 * th
    }

    fn start(&self, rng: &mut ChaCha8Rng, index: usize) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.nunknowns());
        for _ in 0..self.chain.copies {
            for &s in self.spectral {
                let w = if s { 5.0 } else { 3.0 };
                x.push(rng.random_range(-w..=w));
            }
        }
        if self.allow_scale {
            x.push(if index.is_multiple_of(2) { 1.0 } else { -1.0 });
        }
        for m in 0..self.target.nparams() {
            let [lo, hi] = self.target.range(m, [-3.0, 3.0]);
            x.push(if lo < hi { rng.random_range(lo..=hi) } else { lo });
        }
        x
    }

    fn clamp_params(&self, x: &mut [f64]) {
        let off = self.chain.nparams() + usize::from(self.allow_scale);
        for m in 0..self.target.nparams() {
            if let Some([lo, hi]) = self.target.domain.get(&self.target.params[m]) {
                x[off + m] = x[off + m].clamp(*lo, *hi);
            }
        }
    }

    /// One damped Gauss-Newton run from `x0`.
    pub fn levenberg_marquardt(&self, x0: Vec<f64>, tol: f64) -> Solution {
        let dim = x0.len();
        let mut x = x0;
        let (mut r, mut jac) = self.residual_and_jacobian(&x);
        let mut cost = norm(&r);
        let mut lambda = 1e-3;
        let mut converged = cost.is_finite() && self.credible(&x, cost, tol);
        for _ in 0..MAX_ITER {
            if converged || !cost.is_finite() {
                break;
            }
            let j = DMatrix::from_fn(r.len(), dim, |a, b| jac[a][b]);
            let jtj = j.transpose() * &j;
            let g = j.transpose() * DVector::from_vec(r.clone());
            let mut stepped = false;
            while lambda <= 1e12 {
                let mut a = jtj.clone();
                for i in 0..dim {
                    a[(i, i)] += lambda * jtj[(i, i)].max(1e-9);
                }
                let Some(dx) = a.lu().solve(&(-&g)) else {
                    lambda *= 4.0;
                    continue;
                };
                let mut xn: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, b)| a + b).collect();
                self.clamp_params(&mut xn);
                let rn = self.residual(&xn);
                let cn = norm(&rn);
                if cn.is_finite() && cn < cost {
                    x = xn;
                    (r, jac) = self.residual_and_jacobian(&x);
                    cost = norm(&r);
                    lambda = (lambda / 3.0).max(1e-12);
                    stepped = true;
                    break;
                }
                lambda *= 4.0;
            }
            if !stepped {
                break;
            }
            converged = self.credible(&x, cost, tol);
        }
        let rounding = self.rounding_bound(&x);
        let score = self.score(&x, cost);
        let (eps, s, p) = self.split(&x);
        Solution {
            epsilon: eps.to_vec(),
            scale: 1.0 / s,
            params: p.to_vec(),
            residual: cost / s.abs(),
            score,
            rounding,
            converged,
        }
    }

    /// Seeded restarts; returns the successful run with the lowest index,
    /// or the best credible score over all runs.
    pub fn search(&self, tol: f64, restarts: usize, seed: u64) -> Result<(usize, Solution), f64> {
        let mut best = f64::INFINITY;
        let mut idx = 0;
        while idx < restarts {
            let end = (idx + CHUNK).min(restarts);
            let runs: Vec<Solution> = (idx..end)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(seed, i as u64));
                    let x0 = self.start(&mut rng, i);
                    self.levenberg_marquardt(x0, tol)
                })
                .collect();
            for (k, s) in runs.into_iter().enumerate() {
                if s.converged {
                    return Ok((idx + k, s));
                }
                // a residual below its own rounding error means nothing
                let floor = s.score.max(s.rounding);
                if floor < best {
                    best = floor;
                }
            }
            idx = end;
        }
        Err(best)
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// FNV-1a over the seed and restart index.
pub fn restart_seed(seed: u64, index: u64) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in seed.to_le_bytes().into_iter().chain(index.to_le_bytes()) {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}
