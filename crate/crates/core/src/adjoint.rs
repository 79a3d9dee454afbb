//! One-parameter adjoint matrices `A_i(e_i) = exp(-e_i ad_i)` and their
//! ordered products, as exact exp-polynomial matrices.
//!
//! The exponential is computed from the minimal polynomial of `N = -ad_i`:
//! with `p = prod_t (x - mu_t)^(m_t)` and spectral projectors `P_t = q_t(N)`,
//! `exp(eN) = sum_t exp(mu_t e) sum_{k<m_t} e^k/k! (N - mu_t)^k P_t`.

use num::traits::{One, Zero};
use num::BigInt;
use serde::Serialize;

use crate::error::Error;
use crate::liealg::LieAlgebra;
use crate::symkernel::expoly::{ExactParam, ExpKey, MultiExpPoly};
use crate::symkernel::rational::{to_f64, Rational};
use crate::symkernel::upoly::UPoly;
use crate::symkernel::Matrix;

#[derive(Clone, Debug, PartialEq)]
pub struct AdjointMatrix {
    /// 1-based generator index; the matrix depends on parameter `e_i` only
    pub generator: usize,
    pub entries: Matrix<MultiExpPoly>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdjointChain {
    /// 1-based generator order of the factors
    pub order: Vec<usize>,
    pub entries: Matrix<MultiExpPoly>,
}

fn poly_of_matrix(p: &UPoly, m: &Matrix<Rational>) -> Matrix<Rational> {
    let n = m.nrows();
    let mut acc = Matrix::zeros(n, n);
    for c in p.coeffs().iter().rev() {
        acc = acc.try_mul(m).unwrap().add(&Matrix::identity(n).scale(c));
    }
    acc
}

/// Minimal polynomial of `ad_i` printed in `x`, used in diagnostics.
fn min_poly_display(m: &Matrix<Rational>) -> String {
    UPoly::new(m.minimal_polynomial()).to_display("x")
}

/// Exact `exp(e * N)` for a rational matrix `N` with rational spectrum, as
/// an exp-polynomial matrix in parameter `param` (0-based).
pub fn exp_matrix(n_mat: &Matrix<Rational>, param: usize) -> Result<Matrix<MultiExpPoly>, Option<String>> {
    let n = n_mat.nrows();
    let p = UPoly::new(n_mat.minimal_polynomial());
    let (roots, rest) = p.rational_roots().map_err(|e| Some(e.to_string()))?;
    if rest.degree().unwrap_or(0) > 0 {
        return Err(None);
    }
    let mut out = Matrix::<MultiExpPoly>::zeros(n, n);
    for (mu, m) in &roots {
        let factor = UPoly::linear(mu).pow(*m);
        let (g, r) = p.divrem(&factor);
        debug_assert!(r.is_zero());
        let u = g.inverse_mod_power(mu, *m);
        let proj = poly_of_matrix(&g.mul(&u), n_mat);
        let shifted = n_mat.sub(&Matrix::identity(n).scale(mu));
        let mut pw = proj;
        let mut fact = Rational::one();
        for k in 0..*m {
            if k > 0 {
                pw = shifted.try_mul(&pw).unwrap();
                fact *= Rational::from_integer(BigInt::from(k));
            }
            let mut mono = vec![0u32; param + 1];
            mono[param] = k as u32;
            let mut freq = vec![Rational::zero(); param + 1];
            freq[param] = mu.clone();
            let key = ExpKey::new(mono, freq);
            for r in 0..n {
                for c in 0..n {
                    let q = &pw[(r, c)];
                    if q.is_zero() {
                        continue;
                    }
                    let t = MultiExpPoly::term(key.clone(), q / &fact);
                    out[(r, c)] = out[(r, c)].add(&t);
                }
            }
        }
    }
    Ok(out)
}

/// `A_i(e_i) = exp(-e_i ad_i)` for the 1-based generator `i`.
pub fn exp_ad(alg: &LieAlgebra, i: usize) -> Result<AdjointMatrix, Error> {
    let ad = alg.ad_matrix(i)?;
    let neg = ad.scale(&-Rational::one());
    let entries = exp_matrix(&neg, i - 1).map_err(|_| Error::NonRationalSpectrum {
        generator: i,
        minimal_polynomial: min_poly_display(&ad),
    })?;
    Ok(AdjointMatrix { generator: i, entries })
}

pub fn validate_order(n: usize, order: &[usize]) -> Result<(), Error> {
    if order.is_empty() {
        return Ok(());
    }
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "expected {n} indices, found {}",
            order.len()
        )));
    }
    for &k in order {
        if k == 0 || k > n || seen[k - 1] {
            return Err(Error::InvalidPermutation(format!("{order:?} is not a permutation of 1..={n}")));
        }
        seen[k - 1] = true;
    }
    Ok(())
}

/// The ordered product `A_{s(1)} ... A_{s(n)}`; an empty order gives the identity.
pub fn adjoint_chain(alg: &LieAlgebra, order: &[usize]) -> Result<AdjointChain, Error> {
    validate_order(alg.dim(), order)?;
    let mut m = Matrix::<MultiExpPoly>::identity(alg.dim());
    for &k in order {
        m = m.try_mul(&exp_ad(alg, k)?.entries)?;
    }
    Ok(AdjointChain {
        order: order.to_vec(),
        entries: m,
    })
}

/// `1..=n`
pub fn default_order(n: usize) -> Vec<usize> {
    (1..=n).collect()
}

impl AdjointChain {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Numeric matrix at a parameter point.
    pub fn eval(&self, eps: &[f64]) -> Result<Vec<Vec<f64>>, Error> {
        eval_matrix(&self.entries, eps)
    }

    /// Row-vector action `a * A(e)` in floating point.
    pub fn apply(&self, a: &[f64], eps: &[f64]) -> Result<Vec<f64>, Error> {
        let n = self.dim();
        if a.len() != n {
            return Err(Error::Dimension { expected: n, found: a.len() });
        }
        let m = self.eval(eps)?;
        Ok((0..n).map(|k| (0..n).map(|i| a[i] * m[i][k]).sum()).collect())
    }

    /// Exact row-vector action; `None` if an exponential is irrational at the point.
    pub fn apply_exact(&self, a: &[Rational], eps: &[ExactParam]) -> Result<Option<Vec<Rational>>, Error> {
        let n = self.dim();
        if a.len() != n {
            return Err(Error::Dimension { expected: n, found: a.len() });
        }
        let mut out = vec![Rational::zero(); n];
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for (k, o) in out.iter_mut().enumerate() {
                match self.entries[(i, k)].eval_exact(eps)? {
                    Some(v) => *o += &a[i] * v,
                    None => return Ok(None),
                }
            }
        }
        Ok(Some(out))
    }

    /// Text layout, one row per line with `;`-separated entries.
    pub fn to_text(&self) -> String {
        matrix_text(&self.entries)
    }
}

impl AdjointMatrix {
    pub fn to_text(&self) -> String {
        matrix_text(&self.entries)
    }
}

pub fn eval_matrix(m: &Matrix<MultiExpPoly>, eps: &[f64]) -> Result<Vec<Vec<f64>>, Error> {
    let n = m.nrows();
    (0..n)
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].eval(eps)).collect())
        .collect()
}

pub fn matrix_text(m: &Matrix<MultiExpPoly>) -> String {
    let mut s = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| m[(i, j)].to_string()).collect();
        s.push_str(&format!("[{}]\n", row.join("; ")));
    }
    s
}

/// Serializable view: nested rows of term lists.
#[derive(Serialize)]
pub struct MatrixJson<'a> {
    pub rows: Vec<Vec<&'a MultiExpPoly>>,
    pub text: Vec<Vec<String>>,
}

pub fn matrix_json(m: &Matrix<MultiExpPoly>) -> MatrixJson<'_> {
    MatrixJson {
        rows: (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| &m[(i, j)]).collect())
            .collect(),
        text: (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)].to_string()).collect())
            .collect(),
    }
}

/// One compiled term `q * prod e_i^m_i * exp(sum l_i e_i)` for fast numerics.
#[derive(Clone, Debug)]
struct CTerm {
    coeff: f64,
    mono: Vec<(usize, i32)>,
    freq: Vec<(usize, f64)>,
}

/// A matrix of exp-polynomials flattened for repeated numeric evaluation of
/// values and exact partial derivatives.
#[derive(Clone, Debug)]
pub struct CompiledMatrix {
    n: usize,
    cols: usize,
    nparams: usize,
    entries: Vec<Vec<CTerm>>,
}

impl CompiledMatrix {
    pub fn new(m: &Matrix<MultiExpPoly>, nparams: usize) -> Self {
        let entries = (0..m.nrows() * m.ncols())
            .map(|idx| {
                let e = &m[(idx / m.ncols(), idx % m.ncols())];
                e.terms()
                    .map(|(k, q)| CTerm {
                        coeff: to_f64(q),
                        mono: k
                            .mono
                            .iter()
                            .enumerate()
                            .filter(|(_, &p)| p > 0)
                            .map(|(i, &p)| (i, p as i32))
                            .collect(),
                        freq: k
                            .freq
                            .iter()
                            .enumerate()
                            .filter(|(_, l)| !l.is_zero())
                            .map(|(i, l)| (i, to_f64(l)))
                            .collect(),
                    })
                    .collect()
            })
            .collect();
        CompiledMatrix {
            n: m.nrows(),
            cols: m.ncols(),
            nparams,
            entries,
        }
    }

    pub fn nparams(&self) -> usize {
        self.nparams
    }

    /// Values and gradients: `(M, dM/de_p for p in 0..nparams)`.
    pub fn eval_with_grad(&self, eps: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let mut val = vec![0.0; self.n * self.cols];
        let mut grad = vec![vec![0.0; self.n * self.cols]; self.nparams];
        for (idx, terms) in self.entries.iter().enumerate() {
            for t in terms {
                let mut arg = 0.0;
                for &(i, l) in &t.freq {
                    arg += l * eps[i];
                }
                let ex = arg.exp();
                let mut mono = 1.0;
                for &(i, p) in &t.mono {
                    mono *= eps[i].powi(p);
                }
                let v = t.coeff * mono * ex;
                val[idx] += v;
                // d/de_p: exponential part plus polynomial part
                for &(i, l) in &t.freq {
                    grad[i][idx] += l * v;
                }
                for &(i, p) in &t.mono {
                    let mut m2 = t.coeff * ex * p as f64 * eps[i].powi(p - 1);
                    for &(j, q) in &t.mono {
                        if j != i {
                            m2 *= eps[j].powi(q);
                        }
                    }
                    grad[i][idx] += m2;
                }
            }
        }
        (val, grad)
    }

    pub fn eval(&self, eps: &[f64]) -> Vec<f64> {
        let mut val = vec![0.0; self.n * self.cols];
        for (idx, terms) in self.entries.iter().enumerate() {
            for t in terms {
                let mut arg = 0.0;
                for &(i, l) in &t.freq {
                    arg += l * eps[i];
                }
                let mut mono = 1.0;
                for &(i, p) in &t.mono {
                    mono *= eps[i].powi(p);
                }
                val[idx] += t.coeff * mono * arg.exp();
            }
        }
        val
    }

    /// Sum of absolute term values per entry: a scale for the rounding
    /// error of [`CompiledMatrix::eval`].
    pub fn eval_magnitude(&self, eps: &[f64]) -> Vec<f64> {
        let mut val = vec![0.0; self.n * self.cols];
        for (idx, terms) in self.entries.iter().enumerate() {
            for t in terms {
                let mut arg = 0.0;
                for &(i, l) in &t.freq {
                    arg += l * eps[i];
                }
                let mut mono = 1.0;
                for &(i, p) in &t.mono {
                    mono *= eps[i].powi(p);
                }
                val[idx] += (t.coeff * mono * arg.exp()).abs();
            }
        }
        val
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n, self.cols)
    }
}
