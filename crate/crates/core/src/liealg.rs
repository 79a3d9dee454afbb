//! Finite-dimensional Lie algebras given by structure constants.
//!
//! `[v_i, v_j] = sum_k c_ij^k v_k`. Only `i < j` is stored; antisymmetry and
//! the zero diagonal are implied.

use std::collections::BTreeMap;
use std::path::Path;

use num::traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::symkernel::rational::{format_rational, parse_rational, to_f64, Rational};
use crate::symkernel::Matrix;

/// On-disk algebra description.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub name: String,
    pub dim: usize,
    pub generators: Vec<String>,
    #[serde(default)]
    pub brackets: Vec<BracketSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BracketSpec {
    pub i: usize,
    pub j: usize,
    pub coeffs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    name: String,
    names: Vec<String>,
    /// `(i, j) -> c_ij` for `i < j` (0-based), nonzero vectors only
    stored: BTreeMap<(usize, usize), Vec<Rational>>,
    /// dense `c[i][j][k]`
    c: Vec<Vec<Vec<Rational>>>,
}

impl LieAlgebra {
    /// Validates a spec, including the Jacobi identity for every triple.
    pub fn from_spec(spec: &AlgebraSpec) -> Result<Self, Error> {
        let n = spec.dim;
        if n == 0 {
            return Err(Error::Field {
                field: "dim".into(),
                message: "dimension must be positive".into(),
            });
        }
        if spec.generators.len() != n {
            return Err(Error::Field {
                field: "generators".into(),
                message: format!("expected {n} names, found {}", spec.generators.len()),
            });
        }
        let mut stored = BTreeMap::new();
        for (idx, b) in spec.brackets.iter().enumerate() {
            let field = |what: &str| format!("brackets[{idx}].{what}");
            for (which, v) in [("i", b.i), ("j", b.j)] {
                if v == 0 || v > n {
                    return Err(Error::Field {
                        field: field(which),
                        message: format!("index {v} out of range 1..={n}"),
                    });
                }
            }
            if b.i >= b.j {
                return Err(Error::Field {
                    field: field("i"),
                    message: format!("pairs must satisfy i < j, found ({}, {})", b.i, b.j),
                });
            }
            if b.coeffs.len() != n {
                return Err(Error::Field {
                    field: field("coeffs"),
                    message: format!("expected {n} coefficients, found {}", b.coeffs.len()),
                });
            }
            let coeffs = b
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, s)| {
                    parse_rational(s).map_err(|e| Error::Field {
                        field: field(&format!("coeffs[{k}]")),
                        message: e.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if stored.contains_key(&(b.i - 1, b.j - 1)) {
                return Err(Error::Field {
                    field: field("j"),
                    message: format!("duplicate pair ({}, {})", b.i, b.j),
                });
            }
            if coeffs.iter().any(|q| !q.is_zero()) {
                stored.insert((b.i - 1, b.j - 1), coeffs);
            }
        }
        let alg = Self::build(spec.name.clone(), spec.generators.clone(), stored);
        alg.check_jacobi()?;
        Ok(alg)
    }

    fn build(name: String, names: Vec<String>, stored: BTreeMap<(usize, usize), Vec<Rational>>) -> Self {
        let n = names.len();
        let mut c = vec![vec![vec![Rational::zero(); n]; n]; n];
        for (&(i, j), v) in &stored {
            for k in 0..n {
                c[i][j][k] = v[k].clone();
                c[j][i][k] = -&v[k];
            }
        }
        LieAlgebra { name, names, stored, c }
    }

    /// Builds from a dense table `c[i][j][k]` without validation of Jacobi;
    /// antisymmetry is enforced by reading only `i < j`.
    pub fn from_dense(name: &str, c: &[Vec<Vec<Rational>>]) -> Result<Self, Error> {
        let n = c.len();
        let mut stored = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                let v = c[i][j].clone();
                if v.len() != n {
                    return Err(Error::Dimension { expected: n, found: v.len() });
                }
                if v.iter().any(|q| !q.is_zero()) {
                    stored.insert((i, j), v);
                }
            }
        }
        let names = (1..=n).map(|i| format!("v{i}")).collect();
        let alg = Self::build(name.into(), names, stored);
        alg.check_jacobi()?;
        Ok(alg)
    }

    pub fn abelian(n: usize) -> Self {
        Self::build(format!("abelian-{n}"), (1..=n).map(|i| format!("v{i}")).collect(), BTreeMap::new())
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        let spec: AlgebraSpec = serde_json::from_str(text)?;
        Self::from_spec(&spec)
    }

    pub fn from_path(path: &Path) -> Result<Self, Error> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_spec(&self) -> AlgebraSpec {
        AlgebraSpec {
            name: self.name.clone(),
            dim: self.dim(),
            generators: self.names.clone(),
            brackets: self
                .stored
                .iter()
                .map(|(&(i, j), v)| BracketSpec {
                    i: i + 1,
                    j: j + 1,
                    coeffs: v.iter().map(format_rational).collect(),
                })
                .collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    /// `c_ij^k`, 0-based.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.c[i][j][k]
    }

    /// `[v_i, v_j]` as a coefficient vector, 0-based.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[Rational] {
        &self.c[i][j]
    }

    fn check_jacobi(&self) -> Result<(), Error> {
        let n = self.dim();
        let c = &self.c;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in 0..n {
                        let mut s = Rational::zero();
                        for m in 0..n {
                            s += &c[i][j][m] * &c[m][k][l];
                            s += &c[j][k][m] * &c[m][i][l];
                            s += &c[k][i][m] * &c[m][j][l];
                        }
                        if !s.is_zero() {
                            return Err(Error::JacobiViolation {
                                i: i + 1,
                                j: j + 1,
                                k: k + 1,
                                l: l + 1,
                                residual: format_rational(&s),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_len(&self, v: usize) -> Result<(), Error> {
        if v != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: v,
            });
        }
        Ok(())
    }

    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Result<Vec<Rational>, Error> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        let n = self.dim();
        let mut z = vec![Rational::zero(); n];
        for (&(i, j), v) in &self.stored {
            let w = &x[i] * &y[j] - &x[j] * &y[i];
            if w.is_zero() {
                continue;
            }
            for k in 0..n {
                z[k] += &w * &v[k];
            }
        }
        Ok(z)
    }

    pub fn bracket_f64(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>, Error> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        let n = self.dim();
        let mut z = vec![0.0; n];
        for (&(i, j), v) in &self.stored {
            let w = x[i] * y[j] - x[j] * y[i];
            for k in 0..n {
                z[k] += w * to_f64(&v[k]);
            }
        }
        Ok(z)
    }

    /// `(ad_i)_{jk} = c_ij^k` for the 1-based generator index `i`, so that
    /// `[v_i, y] = y * ad_i` for a row vector `y`.
    pub fn ad_matrix(&self, i: usize) -> Result<Matrix<Rational>, Error> {
        let n = self.dim();
        if i == 0 || i > n {
            return Err(Error::Index { index: i, bound: n });
        }
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                m[(j, k)] = self.c[i - 1][j][k].clone();
            }
        }
        Ok(m)
    }

    /// `ad_x = sum_i x_i ad_i` in the same row convention.
    pub fn ad_of(&self, x: &[Rational]) -> Result<Matrix<Rational>, Error> {
        self.check_len(x.len())?;
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    let v = &m[(j, k)] + xi * &self.c[i][j][k];
                    m[(j, k)] = v;
                }
            }
        }
        Ok(m)
    }

    pub fn killing_form(&self, x: &[Rational], y: &[Rational]) -> Result<Rational, Error> {
        let ax = self.ad_of(x)?;
        let ay = self.ad_of(y)?;
        Ok(ax.try_mul(&ay)?.trace())
    }

    /// Gram matrix `B(v_i, v_j)`.
    pub fn killing_matrix(&self) -> Matrix<Rational> {
        let n = self.dim();
        let ads: Vec<Matrix<Rational>> = (1..=n).map(|i| self.ad_matrix(i).unwrap()).collect();
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = ads[i].try_mul(&ads[j]).unwrap().trace();
            }
        }
        g
    }

    /// Commutator table entries `[v_i, v_j]` for all `i, j` (0-based).
    pub fn table(&self) -> Vec<Vec<Vec<Rational>>> {
        self.c.clone()
    }

    /// Human-readable element, e.g. `4*v4 - 2*v3`.
    pub fn format_element(&self, x: &[Rational]) -> String {
        format_combination(x, &self.names)
    }
}

pub fn format_combination(x: &[Rational], names: &[String]) -> String {
    use num::Signed;
    let mut s = String::new();
    for (k, q) in x.iter().enumerate() {
        if q.is_zero() {
            continue;
        }
        let a = q.abs();
        let sign = match (s.is_empty(), q.is_negative()) {
            (true, true) => "-",
            (true, false) => "",
            (false, true) => " - ",
            (false, false) => " + ",
        };
        s.push_str(sign);
        if a != num::One::one() {
            s.push_str(&format_rational(&a));
            s.push('*');
        }
        s.push_str(&names[k]);
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

/// A linear subspace of the algebra stored as a reduced row basis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subspace {
    n: usize,
    basis: Vec<Vec<Rational>>,
}

impl Subspace {
    pub fn span(n: usize, vectors: &[Vec<Rational>]) -> Self {
        if vectors.is_empty() {
            return Subspace { n, basis: vec![] };
        }
        let m = Matrix::from_rows(vectors.to_vec()).expect("uniform lengths");
        let (r, piv) = m.rref();
        let basis = (0..piv.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace { n, basis }
    }

    pub fn whole(n: usize) -> Self {
        Self::span(n, &Matrix::<Rational>::identity(n).to_rows())
    }

    pub fn zero(n: usize) -> Self {
        Subspace { n, basis: vec![] }
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    /// Linear forms whose common zero set is this subspace.
    pub fn equations(&self) -> Vec<Vec<Rational>> {
        if self.basis.is_empty() {
            return Matrix::<Rational>::identity(self.n).to_rows();
        }
        Matrix::from_rows(self.basis.clone()).unwrap().nullspace()
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.equations()
            .iter()
            .all(|f| f.iter().zip(v).map(|(a, b)| a * b).sum::<Rational>().is_zero())
    }

    pub fn sum(&self, o: &Self) -> Self {
        let mut v = self.basis.clone();
        v.extend(o.basis.iter().cloned());
        Self::span(self.n, &v)
    }

    pub fn intersect(&self, o: &Self) -> Self {
        let mut eq = self.equations();
        eq.extend(o.equations());
        Self::solutions(self.n, &eq)
    }

    /// Common zero set of linear forms.
    pub fn solutions(n: usize, forms: &[Vec<Rational>]) -> Self {
        if forms.is_empty() {
            return Self::whole(n);
        }
        let ns = Matrix::from_rows(forms.to_vec()).unwrap().nullspace();
        Self::span(n, &ns)
    }

    pub fn is_subspace_of(&self, o: &Self) -> bool {
        self.basis.iter().all(|v| o.contains(v))
    }
}

impl LieAlgebra {
    /// `[I, J]`
    pub fn bracket_space(&self, a: &Subspace, b: &Subspace) -> Subspace {
        let mut vs = Vec::new();
        for x in a.basis() {
            for y in b.basis() {
                vs.push(self.bracket(x, y).unwrap());
            }
        }
        Subspace::span(self.dim(), &vs)
    }

    /// `{x : [x, S] = 0}`
    pub fn centralizer(&self, s: &Subspace) -> Subspace {
        let n = self.dim();
        let mut forms = Vec::new();
        for y in s.basis() {
            // [x, y]_k = sum_i x_i (y * ad_i)_k
            for k in 0..n {
                let f: Vec<Rational> = (0..n)
                    .map(|i| (0..n).map(|j| &y[j] * &self.c[i][j][k]).sum())
                    .collect();
                forms.push(f);
            }
        }
        Subspace::solutions(n, &forms)
    }

    /// `{x : B(x, S) = 0}`
    pub fn killing_orthogonal(&self, s: &Subspace) -> Subspace {
        let g = self.killing_matrix();
        let n = self.dim();
        let forms: Vec<Vec<Rational>> = s
            .basis()
            .iter()
            .map(|y| (0..n).map(|i| (0..n).map(|j| &g[(i, j)] * &y[j]).sum()).collect())
            .collect();
        Subspace::solutions(n, &forms)
    }

    pub fn center(&self) -> Subspace {
        self.centralizer(&Subspace::whole(self.dim()))
    }

    pub fn derived(&self, s: &Subspace) -> Subspace {
        self.bracket_space(s, s)
    }

    /// Ideals obtained from the whole algebra by brackets, centralizers,
    /// Killing complements, sums and intersections. Every such ideal is
    /// preserved by all automorphisms, in particular by the adjoint group.
    /// Returns proper nonzero ideals in ascending dimension.
    pub fn characteristic_ideals(&self, cap: usize) -> Vec<Subspace> {
        let n = self.dim();
        let mut found: Vec<Subspace> = vec![Subspace::whole(n), Subspace::zero(n)];
        let mut frontier = 0;
        while frontier < found.len() && found.len() < cap {
            let cur = found[frontier].clone();
            let mut new = vec![
                self.centralizer(&cur),
                self.killing_orthogonal(&cur),
            ];
            for other in found.clone() {
                new.push(self.bracket_space(&cur, &other));
                new.push(cur.sum(&other));
                new.push(cur.intersect(&other));
            }
            for s in new {
                if !found.contains(&s) && found.len() < cap {
                    found.push(s);
                }
            }
            frontier += 1;
        }
        let mut out: Vec<Subspace> = found.into_iter().filter(|s| s.dim() > 0 && s.dim() < n).collect();
        out.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
        out
    }
}
