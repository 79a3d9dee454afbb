//! Semi-invariants: `D_j P = chi_j P` with constant characters.
//!
//! Characters vanish on the derived algebra, so the search starts from the
//! common kernel `W0` of the operators of `[g, g]`; the remaining operators
//! commute on `W0` and are split into joint rational eigenspaces.

use std::collections::{BTreeMap, HashMap};

use num::traits::Zero;
use serde::Serialize;

use super::basis::{ansatz, poly_to_vector, system_rows, vector_to_poly, Denominator, SearchOptions};
use super::operators::{restricted_operators, Chart, RestrictedOperator};
use crate::error::Error;
use crate::liealg::{LieAlgebra, Subspace};
use crate::symkernel::{Matrix, Monomial, MultiPoly, Rational, SparseEchelon, UPoly};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SemiInvariant {
    #[serde(serialize_with = "ser_poly")]
    pub poly: MultiPoly<Rational>,
    pub degree: i32,
    /// `chi_j` for every generator `j`
    #[serde(with = "crate::symkernel::rational::serde_vec")]
    pub character: Vec<Rational>,
    pub denominator: Option<Denominator>,
    pub stratum: Vec<String>,
}

fn ser_poly<S: serde::Serializer>(p: &MultiPoly<Rational>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

impl SemiInvariant {
    pub fn is_invariant(&self) -> bool {
        self.character.iter().all(Zero::is_zero)
    }
}

/// Operator `sum_j x_j R_j`.
fn combine(ops: &[RestrictedOperator], x: &[Rational]) -> RestrictedOperator {
    let mut parts: BTreeMap<usize, MultiPoly<Rational>> = BTreeMap::new();
    for (op, c) in ops.iter().zip(x) {
        if c.is_zero() {
            continue;
        }
        for (i, t) in &op.parts {
            let term = t.scale(c);
            match parts.get_mut(i) {
                Some(acc) => *acc = &*acc + &term,
                None => {
                    parts.insert(*i, term);
                }
            }
        }
    }
    RestrictedOperator {
        index: 0,
        parts: parts.into_iter().filter(|(_, t)| !t.is_zero()).collect(),
    }
}

/// Row-reduced basis with pivot columns; coordinates of a member vector are
/// its entries at the pivots.
struct Basis {
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl Basis {
    fn new(vectors: Vec<Vec<Rational>>, width: usize) -> Self {
        if vectors.is_empty() {
            return Basis { rows: vec![], pivots: vec![] };
        }
        let (r, pivots) = Matrix::from_rows(vectors).expect("rectangular").rref();
        let rows = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        let _ = width;
        Basis { rows, pivots }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn coords(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        let c: Vec<Rational> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        // membership: v equals the combination
        for (k, vk) in v.iter().enumerate() {
            let mut s = Rational::zero();
            for (i, ci) in c.iter().enumerate() {
                s += ci * &self.rows[i][k];
            }
            if &s != vk {
                return None;
            }
        }
        Some(c)
    }
}

/// Semi-invariants of degree `1..=opts.degree` on the chart, one entry per
/// vector of a canonical basis of each joint eigenspace.
pub fn semi_invariants(alg: &LieAlgebra, opts: &SearchOptions) -> Result<Vec<SemiInvariant>, Error> {
    if !opts.chart.is_homogeneous() {
        return Err(Error::Unsupported("semi-invariant search needs a degree-preserving chart".into()));
    }
    let n = alg.dim();
    let ops = restricted_operators(alg, &opts.chart)?;
    let vars = opts.chart.vars.clone();
    let derived = alg.derived(&Subspace::whole(n));
    let derived_ops: Vec<RestrictedOperator> = derived.basis().iter().map(|x| combine(&ops, x)).collect();
    let mut out = Vec::new();
    for k in 1..=opts.degree {
        let cols = ansatz(opts, k);
        let width = cols.len();
        let mut ech = SparseEchelon::new(width);
        for r in system_rows(&derived_ops, &cols, &vars) {
            ech.insert(r);
        }
        let w0 = Basis::new(ech.nullspace(), width);
        if w0.dim() == 0 {
            continue;
        }
        let index: HashMap<Monomial, usize> = cols.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        // matrices of every operator on W0, row convention
        let mut mats = Vec::with_capacity(n);
        let mut closed = true;
        for op in &ops {
            let mut rows = Vec::with_capacity(w0.dim());
            for b in &w0.rows {
                let img = op.apply(&vector_to_poly(&vars, &cols, b));
                let coords = poly_to_vector(&index, &img).and_then(|sv| {
                    let mut dense = vec![Rational::zero(); width];
                    for (c, q) in sv {
                        dense[c] = q;
                    }
                    w0.coords(&dense)
                });
                match coords {
                    Some(c) => rows.push(c),
                    None => {
                        closed = false;
                        break;
                    }
                }
            }
            if !closed {
                break;
            }
            mats.push(Matrix::from_rows(rows).expect("square"));
        }
        if !closed {
            return Err(Error::Unsupported(format!(
                "operators do not preserve the derived-algebra kernel at degree {k}; the chart is not invariant"
            )));
        }
        // joint eigenspaces: (basis rows in W0 coordinates, character so far)
        let d0 = w0.dim();
        let identity: Vec<Vec<Rational>> = (0..d0)
            .map(|i| (0..d0).map(|j| if i == j { Rational::from_integer(1.into()) } else { Rational::zero() }).collect())
            .collect();
        let mut spaces: Vec<(Vec<Vec<Rational>>, Vec<Rational>)> = vec![(identity, vec![])];
        for m in &mats {
            let mut next = Vec::new();
            for (space, chi) in spaces {
                for (lambda, sub) in split_eigen(&space, m) {
                    let mut c = chi.clone();
                    c.push(lambda);
                    next.push((sub, c));
                }
            }
            spaces = next;
        }
        for (space, chi) in spaces {
            let full: Vec<Vec<Rational>> = space
                .iter()
                .map(|c| {
                    let mut v = vec![Rational::zero(); width];
                    for (i, ci) in c.iter().enumerate() {
                        for (kk, x) in w0.rows[i].iter().enumerate() {
                            if !x.is_zero() {
                                v[kk] += ci * x;
                            }
                        }
                    }
                    v
                })
                .collect();
            let canon = Basis::new(full, width);
            for v in &canon.rows {
                let p = vector_to_poly(&vars, &cols, v).primitive();
                out.push(SemiInvariant {
                    degree: p.degree().unwrap_or(0),
                    character: chi.clone(),
                    denominator: opts.denominator.filter(|d| p.min_var_exponent(d.var).unwrap_or(0) < 0),
                    stratum: opts.chart.describe(),
                    poly: p,
                });
            }
        }
    }
    out.sort_by(|a, b| {
        a.degree
            .cmp(&b.degree)
            .then_with(|| b.poly.leading().map(|t| t.0).cmp(&a.poly.leading().map(|t| t.0)))
    });
    Ok(out)
}

/// Splits the row space `space` (invariant under `m`) into rational
/// eigenspaces of `m`; irrational parts are dropped.
fn split_eigen(space: &[Vec<Rational>], m: &Matrix<Rational>) -> Vec<(Rational, Vec<Vec<Rational>>)> {
    let s = space.len();
    if s == 0 {
        return vec![];
    }
    let sm = Matrix::from_rows(space.to_vec()).expect("rectangular");
    let (r, pivots) = sm.rref();
    let basis: Vec<Vec<Rational>> = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
    // restricted matrix N with basis_i * m = sum_j N_ij basis_j
    let mut nrows = Vec::with_capacity(s);
    for b in &basis {
        let img = m.left_apply(b).expect("dims");
        nrows.push(pivots.iter().map(|&p| img[p].clone()).collect::<Vec<_>>());
    }
    let nmat = Matrix::from_rows(nrows).expect("square");
    let roots = UPoly::new(nmat.minimal_polynomial()).rational_roots().map(|r| r.0).unwrap_or_default();
    let mut out = Vec::new();
    for (lambda, _) in roots {
        let shifted = nmat.sub(&Matrix::<Rational>::identity(s).scale(&lambda));
        let kernel = shifted.left_nullspace();
        let vecs: Vec<Vec<Rational>> = kernel
            .iter()
            .map(|c| {
                let mut v = vec![Rational::zero(); basis[0].len()];
                for (i, ci) in c.iter().enumerate() {
                    for (k, x) in basis[i].iter().enumerate() {
                        v[k] += ci * x;
                    }
                }
                v
            })
            .collect();
        out.push((lambda, vecs));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Whether `D_j p = chi_j p` on the chart for every `j`.
pub fn is_semi_invariant(alg: &LieAlgebra, chart: &Chart, p: &MultiPoly<Rational>, chi: &[Rational]) -> Result<bool, Error> {
    let p = chart.restrict(p)?;
    let ops = restricted_operators(alg, chart)?;
    if chi.len() != ops.len() {
        return Err(Error::Dimension {
            expected: ops.len(),
            found: chi.len(),
        });
    }
    Ok(ops.iter().zip(chi).all(|(op, c)| op.apply(&p) == p.scale(c)))
}

/// Drops semi-invariants spanned by products of lower-degree kept ones with
/// the same total character.
pub fn fundamental_semi(list: &[SemiInvariant]) -> Vec<SemiInvariant> {
    let mut kept: Vec<SemiInvariant> = Vec::new();
    let mut groups: BTreeMap<(i32, Vec<Rational>), Vec<&SemiInvariant>> = BTreeMap::new();
    for s in list {
        groups.entry((s.degree, s.character.clone())).or_default().push(s);
    }
    let mut degrees: Vec<i32> = groups.keys().map(|k| k.0).collect();
    degrees.dedup();
    for d in degrees {
        let keys: Vec<(i32, Vec<Rational>)> = groups.keys().filter(|k| k.0 == d).cloned().collect();
        for key in keys {
            let group = &groups[&key];
            let mut products = Vec::new();
            products_with(&kept, d, &key.1, 0, None, &mut products);
            let mut index: HashMap<Monomial, usize> = HashMap::new();
            for p in products.iter().chain(group.iter().map(|s| &s.poly)) {
                for (m, _) in p.terms() {
                    let next = index.len();
                    index.entry(m.clone()).or_insert(next);
                }
            }
            let mut ech = SparseEchelon::new(index.len());
            for p in &products {
                ech.insert(poly_to_vector(&index, p).expect("indexed"));
            }
            for s in group {
                if ech.insert(poly_to_vector(&index, &s.poly).expect("indexed")) {
                    kept.push((*s).clone());
                }
            }
        }
    }
    kept.sort_by(|a, b| {
        a.degree
            .cmp(&b.degree)
            .then_with(|| b.poly.leading().map(|t| t.0).cmp(&a.poly.leading().map(|t| t.0)))
    });
    kept
}

fn products_with(
    gens: &[SemiInvariant],
    d: i32,
    chi: &[Rational],
    start: usize,
    acc: Option<(MultiPoly<Rational>, i32, Vec<Rational>, usize)>,
    out: &mut Vec<MultiPoly<Rational>>,
) {
    if let Some((p, deg, c, count)) = &acc {
        if *deg == d {
            if *count >= 2 && c.as_slice() == chi {
                out.push(p.clone());
            }
            return;
        }
    }
    for (i, g) in gens.iter().enumerate().skip(start) {
        if g.degree <= 0 {
            continue;
        }
        let next = match &acc {
            Some((p, deg, c, count)) => {
                if deg + g.degree > d {
                    continue;
                }
                let cc: Vec<Rational> = c.iter().zip(&g.character).map(|(x, y)| x + y).collect();
                (p * &g.poly, deg + g.degree, cc, count + 1)
            }
            None => (g.poly.clone(), g.degree, g.character.clone(), 1),
        };
        products_with(gens, d, chi, i, Some(next), out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::symkernel::rational::int;

    #[test]
    fn kdv_global_degree_one() {
        let s = semi_invariants(&fixtures::kdv(), &SearchOptions::global(4, 1)).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].poly.to_string(), "a4");
        assert!(s[0].is_invariant());
    }

    #[test]
    fn kdv_stratum_semi_invariants() {
        let chart = Chart::parse(4, &["a4=0".into()]).unwrap();
        let s = semi_invariants(&fixtures::kdv(), &SearchOptions::on(chart.clone(), 1)).unwrap();
        let names: Vec<String> = s.iter().map(|x| x.poly.to_string()).collect();
        assert_eq!(names, vec!["a2", "a3"]);
        let a2 = &s[0];
        assert_eq!(a2.character, vec![int(0), int(0), int(0), int(-3)]);
        assert!(is_semi_invariant(&fixtures::kdv(), &chart, &a2.poly, &a2.character).unwrap());
    }

    #[test]
    fn abelian_monomials() {
        let s = semi_invariants(&LieAlgebra::abelian(2), &SearchOptions::global(2, 2)).unwrap();
        assert_eq!(s.len(), 2 + 3);
        assert!(s.iter().all(|x| x.is_invariant()));
        assert_eq!(fundamental_semi(&s).len(), 2);
    }
}
