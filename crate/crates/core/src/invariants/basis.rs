//! Exact invariant search: polynomial (or single-denominator Laurent) ansatz
//! per degree, null space of the linear map induced by the operators.

use std::collections::{BTreeMap, HashMap};

use num::traits::{One, Zero};
use serde::Serialize;

use super::operators::{restricted_operators, Chart, RestrictedOperator};
use crate::error::Error;
use crate::liealg::LieAlgebra;
use crate::symkernel::linalg::bareiss_rank;
use crate::symkernel::poly::monomials_of_degree;
use crate::symkernel::{Matrix, Monomial, MultiPoly, Rational, SparseEchelon};

/// Designated Laurent denominator `var^power` (0-based variable index).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Denominator {
    pub var: usize,
    pub power: u32,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub degree: u32,
    pub chart: Chart,
    pub denominator: Option<Denominator>,
}

impl SearchOptions {
    pub fn global(n: usize, degree: u32) -> Self {
        SearchOptions {
            degree,
            chart: Chart::global(n),
            denominator: None,
        }
    }

    pub fn on(chart: Chart, degree: u32) -> Self {
        SearchOptions {
            degree,
            chart,
            denominator: None,
        }
    }

    pub fn with_denominator(mut self, var: usize, power: u32) -> Self {
        self.denominator = Some(Denominator { var, power });
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantEntry {
    /// Laurent polynomial in `a_1..a_n`, free of substituted coordinates
    pub poly: MultiPoly<Rational>,
    /// scaling degree: numerator degree minus denominator power
    pub degree: i32,
    pub denominator: Option<Denominator>,
    pub stratum: Vec<String>,
}

impl InvariantEntry {
    /// `(numerator, power)` with `poly = numerator / var^power`.
    pub fn numerator(&self) -> (MultiPoly<Rational>, u32) {
        match self.denominator {
            None => (self.poly.clone(), 0),
            Some(d) => {
                let k = (-self.poly.min_var_exponent(d.var).unwrap_or(0)).max(0) as u32;
                let n = self.poly.nvars();
                let mut m = vec![0; n];
                m[d.var] = k as i32;
                (self.poly.shift(&Monomial(m)), k)
            }
        }
    }
}

/// Sizes of one per-degree linear system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockStats {
    pub degree: i32,
    pub ansatz: usize,
    pub rank: usize,
    pub nullity: usize,
}

#[derive(Clone, Debug)]
pub struct InvariantSet {
    pub chart: Chart,
    pub entries: Vec<InvariantEntry>,
    pub blocks: Vec<BlockStats>,
}

impl InvariantSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn polys(&self) -> Vec<&MultiPoly<Rational>> {
        self.entries.iter().map(|e| &e.poly).collect()
    }

    pub fn of_degree(&self, d: i32) -> Vec<&InvariantEntry> {
        self.entries.iter().filter(|e| e.degree == d).collect()
    }
}

/// Ansatz columns for one block: Laurent monomials in the full variable set.
pub(crate) fn ansatz(opts: &SearchOptions, degree: u32) -> Vec<Monomial> {
    let n = opts.chart.vars.len();
    let free = opts.chart.free_vars();
    let (shift, var) = match opts.denominator {
        Some(d) => (d.power, Some(d.var)),
        None => (0, None),
    };
    let degrees: Vec<u32> = if opts.chart.is_homogeneous() {
        vec![degree + shift]
    } else {
        (1..=degree + shift).collect()
    };
    let mut out = Vec::new();
    for d in degrees {
        for m in monomials_of_degree(free.len(), d) {
            let mut e = vec![0i32; n];
            for (k, &i) in free.iter().enumerate() {
                e[i] = m.0[k];
            }
            if let Some(v) = var {
                e[v] -= shift as i32;
            }
            let mono = Monomial(e);
            if mono.degree() >= 1 || shift > 0 {
                out.push(mono);
            }
        }
    }
    out
}

/// Rows of the linear system `sum_c x_c R(m_c) = 0` over every operator:
/// one sparse row per (operator, image monomial).
pub(crate) fn system_rows(ops: &[RestrictedOperator], cols: &[Monomial], vars: &crate::symkernel::Vars) -> Vec<BTreeMap<usize, Rational>> {
    let mut rows = Vec::new();
    for op in ops.iter().filter(|o| !o.is_zero()) {
        let mut by_mono: BTreeMap<Monomial, BTreeMap<usize, Rational>> = BTreeMap::new();
        for (c, m) in cols.iter().enumerate() {
            let p = MultiPoly::monomial(vars, m.clone(), Rational::one());
            for (mu, q) in op.apply(&p).terms() {
                by_mono.entry(mu.clone()).or_default().insert(c, q.clone());
            }
        }
        rows.extend(by_mono.into_values());
    }
    rows
}

pub(crate) fn vector_to_poly(vars: &crate::symkernel::Vars, cols: &[Monomial], v: &[Rational]) -> MultiPoly<Rational> {
    MultiPoly::from_terms(
        vars,
        cols.iter().zip(v).filter(|(_, q)| !q.is_zero()).map(|(m, q)| (m.clone(), q.clone())),
    )
}

/// Polynomial to coordinates in a column index (None if a monomial is
/// outside the index).
pub(crate) fn poly_to_vector(index: &HashMap<Monomial, usize>, p: &MultiPoly<Rational>) -> Option<BTreeMap<usize, Rational>> {
    let mut out = BTreeMap::new();
    for (m, q) in p.terms() {
        out.insert(*index.get(m)?, q.clone());
    }
    Some(out)
}

fn laurent_degree(p: &MultiPoly<Rational>) -> i32 {
    p.degree().unwrap_or(0)
}

/// Exact basis of invariants of degree `1..=opts.degree` on the chart.
pub fn invariant_basis(alg: &LieAlgebra, opts: &SearchOptions) -> Result<InvariantSet, Error> {
    if opts.chart.vars.len() != alg.dim() {
        return Err(Error::Dimension {
            expected: alg.dim(),
            found: opts.chart.vars.len(),
        });
    }
    if let Some(d) = opts.denominator {
        if d.var >= alg.dim() {
            return Err(Error::Index {
                index: d.var + 1,
                bound: alg.dim(),
            });
        }
        if opts.chart.is_substituted(d.var) {
            return Err(Error::InvalidOptions(format!(
                "denominator variable {} is substituted by the chart",
                opts.chart.vars[d.var]
            )));
        }
    }
    let ops = restricted_operators(alg, &opts.chart)?;
    let vars = opts.chart.vars.clone();
    let degrees: Vec<u32> = if opts.chart.is_homogeneous() {
        (1..=opts.degree).collect()
    } else {
        vec![opts.degree]
    };
    let mut entries = Vec::new();
    let mut blocks = Vec::new();
    for k in degrees {
        let cols = ansatz(opts, k);
        let mut ech = SparseEchelon::new(cols.len());
        for r in system_rows(&ops, &cols, &vars) {
            ech.insert(r);
        }
        let ns = ech.nullspace();
        blocks.push(BlockStats {
            degree: k as i32,
            ansatz: cols.len(),
            rank: ech.rank(),
            nullity: ns.len(),
        });
        for v in ns {
            let p = vector_to_poly(&vars, &cols, &v).primitive();
            entries.push(InvariantEntry {
                degree: laurent_degree(&p),
                denominator: opts.denominator.filter(|d| p.min_var_exponent(d.var).unwrap_or(0) < 0),
                stratum: opts.chart.describe(),
                poly: p,
            });
        }
    }
    sort_entries(&mut entries);
    Ok(InvariantSet {
        chart: opts.chart.clone(),
        entries,
        blocks,
    })
}

pub(crate) fn sort_entries(entries: &mut [InvariantEntry]) {
    entries.sort_by(|a, b| {
        a.degree
            .cmp(&b.degree)
            .then_with(|| b.poly.leading().map(|t| t.0).cmp(&a.poly.leading().map(|t| t.0)))
    });
}

/// Dense matrix of one block, for an independent rank computation.
pub fn block_matrix(alg: &LieAlgebra, opts: &SearchOptions, degree: u32) -> Result<Matrix<Rational>, Error> {
    let ops = restricted_operators(alg, &opts.chart)?;
    let cols = ansatz(opts, degree);
    let rows = system_rows(&ops, &cols, &opts.chart.vars);
    let dense = rows
        .iter()
        .map(|r| {
            let mut v = vec![Rational::zero(); cols.len()];
            for (c, q) in r {
                v[*c] = q.clone();
            }
            v
        })
        .collect::<Vec<_>>();
    if dense.is_empty() {
        return Ok(Matrix::zeros(0, cols.len()));
    }
    Matrix::from_rows(dense)
}

/// Nullity of a block computed by fraction-free elimination.
pub fn block_nullity_bareiss(alg: &LieAlgebra, opts: &SearchOptions, degree: u32) -> Result<usize, Error> {
    let m = block_matrix(alg, opts, degree)?;
    Ok(m.ncols() - bareiss_rank(&m))
}

/// Whether every operator annihilates `p` on the chart.
pub fn is_invariant(alg: &LieAlgebra, chart: &Chart, p: &MultiPoly<Rational>) -> Result<bool, Error> {
    let p = chart.restrict(p)?;
    Ok(restricted_operators(alg, chart)?.iter().all(|op| op.apply(&p).is_zero()))
}

/// Keeps the entries not generated by products of earlier (lower-degree)
/// kept entries.
pub fn fundamental(set: &InvariantSet) -> Vec<InvariantEntry> {
    let mut kept: Vec<InvariantEntry> = Vec::new();
    let mut index: HashMap<Monomial, usize> = HashMap::new();
    let mut by_degree: BTreeMap<i32, Vec<&InvariantEntry>> = BTreeMap::new();
    for e in &set.entries {
        by_degree.entry(e.degree).or_default().push(e);
    }
    for (d, group) in by_degree {
        let mut products = Vec::new();
        if kept.iter().all(|k| k.degree > 0) {
            collect_products(&kept, d, 0, None, &mut products);
        }
        // a shared column index for products and candidates at this degree
        let mut polys: Vec<&MultiPoly<Rational>> = products.iter().collect();
        polys.extend(group.iter().map(|e| &e.poly));
        for p in &polys {
            for (m, _) in p.terms() {
                let next = index.len();
                index.entry(m.clone()).or_insert(next);
            }
        }
        let mut ech = SparseEchelon::new(index.len());
        for p in &products {
            ech.insert(poly_to_vector(&index, p).expect("indexed"));
        }
        for e in group {
            if ech.insert(poly_to_vector(&index, &e.poly).expect("indexed")) {
                kept.push(e.clone());
            }
        }
    }
    kept
}

/// Products of at least two kept generators whose degrees sum to `d`.
fn collect_products(
    gens: &[InvariantEntry],
    d: i32,
    start: usize,
    acc: Option<(MultiPoly<Rational>, usize)>,
    out: &mut Vec<MultiPoly<Rational>>,
) {
    let (cur_deg, count) = match &acc {
        Some((p, c)) => (laurent_degree(p), *c),
        None => (0, 0),
    };
    if cur_deg == d && count >= 2 {
        out.push(acc.unwrap().0);
        return;
    }
    for (i, g) in gens.iter().enumerate().skip(start) {
        if cur_deg + g.degree > d {
            continue;
        }
        let next = match &acc {
            Some((p, _)) => p * &g.poly,
            None => g.poly.clone(),
        };
        collect_products(gens, d, i, Some((next, count + 1)), out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::fixtures;
    use crate::invariants::operators::coefficient_vars;

    fn poly(s: &str, n: usize) -> MultiPoly<Rational> {
        Expr::parse(s).unwrap().to_laurent(&coefficient_vars(n)).unwrap()
    }

    #[test]
    fn kdv_linear_invariant() {
        let set = invariant_basis(&fixtures::kdv(), &SearchOptions::global(4, 1)).unwrap();
        assert_eq!(set.polys(), vec![&poly("a4", 4)]);
    }

    #[test]
    fn heat_quadratic_invariant() {
        let set = invariant_basis(&fixtures::heat(), &SearchOptions::global(6, 2)).unwrap();
        assert_eq!(set.polys(), vec![&poly("a4^2-4*a2*a6", 6)]);
    }

    #[test]
    fn kdv_stratum_search() {
        let chart = Chart::parse(4, &["a4=0".into()]).unwrap();
        let set = invariant_basis(&fixtures::kdv(), &SearchOptions::on(chart, 5)).unwrap();
        assert_eq!(set.polys(), vec![&poly("a2^2*a3^3", 4)]);
    }

    #[test]
    fn fundamental_drops_products() {
        let set = invariant_basis(&fixtures::kdv(), &SearchOptions::global(4, 3)).unwrap();
        assert_eq!(set.len(), 3);
        let f = fundamental(&set);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].poly, poly("a4", 4));
    }

    #[test]
    fn abelian_everything_invariant() {
        let set = invariant_basis(&LieAlgebra::abelian(3), &SearchOptions::global(3, 1)).unwrap();
        assert_eq!(set.len(), 3);
        assert_eq!(set.blocks[0].rank, 0);
    }
}
