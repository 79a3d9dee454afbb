//! Case tree of invariant strata: branch on the first invariant (or,
//! lacking one, semi-invariant) of a chart, split its zero set into new
//! charts and recompute.

use std::collections::BTreeSet;

use num::traits::One;
use serde::Serialize;

use super::basis::{fundamental, invariant_basis, InvariantEntry, SearchOptions};
use super::operators::{restricted_operators, Chart};
use super::semi::{fundamental_semi, semi_invariants, SemiInvariant};
use crate::error::Error;
use crate::liealg::LieAlgebra;
use crate::symkernel::{Matrix, Monomial, MultiPoly, Rational};

/// A chart together with the coordinates assumed nonzero on it.
#[derive(Clone, Debug)]
pub struct Piece {
    pub chart: Chart,
    pub nonzero: BTreeSet<usize>,
    pub conditions: Vec<String>,
}

impl Piece {
    pub fn global(n: usize) -> Self {
        Piece {
            chart: Chart::global(n),
            nonzero: BTreeSet::new(),
            conditions: vec![],
        }
    }

    fn with(&self, var: usize, value: MultiPoly<Rational>, nonzero: &[usize], cond: String) -> Result<Self, Error> {
        let mut chart = self.chart.clone();
        chart.push(var, value)?;
        let mut nz = self.nonzero.clone();
        nz.extend(nonzero.iter().copied());
        let mut conditions = self.conditions.clone();
        conditions.push(cond);
        Ok(Piece {
            chart,
            nonzero: nz,
            conditions,
        })
    }

    /// A designated denominator for Laurent searches on this piece.
    pub fn denominator(&self) -> Option<usize> {
        self.nonzero.iter().next_back().copied()
    }
}

/// Pieces covering `{p = 0}` inside `piece`. Returns `None` when the zero
/// set has no polynomial chart (no variable occurs linearly with a monomial
/// coefficient).
pub fn zero_pieces(piece: &Piece, p: &MultiPoly<Rational>) -> Result<Option<Vec<Piece>>, Error> {
    let q = piece.chart.restrict(p)?;
    if q.is_zero() {
        return Ok(Some(vec![piece.clone()]));
    }
    if q.is_constant() {
        return Ok(Some(vec![]));
    }
    let n = q.nvars();
    let vars = q.vars().clone();
    // split off the monomial content
    let content = Monomial((0..n).map(|i| q.min_var_exponent(i).unwrap_or(0)).collect());
    let mut q = q.shift(&Monomial(content.0.iter().map(|e| -e).collect()));
    let mut out = Vec::new();
    for (i, &e) in content.0.iter().enumerate() {
        if e > 0 && !piece.nonzero.contains(&i) {
            let cond = format!("{} = 0", vars[i]);
            out.push(piece.with(i, MultiPoly::zero(&vars), &[], cond)?);
        }
    }
    if q.is_constant() {
        return Ok(Some(out));
    }
    while let Some((r, _)) = q.sqrt_exact() {
        if r.is_constant() {
            break;
        }
        q = r;
    }
    // variable occurring linearly with a monomial coefficient
    let mut best: Option<(usize, MultiPoly<Rational>, (u8, usize))> = None;
    for x in 0..n {
        if q.max_var_exponent(x) != Some(1) || q.min_var_exponent(x).unwrap_or(0) < 0 {
            continue;
        }
        let a = q.partial(x);
        if a.nterms() != 1 || a.uses_var(x) {
            continue;
        }
        let avars: Vec<usize> = (0..n).filter(|&i| a.uses_var(i)).collect();
        let rank = if avars.is_empty() {
            (2, x)
        } else if avars.iter().all(|i| piece.nonzero.contains(i)) {
            (1, *avars.iter().max().unwrap())
        } else {
            (0, *avars.iter().max().unwrap())
        };
        if best.as_ref().is_none_or(|b| rank > b.2) {
            best = Some((x, a, rank));
        }
    }
    let Some((x, a, _)) = best else {
        return Ok(None);
    };
    let (am, ac) = a.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
    let b = &q - &(&a * &MultiPoly::var(&vars, x));
    let inv = MultiPoly::monomial(&vars, Monomial(am.0.iter().map(|e| -e).collect()), ac.recip());
    let value = (&b * &inv).neg();
    let avars: Vec<usize> = (0..n).filter(|&i| am.0[i] != 0).collect();
    let fresh: Vec<usize> = avars.iter().copied().filter(|i| !piece.nonzero.contains(i)).collect();
    let mut cond = format!("{} = {}", vars[x], value);
    for &i in &fresh {
        cond.push_str(&format!(", {} != 0", vars[i]));
    }
    out.push(piece.with(x, value, &fresh, cond)?);
    for &y in &fresh {
        let sub = piece.with(y, MultiPoly::zero(&vars), &[], format!("{} = 0", vars[y]))?;
        match zero_pieces(&sub, p)? {
            Some(v) => out.extend(v),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeInvariant {
    pub poly: String,
    pub degree: i32,
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeSemi {
    pub poly: String,
    pub degree: i32,
    pub character: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StratumNode {
    /// path conditions from the root
    pub conditions: Vec<String>,
    pub chart: Vec<String>,
    pub nonzero: Vec<String>,
    /// every operator is tangent to the chart
    pub invariant_chart: bool,
    pub invariants: Vec<NodeInvariant>,
    pub semi_invariants: Vec<NodeSemi>,
    /// polynomial branched on, if any
    pub branch: Option<String>,
    /// normalized cases with the branch polynomial nonzero
    pub cases: Vec<String>,
    pub note: Option<String>,
    pub children: Vec<StratumNode>,
    #[serde(skip)]
    pub piece: Option<Piece>,
    #[serde(skip)]
    pub invariant_entries: Vec<InvariantEntry>,
    #[serde(skip)]
    pub semi_entries: Vec<SemiInvariant>,
}

impl StratumNode {
    /// Depth-first list of nodes.
    pub fn walk(&self) -> Vec<&StratumNode> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.walk());
        }
        out
    }
}

/// Invariants and semi-invariants found on a piece.
pub fn piece_invariants(
    alg: &LieAlgebra,
    piece: &Piece,
    max_degree: u32,
) -> Result<(Vec<InvariantEntry>, Vec<SemiInvariant>), Error> {
    let mut opts = SearchOptions::on(piece.chart.clone(), max_degree);
    if let Some(v) = piece.denominator() {
        opts = opts.with_denominator(v, 1);
    }
    let inv = fundamental(&invariant_basis(alg, &opts)?);
    let semi = if piece.chart.is_homogeneous() {
        let all = semi_invariants(alg, &opts)?;
        fundamental_semi(&all).into_iter().filter(|s| !s.is_invariant()).collect()
    } else {
        vec![]
    };
    Ok((inv, semi))
}

/// Builds the case tree down to `alg.dim()` levels.
pub fn stratify_tree(alg: &LieAlgebra, max_degree: u32) -> Result<StratumNode, Error> {
    build(alg, Piece::global(alg.dim()), max_degree, 0)
}

fn build(alg: &LieAlgebra, piece: Piece, max_degree: u32, depth: usize) -> Result<StratumNode, Error> {
    let vars = piece.chart.vars.clone();
    let mut node = StratumNode {
        conditions: piece.conditions.clone(),
        chart: piece.chart.describe(),
        nonzero: piece.nonzero.iter().map(|&i| vars[i].clone()).collect(),
        invariant_chart: piece.chart.is_tangent(alg)?,
        invariants: vec![],
        semi_invariants: vec![],
        branch: None,
        cases: vec![],
        note: None,
        children: vec![],
        piece: None,
        invariant_entries: vec![],
        semi_entries: vec![],
    };
    if !node.invariant_chart {
        node.note = Some("chart is not preserved by the adjoint action; not refined".into());
        node.piece = Some(piece);
        return Ok(node);
    }
    if piece.chart.free_vars().is_empty() {
        node.note = Some("zero element".into());
        node.piece = Some(piece);
        return Ok(node);
    }
    let (inv, semi) = piece_invariants(alg, &piece, max_degree)?;
    node.invariants = inv
        .iter()
        .map(|e| NodeInvariant {
            poly: e.poly.to_string(),
            degree: e.degree,
        })
        .collect();
    node.semi_invariants = semi
        .iter()
        .map(|s| NodeSemi {
            poly: s.poly.to_string(),
            degree: s.degree,
            character: s.character.iter().map(crate::symkernel::format_rational).collect(),
        })
        .collect();
    let branch: Option<(MultiPoly<Rational>, i32, bool)> = inv
        .first()
        .map(|e| (e.poly.clone(), e.degree, true))
        .or_else(|| semi.first().map(|s| (s.poly.clone(), s.degree, false)));
    if let Some((p, d, is_inv)) = branch {
        let name = p.to_string();
        node.branch = Some(name.clone());
        node.cases = if !is_inv {
            vec![format!("{name} != 0")]
        } else if d % 2 != 0 {
            vec![format!("{name} = 1")]
        } else {
            vec![format!("{name} = 1"), format!("{name} = -1")]
        };
        if is_inv && inv.len() > 1 {
            let rest: Vec<String> = inv[1..].iter().map(|e| e.poly.to_string()).collect();
            node.note = Some(format!("with the branch invariant nonzero, frozen: {}", rest.join(", ")));
        }
        if depth < alg.dim() {
            match zero_pieces(&piece, &p)? {
                Some(children) => {
                    for mut c in children {
                        if let Some(last) = c.conditions.last_mut() {
                            if *last != format!("{name} = 0") {
                                *last = format!("{name} = 0: {last}");
                            }
                        }
                        node.children.push(build(alg, c, max_degree, depth + 1)?);
                    }
                }
                None => node.note = Some(format!("zero set of {name} has no polynomial chart")),
            }
        }
    }
    node.invariant_entries = inv;
    node.semi_entries = semi;
    node.piece = Some(piece);
    Ok(node)
}

/// Generic orbit dimension on a piece: rank of the restricted operator
/// system, evaluated at a few fixed points of the free coordinates.
pub fn orbit_rank(alg: &LieAlgebra, piece: &Piece) -> Result<usize, Error> {
    let n = alg.dim();
    let free = piece.chart.free_vars();
    if free.is_empty() {
        return Ok(0);
    }
    let ops = restricted_operators(alg, &piece.chart)?;
    const PRIMES: [i64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    let mut best = 0;
    for shift in 0..3 {
        let vals: Vec<Rational> = (0..n)
            .map(|k| Rational::from_integer((PRIMES[(k + shift) % PRIMES.len()] * (1 + shift as i64)).into()))
            .collect();
        let mut m = Matrix::<Rational>::zeros(ops.len(), n);
        for (r, op) in ops.iter().enumerate() {
            for (i, t) in &op.parts {
                m[(r, *i)] = t.eval_rational(&vals)?;
            }
        }
        best = best.max(m.rank());
    }
    Ok(best)
}

/// Drops child subtrees along which the orbit dimension never falls below
/// that of the parent: such zero sets are level sets, not new strata. A
/// node whose children are all dropped loses its branch.
pub fn merge_uniform(alg: &LieAlgebra, node: &mut StratumNode) -> Result<(), Error> {
    fn min_rank(alg: &LieAlgebra, node: &StratumNode) -> Result<Option<usize>, Error> {
        let own = match (&node.piece, node.invariant_chart) {
            (Some(p), true) => Some(orbit_rank(alg, p)?),
            _ => None,
        };
        let mut lo = own;
        for c in &node.children {
            let Some(r) = min_rank(alg, c)? else {
                return Ok(None);
            };
            lo = Some(lo.map_or(r, |l| l.min(r)));
        }
        if own.is_none() {
            return Ok(None);
        }
        Ok(lo)
    }
    let Some(piece) = node.piece.clone() else {
        return Ok(());
    };
    if !node.invariant_chart || node.children.is_empty() {
        return Ok(());
    }
    let rank = orbit_rank(alg, &piece)?;
    let mut kept = Vec::new();
    for mut c in std::mem::take(&mut node.children) {
        if min_rank(alg, &c)?.is_some_and(|r| r >= rank) {
            continue;
        }
        merge_uniform(alg, &mut c)?;
        kept.push(c);
    }
    if kept.is_empty() {
        node.branch = None;
        node.cases.clear();
        node.note = Some(format!("orbit dimension {rank} throughout; a single stratum"));
    }
    node.children = kept;
    Ok(())
}

/// `1` as a polynomial, used for trivially nonzero checks.
pub fn unit(vars: &crate::symkernel::Vars) -> MultiPoly<Rational> {
    MultiPoly::constant(vars, Rational::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn kdv_tree() {
        let t = stratify_tree(&fixtures::kdv(), 5).unwrap();
        assert_eq!(t.branch.as_deref(), Some("a4"));
        assert_eq!(t.children.len(), 1);
        let c = &t.children[0];
        assert_eq!(c.chart, vec!["a4=0"]);
        assert_eq!(c.invariants[0].poly, "a2^2*a3^3");
        assert_eq!(c.children.len(), 2);
    }

    #[test]
    fn heat_tree_reaches_laurent_invariant() {
        let t = stratify_tree(&fixtures::heat(), 4).unwrap();
        assert_eq!(t.branch.as_deref(), Some("-4*a2*a6 + a4^2"));
        assert_eq!(t.cases.len(), 2);
        let found = t
            .walk()
            .iter()
            .any(|n| n.invariants.iter().any(|i| i.poly == "4*a3 + 2*a4 + a5^2*a6^-1"));
        assert!(found, "{}", serde_json::to_string_pretty(&t).unwrap());
    }

    #[test]
    fn abelian_single_stratum() {
        let t = stratify_tree(&LieAlgebra::abelian(3), 3).unwrap();
        assert_eq!(t.invariants.len(), 3);
        let mut t = t;
        merge_uniform(&LieAlgebra::abelian(3), &mut t).unwrap();
        assert!(t.children.is_empty() && t.branch.is_none());
    }
}
