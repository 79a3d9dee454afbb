//! Exact inequivalence certificates from invariants, semi-invariants and
//! invariant strata.
//!
//! If `a A(e) = c t` then on every invariant chart containing both points:
//! invariants satisfy `I(a) = c^d I(t)` and semi-invariants `S(a) = k c^d S(t)`
//! with `k > 0`. A contradiction with real `c != 0` certifies inequivalence.
//!
//! A quadratic invariant `Q` with exactly one negative direction adds one
//! more quantity: on causal vectors (`Q <= 0`) outside its radical the
//! polarization `B(x, e)` with a timelike `e` never vanishes, so the
//! connected adjoint group cannot change its sign, and rescaling multiplies
//! it by `c`.

use std::collections::BTreeSet;

use serde::Serialize;

use super::target::TargetFamily;
use crate::error::Error;
use crate::expr::Expr;
use crate::invariants::strata::{piece_invariants, Piece};
use crate::invariants::{
    is_invariant, is_semi_invariant, stratify_tree, Chart, InvariantEntry, SemiInvariant,
};
use crate::liealg::LieAlgebra;
use crate::symkernel::{format_rational, parse_rational, MultiPoly, Rational, Surd, Vars};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelKind {
    Global,
    Stratum,
    Ideal,
}

/// A chart with the invariants and semi-invariants valid on it.
#[derive(Clone, Debug)]
pub struct Level {
    pub kind: LevelKind,
    pub label: String,
    pub chart: Chart,
    pub nonzero: BTreeSet<usize>,
    pub invariants: Vec<InvariantEntry>,
    pub semis: Vec<SemiInvariant>,
    /// the chart itself is an invariant, scale-invariant set
    pub closed: bool,
}

/// Element with coefficients polynomial in some parameters (none for a
/// fixed element).
#[derive(Clone, Debug)]
pub struct SymPoint {
    pub coeffs: Vec<MultiPoly<Surd>>,
}

impl SymPoint {
    pub fn fixed(v: &[Surd]) -> Self {
        let vars: Vars = Vec::<String>::new().into();
        SymPoint {
            coeffs: v.iter().map(|s| MultiPoly::constant(&vars, s.clone())).collect(),
        }
    }

    pub fn rational(v: &[Rational]) -> Self {
        Self::fixed(&crate::invariants::to_surd(v))
    }

    pub fn family(t: &TargetFamily) -> Self {
        SymPoint {
            coeffs: t.symbolic().to_vec(),
        }
    }
}

/// A value at a symbolic point: known exactly, or depending on parameters.
#[derive(Clone, Debug, PartialEq)]
enum Sym {
    Known(Surd),
    Unknown,
}

fn eval_sym(p: &MultiPoly<Rational>, x: &SymPoint) -> Sym {
    match p.compose(&x.coeffs, |q| Surd::rational(q.clone()), Surd::inverse) {
        Ok(v) if v.is_zero() => Sym::Known(Surd::zero()),
        Ok(v) => match v.constant_value() {
            Some(c) if v.is_constant() => Sym::Known(c),
            _ => Sym::Unknown,
        },
        Err(_) => Sym::Unknown,
    }
}

/// Whether the point lies on the level's chart (`None`: parameter dependent).
fn membership(level: &Level, x: &SymPoint) -> Option<bool> {
    membership_of(&level.chart, &level.nonzero, x)
}

fn membership_of(chart: &Chart, nonzero: &BTreeSet<usize>, x: &SymPoint) -> Option<bool> {
    let vars = &chart.vars;
    for &v in nonzero {
        match eval_sym(&MultiPoly::var(vars, v), x) {
            Sym::Known(s) if s.is_zero() => return Some(false),
            Sym::Known(_) => {}
            Sym::Unknown => return None,
        }
    }
    let mut all = true;
    for (i, s) in &chart.subs {
        let diff = &MultiPoly::var(vars, *i) - s;
        match eval_sym(&diff, x) {
            Sym::Known(d) if d.is_zero() => {}
            Sym::Known(_) => all = false,
            Sym::Unknown => return None,
        }
    }
    Some(all)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    InvariantMismatch,
    SemiInvariantVanishing,
    SemiInvariantSign,
    StratumMembership,
    CausalOrientation,
}

/// A Lorentzian quadratic invariant with a timelike vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Orientation {
    pub form: String,
    #[serde(with = "crate::symkernel::rational::serde_vec")]
    pub timelike: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertItem {
    pub poly: String,
    pub degree: i32,
    /// present for semi-invariants
    pub character: Option<Vec<String>>,
    pub source: String,
    pub target: String,
    /// present for time-orientation quantities; `poly` is then `B(x, e)`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Orientation>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub level: String,
    pub chart: Vec<String>,
    pub nonzero: Vec<String>,
    pub items: Vec<CertItem>,
    /// membership of (source, target) for stratum certificates
    pub membership: Option<(bool, bool)>,
    pub allow_scale: bool,
    pub reason: String,
}

struct Quantity {
    degree: i32,
    semi: bool,
    oriented: bool,
    s: Surd,
    t: Surd,
}

/// The first contradiction among quantities known on both points, as
/// `(kind, indices involved, reason)`.
fn conflict(qs: &[Quantity], allow_scale: bool) -> Option<(CertificateKind, Vec<usize>, String)> {
    let kind_of = |q: &Quantity| {
        if q.semi {
            CertificateKind::SemiInvariantVanishing
        } else {
            CertificateKind::InvariantMismatch
        }
    };
    for (i, q) in qs.iter().enumerate() {
        if q.s.is_zero() != q.t.is_zero() {
            return Some((kind_of(q), vec![i], "vanishes on exactly one of the two elements".into()));
        }
    }
    let live: Vec<usize> = (0..qs.len()).filter(|&i| !qs[i].s.is_zero()).collect();
    let sign_kind = |q: &Quantity| {
        if q.semi {
            CertificateKind::SemiInvariantSign
        } else {
            CertificateKind::InvariantMismatch
        }
    };
    if !allow_scale {
        for &i in &live {
            let q = &qs[i];
            if !q.semi && q.s != q.t {
                return Some((CertificateKind::InvariantMismatch, vec![i], "values differ and rescaling is not allowed".into()));
            }
            if q.semi && q.s.signum() != q.t.signum() {
                return Some((CertificateKind::SemiInvariantSign, vec![i], "signs differ and rescaling is not allowed".into()));
            }
        }
        return None;
    }
    for &i in &live {
        let q = &qs[i];
        if q.degree == 0 && !q.semi && q.s != q.t {
            return Some((kind_of(q), vec![i], "scale-free invariant takes different values".into()));
        }
        if q.degree % 2 == 0 && q.s.signum() != q.t.signum() {
            return Some((sign_kind(q), vec![i], "even degree: no real rescaling changes the sign".into()));
        }
    }
    // odd degrees all determine sign(c)
    let mut first_odd: Option<usize> = None;
    for &i in &live {
        let q = &qs[i];
        if q.degree % 2 == 0 {
            continue;
        }
        match first_odd {
            None => first_odd = Some(i),
            Some(j) => {
                let p = &qs[j];
                if q.s.signum() * q.t.signum() != p.s.signum() * p.t.signum() {
                    let kind = if p.oriented || q.oriented {
                        CertificateKind::CausalOrientation
                    } else if p.semi || q.semi {
                        CertificateKind::SemiInvariantSign
                    } else {
                        CertificateKind::InvariantMismatch
                    };
                    return Some((kind, vec![j, i], "odd degrees force opposite signs of the scale".into()));
                }
            }
        }
    }
    // invariant magnitudes: c^d_k = s_k/t_k must be consistent
    let inv: Vec<usize> = live.iter().copied().filter(|&i| !qs[i].semi && qs[i].degree != 0).collect();
    for (x, &k) in inv.iter().enumerate() {
        for &l in &inv[x + 1..] {
            let (p, q) = (&qs[k], &qs[l]);
            let lhs = p.s.powi(q.degree).unwrap().mul(&q.t.powi(p.degree).unwrap());
            let rhs = q.s.powi(p.degree).unwrap().mul(&p.t.powi(q.degree).unwrap());
            if lhs != rhs {
                return Some((
                    CertificateKind::InvariantMismatch,
                    vec![k, l],
                    "no common scale reconciles both invariants".into(),
                ));
            }
        }
    }
    None
}

pub struct CertificateContext {
    pub alg: LieAlgebra,
    pub degree: u32,
    pub levels: Vec<Level>,
    /// Lorentzian quadratic invariants, valid on every level
    pub orientations: Vec<(MultiPoly<Rational>, Vec<Rational>)>,
}

/// Symmetric matrix of a homogeneous quadratic, `Q(x) = x^T S x`.
fn quadratic_matrix(p: &MultiPoly<Rational>) -> Option<Vec<Vec<Rational>>> {
    let n = p.nvars();
    let mut s = vec![vec![Rational::zero(); n]; n];
    let half = Rational::new(1.into(), 2.into());
    for (m, c) in p.terms() {
        if m.degree() != 2 || m.0.iter().any(|&e| e < 0) {
            return None;
        }
        let idx: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat_n(i, m.0[i] as usize)).collect();
        let (i, j) = (idx[0], idx[1]);
        if i == j {
            s[i][i] += c;
        } else {
            s[i][j] += c * &half;
            s[j][i] += c * &half;
        }
    }
    Some(s)
}

/// Congruence diagonalization `P S P^T = D`; returns the diagonal and `P`.
fn diagonalize(s: &[Vec<Rational>]) -> (Vec<Rational>, Vec<Vec<Rational>>) {
    let n = s.len();
    let mut m = s.to_vec();
    let mut p: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::from_integer(1.into()) } else { Rational::zero() }).collect())
        .collect();
    // row op r_i += k r_j applied on both sides
    let add = |m: &mut Vec<Vec<Rational>>, p: &mut Vec<Vec<Rational>>, i: usize, j: usize, k: &Rational| {
        for c in 0..n {
            let v = &m[j][c] * k;
            m[i][c] += v;
            let v = &p[j][c] * k;
            p[i][c] += v;
        }
        for r in 0..n {
            let v = &m[r][j] * k;
            m[r][i] += v;
        }
    };
    for k in 0..n {
        if m[k][k].is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !m[i][i].is_zero()) {
                m.swap(k, i);
                p.swap(k, i);
                for row in m.iter_mut() {
                    row.swap(k, i);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !m[k][j].is_zero()) {
                add(&mut m, &mut p, k, j, &Rational::from_integer(1.into()));
            } else if let Some((i, j)) = (k + 1..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !m[i][j].is_zero())
            {
                add(&mut m, &mut p, i, j, &Rational::from_integer(1.into()));
                m.swap(k, i);
                p.swap(k, i);
                for row in m.iter_mut() {
                    row.swap(k, i);
                }
            } else {
                continue;
            }
        }
        for r in k + 1..n {
            if m[r][k].is_zero() {
                continue;
            }
            let f = -(&m[r][k] / &m[k][k]);
            add(&mut m, &mut p, r, k, &f);
        }
    }
    ((0..n).map(|i| m[i][i].clone()).collect(), p)
}

/// `(Q', e)` with `Q' = +-Q` of signature `(p, 1)` and `Q'(e) < 0`.
pub fn lorentzian(q: &MultiPoly<Rational>) -> Option<(MultiPoly<Rational>, Vec<Rational>)> {
    let s = quadratic_matrix(q)?;
    let (d, p) = diagonalize(&s);
    let neg = d.iter().filter(|x| x.is_negative()).count();
    let pos = d.iter().filter(|x| x.is_positive()).count();
    let (form, k) = if neg == 1 {
        (q.clone(), d.iter().position(|x| x.is_negative())?)
    } else if pos == 1 {
        (q.neg(), d.iter().position(|x| x.is_positive())?)
    } else {
        return None;
    };
    Some((form, p[k].clone()))
}

/// The polarization `B(x, e) = x^T S e` as a linear polynomial.
fn polarization(form: &MultiPoly<Rational>, e: &[Rational]) -> Option<MultiPoly<Rational>> {
    let s = quadratic_matrix(form)?;
    let vars = form.vars().clone();
    let n = vars.len();
    Some(MultiPoly::from_terms(
        &vars,
        (0..n).map(|i| {
            let c: Rational = (0..n).map(|j| &s[i][j] * &e[j]).sum();
            (crate::symkernel::Monomial::var(n, i), c)
        }),
    ))
}

/// Orientation quantity for both points, when both are causal and the
/// polarization is known and nonzero at both.
fn oriented_pair(
    form: &MultiPoly<Rational>,
    e: &[Rational],
    a: &SymPoint,
    t: &SymPoint,
) -> Option<(MultiPoly<Rational>, Surd, Surd)> {
    let causal = |x: &SymPoint| matches!(eval_sym(form, x), Sym::Known(v) if v.signum() <= 0);
    if !causal(a) || !causal(t) {
        return None;
    }
    let l = polarization(form, e)?;
    match (eval_sym(&l, a), eval_sym(&l, t)) {
        (Sym::Known(s), Sym::Known(tv)) if !s.is_zero() && !tv.is_zero() => Some((l, s, tv)),
        _ => None,
    }
}

fn closed_chart(chart: &Chart, nonzero: &BTreeSet<usize>) -> bool {
    nonzero.is_empty() && chart.is_homogeneous() && chart.is_polynomial()
}

fn ideal_piece(n: usize, ideal: &crate::liealg::Subspace) -> Result<Piece, Error> {
    let forms = ideal.equations();
    let (r, pivots) = crate::symkernel::Matrix::from_rows(forms)?.rref();
    let vars = crate::invariants::coefficient_vars(n);
    let mut piece = Piece::global(n);
    for (row, &p) in pivots.iter().enumerate() {
        // a_p = -sum_{k != p} r_k a_k
        let value = MultiPoly::from_terms(
            &vars,
            (0..n)
                .filter(|&k| k != p && !r[(row, k)].is_zero())
                .map(|k| (crate::symkernel::Monomial::var(n, k), -r[(row, k)].clone())),
        );
        piece.chart.push(p, value)?;
    }
    Ok(piece)
}

use num::traits::{Signed, Zero};

impl CertificateContext {
    /// Precomputes levels: every invariant chart of the strata tree and
    /// every characteristic ideal.
    pub fn new(alg: &LieAlgebra, degree: u32) -> Result<Self, Error> {
        let n = alg.dim();
        let tree = stratify_tree(alg, degree)?;
        let mut levels = Vec::new();
        for node in tree.walk() {
            let Some(piece) = &node.piece else { continue };
            if !node.invariant_chart {
                continue;
            }
            let label = if node.conditions.is_empty() {
                "all elements".to_string()
            } else {
                node.conditions.join("; ")
            };
            levels.push(Level {
                kind: if node.conditions.is_empty() {
                    LevelKind::Global
                } else {
                    LevelKind::Stratum
                },
                label,
                closed: closed_chart(&piece.chart, &piece.nonzero),
                chart: piece.chart.clone(),
                nonzero: piece.nonzero.clone(),
                invariants: node.invariant_entries.clone(),
                semis: node.semi_entries.clone(),
            });
        }
        for ideal in alg.characteristic_ideals(64) {
            let piece = ideal_piece(n, &ideal)?;
            let (invariants, semis) = piece_invariants(alg, &piece, degree)?;
            levels.push(Level {
                kind: LevelKind::Ideal,
                label: format!(
                    "ideal span{{{}}}",
                    ideal
                        .basis()
                        .iter()
                        .map(|v| alg.format_element(v))
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
                closed: true,
                chart: piece.chart,
                nonzero: piece.nonzero,
                invariants,
                semis,
            });
        }
        let orientations = levels
            .iter()
            .filter(|l| l.kind == LevelKind::Global)
            .flat_map(|l| l.invariants.iter())
            .filter(|e| e.degree == 2 && e.denominator.is_none())
            .filter_map(|e| lorentzian(&e.poly))
            .collect();
        Ok(CertificateContext {
            alg: alg.clone(),
            degree,
            levels,
            orientations,
        })
    }

    /// Searches the levels in order for an exact contradiction.
    pub fn certify(&self, a: &SymPoint, t: &SymPoint, allow_scale: bool) -> Option<Certificate> {
        let vars = crate::invariants::coefficient_vars(self.alg.dim());
        for level in &self.levels {
            let (ma, mt) = (membership(level, a), membership(level, t));
            let describe_nonzero = || level.nonzero.iter().map(|&i| vars[i].clone()).collect::<Vec<_>>();
            if level.closed {
                if let (Some(x), Some(y)) = (ma, mt) {
                    if x != y {
                        return Some(Certificate {
                            kind: CertificateKind::StratumMembership,
                            level: level.label.clone(),
                            chart: level.chart.describe(),
                            nonzero: describe_nonzero(),
                            items: vec![],
                            membership: Some((x, y)),
                            allow_scale,
                            reason: "exactly one element lies in an invariant subset".into(),
                        });
                    }
                }
            }
            if ma != Some(true) || mt != Some(true) {
                continue;
            }
            let mut qs = Vec::new();
            let mut items = Vec::new();
            let entries = level
                .invariants
                .iter()
                .map(|e| (&e.poly, e.degree, None))
                .chain(level.semis.iter().map(|s| (&s.poly, s.degree, Some(&s.character))));
            for (p, d, chi) in entries {
                if let (Sym::Known(s), Sym::Known(tv)) = (eval_sym(p, a), eval_sym(p, t)) {
                    items.push(CertItem {
                        poly: p.to_string(),
                        degree: d,
                        character: chi.map(|c| c.iter().map(format_rational).collect()),
                        source: s.to_string(),
                        target: tv.to_string(),
                        orientation: None,
                    });
                    qs.push(Quantity {
                        degree: d,
                        semi: chi.is_some(),
                        oriented: false,
                        s,
                        t: tv,
                    });
                }
            }
            for (form, e) in &self.orientations {
                if let Some((l, s, tv)) = oriented_pair(form, e, a, t) {
                    items.push(CertItem {
                        poly: l.to_string(),
                        degree: 1,
                        character: None,
                        source: s.to_string(),
                        target: tv.to_string(),
                        orientation: Some(Orientation {
                            form: form.to_string(),
                            timelike: e.clone(),
                        }),
                    });
                    qs.push(Quantity {
                        degree: 1,
                        semi: true,
                        oriented: true,
                        s,
                        t: tv,
                    });
                }
            }
            if let Some((kind, idx, reason)) = conflict(&qs, allow_scale) {
                return Some(Certificate {
                    kind,
                    level: level.label.clone(),
                    chart: level.chart.describe(),
                    nonzero: describe_nonzero(),
                    items: idx.iter().map(|&i| items[i].clone()).collect(),
                    membership: None,
                    allow_scale,
                    reason,
                });
            }
        }
        None
    }
}

impl Certificate {
    /// Recomputes everything the certificate claims from its serialized
    /// content: chart tangency, (semi-)invariance of each polynomial,
    /// membership and values at both points, and the contradiction itself.
    pub fn reverify(&self, alg: &LieAlgebra, a: &SymPoint, t: &SymPoint) -> Result<bool, Error> {
        let n = alg.dim();
        let chart = Chart::parse(n, &self.chart)?;
        let vars = chart.vars.clone();
        let mut nonzero = BTreeSet::new();
        for name in &self.nonzero {
            let i = vars
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::Parse(format!("unknown coordinate {name}")))?;
            nonzero.insert(i);
        }
        if !chart.is_tangent(alg)? {
            return Ok(false);
        }
        if self.kind == CertificateKind::StratumMembership {
            if !closed_chart(&chart, &nonzero) {
                return Ok(false);
            }
            let got = (membership_of(&chart, &nonzero, a), membership_of(&chart, &nonzero, t));
            return Ok(match (got, self.membership) {
                ((Some(x), Some(y)), Some(m)) => x != y && (x, y) == m,
                _ => false,
            });
        }
        if membership_of(&chart, &nonzero, a) != Some(true) || membership_of(&chart, &nonzero, t) != Some(true) {
            return Ok(false);
        }
        let mut qs = Vec::new();
        for item in &self.items {
            if let Some(o) = &item.orientation {
                let Some((s, tv)) = self.reverify_orientation(alg, item, o, a, t)? else {
                    return Ok(false);
                };
                qs.push(Quantity {
                    degree: 1,
                    semi: true,
                    oriented: true,
                    s,
                    t: tv,
                });
                continue;
            }
            let p = Expr::parse(&item.poly)?.to_laurent(&vars)?;
            let ok = match &item.character {
                Some(chi) => {
                    let chi = chi.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
                    is_semi_invariant(alg, &chart, &p, &chi)?
                }
                None => is_invariant(alg, &chart, &p)?,
            };
            if !ok || p.degree().unwrap_or(0) != item.degree {
                return Ok(false);
            }
            let (Sym::Known(s), Sym::Known(tv)) = (eval_sym(&p, a), eval_sym(&p, t)) else {
                return Ok(false);
            };
            if s.to_string() != item.source || tv.to_string() != item.target {
                return Ok(false);
            }
            qs.push(Quantity {
                degree: item.degree,
                semi: item.character.is_some(),
                oriented: false,
                s,
                t: tv,
            });
        }
        Ok(match conflict(&qs, self.allow_scale) {
            Some((kind, idx, _)) => kind == self.kind && idx.len() == qs.len(),
            None => false,
        })
    }
}

impl Certificate {
    /// Checks an orientation item from scratch: the form is a global
    /// invariant of signature `(p, 1)`, `e` is timelike, `poly` is the
    /// polarization, both points are causal and the recorded values match.
    fn reverify_orientation(
        &self,
        alg: &LieAlgebra,
        item: &CertItem,
        o: &Orientation,
        a: &SymPoint,
        t: &SymPoint,
    ) -> Result<Option<(Surd, Surd)>, Error> {
        let n = alg.dim();
        let vars = crate::invariants::coefficient_vars(n);
        let form = Expr::parse(&o.form)?.to_laurent(&vars)?;
        if o.timelike.len() != n || !is_invariant(alg, &Chart::global(n), &form)? {
            return Ok(None);
        }
        let Some(s) = quadratic_matrix(&form) else {
            return Ok(None);
        };
        let (d, _) = diagonalize(&s);
        if d.iter().filter(|x| x.is_negative()).count() != 1 {
            return Ok(None);
        }
        let e = &o.timelike;
        let qe: Rational = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| &s[i][j] * &e[i] * &e[j]).sum();
        if !qe.is_negative() {
            return Ok(None);
        }
        let Some((l, sv, tv)) = oriented_pair(&form, e, a, t) else {
            return Ok(None);
        };
        let claimed = Expr::parse(&item.poly)?.to_laurent(&vars)?;
        if claimed != l || item.degree != 1 || sv.to_string() != item.source || tv.to_string() != item.target {
            return Ok(None);
        }
        Ok(Some((sv, tv)))
    }
}
