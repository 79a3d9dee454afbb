//! Exact linear algebra: dense matrices over any coefficient ring, rational
//! row reduction, and a sparse incremental echelon form for large homogeneous
//! systems.

use std::collections::BTreeMap;

use num::traits::{One, Zero};
use num::{BigInt, Signed};

use super::rational::Rational;
use super::ring::Coeff;
use crate::error::Error;

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<C> {
    rows: usize,
    cols: usize,
    data: Vec<C>,
}

impl<C: Coeff> Matrix<C> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![C::ring_zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::ring_one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C>>) -> Result<Self, Error> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::Dimension {
                expected: c,
                found: bad.len(),
            });
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[C] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<C>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Matrix<D> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self, Error> {
        if self.cols != o.rows {
            return Err(Error::Dimension {
                expected: self.cols,
                found: o.rows,
            });
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_ring_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if b.is_ring_zero() {
                        continue;
                    }
                    let t = out[(i, j)].add_ref(&a.mul_ref(b));
                    out[(i, j)] = t;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add_ref(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&C::ring_one().neg_ref()))
    }

    pub fn scale(&self, k: &C) -> Self {
        self.map(|a| a.mul_ref(k))
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn trace(&self) -> C {
        (0..self.rows.min(self.cols)).fold(C::ring_zero(), |acc, i| acc.add_ref(&self[(i, i)]))
    }

    /// Row vector times matrix: `v * self`.
    pub fn left_apply(&self, v: &[C]) -> Result<Vec<C>, Error> {
        if v.len() != self.rows {
            return Err(Error::Dimension {
                expected: self.rows,
                found: v.len(),
            });
        }
        let mut out = vec![C::ring_zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_ring_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let m = &self[(i, j)];
                if !m.is_ring_zero() {
                    *o = o.add_ref(&vi.mul_ref(m));
                }
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(C::is_ring_zero)
    }
}

impl<C> std::ops::Index<(usize, usize)> for Matrix<C> {
    type Output = C;
    fn index(&self, (i, j): (usize, usize)) -> &C {
        &self.data[i * self.cols + j]
    }
}

impl<C> std::ops::IndexMut<(usize, usize)> for Matrix<C> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C {
        &mut self.data[i * self.cols + j]
    }
}

impl Matrix<Rational> {
    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    let v = &m[(i, j)] - &f * &m[(r, j)];
                    m[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : self * x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (m, pivots) = self.rref();
        nullspace_from_rref(self.cols, &pivots, |r, c| m[(r, c)].clone())
    }

    /// Basis of `{x : x * self = 0}`.
    pub fn left_nullspace(&self) -> Vec<Vec<Rational>> {
        self.transpose().nullspace()
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(out)
    }

    /// Minimal polynomial of a square matrix, from the first linear
    /// dependency among `I, M, M^2, ...` (coefficients ascending, monic).
    pub fn minimal_polynomial(&self) -> Vec<Rational> {
        let n = self.rows;
        let mut powers: Vec<Vec<Rational>> = vec![Self::identity(n).data];
        let mut cur = Self::identity(n);
        loop {
            cur = cur.try_mul(self).expect("square");
            powers.push(cur.data.clone());
            let k = powers.len();
            // columns are flattened powers
            let mut sys = Self::zeros(n * n, k);
            for (j, p) in powers.iter().enumerate() {
                for (i, v) in p.iter().enumerate() {
                    sys[(i, j)] = v.clone();
                }
            }
            let ns = sys.nullspace();
            if let Some(v) = ns.into_iter().next() {
                let lead = v[k - 1].clone();
                return v.iter().map(|x| x / &lead).collect();
            }
        }
    }
}

fn nullspace_from_rref(
    cols: usize,
    pivots: &[usize],
    entry: impl Fn(usize, usize) -> Rational,
) -> Vec<Vec<Rational>> {
    let mut is_pivot = vec![None; cols];
    for (r, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(r);
    }
    let mut basis = Vec::new();
    for f in 0..cols {
        if is_pivot[f].is_some() {
            continue;
        }
        let mut v = vec![Rational::zero(); cols];
        v[f] = Rational::one();
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = -entry(r, f);
        }
        basis.push(v);
    }
    basis
}

/// Fraction-free (Bareiss) rank of a rational matrix, used as an independent
/// check on [`Matrix::rank`].
pub fn bareiss_rank(m: &Matrix<Rational>) -> usize {
    let rows = m.nrows();
    let cols = m.ncols();
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| {
            let row = m.row(i);
            let l = row
                .iter()
                .fold(BigInt::one(), |acc, q| num::integer::lcm(acc, q.denom().clone()));
            row.iter().map(|q| q.numer() * (&l / q.denom())).collect()
        })
        .collect();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, rank);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let v = (&a[rank][c] * &a[i][j] - &a[i][c] * &a[rank][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[rank][c].abs();
        if prev.is_zero() {
            prev = BigInt::one();
        }
        rank += 1;
    }
    rank
}

/// Incremental sparse row echelon form over the rationals.
///
/// Rows are kept with distinct leading columns; [`SparseEchelon::nullspace`]
/// back-substitutes once at the end.
#[derive(Clone, Debug, Default)]
pub struct SparseEchelon {
    cols: usize,
    rows: BTreeMap<usize, BTreeMap<usize, Rational>>,
}

impl SparseEchelon {
    pub fn new(cols: usize) -> Self {
        SparseEchelon {
            cols,
            rows: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn reduce(&self, mut row: BTreeMap<usize, Rational>) -> BTreeMap<usize, Rational> {
        let mut cursor = 0;
        loop {
            let Some((&c, _)) = row.range(cursor..).find(|(c, _)| self.rows.contains_key(c)) else {
                return row;
            };
            let f = row.remove(&c).unwrap();
            for (&j, v) in self.rows[&c].iter().skip(1) {
                let e = row.entry(j).or_insert_with(Rational::zero);
                *e -= &f * v;
                if e.is_zero() {
                    row.remove(&j);
                }
            }
            cursor = c + 1;
        }
    }

    /// Adds a row; returns true when it increased the rank.
    pub fn insert(&mut self, row: BTreeMap<usize, Rational>) -> bool {
        let row: BTreeMap<usize, Rational> = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        let mut r = self.reduce(row);
        let Some((&lead, lv)) = r.iter().next() else {
            return false;
        };
        let inv = lv.recip();
        for v in r.values_mut() {
            *v *= &inv;
        }
        self.rows.insert(lead, r);
        true
    }

    /// Whether `row` lies in the span of the inserted rows.
    pub fn contains(&self, row: &BTreeMap<usize, Rational>) -> bool {
        let row: BTreeMap<usize, Rational> = row.iter().filter(|(_, v)| !v.is_zero()).map(|(k, v)| (*k, v.clone())).collect();
        self.reduce(row).is_empty()
    }

    /// Reduced rows keyed by pivot column (fully back-substituted).
    pub fn reduced_rows(&self) -> Vec<(usize, BTreeMap<usize, Rational>)> {
        let mut done: BTreeMap<usize, BTreeMap<usize, Rational>> = BTreeMap::new();
        for (&p, row) in self.rows.iter().rev() {
            let mut r = row.clone();
            let mut out = BTreeMap::new();
            out.insert(p, r.remove(&p).unwrap());
            for (j, v) in r {
                match done.get(&j) {
                    Some(pr) => {
                        for (k, w) in pr.iter().skip(1) {
                            let e = out.entry(*k).or_insert_with(Rational::zero);
                            *e -= &v * w;
                        }
                    }
                    None => {
                        let e = out.entry(j).or_insert_with(Rational::zero);
                        *e += v;
                    }
                }
            }
            out.retain(|_, v| !v.is_zero());
            done.insert(p, out);
        }
        done.into_iter().collect()
    }

    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let rows = self.reduced_rows();
        let pivots: Vec<usize> = rows.iter().map(|(p, _)| *p).collect();
        nullspace_from_rref(self.cols, &pivots, |r, c| {
            rows[r].1.get(&c).cloned().unwrap_or_else(Rational::zero)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::rational::{int, rat};

    fn m(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        assert_eq!(bareiss_rank(&a), 2);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        let prod = a.try_mul(&Matrix::from_rows(ns.iter().map(|v| v.clone()).collect()).unwrap().transpose()).unwrap();
        assert!(prod.is_zero());
    }

    #[test]
    fn sparse_matches_dense() {
        let a = m(&[&[0, 1, -1, 2], &[3, 0, 1, 1], &[3, 1, 0, 3], &[0, 0, 0, 1]]);
        let mut s = SparseEchelon::new(4);
        for i in 0..4 {
            s.insert(a.row(i).iter().cloned().enumerate().collect());
        }
        assert_eq!(s.rank(), a.rank());
        let ns = s.nullspace();
        assert_eq!(ns.len(), 4 - a.rank());
        for v in &ns {
            for i in 0..4 {
                let dot: Rational = a.row(i).iter().zip(v).map(|(x, y)| x * y).sum();
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn inverse_and_minimal_polynomial() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.try_mul(&inv).unwrap(), Matrix::identity(2));
        let d = m(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 3]]);
        assert_eq!(d.minimal_polynomial(), vec![int(6), int(-5), int(1)]);
        let half = Matrix::from_rows(vec![vec![rat(1, 2)]]).unwrap();
        assert_eq!(half.minimal_polynomial(), vec![rat(-1, 2), int(1)]);
    }
}
