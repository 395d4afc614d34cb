//! Dense and sparse exact linear algebra over Q.

use crate::rational::Q;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn scalar(n: usize, c: &Q) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    /// Builds from row vectors. Returns None on ragged input.
    pub fn from_rows(rows: Vec<Vec<Q>>, cols: usize) -> Option<Self> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            if row.len() != cols {
                return None;
            }
            data.extend(row);
        }
        Some(Matrix { rows: r, cols, data })
    }

    pub fn from_cols(cols: &[Vec<Q>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Q) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> Vec<Q> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "matrix shape mismatch");
        let mut out = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let idx = i * o.cols + j;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        let mut out = vec![Q::zero(); self.rows];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                let a = self.get(i, j);
                if !a.is_zero() {
                    *o += a * x;
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &Q) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, o: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(self.rows + o.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..o.rows {
            for j in 0..o.cols {
                m.set(self.rows + i, self.cols + j, o.get(i, j).clone());
            }
        }
        m
    }

    /// Copies `o` into position (r0, c0).
    pub fn place(&mut self, r0: usize, c0: usize, o: &Matrix) {
        for i in 0..o.rows {
            for j in 0..o.cols {
                self.set(r0 + i, c0 + j, o.get(i, j).clone());
            }
        }
    }

    /// Returns `Some(c)` when the matrix is `c * I`.
    pub fn as_scalar(&self) -> Option<Q> {
        if self.rows != self.cols {
            return None;
        }
        let c = if self.rows == 0 { Q::zero() } else { self.get(0, 0).clone() };
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self.get(i, j);
                if (i == j && *x != c) || (i != j && !x.is_zero()) {
                    return None;
                }
            }
        }
        Some(c)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|x| !x.is_zero()).count()
    }
}

/// Reduced row echelon form in place. Zero rows are dropped; returns pivot columns.
pub fn rref(rows: &mut Vec<Vec<Q>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = Q::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank(vectors: &[Vec<Q>]) -> usize {
    let mut rows = vectors.to_vec();
    rref(&mut rows).len()
}

/// Basis of `{x : m x = 0}`.
pub fn nullspace(m: &Matrix) -> Vec<Vec<Q>> {
    let mut rows: Vec<Vec<Q>> = (0..m.rows()).map(|i| m.row(i)).collect();
    let pivots = rref(&mut rows);
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); m.cols()];
            v[f] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -rows[r][f].clone();
            }
            v
        })
        .collect()
}

/// Fully reduced echelon basis with a reduction map.
#[derive(Clone, Debug)]
pub struct Echelon {
    rows: Vec<Vec<Q>>,
    pivots: Vec<usize>,
    dim: usize,
}

impl Echelon {
    pub fn new(vectors: &[Vec<Q>], dim: usize) -> Self {
        let mut rows = vectors.to_vec();
        let pivots = if rows.is_empty() { vec![] } else { rref(&mut rows) };
        Echelon { rows, pivots, dim }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.rows
    }

    /// Normal form modulo the span: zero in every pivot coordinate.
    pub fn reduce(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.dim);
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if out[p].is_zero() {
                continue;
            }
            let f = out[p].clone();
            for (x, y) in out.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Coordinates in the echelon basis, or None when outside the span.
    pub fn coords(&self, v: &[Q]) -> Option<Vec<Q>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }
}

/// The quotient W / U for subspaces U ⊆ W of Q^n, with an explicit basis.
#[derive(Clone, Debug)]
pub struct Quotient {
    sub: Echelon,
    basis: Echelon,
}

impl Quotient {
    pub fn new(w: &[Vec<Q>], u: &[Vec<Q>], dim: usize) -> Self {
        let sub = Echelon::new(u, dim);
        let reduced: Vec<Vec<Q>> = w.iter().map(|x| sub.reduce(x)).collect();
        let basis = Echelon::new(&reduced, dim);
        Quotient { sub, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.rank()
    }

    /// Coordinates of the class of `x`; `x` must lie in W.
    pub fn coords(&self, x: &[Q]) -> Option<Vec<Q>> {
        self.basis.coords(&self.sub.reduce(x))
    }

    /// Canonical representative of basis class `i`.
    pub fn representative(&self, i: usize) -> &[Q] {
        &self.basis.basis()[i]
    }
}

/// Incremental sparse RREF over an ordered key space.
#[derive(Clone, Debug, Default)]
pub struct SparseRref<K: Ord + Clone> {
    rows: BTreeMap<K, BTreeMap<K, Q>>,
}

impl<K: Ord + Clone> SparseRref<K> {
    pub fn new() -> Self {
        SparseRref { rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, k: &K) -> bool {
        self.rows.contains_key(k)
    }

    /// Reduces `v` to normal form: every pivot coordinate becomes zero.
    pub fn reduce(&self, v: &mut BTreeMap<K, Q>) {
        let hits: Vec<K> = v.keys().filter(|k| self.rows.contains_key(*k)).cloned().collect();
        for k in hits {
            let Some(f) = v.remove(&k) else { continue };
            let row = &self.rows[&k];
            for (c, y) in row {
                if *c == k {
                    continue;
                }
                let e = v.entry(c.clone()).or_insert_with(Q::zero);
                *e -= &f * y;
                if e.is_zero() {
                    v.remove(c);
                }
            }
        }
    }

    /// Inserts a vector, keeping the system fully reduced. Returns false if dependent.
    pub fn insert(&mut self, mut v: BTreeMap<K, Q>) -> bool {
        v.retain(|_, x| !x.is_zero());
        self.reduce(&mut v);
        let Some((p, lead)) = v.iter().next().map(|(k, x)| (k.clone(), x.clone())) else {
            return false;
        };
        let inv = Q::one() / lead;
        for x in v.values_mut() {
            *x *= &inv;
        }
        for row in self.rows.values_mut() {
            if let Some(f) = row.remove(&p) {
                for (c, y) in &v {
                    if *c == p {
                        continue;
                    }
                    let e = row.entry(c.clone()).or_insert_with(Q::zero);
                    *e -= &f * y;
                    if e.is_zero() {
                        row.remove(c);
                    }
                }
            }
        }
        self.rows.insert(p, v);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn m(rows: &[&[i64]]) -> Matrix {
        let c = rows[0].len();
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect(), c).unwrap()
    }

    #[test]
    fn nullspace_is_annihilated() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let ns = nullspace(&a);
        assert_eq!(ns.len(), 1);
        assert!(a.apply(&ns[0]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn quotient_coordinates() {
        let w = vec![vec![q(1), q(0), q(0)], vec![q(0), q(1), q(0)]];
        let u = vec![vec![q(1), q(1), q(0)]];
        let qt = Quotient::new(&w, &u, 3);
        assert_eq!(qt.dim(), 1);
        let a = qt.coords(&[q(1), q(0), q(0)]).unwrap();
        let b = qt.coords(&[q(0), q(-1), q(0)]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sparse_rref_matches_dense() {
        let vs = vec![vec![q(1), q(2), q(0)], vec![q(2), q(4), q(1)], vec![q(3), q(6), q(1)]];
        let mut s = SparseRref::new();
        let mut added = 0;
        for v in &vs {
            let map: BTreeMap<usize, Q> = v.iter().cloned().enumerate().collect();
            if s.insert(map) {
                added += 1;
            }
        }
        assert_eq!(added, rank(&vs));
        let mut t: BTreeMap<usize, Q> = [(0, q(1)), (1, q(2)), (2, q(5))].into_iter().collect();
        s.reduce(&mut t);
        assert!(t.is_empty());
    }
}
