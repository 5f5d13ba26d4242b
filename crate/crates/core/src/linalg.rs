//! Exact sparse linear algebra over a [`Field`].
//!
//! Everything here is Gauss–Jordan elimination on sorted sparse rows kept in
//! reduced row echelon form. Rows are inserted one at a time, so callers can
//! stream constraint systems and stop early once a known rank is reached.

use std::collections::BTreeMap;

use crate::scalar::Field;

/// Sparse vector: strictly increasing indices, no stored zeros.
pub type SparseVec<S> = Vec<(usize, S)>;

/// Drops zeros and merges duplicate indices.
pub fn normalize<S: Field>(entries: impl IntoIterator<Item = (usize, S)>) -> SparseVec<S> {
    let mut acc: BTreeMap<usize, S> = BTreeMap::new();
    for (i, v) in entries {
        match acc.remove(&i) {
            Some(old) => {
                let s = old + v;
                if !s.is_zero() {
                    acc.insert(i, s);
                }
            }
            None => {
                if !v.is_zero() {
                    acc.insert(i, v);
                }
            }
        }
    }
    acc.into_iter().collect()
}

pub fn sparse_get<S: Field>(v: &SparseVec<S>, i: usize) -> Option<&S> {
    v.binary_search_by_key(&i, |(j, _)| *j).ok().map(|k| &v[k].1)
}

pub fn dot_dense<S: Field>(v: &SparseVec<S>, x: &[S]) -> S {
    v.iter().fold(S::zero(), |acc, (i, a)| acc + a.clone() * x[*i].clone())
}

fn axpy<S: Field>(target: &SparseVec<S>, factor: &S, source: &SparseVec<S>) -> SparseVec<S> {
    // target - factor * source, merging two sorted lists
    let mut out = Vec::with_capacity(target.len() + source.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < source.len() {
        let ti = target.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let sj = source.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        if ti < sj {
            out.push(target[i].clone());
            i += 1;
        } else if sj < ti {
            out.push((sj, -(factor.clone() * source[j].1.clone())));
            j += 1;
        } else {
            let v = target[i].1.clone() - factor.clone() * source[j].1.clone();
            if !v.is_zero() {
                out.push((ti, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Incremental reduced row echelon form.
#[derive(Clone, Debug)]
pub struct RowEchelon<S> {
    ncols: usize,
    rows: Vec<SparseVec<S>>,
    pivot_cols: Vec<usize>,
    pivot_row: BTreeMap<usize, usize>,
}

impl<S: Field> RowEchelon<S> {
    pub fn new(ncols: usize) -> Self {
        Self { ncols, rows: Vec::new(), pivot_cols: Vec::new(), pivot_row: BTreeMap::new() }
    }

    pub fn from_rows(ncols: usize, rows: impl IntoIterator<Item = SparseVec<S>>) -> Self {
        let mut e = Self::new(ncols);
        for r in rows {
            e.insert(r);
        }
        e
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec<S>] {
        &self.rows
    }

    /// Pivot column of each stored row, in insertion order.
    pub fn pivot_columns(&self) -> &[usize] {
        &self.pivot_cols
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row.contains_key(&col)
    }

    /// Reduces `row` against the stored pivots. The result has no entries in
    /// pivot columns; it is empty iff `row` lies in the row space.
    pub fn reduce(&self, row: &SparseVec<S>) -> SparseVec<S> {
        let mut r = row.clone();
        // Coefficients at pivot columns are unaffected by subtracting other
        // pivot rows, so they can be read off up front.
        let hits: Vec<(usize, S)> = row
            .iter()
            .filter_map(|(c, v)| self.pivot_row.get(c).map(|&k| (k, v.clone())))
            .collect();
        for (k, v) in hits {
            r = axpy(&r, &v, &self.rows[k]);
        }
        r
    }

    /// Inserts a row; returns its pivot column when it was independent.
    pub fn insert(&mut self, row: SparseVec<S>) -> Option<usize> {
        debug_assert!(row.iter().all(|(c, _)| *c < self.ncols));
        let r = self.reduce(&row);
        let (p, lead) = r.first().cloned()?;
        let inv = lead.inv();
        let r: SparseVec<S> = r.into_iter().map(|(c, v)| (c, v * inv.clone())).collect();
        for existing in self.rows.iter_mut() {
            if let Some(f) = sparse_get(existing, p).cloned() {
                *existing = axpy(existing, &f, &r);
            }
        }
        self.pivot_row.insert(p, self.rows.len());
        self.pivot_cols.push(p);
        self.rows.push(r);
        Some(p)
    }

    /// Basis of the solution space of `row · x = 0` for all stored rows,
    /// restricted to the first `nvars` columns (columns past `nvars`, e.g. an
    /// augmented right-hand side, are treated as absent).
    pub fn nullspace_of_first(&self, nvars: usize) -> Vec<SparseVec<S>> {
        let mut basis: BTreeMap<usize, Vec<(usize, S)>> = (0..nvars)
            .filter(|c| !self.is_pivot(*c))
            .map(|c| (c, vec![(c, S::one())]))
            .collect();
        for (k, row) in self.rows.iter().enumerate() {
            let p = self.pivot_cols[k];
            if p >= nvars {
                continue;
            }
            for (c, v) in row.iter().skip(1) {
                if let Some(vec) = basis.get_mut(c) {
                    vec.push((p, -v.clone()));
                }
            }
        }
        basis
            .into_values()
            .map(|mut v| {
                v.sort_by_key(|e| e.0);
                v
            })
            .collect()
    }

    pub fn nullspace(&self) -> Vec<SparseVec<S>> {
        self.nullspace_of_first(self.ncols)
    }
}

/// A sparse matrix stored by rows.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<S> {
    pub nrows: usize,
    pub ncols: usize,
    pub rows: Vec<SparseVec<S>>,
}

impl<S: Field> SparseMatrix<S> {
    pub fn new(ncols: usize, rows: Vec<SparseVec<S>>) -> Self {
        Self { nrows: rows.len(), ncols, rows }
    }

    pub fn transpose(&self) -> Self {
        let mut cols: Vec<SparseVec<S>> = vec![Vec::new(); self.ncols];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                cols[*j].push((i, v.clone()));
            }
        }
        Self { nrows: self.ncols, ncols: self.nrows, rows: cols }
    }

    pub fn mul_vec(&self, x: &[S]) -> Vec<S> {
        assert_eq!(x.len(), self.ncols);
        self.rows.iter().map(|r| dot_dense(r, x)).collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let rows = self
            .rows
            .iter()
            .map(|r| {
                normalize(r.iter().flat_map(|(k, a)| {
                    other.rows[*k].iter().map(move |(j, b)| (*j, a.clone() * b.clone()))
                }))
            })
            .collect();
        Self { nrows: self.nrows, ncols: other.ncols, rows }
    }

    pub fn scale(&self, s: &S) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| normalize(r.iter().map(|(j, v)| (*j, v.clone() * s.clone()))))
            .collect();
        Self { nrows: self.nrows, ncols: self.ncols, rows }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| normalize(a.iter().cloned().chain(b.iter().cloned())))
            .collect();
        Self { nrows: self.nrows, ncols: self.ncols, rows }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn row_echelon(&self) -> RowEchelon<S> {
        RowEchelon::from_rows(self.ncols, self.rows.iter().cloned())
    }

    pub fn rank(&self) -> usize {
        self.row_echelon().rank()
    }

    pub fn nullspace(&self) -> Vec<SparseVec<S>> {
        self.row_echelon().nullspace()
    }

    /// `(row, col, value)` triplets in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        self.rows.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, *j, v)))
    }
}

/// Result of an exact linear solve.
#[derive(Clone, Debug)]
pub struct Solution<S> {
    pub particular: Vec<S>,
    pub nullspace: Vec<SparseVec<S>>,
}

impl<S> Solution<S> {
    pub fn is_unique(&self) -> bool {
        self.nullspace.is_empty()
    }
}

/// Infeasibility witness: `y` with `yᵀA = 0` and `yᵀb = 1`.
#[derive(Clone, Debug)]
pub struct Certificate<S> {
    pub multipliers: SparseVec<S>,
}

/// Solves `A x = b` exactly. Free variables of the particular solution are 0.
pub fn solve<S: Field>(a: &SparseMatrix<S>, b: &[S]) -> Result<Solution<S>, Certificate<S>> {
    assert_eq!(a.nrows, b.len());
    let n = a.ncols;
    let mut ech = RowEchelon::new(n + 1);
    for (row, rhs) in a.rows.iter().zip(b) {
        let mut r = row.clone();
        if !rhs.is_zero() {
            r.push((n, rhs.clone()));
        }
        if ech.insert(r) == Some(n) {
            return Err(certificate(a, b));
        }
    }
    let mut particular = vec![S::zero(); n];
    for (k, row) in ech.rows().iter().enumerate() {
        let p = ech.pivot_columns()[k];
        if let Some(v) = sparse_get(row, n) {
            particular[p] = v.clone();
        }
    }
    Ok(Solution { particular, nullspace: ech.nullspace_of_first(n) })
}

fn certificate<S: Field>(a: &SparseMatrix<S>, b: &[S]) -> Certificate<S> {
    // Aᵀ y = 0, bᵀ y = 1 is consistent whenever A x = b is not.
    let mut at = a.transpose();
    at.rows.push(normalize(b.iter().cloned().enumerate()));
    at.nrows += 1;
    let mut rhs = vec![S::zero(); at.nrows];
    rhs[at.nrows - 1] = S::one();
    let sol = solve(&at, &rhs).expect("Fredholm alternative guarantees a certificate");
    Certificate { multipliers: normalize(sol.particular.into_iter().enumerate()) }
}

/// Small dense matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<S>,
}

impl<S: Field> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    pub fn from_columns(cols: &[Vec<S>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |v| v.len());
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.data[i * c + j] = v.clone();
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut s = S::zero();
                for k in 0..self.cols {
                    s = s + self.get(i, k).clone() * other.get(k, j).clone();
                }
                out.set(i, j, s);
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[S]) -> Vec<S> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(S::zero(), |acc, j| acc + self.get(i, j).clone() * x[j].clone())
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn rank(&self) -> usize {
        let rows = (0..self.rows).map(|i| {
            normalize((0..self.cols).map(|j| (j, self.get(i, j).clone())))
        });
        RowEchelon::from_rows(self.cols, rows).rank()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Q};

    fn row(entries: &[(usize, i64)]) -> SparseVec<Q> {
        normalize(entries.iter().map(|&(c, v)| (c, q(v))))
    }

    #[test]
    fn rank_and_nullspace_of_single_triangle_equation() {
        let m = SparseMatrix::new(3, vec![row(&[(0, 1), (1, 1), (2, 1)])]);
        assert_eq!(m.rank(), 1);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let dense: Vec<Q> = (0..3).map(|i| sparse_get(v, i).cloned().unwrap_or_else(|| q(0))).collect();
            assert_eq!(m.mul_vec(&dense), vec![q(0)]);
        }
    }

    #[test]
    fn dependent_rows_do_not_raise_rank() {
        let rows = vec![row(&[(0, 2), (1, 4)]), row(&[(0, 1), (1, 2)]), row(&[(1, 3), (2, 1)])];
        let m = SparseMatrix::new(3, rows);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.nullspace().len(), 1);
    }

    #[test]
    fn solve_reports_certificate_for_contradiction() {
        // x + y + z = 0 and x + y + z = 1
        let a = SparseMatrix::new(3, vec![row(&[(0, 1), (1, 1), (2, 1)]), row(&[(0, 1), (1, 1), (2, 1)])]);
        let b = vec![q(0), q(1)];
        let cert = solve(&a, &b).unwrap_err();
        let y: Vec<Q> = (0..2).map(|i| sparse_get(&cert.multipliers, i).cloned().unwrap_or_else(|| q(0))).collect();
        assert_eq!(a.transpose().mul_vec(&y), vec![q(0), q(0), q(0)]);
        assert_eq!(y[0].clone() * &b[0] + y[1].clone() * &b[1], q(1));
    }

    #[test]
    fn solve_consistent_system() {
        let a = SparseMatrix::new(3, vec![row(&[(0, 1), (1, 1)]), row(&[(1, 1), (2, 1)])]);
        let b = vec![q(3), q(5)];
        let s = solve(&a, &b).unwrap();
        assert_eq!(a.mul_vec(&s.particular), b);
        assert_eq!(s.nullspace.len(), 1);
    }

    #[test]
    fn dense_matrix_identity_and_product() {
        let mut m: Matrix<Q> = Matrix::zeros(2, 2);
        m.set(0, 1, q(1));
        m.set(1, 0, q(1));
        assert!(!m.is_identity());
        assert!(m.mul(&m).is_identity());
        assert_eq!(m.rank(), 2);
    }
}
