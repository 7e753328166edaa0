//! Row-compressed sparse complex matrices.
//!
//! The sphere operators are banded in `l` and couple at most neighbouring
//! `m`, so at band limits around 64 a dense representation would need
//! hundreds of megabytes. Products use Gustavson's row-by-row scheme.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};

use crate::scalar::{modulus, Complex, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T: Real> {
    nrows: usize,
    ncols: usize,
    /// Per row: `(column, value)` sorted by column, no explicit zeros.
    rows: Vec<Vec<(usize, Complex<T>)>>,
}

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

impl<T: Real> SparseMatrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            rows: vec![Vec::new(); nrows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![Complex::new(T::one(), T::zero()); n])
    }

    pub fn from_diagonal(diag: &[Complex<T>]) -> Self {
        let rows = diag
            .iter()
            .enumerate()
            .map(|(i, v)| if *v == zero() { Vec::new() } else { vec![(i, *v)] })
            .collect();
        Self {
            nrows: diag.len(),
            ncols: diag.len(),
            rows,
        }
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Complex<T>)>,
    ) -> Self {
        let mut m = Self::zeros(nrows, ncols);
        for (r, c, v) in triplets {
            m.add_to(r, c, v);
        }
        m.prune();
        m
    }

    pub fn from_dense(dense: &DMatrix<Complex<T>>) -> Self {
        let rows = (0..dense.nrows())
            .map(|i| {
                (0..dense.ncols())
                    .filter_map(|j| {
                        let v = dense[(i, j)];
                        (v != zero()).then_some((j, v))
                    })
                    .collect()
            })
            .collect();
        Self {
            nrows: dense.nrows(),
            ncols: dense.ncols(),
            rows,
        }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, Complex<T>)] {
        &self.rows[i]
    }

    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        match self.rows[r].binary_search_by_key(&c, |e| e.0) {
            Ok(k) => self.rows[r][k].1,
            Err(_) => zero(),
        }
    }

    /// Adds `v` to entry `(r, c)`.
    pub fn add_to(&mut self, r: usize, c: usize, v: Complex<T>) {
        assert!(r < self.nrows && c < self.ncols, "entry ({r}, {c}) out of bounds");
        let row = &mut self.rows[r];
        match row.binary_search_by_key(&c, |e| e.0) {
            Ok(k) => row[k].1 += v,
            Err(k) => row.insert(k, (c, v)),
        }
    }

    fn prune(&mut self) {
        for row in &mut self.rows {
            row.retain(|e| e.1 != zero());
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex<T>> {
        let mut d = DMatrix::zeros(self.nrows, self.ncols);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                d[(i, j)] = v;
            }
        }
        d
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        let mut out = Self {
            nrows: self.nrows,
            ncols: self.ncols,
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(|&(j, v)| (j, f(v))).collect())
                .collect(),
        };
        out.prune();
        out
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        self.map(|v| v * factor)
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    /// Reindexes rows and columns: entry `(i, j)` moves to `(p(i), p(j))`
    /// and is multiplied by `s(i)·s(j)`.
    pub fn permuted(&self, p: impl Fn(usize) -> usize, s: impl Fn(usize) -> T) -> Self {
        assert_eq!(self.nrows, self.ncols);
        let mut out = Self::zeros(self.nrows, self.ncols);
        for (i, row) in self.rows.iter().enumerate() {
            let pi = p(i);
            let si = s(i);
            for &(j, v) in row {
                out.rows[pi].push((p(j), v * (si * s(j))));
            }
        }
        for row in &mut out.rows {
            row.sort_by_key(|e| e.0);
        }
        out
    }

    pub fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(x.len(), self.ncols, "vector length does not match columns");
        self.rows
            .iter()
            .map(|row| row.iter().fold(zero(), |acc, &(j, v)| acc + v * x[j]))
            .collect()
    }

    pub fn apply_vector(&self, x: &DVector<Complex<T>>) -> DVector<Complex<T>> {
        DVector::from_vec(self.apply(x.as_slice()))
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.ncols, rhs.nrows, "inner dimensions differ");
        let mut acc = vec![zero::<T>(); rhs.ncols];
        let mut mark = vec![usize::MAX; rhs.ncols];
        let mut touched = Vec::new();
        let mut rows = Vec::with_capacity(self.nrows);
        for (i, row) in self.rows.iter().enumerate() {
            touched.clear();
            for &(k, a) in row {
                for &(j, b) in &rhs.rows[k] {
                    if mark[j] != i {
                        mark[j] = i;
                        acc[j] = zero();
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            touched.sort_unstable();
            rows.push(
                touched
                    .iter()
                    .filter_map(|&j| (acc[j] != zero()).then_some((j, acc[j])))
                    .collect(),
            );
        }
        Self {
            nrows: self.nrows,
            ncols: rhs.ncols,
            rows,
        }
    }

    fn combine(&self, rhs: &Self, sign: T) -> Self {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols), "shapes differ");
        let rows = self
            .rows
            .iter()
            .zip(&rhs.rows)
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut p, mut q) = (0, 0);
                while p < a.len() || q < b.len() {
                    let take_a = q >= b.len() || (p < a.len() && a[p].0 < b[q].0);
                    let take_b = p >= a.len() || (q < b.len() && b[q].0 < a[p].0);
                    let (j, v) = if take_a {
                        p += 1;
                        a[p - 1]
                    } else if take_b {
                        q += 1;
                        (b[q - 1].0, b[q - 1].1 * sign)
                    } else {
                        p += 1;
                        q += 1;
                        (a[p - 1].0, a[p - 1].1 + b[q - 1].1 * sign)
                    };
                    if v != zero() {
                        out.push((j, v));
                    }
                }
                out
            })
            .collect();
        Self {
            nrows: self.nrows,
            ncols: self.ncols,
            rows,
        }
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.rows
            .iter()
            .flatten()
            .fold(T::zero(), |acc, e| acc.max(modulus(e.1)))
    }

    /// Dense sub-block with the given row and column index sets.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> DMatrix<Complex<T>> {
        let mut pos = vec![usize::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            pos[c] = k;
        }
        let mut d = DMatrix::zeros(rows.len(), cols.len());
        for (a, &r) in rows.iter().enumerate() {
            for &(j, v) in &self.rows[r] {
                if pos[j] != usize::MAX {
                    d[(a, pos[j])] = v;
                }
            }
        }
        d
    }
}

impl<'a, T: Real> Add<&'a SparseMatrix<T>> for &'a SparseMatrix<T> {
    type Output = SparseMatrix<T>;
    fn add(self, rhs: &'a SparseMatrix<T>) -> SparseMatrix<T> {
        self.combine(rhs, T::one())
    }
}

impl<'a, T: Real> Sub<&'a SparseMatrix<T>> for &'a SparseMatrix<T> {
    type Output = SparseMatrix<T>;
    fn sub(self, rhs: &'a SparseMatrix<T>) -> SparseMatrix<T> {
        self.combine(rhs, -T::one())
    }
}

impl<'a, T: Real> Mul<&'a SparseMatrix<T>> for &'a SparseMatrix<T> {
    type Output = SparseMatrix<T>;
    fn mul(self, rhs: &'a SparseMatrix<T>) -> SparseMatrix<T> {
        self.matmul(rhs)
    }
}
