//! Spherical-harmonic coefficient space and the operators acting on it.
//!
//! A function on the unit sphere is stored as complex coefficients `c_lm`
//! of Condon–Shortley spherical harmonics, `0 ≤ l ≤ L`, `|m| ≤ l`, at flat
//! index `l² + l + m`. Every differential or multiplicative operator on the
//! sphere becomes a (sparse) matrix on this space.

mod grid;
mod harmonics;
mod operators;

pub use grid::{gauss_legendre, write_grid_csv, SphereGrid};
pub use harmonics::{alpha_beta, legendre_table, ylm_eval, AlphaBeta};
pub use operators::{
    angular_operators, conjugation_operator, position_operators, AngularOperators,
    PositionOperators, SphereOperators,
};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::{modulus, Complex, Real};
use crate::sparse::SparseMatrix;

/// Flat index of `(l, m)`.
#[inline]
pub fn lm_index(l: usize, m: i64) -> usize {
    debug_assert!(m.unsigned_abs() as usize <= l);
    (l * l) + (l as i64 + m) as usize
}

/// Inverse of [`lm_index`].
pub fn lm_of_index(index: usize) -> (usize, i64) {
    let l = (index as f64).sqrt().floor() as usize;
    // guard against rounding at perfect squares
    let l = if (l + 1) * (l + 1) <= index {
        l + 1
    } else if l * l > index {
        l - 1
    } else {
        l
    };
    (l, index as i64 - (l * l) as i64 - l as i64)
}

/// Number of coefficients up to band limit `L`, `(L+1)²`.
#[inline]
pub fn coefficient_count(band_limit: usize) -> usize {
    (band_limit + 1) * (band_limit + 1)
}

/// All `(l, m)` pairs up to `band_limit`, in flat-index order.
pub fn lm_pairs(band_limit: usize) -> impl Iterator<Item = (usize, i64)> {
    (0..=band_limit).flat_map(|l| (-(l as i64)..=l as i64).map(move |m| (l, m)))
}

#[inline]
fn sign_of_m<T: Real>(m: i64) -> T {
    if m.rem_euclid(2) == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// Coefficients `c_lm` of a phase-space function up to a band limit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolCoefficients<T: Real> {
    band_limit: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> SymbolCoefficients<T> {
    pub fn zeros(band_limit: usize) -> Self {
        Self {
            band_limit,
            entries: vec![Complex::new(T::zero(), T::zero()); coefficient_count(band_limit)],
        }
    }

    /// The coefficient vector of a single harmonic `Y_lm`.
    pub fn unit(band_limit: usize, l: usize, m: i64) -> Self {
        let mut c = Self::zeros(band_limit);
        c.entries[lm_index(l, m)] = Complex::new(T::one(), T::zero());
        c
    }

    pub fn from_vec(band_limit: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if entries.len() != coefficient_count(band_limit) {
            return Err(Error::DimensionMismatch {
                expected: coefficient_count(band_limit),
                found: entries.len(),
            });
        }
        Ok(Self {
            band_limit,
            entries,
        })
    }

    #[inline]
    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.entries
    }

    pub fn into_vec(self) -> Vec<Complex<T>> {
        self.entries
    }

    #[inline]
    pub fn get(&self, l: usize, m: i64) -> Complex<T> {
        self.entries[lm_index(l, m)]
    }

    #[inline]
    pub fn set(&mut self, l: usize, m: i64, value: Complex<T>) {
        self.entries[lm_index(l, m)] = value;
    }

    /// The conjugation map `(Cc)_lm = (−1)^m c*_{l,−m}`: coefficients of the
    /// pointwise complex conjugate function.
    pub fn conjugate(&self) -> Self {
        let mut out = Self::zeros(self.band_limit);
        for (l, m) in lm_pairs(self.band_limit) {
            out.entries[lm_index(l, m)] = self.get(l, -m).conj() * sign_of_m::<T>(m);
        }
        out
    }

    /// Largest violation of the real-function condition `c_{l,−m} = (−1)^m c*_lm`.
    pub fn reality_deviation(&self) -> T {
        self.entries
            .iter()
            .zip(self.conjugate().entries.iter())
            .fold(T::zero(), |acc, (a, b)| acc.max(modulus(*a - *b)))
    }

    pub fn is_real(&self, tol: T) -> bool {
        self.reality_deviation() <= tol
    }

    /// Copies into a different band limit, dropping or zero-padding shells.
    pub fn with_band_limit(&self, band_limit: usize) -> Self {
        let mut out = Self::zeros(band_limit);
        let n = out.len().min(self.len());
        out.entries[..n].copy_from_slice(&self.entries[..n]);
        out
    }

    /// Highest shell with a coefficient above `tol`.
    pub fn effective_band_limit(&self, tol: T) -> usize {
        self.entries
            .iter()
            .enumerate()
            .rev()
            .find(|(_, z)| modulus(**z) > tol)
            .map(|(i, _)| lm_of_index(i).0)
            .unwrap_or(0)
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self {
            band_limit: self.band_limit,
            entries: self.entries.iter().map(|z| *z * factor).collect(),
        }
    }

    /// Largest entrywise distance to `other` (band limits must agree).
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.band_limit, other.band_limit, "band limits differ");
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(T::zero(), |acc, (a, b)| acc.max(modulus(*a - *b)))
    }

    pub fn max_abs(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |acc, z| acc.max(modulus(*z)))
    }

    /// Coefficients of the function rotated by `α` about the z axis,
    /// `c_lm ↦ e^{−imα} c_lm`.
    pub fn rotate_z(&self, angle: T) -> Self {
        let mut out = self.clone();
        for (l, m) in lm_pairs(self.band_limit) {
            let phase = -angle * crate::scalar::int::<T>(m);
            out.entries[lm_index(l, m)] *= Complex::new(phase.cos(), phase.sin());
        }
        out
    }
}

/// A linear operator on symbol coefficients of one band limit.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceOperator<T: Real> {
    band_limit: usize,
    matrix: SparseMatrix<T>,
}

impl<T: Real> PhaseSpaceOperator<T> {
    pub fn zeros(band_limit: usize) -> Self {
        let n = coefficient_count(band_limit);
        Self {
            band_limit,
            matrix: SparseMatrix::zeros(n, n),
        }
    }

    pub fn identity(band_limit: usize) -> Self {
        Self {
            band_limit,
            matrix: SparseMatrix::identity(coefficient_count(band_limit)),
        }
    }

    /// Operator diagonal in `l`: `Y_lm ↦ f(l) Y_lm`.
    pub fn shell_diagonal(band_limit: usize, f: impl Fn(usize) -> T) -> Self {
        let diag: Vec<_> = lm_pairs(band_limit)
            .map(|(l, _)| Complex::new(f(l), T::zero()))
            .collect();
        Self {
            band_limit,
            matrix: SparseMatrix::from_diagonal(&diag),
        }
    }

    pub fn from_sparse(band_limit: usize, matrix: SparseMatrix<T>) -> Result<Self> {
        let n = coefficient_count(band_limit);
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { band_limit, matrix })
    }

    pub fn from_dense(band_limit: usize, dense: &DMatrix<Complex<T>>) -> Result<Self> {
        Self::from_sparse(band_limit, SparseMatrix::from_dense(dense))
    }

    #[inline]
    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    #[inline]
    pub fn dim(&self) -> usize {
        coefficient_count(self.band_limit)
    }

    pub fn sparse(&self) -> &SparseMatrix<T> {
        &self.matrix
    }

    pub fn to_dense(&self) -> DMatrix<Complex<T>> {
        self.matrix.to_dense()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.matrix.get(row, col)
    }

    pub fn apply(&self, c: &SymbolCoefficients<T>) -> Result<SymbolCoefficients<T>> {
        if c.band_limit() != self.band_limit {
            return Err(Error::BandLimit {
                found: c.band_limit(),
                limit: self.band_limit,
            });
        }
        Ok(SymbolCoefficients {
            band_limit: self.band_limit,
            entries: self.matrix.apply(c.as_slice()),
        })
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        assert_eq!(self.band_limit, rhs.band_limit, "band limits differ");
        Self {
            band_limit: self.band_limit,
            matrix: self.matrix.matmul(&rhs.matrix),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.band_limit, rhs.band_limit, "band limits differ");
        Self {
            band_limit: self.band_limit,
            matrix: &self.matrix + &rhs.matrix,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.band_limit, rhs.band_limit, "band limits differ");
        Self {
            band_limit: self.band_limit,
            matrix: &self.matrix - &rhs.matrix,
        }
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self {
            band_limit: self.band_limit,
            matrix: self.matrix.scale(factor),
        }
    }

    pub fn scale_real(&self, factor: T) -> Self {
        self.scale(Complex::new(factor, T::zero()))
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        self.compose(rhs).sub(&rhs.compose(self))
    }

    /// `C·O·C` with `C` the coefficient conjugation; for real-flagged input
    /// this is the operator `W ↦ conj(O conj(W))`, and it is complex-linear.
    pub fn conjugated(&self) -> Self {
        let band = self.band_limit;
        let flip = move |i: usize| {
            let (l, m) = lm_of_index(i);
            lm_index(l, -m)
        };
        let sign = |i: usize| sign_of_m::<T>(lm_of_index(i).1);
        Self {
            band_limit: band,
            matrix: self.matrix.conj().permuted(flip, sign),
        }
    }

    /// `Im(O) := (O − C·O·C)/(2i)`, i.e. `W ↦ Im(O W)` on real functions.
    pub fn imaginary_part(&self) -> Self {
        self.sub(&self.conjugated())
            .scale(Complex::new(T::zero(), -crate::scalar::lit::<T>(0.5)))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.matrix.max_abs()
    }

    /// Dense block with rows `l ≤ row_band` and columns `l ≤ col_band`.
    pub fn block(&self, row_band: usize, col_band: usize) -> DMatrix<Complex<T>> {
        let rows: Vec<usize> = (0..coefficient_count(row_band.min(self.band_limit))).collect();
        let cols: Vec<usize> = (0..coefficient_count(col_band.min(self.band_limit))).collect();
        self.matrix.submatrix(&rows, &cols)
    }

    /// Copies into a larger band limit with zero padding, or keeps the
    /// leading block for a smaller one.
    pub fn with_band_limit(&self, band_limit: usize) -> Self {
        let n = coefficient_count(band_limit);
        let triplets = (0..self.dim().min(n)).flat_map(|i| {
            self.matrix
                .row(i)
                .iter()
                .filter(move |e| e.0 < n)
                .map(move |&(j, v)| (i, j, v))
        });
        Self {
            band_limit,
            matrix: SparseMatrix::from_triplets(n, n, triplets),
        }
    }
}

/// Spectral norm of a dense block (largest singular value).
pub fn spectral_norm<T: Real>(m: &DMatrix<Complex<T>>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    m.clone().singular_values().max()
}
