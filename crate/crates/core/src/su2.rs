//! SU(2) representation machinery: factorials, Clebsch–Gordan coefficients,
//! spin matrices, irreducible tensor operators and z-rotations.
//!
//! Half-integer quantum numbers are always passed as doubled integers
//! (`twice_j`, `twice_m`), so no spin label is ever a float. Basis vectors of
//! the spin-S space are ordered by decreasing magnetic quantum number:
//! index `k` carries `m = S − k`. Phases follow the Condon–Shortley
//! convention throughout.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::error::{domain, Error, Result};
use crate::scalar::{cplx, int, lit, real, Complex, Real};
use crate::sphere::{lm_index, lm_pairs};

/// Default number of cached `ln n!` values.
pub const LOG_FACTORIAL_CACHE: usize = 1024;

/// The spin quantum number and every dimension derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinContext {
    twice_s: u32,
}

impl SpinContext {
    pub fn new(twice_s: u32) -> Result<Self> {
        if twice_s == 0 {
            return domain("spin context requires 2S ≥ 1");
        }
        Ok(Self { twice_s })
    }

    /// Builds the context from a spin value such as `1.5`; it must be a
    /// positive multiple of one half.
    pub fn from_spin(spin: f64) -> Result<Self> {
        let twice = 2.0 * spin;
        if !twice.is_finite() || (twice - twice.round()).abs() > 1e-9 || twice.round() < 1.0 {
            return domain(format!("spin {spin} is not a positive half-integer"));
        }
        Self::new(twice.round() as u32)
    }

    #[inline]
    pub fn twice_s(&self) -> u32 {
        self.twice_s
    }

    #[inline]
    pub fn spin<T: Real>(&self) -> T {
        int::<T>(self.twice_s as i64) / lit(2.0)
    }

    /// Dimension `2S + 1` of the Hilbert space.
    #[inline]
    pub fn hilbert_dim(&self) -> usize {
        self.twice_s as usize + 1
    }

    /// Largest spherical-harmonic degree of a quantum symbol, `2S`.
    #[inline]
    pub fn band_limit(&self) -> usize {
        self.twice_s as usize
    }

    /// Number of symbol coefficients, `(2S + 1)²`.
    #[inline]
    pub fn symbol_dim(&self) -> usize {
        self.hilbert_dim() * self.hilbert_dim()
    }

    /// Doubled magnetic quantum number of basis index `k`.
    #[inline]
    pub fn twice_m(&self, k: usize) -> i32 {
        self.twice_s as i32 - 2 * k as i32
    }

    /// Basis index of the state with doubled magnetic number `twice_m`.
    #[inline]
    pub fn index_of(&self, twice_m: i32) -> usize {
        ((self.twice_s as i32 - twice_m) / 2) as usize
    }
}

/// A Hilbert-space operator as a dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix<T: Real> {
    entries: DMatrix<Complex<T>>,
}

impl<T: Real> OperatorMatrix<T> {
    pub fn from_matrix(entries: DMatrix<Complex<T>>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        Ok(Self { entries })
    }

    /// Wraps a matrix and checks it has the Hilbert dimension of `ctx`.
    pub fn for_context(ctx: &SpinContext, entries: DMatrix<Complex<T>>) -> Result<Self> {
        let op = Self::from_matrix(entries)?;
        op.expect_dim(ctx.hilbert_dim())?;
        Ok(op)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        Self {
            entries: DMatrix::from_fn(dim, dim, f),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    #[inline]
    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<Complex<T>> {
        self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[(row, col)]
    }

    pub fn expect_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            });
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        self.entries.trace()
    }

    /// Largest entrywise deviation `|A − A†|`.
    pub fn hermiticity_deviation(&self) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let d = self.entries[(i, j)] - self.entries[(j, i)].conj();
                worst = worst.max(crate::scalar::modulus(d));
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Checks Hermiticity to `1e−12`, returning the operator unchanged.
    pub fn assert_hermitian(self) -> Result<Self> {
        let deviation = self.hermiticity_deviation();
        if deviation > lit(1e-12) {
            return Err(Error::NotHermitian {
                deviation: crate::scalar::to_f64(deviation),
            });
        }
        Ok(self)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self {
            entries: &self.entries * &other.entries - &other.entries * &self.entries,
        }
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self {
            entries: self.entries.map(|z| z * factor),
        }
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |acc, z| acc.max(crate::scalar::modulus(*z)))
    }
}

impl<'a, T: Real> Add<&'a OperatorMatrix<T>> for &'a OperatorMatrix<T> {
    type Output = OperatorMatrix<T>;
    fn add(self, rhs: &'a OperatorMatrix<T>) -> OperatorMatrix<T> {
        OperatorMatrix {
            entries: &self.entries + &rhs.entries,
        }
    }
}

impl<'a, T: Real> Sub<&'a OperatorMatrix<T>> for &'a OperatorMatrix<T> {
    type Output = OperatorMatrix<T>;
    fn sub(self, rhs: &'a OperatorMatrix<T>) -> OperatorMatrix<T> {
        OperatorMatrix {
            entries: &self.entries - &rhs.entries,
        }
    }
}

impl<'a, T: Real> Mul<&'a OperatorMatrix<T>> for &'a OperatorMatrix<T> {
    type Output = OperatorMatrix<T>;
    fn mul(self, rhs: &'a OperatorMatrix<T>) -> OperatorMatrix<T> {
        OperatorMatrix {
            entries: &self.entries * &rhs.entries,
        }
    }
}

impl<T: Real> Neg for OperatorMatrix<T> {
    type Output = OperatorMatrix<T>;
    fn neg(self) -> OperatorMatrix<T> {
        OperatorMatrix {
            entries: -self.entries,
        }
    }
}

// ---------------------------------------------------------------------------
// Factorials

fn log_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| LogFactorialTable::new(LOG_FACTORIAL_CACHE).values)
}

/// Cached `ln n!` for `n ≤ bound`, built by compensated summation of `ln k`.
#[derive(Debug, Clone)]
pub struct LogFactorialTable {
    values: Vec<f64>,
}

impl LogFactorialTable {
    pub fn new(bound: usize) -> Self {
        let mut values = Vec::with_capacity(bound + 1);
        values.push(0.0);
        let (mut sum, mut carry) = (0.0f64, 0.0f64);
        for k in 1..=bound {
            // Kahan summation keeps the table at full double precision.
            let y = (k as f64).ln() - carry;
            let t = sum + y;
            carry = (t - sum) - y;
            sum = t;
            values.push(sum);
        }
        Self { values }
    }

    pub fn bound(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, n: usize) -> f64 {
        match self.values.get(n) {
            Some(v) => *v,
            None => stirling_log_factorial(n),
        }
    }
}

/// Stirling series for `ln n!`, accurate to double precision for `n > 100`.
fn stirling_log_factorial(n: usize) -> f64 {
    let x = n as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// `ln(n!)`.
pub fn log_factorial(n: usize) -> f64 {
    let table = log_factorial_table();
    match table.get(n) {
        Some(v) => *v,
        None => stirling_log_factorial(n),
    }
}

// ---------------------------------------------------------------------------
// Clebsch–Gordan coefficients

fn check_pair(twice_j: i32, twice_m: i32) -> Result<()> {
    if twice_j < 0 {
        return domain(format!("negative angular momentum 2j = {twice_j}"));
    }
    if twice_m.abs() > twice_j {
        return domain(format!("|m| exceeds j (2j = {twice_j}, 2m = {twice_m})"));
    }
    if (twice_j - twice_m) % 2 != 0 {
        return domain(format!(
            "j and m differ by a non-integer (2j = {twice_j}, 2m = {twice_m})"
        ));
    }
    Ok(())
}

/// Condon–Shortley Clebsch–Gordan coefficient `⟨j1 m1; j2 m2 | J M⟩`.
///
/// Arguments are doubled quantum numbers. Evaluated with the Racah closed
/// form in the log-factorial domain; the coefficient vanishes when
/// `M ≠ m1 + m2` or the triangle rule fails.
pub fn clebsch_gordan<T: Real>(
    twice_j1: i32,
    twice_m1: i32,
    twice_j2: i32,
    twice_m2: i32,
    twice_j: i32,
    twice_m: i32,
) -> Result<T> {
    check_pair(twice_j1, twice_m1)?;
    check_pair(twice_j2, twice_m2)?;
    check_pair(twice_j, twice_m)?;
    Ok(lit(racah_cg(
        twice_j1, twice_m1, twice_j2, twice_m2, twice_j, twice_m,
    )))
}

fn racah_cg(tj1: i32, tm1: i32, tj2: i32, tm2: i32, tj: i32, tm: i32) -> f64 {
    if tm != tm1 + tm2 {
        return 0.0;
    }
    if tj > tj1 + tj2 || tj < (tj1 - tj2).abs() || (tj1 + tj2 + tj) % 2 != 0 {
        return 0.0;
    }
    let h = |x: i32| -> i64 {
        debug_assert!(x % 2 == 0);
        (x / 2) as i64
    };
    let a = h(tj1 + tj2 - tj);
    let b = h(tj1 - tj2 + tj);
    let c = h(-tj1 + tj2 + tj);
    let d = h(tj1 + tj2 + tj) + 1;
    let lf = |n: i64| log_factorial(n as usize);
    let log_pre = 0.5
        * (((tj + 1) as f64).ln() + lf(a) + lf(b) + lf(c) - lf(d)
            + lf(h(tj + tm))
            + lf(h(tj - tm))
            + lf(h(tj1 - tm1))
            + lf(h(tj1 + tm1))
            + lf(h(tj2 - tm2))
            + lf(h(tj2 + tm2)));

    let e1 = h(tj1 - tm1);
    let e2 = h(tj2 + tm2);
    let e3 = h(tj - tj2 + tm1);
    let e4 = h(tj - tj1 - tm2);
    let k_min = 0.max(-e3).max(-e4);
    let k_max = a.min(e1).min(e2);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let log_den = lf(k) + lf(a - k) + lf(e1 - k) + lf(e2 - k) + lf(e3 + k) + lf(e4 + k);
        let term = (log_pre - log_den).exp();
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

// ---------------------------------------------------------------------------
// Spin matrices

/// The Cartesian spin matrices `S1, S2, S3` of one spin context.
#[derive(Debug, Clone)]
pub struct SpinMatrices<T: Real> {
    pub s1: OperatorMatrix<T>,
    pub s2: OperatorMatrix<T>,
    pub s3: OperatorMatrix<T>,
}

impl<T: Real> SpinMatrices<T> {
    /// Component `i ∈ {0, 1, 2}`.
    pub fn component(&self, i: usize) -> &OperatorMatrix<T> {
        match i {
            0 => &self.s1,
            1 => &self.s2,
            2 => &self.s3,
            _ => panic!("spin component index {i} out of range"),
        }
    }

    pub fn components(&self) -> [&OperatorMatrix<T>; 3] {
        [&self.s1, &self.s2, &self.s3]
    }
}

/// `S₊`: raises `m` by one.
pub fn raising<T: Real>(ctx: &SpinContext) -> OperatorMatrix<T> {
    let n = ctx.hilbert_dim();
    let s: T = ctx.spin();
    let mut op = OperatorMatrix::zeros(n);
    for k in 1..n {
        let m: T = int::<T>(ctx.twice_m(k) as i64) / lit(2.0);
        let amp = (s * (s + T::one()) - m * (m + T::one())).sqrt();
        op.entries[(k - 1, k)] = real(amp);
    }
    op
}

pub fn spin_matrices<T: Real>(ctx: &SpinContext) -> SpinMatrices<T> {
    let n = ctx.hilbert_dim();
    let up = raising::<T>(ctx);
    let down = up.adjoint();
    let half = lit::<T>(0.5);
    let s1 = OperatorMatrix::from_fn(n, |i, j| (up.get(i, j) + down.get(i, j)) * half);
    // (S₊ − S₋)/2i = −i(S₊ − S₋)/2
    let s2 = OperatorMatrix::from_fn(n, |i, j| {
        (up.get(i, j) - down.get(i, j)) * cplx(T::zero(), -half)
    });
    let s3 = OperatorMatrix::from_fn(n, |i, j| {
        if i == j {
            real(int::<T>(ctx.twice_m(i) as i64) * half)
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    SpinMatrices { s1, s2, s3 }
}

/// `exp(−i·angle·S3)`.
pub fn rotation_z<T: Real>(ctx: &SpinContext, angle: T) -> OperatorMatrix<T> {
    let n = ctx.hilbert_dim();
    OperatorMatrix::from_fn(n, |i, j| {
        if i == j {
            let m = int::<T>(ctx.twice_m(i) as i64) * lit(0.5);
            let phase = -angle * m;
            cplx(phase.cos(), phase.sin())
        } else {
            Complex::new(T::zero(), T::zero())
        }
    })
}

// ---------------------------------------------------------------------------
// Irreducible tensor operators

/// Sparse storage of the orthonormal tensor operators `T_lm` of one spin.
///
/// `T_lm = √((2l+1)/(2S+1)) Σ ⟨S,m'; l,m | S,m'+m⟩ |S,m'+m⟩⟨S,m'|`; each
/// operator has at most `2S+1` nonzero entries, all on the `m`-th
/// off-diagonal.
#[derive(Debug, Clone)]
pub struct TensorBasis<T: Real> {
    ctx: SpinContext,
    /// Per flat `(l, m)` index: `(row, col, value)` triples.
    entries: Vec<Vec<(usize, usize, T)>>,
}

impl<T: Real> TensorBasis<T> {
    pub fn new(ctx: &SpinContext) -> Self {
        let ts = ctx.twice_s() as i32;
        let band = ctx.band_limit();
        let mut entries = Vec::with_capacity(ctx.symbol_dim());
        for (l, m) in lm_pairs(band) {
            let norm = ((2 * l + 1) as f64 / ctx.hilbert_dim() as f64).sqrt();
            let mut list = Vec::new();
            for col in 0..ctx.hilbert_dim() {
                let tm_in = ctx.twice_m(col);
                let tm_out = tm_in + 2 * m as i32;
                if tm_out.abs() > ts {
                    continue;
                }
                let cg = racah_cg(ts, tm_in, 2 * l as i32, 2 * m as i32, ts, tm_out);
                if cg != 0.0 {
                    list.push((ctx.index_of(tm_out), col, lit(norm * cg)));
                }
            }
            debug_assert_eq!(entries.len(), lm_index(l, m));
            entries.push(list);
        }
        Self {
            ctx: *ctx,
            entries,
        }
    }

    pub fn context(&self) -> &SpinContext {
        &self.ctx
    }

    /// Nonzero entries of `T_lm` by flat index.
    pub fn entries(&self, index: usize) -> &[(usize, usize, T)] {
        &self.entries[index]
    }

    pub fn operator(&self, l: usize, m: i64) -> OperatorMatrix<T> {
        let mut op = OperatorMatrix::zeros(self.ctx.hilbert_dim());
        for &(r, c, v) in &self.entries[lm_index(l, m)] {
            op.entries[(r, c)] = real(v);
        }
        op
    }

    /// Expansion coefficients `a_lm = Tr(T_lm† A)`.
    pub fn expand(&self, op: &OperatorMatrix<T>) -> Result<Vec<Complex<T>>> {
        op.expect_dim(self.ctx.hilbert_dim())?;
        Ok(self
            .entries
            .iter()
            .map(|list| {
                list.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &(r, c, v)| {
                    acc + op.get(r, c) * v
                })
            })
            .collect())
    }

    /// Resums `Σ a_lm T_lm`.
    pub fn resum(&self, coeffs: &[Complex<T>]) -> Result<OperatorMatrix<T>> {
        if coeffs.len() != self.entries.len() {
            return Err(Error::DimensionMismatch {
                expected: self.entries.len(),
                found: coeffs.len(),
            });
        }
        let mut op = OperatorMatrix::zeros(self.ctx.hilbert_dim());
        for (list, a) in self.entries.iter().zip(coeffs) {
            for &(r, c, v) in list {
                op.entries[(r, c)] += *a * v;
            }
        }
        Ok(op)
    }
}

/// The orthonormal irreducible tensor operator `T_lm`.
pub fn tensor_operator<T: Real>(ctx: &SpinContext, l: usize, m: i64) -> Result<OperatorMatrix<T>> {
    if l > ctx.band_limit() {
        return domain(format!(
            "tensor rank {l} exceeds 2S = {}; the operator space is exhausted",
            ctx.band_limit()
        ));
    }
    if m.unsigned_abs() as usize > l {
        return domain(format!("|m| = {} exceeds l = {l}", m.abs()));
    }
    let ts = ctx.twice_s() as i32;
    let n = ctx.hilbert_dim();
    let norm = ((2 * l + 1) as f64 / n as f64).sqrt();
    let mut op = OperatorMatrix::zeros(n);
    for col in 0..n {
        let tm_in = ctx.twice_m(col);
        let tm_out = tm_in + 2 * m as i32;
        if tm_out.abs() > ts {
            continue;
        }
        let cg = racah_cg(ts, tm_in, 2 * l as i32, 2 * m as i32, ts, tm_out);
        op.entries[(ctx.index_of(tm_out), col)] = real(lit(norm * cg));
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn log_factorial_small_values() {
        assert_eq!(log_factorial(0), 0.0);
        assert_eq!(log_factorial(1), 0.0);
        let oracle: f64 = (1..=5).map(|k| (k as f64).ln()).sum();
        assert!(close(log_factorial(5), oracle, 1e-15));
        assert!(close(log_factorial(5), 120f64.ln(), 1e-14));
    }

    #[test]
    fn log_factorial_stirling_tail_matches_table() {
        let table = LogFactorialTable::new(3000);
        for n in [1025usize, 1500, 2999] {
            let rel = (table.get(n) - stirling_log_factorial(n)).abs() / table.get(n);
            assert!(rel < 1e-14, "n = {n}: rel {rel}");
        }
        assert_eq!(table.bound(), 3000);
    }

    #[test]
    fn cg_trivial_and_stretched() {
        for tj in 0..8 {
            for tm in (-tj..=tj).step_by(2) {
                let c: f64 = clebsch_gordan(tj, tm, 0, 0, tj, tm).unwrap();
                assert!(close(c, 1.0, 1e-14));
            }
        }
        let c: f64 = clebsch_gordan(1, 1, 1, 1, 2, 2).unwrap();
        assert!(close(c, 1.0, 1e-15));
        let c: f64 = clebsch_gordan(1, 1, 1, -1, 2, 0).unwrap();
        assert!(close(c, 0.5f64.sqrt(), 1e-15));
    }

    #[test]
    fn cg_selection_rules_and_domain() {
        let c: f64 = clebsch_gordan(2, 2, 2, 0, 2, 0).unwrap();
        assert_eq!(c, 0.0);
        // triangle violated
        let c: f64 = clebsch_gordan(1, 1, 1, -1, 4, 0).unwrap();
        assert_eq!(c, 0.0);
        assert!(clebsch_gordan::<f64>(2, 1, 1, 1, 1, 2).is_err());
        assert!(clebsch_gordan::<f64>(1, 3, 1, 1, 2, 2).is_err());
        assert!(clebsch_gordan::<f64>(-1, 1, 1, 1, 2, 2).is_err());
    }

    #[test]
    fn spin_half_matrices() {
        let ctx = SpinContext::new(1).unwrap();
        let s = spin_matrices::<f64>(&ctx);
        assert!(close(s.s3.get(0, 0).re, 0.5, 0.0));
        assert!(close(s.s3.get(1, 1).re, -0.5, 0.0));
        assert!(close(s.s1.get(0, 1).re, 0.5, 1e-15));
        assert!(close(s.s2.get(0, 1).im, -0.5, 1e-15));
    }

    #[test]
    fn rotation_by_two_pi_is_minus_identity_for_half_spin() {
        let ctx = SpinContext::new(1).unwrap();
        let u = rotation_z::<f64>(&ctx, 2.0 * std::f64::consts::PI);
        let diff = &u + &OperatorMatrix::identity(2);
        assert!(diff.max_abs() < 1e-15);
        let id = rotation_z::<f64>(&ctx, 0.0);
        assert!((&id - &OperatorMatrix::identity(2)).max_abs() == 0.0);
    }

    #[test]
    fn tensor_operator_examples() {
        let ctx = SpinContext::new(1).unwrap();
        let t00 = tensor_operator::<f64>(&ctx, 0, 0).unwrap();
        let expect = OperatorMatrix::identity(2).scale(real(0.5f64.sqrt()));
        assert!((&t00 - &expect).max_abs() < 1e-15);
        let t10 = tensor_operator::<f64>(&ctx, 1, 0).unwrap();
        let s3 = spin_matrices::<f64>(&ctx).s3.scale(real(2f64.sqrt()));
        assert!((&t10 - &s3).max_abs() < 1e-15);
        assert!(tensor_operator::<f64>(&ctx, 2, 0).is_err());
        assert!(tensor_operator::<f64>(&ctx, 1, 2).is_err());
    }

    #[test]
    fn tensor_basis_agrees_with_direct_construction() {
        let ctx = SpinContext::new(3).unwrap();
        let basis = TensorBasis::<f64>::new(&ctx);
        for (l, m) in lm_pairs(3) {
            let a = basis.operator(l, m);
            let b = tensor_operator::<f64>(&ctx, l, m).unwrap();
            assert!((&a - &b).max_abs() < 1e-15);
        }
    }

    #[test]
    fn context_validation() {
        assert!(SpinContext::new(0).is_err());
        assert!(SpinContext::from_spin(0.75).is_err());
        let ctx = SpinContext::from_spin(1.5).unwrap();
        assert_eq!(ctx.twice_s(), 3);
        assert_eq!(ctx.hilbert_dim(), 4);
        assert_eq!(ctx.band_limit(), 3);
        assert_eq!(ctx.symbol_dim(), 16);
        assert_eq!(ctx.index_of(ctx.twice_m(2)), 2);
    }

    #[test]
    fn hermiticity_check() {
        let ctx = SpinContext::new(2).unwrap();
        let s = spin_matrices::<f64>(&ctx);
        assert!(s.s2.clone().assert_hermitian().is_ok());
        let up = raising::<f64>(&ctx);
        assert!(matches!(up.assert_hermitian(), Err(Error::NotHermitian { .. })));
    }
}
