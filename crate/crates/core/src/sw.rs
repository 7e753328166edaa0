//! The Stratonovich–Weyl correspondence between spin operators and
//! functions on the sphere, for any ordering `σ ∈ [−1, 1]`.
//!
//! The map is diagonal in the pair (tensor operators, spherical harmonics):
//! `A = Σ a_lm T_lm` has symbol coefficients
//! `c_lm = √(4π/(2S+1)) · ⟨S,S; l,0|S,S⟩^{−σ} · a_lm`.
//! Phase-space integrals use `dμ = (2S+1)/(4π) dΩ`, so `∫ W_I dμ = 2S+1`.

use crate::error::{domain, Error, Result};
use crate::scalar::{lit, Complex, Real};
use crate::sphere::{lm_pairs, ylm_eval, SymbolCoefficients};
use crate::su2::{log_factorial, OperatorMatrix, SpinContext, TensorBasis};

/// The ordering parameter `σ`: 0 symmetric, +1 normal, −1 antinormal.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct OrderingParameter(f64);

impl OrderingParameter {
    pub const SYMMETRIC: Self = Self(0.0);
    pub const NORMAL: Self = Self(1.0);
    pub const ANTINORMAL: Self = Self(-1.0);

    pub fn new(sigma: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma.abs() > 1.0 {
            return domain(format!("ordering parameter {sigma} outside [-1, 1]"));
        }
        Ok(Self(sigma))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// The dual ordering `−σ`.
    #[inline]
    pub fn dual(self) -> Self {
        Self(-self.0)
    }
}

impl Default for OrderingParameter {
    fn default() -> Self {
        Self::SYMMETRIC
    }
}

impl TryFrom<f64> for OrderingParameter {
    type Error = Error;
    fn try_from(sigma: f64) -> Result<Self> {
        Self::new(sigma)
    }
}

/// `ln ⟨S,S; l,0|S,S⟩ = ln (2S)! + ½[ln(2S+1) − ln (2S−l)! − ln (2S+l+1)!]`.
fn ln_cg_weight(ctx: &SpinContext, l: usize) -> Result<f64> {
    let two_s = ctx.band_limit();
    if l > two_s {
        return domain(format!("rank {l} exceeds 2S = {two_s}"));
    }
    Ok(log_factorial(two_s)
        + 0.5
            * ((ctx.hilbert_dim() as f64).ln()
                - log_factorial(two_s - l)
                - log_factorial(two_s + l + 1)))
}

/// The stretched Clebsch–Gordan coefficient `⟨S,S; l,0|S,S⟩`.
pub fn cg_weight<T: Real>(ctx: &SpinContext, l: usize) -> Result<T> {
    Ok(lit(ln_cg_weight(ctx, l)?.exp()))
}

/// Per-shell factors `√(4π/(2S+1)) · cg(l)^{−σ}`, computed in the log domain.
pub fn symbol_scales<T: Real>(ctx: &SpinContext, sigma: OrderingParameter) -> Vec<T> {
    let base = 0.5 * (4.0 * std::f64::consts::PI / ctx.hilbert_dim() as f64).ln();
    (0..=ctx.band_limit())
        .map(|l| {
            let ln_cg = ln_cg_weight(ctx, l).expect("l ≤ 2S");
            lit((base - sigma.value() * ln_cg).exp())
        })
        .collect()
}

/// Precomputed symbol map for one `(S, σ)`.
#[derive(Debug, Clone)]
pub struct SwMap<T: Real> {
    ctx: SpinContext,
    sigma: OrderingParameter,
    basis: TensorBasis<T>,
    scales: Vec<T>,
}

impl<T: Real> SwMap<T> {
    pub fn new(ctx: SpinContext, sigma: OrderingParameter) -> Self {
        Self {
            ctx,
            sigma,
            basis: TensorBasis::new(&ctx),
            scales: symbol_scales(&ctx, sigma),
        }
    }

    pub fn context(&self) -> &SpinContext {
        &self.ctx
    }

    pub fn sigma(&self) -> OrderingParameter {
        self.sigma
    }

    pub fn basis(&self) -> &TensorBasis<T> {
        &self.basis
    }

    /// Shell factor relating `a_lm` to `c_lm`.
    pub fn scale(&self, l: usize) -> T {
        self.scales[l]
    }

    pub fn operator_to_symbol(&self, a: &OperatorMatrix<T>) -> Result<SymbolCoefficients<T>> {
        let mut c = self.basis.expand(a)?;
        for ((l, _), z) in lm_pairs(self.ctx.band_limit()).zip(c.iter_mut()) {
            *z *= self.scales[l];
        }
        SymbolCoefficients::from_vec(self.ctx.band_limit(), c)
    }

    /// Exact inverse of [`SwMap::operator_to_symbol`]. Inputs with a smaller
    /// band limit are zero-padded.
    pub fn symbol_to_operator(&self, c: &SymbolCoefficients<T>) -> Result<OperatorMatrix<T>> {
        let band = self.ctx.band_limit();
        if c.band_limit() > band {
            return Err(Error::BandLimit {
                found: c.band_limit(),
                limit: band,
            });
        }
        let c = c.with_band_limit(band);
        let a: Vec<_> = lm_pairs(band)
            .zip(c.as_slice())
            .map(|((l, _), z)| *z / self.scales[l])
            .collect();
        self.basis.resum(&a)
    }

    /// The kernel `Δ(θ, φ) = Σ_lm scale_l T_lm Y*_lm(θ, φ)`, so that
    /// `Tr(A Δ(θ, φ))` is the symbol of `A` at that point.
    pub fn kernel_eval(&self, theta: T, phi: T) -> Result<OperatorMatrix<T>> {
        let mut m = OperatorMatrix::zeros(self.ctx.hilbert_dim()).into_matrix();
        for (k, (l, mm)) in lm_pairs(self.ctx.band_limit()).enumerate() {
            let y = ylm_eval(l, mm, theta, phi)?.conj() * self.scales[l];
            for &(r, c, v) in self.basis.entries(k) {
                m[(r, c)] += y * v;
            }
        }
        OperatorMatrix::from_matrix(m)
    }

    /// `⟨A⟩ = ∫ W_A^{(σ)} W_ρ^{(−σ)} dμ`, evaluated on coefficients.
    pub fn expectation(
        &self,
        c_a: &SymbolCoefficients<T>,
        c_rho: &SymbolCoefficients<T>,
    ) -> Result<Complex<T>> {
        expectation(&self.ctx, c_a, c_rho)
    }
}

/// `((2S+1)/(4π)) Σ_lm (−1)^m c_{A,lm} c_{ρ,l,−m}`; the two symbols must be
/// taken at opposite orderings for this to equal `Tr(Aρ)`.
pub fn expectation<T: Real>(
    ctx: &SpinContext,
    c_a: &SymbolCoefficients<T>,
    c_rho: &SymbolCoefficients<T>,
) -> Result<Complex<T>> {
    let band = ctx.band_limit();
    for c in [c_a, c_rho] {
        if c.band_limit() > band {
            return Err(Error::BandLimit {
                found: c.band_limit(),
                limit: band,
            });
        }
    }
    let common = c_a.band_limit().min(c_rho.band_limit());
    let mut sum = Complex::new(T::zero(), T::zero());
    for (l, m) in lm_pairs(common) {
        let term = c_a.get(l, m) * c_rho.get(l, -m);
        sum += if m.rem_euclid(2) == 0 { term } else { -term };
    }
    let mu = lit::<T>(ctx.hilbert_dim() as f64) / (lit::<T>(4.0) * T::pi());
    Ok(sum * mu)
}

/// Spin context implied by a `(2S+1)`-dimensional operator.
pub fn context_of<T: Real>(a: &OperatorMatrix<T>) -> Result<SpinContext> {
    if a.dim() < 2 {
        return domain(format!("operator dimension {} does not describe a spin", a.dim()));
    }
    SpinContext::new(a.dim() as u32 - 1)
}

pub fn operator_to_symbol<T: Real>(
    a: &OperatorMatrix<T>,
    sigma: OrderingParameter,
) -> Result<SymbolCoefficients<T>> {
    SwMap::new(context_of(a)?, sigma).operator_to_symbol(a)
}

pub fn symbol_to_operator<T: Real>(
    c: &SymbolCoefficients<T>,
    ctx: SpinContext,
    sigma: OrderingParameter,
) -> Result<OperatorMatrix<T>> {
    SwMap::new(ctx, sigma).symbol_to_operator(c)
}

pub fn kernel_eval<T: Real>(
    ctx: SpinContext,
    sigma: OrderingParameter,
    theta: T,
    phi: T,
) -> Result<OperatorMatrix<T>> {
    SwMap::new(ctx, sigma).kernel_eval(theta, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::spin_matrices;
    use std::f64::consts::PI;

    fn ctx(twice_s: u32) -> SpinContext {
        SpinContext::new(twice_s).unwrap()
    }

    #[test]
    fn ordering_bounds() {
        assert!(OrderingParameter::new(1.0).is_ok());
        assert!(OrderingParameter::new(1.01).is_err());
        assert!(OrderingParameter::new(f64::NAN).is_err());
        assert_eq!(OrderingParameter::NORMAL.dual(), OrderingParameter::ANTINORMAL);
    }

    #[test]
    fn cg_weight_examples() {
        assert!((cg_weight::<f64>(&ctx(4), 0).unwrap() - 1.0).abs() < 1e-15);
        assert!((cg_weight::<f64>(&ctx(1), 1).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!(cg_weight::<f64>(&ctx(1), 2).is_err());
        for ts in 1..=10 {
            let c = ctx(ts);
            let w: Vec<f64> = (0..=c.band_limit()).map(|l| cg_weight(&c, l).unwrap()).collect();
            assert!(w.windows(2).all(|p| p[1] < p[0]), "2S = {ts}");
            assert!(w.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn cg_weight_matches_racah() {
        for ts in 1..=8u32 {
            let c = ctx(ts);
            for l in 0..=ts as usize {
                let r: f64 = crate::su2::clebsch_gordan(ts as i32, ts as i32, 2 * l as i32, 0, ts as i32, ts as i32)
                    .unwrap();
                assert!((cg_weight::<f64>(&c, l).unwrap() - r).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn identity_and_s3_symbols() {
        for ts in 1..=5 {
            let c = ctx(ts);
            let s: f64 = c.spin();
            for sigma in [-1.0, -0.5, 0.0, 0.5, 1.0] {
                let map = SwMap::<f64>::new(c, OrderingParameter::new(sigma).unwrap());
                let id = map.operator_to_symbol(&OperatorMatrix::identity(c.hilbert_dim())).unwrap();
                assert!((id.get(0, 0).re - (4.0 * PI).sqrt()).abs() < 1e-13);
                assert!(id.as_slice()[1..].iter().all(|z| z.norm() < 1e-13));
                // W_S3 = √(S(S+1)) (S/(S+1))^{−σ/2} cos θ, and cos θ = √(4π/3) Y_10
                let w = map.operator_to_symbol(&spin_matrices(&c).s3).unwrap();
                let amp = (s * (s + 1.0)).sqrt() * (s / (s + 1.0)).powf(-sigma / 2.0);
                assert!((w.get(1, 0).re - amp * (4.0 * PI / 3.0).sqrt()).abs() < 1e-12);
            }
        }
        // S = 1/2, normal ordering: (3/2) cos θ
        let w = operator_to_symbol(&spin_matrices::<f64>(&ctx(1)).s3, OrderingParameter::NORMAL).unwrap();
        assert!((w.get(1, 0).re - 1.5 * (4.0 * PI / 3.0).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn symbol_band_limit_is_checked() {
        let map = SwMap::<f64>::new(ctx(2), OrderingParameter::SYMMETRIC);
        assert!(map.symbol_to_operator(&SymbolCoefficients::zeros(3)).is_err());
        assert!(map.operator_to_symbol(&OperatorMatrix::identity(4)).is_err());
        let mut one = SymbolCoefficients::zeros(0);
        one.set(0, 0, Complex::new((4.0 * PI).sqrt(), 0.0));
        let id = map.symbol_to_operator(&one).unwrap();
        assert!((&id - &OperatorMatrix::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn kernel_trace_is_one() {
        let map = SwMap::<f64>::new(ctx(3), OrderingParameter::new(0.3).unwrap());
        for &(t, p) in &[(0.1, 0.0), (1.2, 2.2), (3.0, -1.0)] {
            let k = map.kernel_eval(t, p).unwrap();
            assert!((k.trace() - Complex::new(1.0, 0.0)).norm() < 1e-13);
            assert!(k.is_hermitian(1e-12));
        }
    }

    #[test]
    fn expectation_examples() {
        let c = ctx(2);
        let n = c.hilbert_dim();
        let mixed = OperatorMatrix::identity(n).scale(Complex::new(1.0 / n as f64, 0.0));
        let top = OperatorMatrix::from_fn(n, |i, j| Complex::new(if i == 0 && j == 0 { 1.0 } else { 0.0 }, 0.0));
        let s3 = spin_matrices::<f64>(&c).s3;
        for sigma in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let sg = OrderingParameter::new(sigma).unwrap();
            let (fwd, dual) = (SwMap::new(c, sg), SwMap::new(c, sg.dual()));
            let w_id = fwd.operator_to_symbol(&OperatorMatrix::identity(n)).unwrap();
            let v = fwd.expectation(&w_id, &dual.operator_to_symbol(&mixed).unwrap()).unwrap();
            assert!((v - Complex::new(1.0, 0.0)).norm() < 1e-13);
            let w_s3 = fwd.operator_to_symbol(&s3).unwrap();
            let v = fwd.expectation(&w_s3, &dual.operator_to_symbol(&top).unwrap()).unwrap();
            assert!((v - Complex::new(1.0, 0.0)).norm() < 1e-12);
        }
    }
}
