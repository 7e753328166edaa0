//! Generalized Bopp operators: the phase-space images of left and right
//! multiplication by the spin components.
//!
//! `B_i = M_i f₁(Λ²) + K_i f₂(Λ²) + L_i/2` acts on symbol coefficients so
//! that `B_i W_A = W_{S_i A}`; right multiplication swaps the sign of the
//! `L_i/2` part. The shell functions `f₁, f₂` only involve ratios
//! `F(l)/F(l±1)` of `F(l) = √((2S+l+1)!(2S−l)!)`.

use nalgebra::DMatrix;

use crate::error::{domain, Error, Result};
use crate::expr::{PolynomialSpinExpression, SpinComponent};
use crate::scalar::{int, lit, pow_nonneg, Complex, Real};
use crate::sphere::{
    alpha_beta, coefficient_count, lm_of_index, PhaseSpaceOperator, SphereOperators,
    SymbolCoefficients,
};
use crate::su2::{OperatorMatrix, SpinContext};
use crate::sw::{OrderingParameter, SwMap};

/// `F(l)/F(l+1)` for `direction = +1`, `F(l)/F(l−1)` for `direction = −1`.
pub fn f_ratio<T: Real>(ctx: &SpinContext, l: usize, direction: i32) -> Result<T> {
    let two_s = ctx.band_limit();
    if l > two_s {
        return domain(format!("l = {l} exceeds 2S = {two_s}"));
    }
    let (ts, lf) = (two_s as i64, l as i64);
    match direction {
        1 => Ok((int::<T>(ts - lf) / int::<T>(ts + lf + 2)).sqrt()),
        -1 if l >= 1 => Ok((int::<T>(ts + lf + 1) / int::<T>(ts - lf + 1)).sqrt()),
        -1 => domain("F(l)/F(l−1) needs l ≥ 1"),
        d => domain(format!("direction must be ±1, got {d}")),
    }
}

/// `(F(l)/F(l±1))^{1−σ}`, with the `l = 0` downward ratio taken as 1 (it
/// always multiplies a vanishing coefficient).
fn ratio_power<T: Real>(ctx: &SpinContext, l: usize, direction: i32, sigma: OrderingParameter) -> T {
    let r = if direction == -1 && l == 0 {
        T::one()
    } else {
        f_ratio::<T>(ctx, l, direction).expect("l ≤ 2S")
    };
    pow_nonneg(r, lit::<T>(1.0 - sigma.value()))
}

/// Shell tables `f₁(l), f₂(l)` for `l = 0..=2S`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoppCoefficients<T: Real> {
    pub ctx: SpinContext,
    pub sigma: OrderingParameter,
    pub f1: Vec<T>,
    pub f2: Vec<T>,
}

pub fn bopp_coefficients<T: Real>(ctx: &SpinContext, sigma: OrderingParameter) -> BoppCoefficients<T> {
    let two_s = int::<T>(ctx.band_limit() as i64);
    let two = lit::<T>(2.0);
    let (f1, f2) = (0..=ctx.band_limit())
        .map(|l| {
            let lf = int::<T>(l as i64);
            let up = ratio_power::<T>(ctx, l, 1, sigma);
            let down = ratio_power::<T>(ctx, l, -1, sigma);
            let denom = two * (two * lf + T::one());
            let a = up * (two_s + lf + two);
            let b = down * (lf - two_s - T::one());
            ((a * (lf + T::one()) - b * lf) / denom, (a + b) / denom)
        })
        .unzip();
    BoppCoefficients {
        ctx: *ctx,
        sigma,
        f1,
        f2,
    }
}

/// The large-`S` expansion
/// `2f₁ ≈ 2S+1+σ + (l(l+1)+1)(σ²−1)/(2(2S+1))`, `2f₂ ≈ σ + (σ²−1)/(2(2S+1))`.
pub fn asymptotic_coefficients<T: Real>(ctx: &SpinContext, sigma: OrderingParameter, l: usize) -> (T, T) {
    let s = sigma.value();
    let n = ctx.hilbert_dim() as f64;
    let l = l as f64;
    let corr = (s * s - 1.0) / (2.0 * n);
    (
        lit((n + s + (l * (l + 1.0) + 1.0) * corr) / 2.0),
        lit((s + corr) / 2.0),
    )
}

/// Bopp operators of one `(S, σ)` on the band-`2S` coefficient space.
#[derive(Debug, Clone)]
pub struct BoppOperators<T: Real> {
    coefficients: BoppCoefficients<T>,
    sphere: SphereOperators<T>,
    /// `A_i = M_i f₁ + K_i f₂`.
    shell_part: [PhaseSpaceOperator<T>; 3],
    left: [PhaseSpaceOperator<T>; 3],
    right: [PhaseSpaceOperator<T>; 3],
}

impl<T: Real> BoppOperators<T> {
    pub fn new(ctx: &SpinContext, sigma: OrderingParameter) -> Self {
        Self::with_sphere(ctx, sigma, SphereOperators::new(ctx.band_limit()))
    }

    /// Builds on a lower band limit `L < 2S`. The result is exact on
    /// columns with `l ≤ L − 1`; the top shell loses its `l + 1` image.
    pub fn with_band(ctx: &SpinContext, sigma: OrderingParameter, band: usize) -> Self {
        Self::with_sphere(ctx, sigma, SphereOperators::new(band.min(ctx.band_limit())))
    }

    /// Reuses precomputed sphere operators with band limit at most `2S`.
    pub fn with_sphere(ctx: &SpinContext, sigma: OrderingParameter, sphere: SphereOperators<T>) -> Self {
        assert!(sphere.band_limit <= ctx.band_limit(), "sphere band limit exceeds 2S");
        let coefficients = bopp_coefficients::<T>(ctx, sigma);
        let band = sphere.band_limit;
        let d1 = PhaseSpaceOperator::shell_diagonal(band, |l| coefficients.f1[l]);
        let d2 = PhaseSpaceOperator::shell_diagonal(band, |l| coefficients.f2[l]);
        let half = lit::<T>(0.5);
        let shell_part: [PhaseSpaceOperator<T>; 3] = std::array::from_fn(|i| {
            sphere.position.m[i]
                .compose(&d1)
                .add(&sphere.position.k[i].compose(&d2))
        });
        let left = std::array::from_fn(|i| shell_part[i].add(&sphere.angular.l[i].scale_real(half)));
        let right = std::array::from_fn(|i| shell_part[i].sub(&sphere.angular.l[i].scale_real(half)));
        Self {
            coefficients,
            sphere,
            shell_part,
            left,
            right,
        }
    }

    pub fn context(&self) -> &SpinContext {
        &self.coefficients.ctx
    }

    /// Band limit of the matrices (`2S` unless built with [`Self::with_band`]).
    pub fn band_limit(&self) -> usize {
        self.sphere.band_limit
    }

    pub fn sigma(&self) -> OrderingParameter {
        self.coefficients.sigma
    }

    pub fn coefficients(&self) -> &BoppCoefficients<T> {
        &self.coefficients
    }

    pub fn sphere(&self) -> &SphereOperators<T> {
        &self.sphere
    }

    /// `B_i` (left multiplication by `S_i`).
    pub fn left(&self, c: SpinComponent) -> &PhaseSpaceOperator<T> {
        &self.left[c.index()]
    }

    /// Right multiplication by `S_i`.
    pub fn right(&self, c: SpinComponent) -> &PhaseSpaceOperator<T> {
        &self.right[c.index()]
    }

    /// `M_i f₁ + K_i f₂`, the part shared by left and right multiplication.
    pub fn shell_part(&self, c: SpinComponent) -> &PhaseSpaceOperator<T> {
        &self.shell_part[c.index()]
    }

    pub fn matrices(&self) -> [&PhaseSpaceOperator<T>; 3] {
        [&self.left[0], &self.left[1], &self.left[2]]
    }

    fn evaluate_with(
        &self,
        expr: &PolynomialSpinExpression<T>,
        factors: &[PhaseSpaceOperator<T>; 3],
        reverse: bool,
    ) -> PhaseSpaceOperator<T> {
        let band = self.band_limit();
        let mut total = PhaseSpaceOperator::zeros(band);
        for term in expr.terms() {
            let mut word = PhaseSpaceOperator::identity(band);
            let letters: Vec<_> = if reverse {
                term.word.iter().rev().collect()
            } else {
                term.word.iter().collect()
            };
            for c in letters {
                word = word.compose(&factors[c.index()]);
            }
            total = total.add(&word.scale(term.coefficient));
        }
        total
    }

    /// `A(B₁, B₂, B₃)`: the word with each `S_i` replaced by `B_i`, i.e. the
    /// phase-space action of `X ↦ A X`.
    pub fn evaluate_expression(&self, expr: &PolynomialSpinExpression<T>) -> PhaseSpaceOperator<T> {
        self.evaluate_with(expr, &self.left, false)
    }

    /// Phase-space action of `X ↦ X A`.
    pub fn evaluate_right(&self, expr: &PolynomialSpinExpression<T>) -> PhaseSpaceOperator<T> {
        self.evaluate_with(expr, &self.right, true)
    }
}

/// The three matrices `B₁, B₂, B₃`.
pub fn bopp_matrices<T: Real>(ctx: &SpinContext, sigma: OrderingParameter) -> [PhaseSpaceOperator<T>; 3] {
    let ops = BoppOperators::new(ctx, sigma);
    let [a, b, c] = ops.matrices();
    [a.clone(), b.clone(), c.clone()]
}

pub fn evaluate_expression<T: Real>(
    ctx: &SpinContext,
    expr: &PolynomialSpinExpression<T>,
    sigma: OrderingParameter,
) -> PhaseSpaceOperator<T> {
    BoppOperators::new(ctx, sigma).evaluate_expression(expr)
}

fn conjugated_superoperator<T: Real>(
    map: &SwMap<T>,
    act: impl Fn(&OperatorMatrix<T>) -> OperatorMatrix<T>,
) -> Result<PhaseSpaceOperator<T>> {
    let band = map.context().band_limit();
    let n = coefficient_count(band);
    let mut dense = DMatrix::zeros(n, n);
    for k in 0..n {
        let (l, m) = lm_of_index(k);
        let x = map.symbol_to_operator(&SymbolCoefficients::unit(band, l, m))?;
        let col = map.operator_to_symbol(&act(&x))?;
        dense.set_column(k, &nalgebra::DVector::from_column_slice(col.as_slice()));
    }
    PhaseSpaceOperator::from_dense(band, &dense)
}

/// `Φ ∘ (X ↦ A X) ∘ Φ⁻¹` with `Φ` the symbol map, built column by column.
pub fn left_mult_superoperator<T: Real>(
    a: &OperatorMatrix<T>,
    sigma: OrderingParameter,
) -> Result<PhaseSpaceOperator<T>> {
    let map = SwMap::new(crate::sw::context_of(a)?, sigma);
    conjugated_superoperator(&map, |x| a * x)
}

/// `Φ ∘ (X ↦ X A) ∘ Φ⁻¹`.
pub fn right_mult_superoperator<T: Real>(
    a: &OperatorMatrix<T>,
    sigma: OrderingParameter,
) -> Result<PhaseSpaceOperator<T>> {
    let map = SwMap::new(crate::sw::context_of(a)?, sigma);
    conjugated_superoperator(&map, |x| x * a)
}

/// `W_A ⋆ W_B = W_{AB}`, evaluated through the operator algebra.
pub fn star_product<T: Real>(
    c_a: &SymbolCoefficients<T>,
    c_b: &SymbolCoefficients<T>,
    ctx: &SpinContext,
    sigma: OrderingParameter,
) -> Result<SymbolCoefficients<T>> {
    let map = SwMap::new(*ctx, sigma);
    let a = map.symbol_to_operator(c_a)?;
    let b = map.symbol_to_operator(c_b)?;
    map.operator_to_symbol(&(&a * &b))
}

/// `W_{S3} ⋆ Y_lm` by the two-term route: the `j ≤ 1` terms of the
/// star-product series with `S^{+(1)}` acting on `cos θ` and `S^{−(1)}` on
/// `Y_lm`, resummed through the three-term relations.
pub fn s3_star_ylm<T: Real>(
    ctx: &SpinContext,
    sigma: OrderingParameter,
    l: usize,
    m: i64,
) -> Result<SymbolCoefficients<T>> {
    let band = ctx.band_limit();
    if l > band {
        return Err(Error::BandLimit { found: l, limit: band });
    }
    if m.unsigned_abs() as usize > l {
        return domain(format!("|m| = {} exceeds l = {l}", m.abs()));
    }
    let s: T = ctx.spin();
    let ab = alpha_beta::<T>(l, m);
    let up = ratio_power::<T>(ctx, l, 1, sigma);
    let down = ratio_power::<T>(ctx, l, -1, sigma);
    // Overall factor N_S · a₀ · (amplitude of W_S3 ∝ cos θ) · F(1)^{1−σ};
    // every power of F(0), F(1) and the factorials cancels, leaving S+1.
    let prefactor = s + T::one();
    let a1_over_a0 = -T::one() / (lit::<T>(2.0) * s + lit(2.0));

    let mut out = SymbolCoefficients::zeros(band);
    let mut put = |ll: usize, v: T| {
        if ll <= band && m.unsigned_abs() as usize <= ll {
            let z = out.get(ll, m) + Complex::new(v, T::zero());
            out.set(ll, m, z);
        }
    };
    // F^{1−σ}(l) F̃^{σ−1}[cos θ Y_lm]
    put(l + 1, prefactor * ab.alpha1 * up);
    if l > 0 {
        put(l - 1, prefactor * ab.alpha2 * down);
    }
    // F^{1−σ}(l) F̃^{σ−1}[(S^{+(1)} cos θ)(S^{−(1)} Y_lm)]
    //   = −β₁ ρ₊ Y_{l+1} − β₂ ρ₋ Y_{l−1} + i∂φ Y_lm
    put(l + 1, prefactor * a1_over_a0 * (-ab.beta1 * up));
    if l > 0 {
        put(l - 1, prefactor * a1_over_a0 * (-ab.beta2 * down));
    }
    put(l, prefactor * a1_over_a0 * (-int::<T>(m)));
    Ok(out)
}
