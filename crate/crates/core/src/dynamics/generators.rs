use crate::bopp::BoppOperators;
use crate::error::Result;
use crate::expr::{PolynomialSpinExpression, SpinComponent};
use crate::scalar::{lit, Complex, Real};
use crate::sphere::PhaseSpaceOperator;

use super::{BathSpec, QuadraticHamiltonian};

fn i_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// `Im(X_B)` for Hermitian `X`: `(X_B − X_R)/(2i)`, with `X_R` the right
/// multiplication. Equal to `(X_B − C X_B C)/(2i)` and exact in floating
/// point for linear words, whose left and right parts occupy disjoint
/// matrix entries.
fn im_hermitian<T: Real>(ops: &BoppOperators<T>, x: &PolynomialSpinExpression<T>) -> PhaseSpaceOperator<T> {
    ops.evaluate_expression(x)
        .sub(&ops.evaluate_right(x))
        .scale(Complex::new(T::zero(), -lit::<T>(0.5)))
}

/// `G = 2 Im(H_B)`: `∂_t W = G W` is the von Neumann equation.
pub fn unitary_generator<T: Real>(
    ops: &BoppOperators<T>,
    h: &PolynomialSpinExpression<T>,
) -> Result<PhaseSpaceOperator<T>> {
    h.require_hermitian(ops.context())?;
    Ok(im_hermitian(ops, h).scale_real(lit(2.0)))
}

/// Drift generator of `H = −D_ij S_i S_j − B_i S_i`, assembled as
/// `(i/S) Σ_j L_j B^Q_j` with `B^Q = B_eff + 2S D 𝕄`, where
/// `B_eff(m) = S B + 2S² D m` is the classical field and
/// `𝕄 = [M (f₁ − S) + K f₂]/S` its quantum correction.
pub fn quadratic_generator<T: Real>(ops: &BoppOperators<T>, qh: &QuadraticHamiltonian<T>) -> PhaseSpaceOperator<T> {
    let s: T = ops.context().spin();
    let band = ops.band_limit();
    let sphere = ops.sphere();
    let corr = m_vector(ops);
    let mut g = PhaseSpaceOperator::zeros(band);
    for j in 0..3 {
        // B^Q_j / S
        let mut field = PhaseSpaceOperator::identity(band).scale_real(qh.b[j]);
        for k in 0..3 {
            let djk = qh.d[j][k];
            if djk == T::zero() {
                continue;
            }
            let m_plus = sphere.position.m[k].add(&corr[k]);
            field = field.add(&m_plus.scale_real(lit::<T>(2.0) * s * djk));
        }
        g = g.add(&sphere.angular.l[j].compose(&field));
    }
    g.scale(i_unit())
}

/// The quantum correction `𝕄_k = [M_k (f₁ − S) + K_k f₂]/S`, of order `1/S`.
pub fn m_vector<T: Real>(ops: &BoppOperators<T>) -> [PhaseSpaceOperator<T>; 3] {
    let s: T = ops.context().spin();
    let band = ops.band_limit();
    let f = ops.coefficients();
    let d1 = PhaseSpaceOperator::shell_diagonal(band, |l| (f.f1[l] - s) / s);
    let d2 = PhaseSpaceOperator::shell_diagonal(band, |l| f.f2[l] / s);
    let sphere = ops.sphere();
    std::array::from_fn(|k| {
        sphere.position.m[k]
            .compose(&d1)
            .add(&sphere.position.k[k].compose(&d2))
    })
}

/// `2 Im(H_B) + 4γT [Im²(F_B) − (1/2T) Im(F_B) Im([H_B, F_B])]`.
pub fn qfp_generator<T: Real>(
    ops: &BoppOperators<T>,
    h: &PolynomialSpinExpression<T>,
    bath: &BathSpec<T>,
) -> Result<PhaseSpaceOperator<T>> {
    let g = unitary_generator(ops, h)?;
    bath.coupling_operator(ops.context())?;
    if bath.gamma == T::zero() {
        return Ok(g);
    }
    let f = &bath.coupling;
    let im_f = im_hermitian(ops, f);
    // K = [H, F] is anti-Hermitian, so C K_B C = −K_R and Im(K_B) = (K_B + K_R)/(2i)
    let k = h.commutator(f);
    let im_k = ops
        .evaluate_expression(&k)
        .add(&ops.evaluate_right(&k))
        .scale(Complex::new(T::zero(), -lit::<T>(0.5)));
    let two_t = lit::<T>(2.0) * bath.temperature;
    let diss = im_f
        .compose(&im_f)
        .sub(&im_f.compose(&im_k).scale_real(T::one() / two_t));
    Ok(g.add(&diss.scale_real(lit::<T>(4.0) * bath.gamma * bath.temperature)))
}

fn dot_l<T: Real>(ops: &BoppOperators<T>, v: [T; 3]) -> PhaseSpaceOperator<T> {
    let sphere = ops.sphere();
    (0..3).fold(PhaseSpaceOperator::zeros(ops.band_limit()), |acc, j| {
        acc.add(&sphere.angular.l[j].scale_real(v[j]))
    })
}

fn cross<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Isotropic spin `H = −B·S` coupled through `F = ξ·S`, in drift–diffusion
/// form:
/// `G = i B·L − γT (ξ·L)² − iγS (ξ·L) ((B×ξ)·(M + 𝕄))`.
/// The first two terms and the `M` part are the classical Fokker–Planck
/// generator with `B_eff = S B`, `Λ̃ = Sγ ξξᵀ`; `𝕄` is the quantum remainder.
pub fn isotropic_bilinear_generator<T: Real>(
    ops: &BoppOperators<T>,
    b: [T; 3],
    xi: [T; 3],
    gamma: T,
    temperature: T,
) -> PhaseSpaceOperator<T> {
    let s: T = ops.context().spin();
    let i = i_unit::<T>();
    let precession = dot_l(ops, b).scale(i);
    if gamma == T::zero() {
        return precession;
    }
    let xl = dot_l(ops, xi);
    let diffusion = xl.compose(&xl).scale_real(-gamma * temperature);
    let bx = cross(b, xi);
    let corr = m_vector(ops);
    let sphere = ops.sphere();
    let drift_field = (0..3).fold(PhaseSpaceOperator::zeros(ops.band_limit()), |acc, k| {
        acc.add(&sphere.position.m[k].add(&corr[k]).scale_real(bx[k]))
    });
    let drift = xl.compose(&drift_field).scale(i * (-gamma * s));
    precession.add(&diffusion).add(&drift)
}

/// Convenience: the linear part `−B·S` as an expression.
pub(crate) fn zeeman<T: Real>(b: [T; 3]) -> PolynomialSpinExpression<T> {
    SpinComponent::ALL
        .iter()
        .fold(PolynomialSpinExpression::zero(), |e, c| e.with_real_term(-b[c.index()], &[*c]))
}
