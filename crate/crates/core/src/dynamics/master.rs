//! The Hilbert-space master equation, used as the exact oracle for the
//! phase-space generators.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::{lit, modulus, Complex, Real};
use crate::su2::{rotation_z, spin_matrices, OperatorMatrix, SpinContext};
use crate::sw::context_of;

use super::BathSpec;

/// `∂_t ρ = −i[H, ρ] − γT ([F, Fρ] − (1/2T)[F, [H, F]ρ] + h.c.)`.
pub fn master_rhs<T: Real>(
    rho: &OperatorMatrix<T>,
    h: &OperatorMatrix<T>,
    bath: &BathSpec<T>,
) -> Result<OperatorMatrix<T>> {
    let n = rho.dim();
    h.expect_dim(n)?;
    let ctx = context_of(rho)?;
    let i = Complex::new(T::zero(), T::one());
    let unitary = h.commutator(rho).scale(-i);
    if bath.gamma == T::zero() {
        return Ok(unitary);
    }
    let f = bath.coupling_operator(&ctx)?;
    let k = h.commutator(&f);
    let inner = &f.commutator(&(&f * rho))
        - &f.commutator(&(&k * rho))
            .scale(Complex::new(T::one() / (lit::<T>(2.0) * bath.temperature), T::zero()));
    let diss = &inner + &inner.adjoint();
    Ok(&unitary - &diss.scale(Complex::new(bath.gamma * bath.temperature, T::zero())))
}

fn kron<T: Real>(a: &DMatrix<Complex<T>>, b: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
    a.kronecker(b)
}

/// The master equation as an `n² × n²` matrix on column-stacked `ρ`.
pub fn master_superoperator<T: Real>(h: &OperatorMatrix<T>, bath: &BathSpec<T>) -> Result<DMatrix<Complex<T>>> {
    let ctx = context_of(h)?;
    let n = h.dim();
    let id = DMatrix::<Complex<T>>::identity(n, n);
    // vec(A X B) = (Bᵀ ⊗ A) vec(X)
    let left = |a: &DMatrix<Complex<T>>| kron(&id, a);
    let right = |b: &DMatrix<Complex<T>>| kron(&b.transpose(), &id);
    let i = Complex::new(T::zero(), T::one());
    let hm = h.matrix();
    let mut sup = (left(hm) - right(hm)) * (-i);
    if bath.gamma == T::zero() {
        return Ok(sup);
    }
    let f = bath.coupling_operator(&ctx)?;
    let fm = f.matrix();
    let km = hm * fm - fm * hm;
    let df = left(fm) - right(fm);
    let sk = left(&km) + right(&km);
    let two_t = lit::<T>(2.0) * bath.temperature;
    let diss = &df * &df - (&df * &sk) * Complex::new(T::one() / two_t, T::zero());
    sup -= diss * Complex::new(bath.gamma * bath.temperature, T::zero());
    Ok(sup)
}

/// Stationary state from the null vector of the master superoperator.
pub fn stationary_state<T: Real>(superop: &DMatrix<Complex<T>>) -> Result<OperatorMatrix<T>> {
    let nn = superop.nrows();
    let n = (nn as f64).sqrt().round() as usize;
    if n * n != nn || superop.ncols() != nn {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: nn,
        });
    }
    let svd = superop.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
    let k = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite singular values"))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let v: Vec<Complex<T>> = v_t.row(k).iter().map(|z| z.conj()).collect();
    let m = DMatrix::from_column_slice(n, n, &v);
    let tr = m.trace();
    if modulus(tr) < lit(1e-300) {
        return Err(Error::Domain("null vector has vanishing trace".into()));
    }
    let m = m / tr;
    let herm = (&m + m.adjoint()) * Complex::new(lit::<T>(0.5), T::zero());
    OperatorMatrix::from_matrix(herm)
}

/// `ρ = U|S,S⟩⟨S,S|U†` with `U = exp(−iφ₀S3) exp(−iθ₀S2)`.
pub fn coherent_state<T: Real>(ctx: &SpinContext, theta0: T, phi0: T) -> OperatorMatrix<T> {
    let s2 = spin_matrices::<T>(ctx).s2;
    let tilt = (s2.matrix() * Complex::new(T::zero(), -theta0)).exp();
    let u = rotation_z(ctx, phi0).matrix() * tilt;
    let top = u.column(0).into_owned();
    OperatorMatrix::from_matrix(&top * top.adjoint()).expect("square")
}
