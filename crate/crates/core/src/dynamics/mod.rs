//! Time evolution on phase space and its Hilbert-space counterpart.
//!
//! Generators act on symbol coefficients at ordering `σ`; every one of
//! them maps real functions to real functions, though as matrices they
//! are complex.

mod classical;
mod generators;
mod integrate;
mod master;
mod scan;

pub use classical::{boltzmann_coefficients, classical_generators, ClassicalGenerators, ClassicalModel, MPolynomial};
pub use generators::{
    isotropic_bilinear_generator, m_vector, qfp_generator, quadratic_generator, unitary_generator,
};
pub use integrate::{
    integrate, integrate_density, rk4_step, EvolutionResult, Method, Observables, ObservableEvaluator,
};
pub use master::{coherent_state, master_rhs, master_superoperator, stationary_state};
pub use scan::{asymptotic_deviation, classical_limit_scan, ScanModel, ScanResult, ScanRow};

use crate::error::{domain, Result};
use crate::expr::PolynomialSpinExpression;
use crate::scalar::{abs, lit, Real};
use crate::su2::{OperatorMatrix, SpinContext};

/// `H = −Σ D_ij S_i S_j − Σ B_i S_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticHamiltonian<T: Real> {
    pub d: [[T; 3]; 3],
    pub b: [T; 3],
}

impl<T: Real> QuadraticHamiltonian<T> {
    pub fn new(d: [[T; 3]; 3], b: [T; 3]) -> Result<Self> {
        for i in 0..3 {
            for j in 0..i {
                if abs(d[i][j] - d[j][i]) > lit(1e-14) {
                    return domain("anisotropy tensor D must be symmetric");
                }
            }
        }
        Ok(Self { d, b })
    }

    pub fn linear(b: [T; 3]) -> Self {
        Self {
            d: [[T::zero(); 3]; 3],
            b,
        }
    }

    pub fn expression(&self) -> PolynomialSpinExpression<T> {
        PolynomialSpinExpression::quadratic(self.d, self.b)
    }

    /// The classical energy `H(S m) = −S² m·D m − S B·m`.
    pub fn classical(&self, spin: T) -> MPolynomial<T> {
        let mut h = MPolynomial::zero();
        for i in 0..3 {
            h = h.add(&MPolynomial::coordinate(i).scale(-spin * self.b[i]));
            for j in 0..3 {
                h = h.add(
                    &MPolynomial::coordinate(i)
                        .mul(&MPolynomial::coordinate(j))
                        .scale(-spin * spin * self.d[i][j]),
                );
            }
        }
        h
    }
}

/// Bath coupling `F`, damping `γ` and temperature `T` of the master equation.
#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec<T: Real> {
    pub coupling: PolynomialSpinExpression<T>,
    /// Set when `F = ξ·S`.
    pub xi: Option<[T; 3]>,
    pub gamma: T,
    pub temperature: T,
}

impl<T: Real> BathSpec<T> {
    pub fn new(coupling: PolynomialSpinExpression<T>, gamma: T, temperature: T) -> Result<Self> {
        if !(gamma >= T::zero()) {
            return domain("damping γ must be non-negative");
        }
        if !(temperature > T::zero()) {
            return domain("temperature must be positive");
        }
        coupling.validate()?;
        Ok(Self {
            coupling,
            xi: None,
            gamma,
            temperature,
        })
    }

    /// `F = ξ·S`.
    pub fn bilinear(xi: [T; 3], gamma: T, temperature: T) -> Result<Self> {
        let mut b = Self::new(PolynomialSpinExpression::linear(xi), gamma, temperature)?;
        b.xi = Some(xi);
        Ok(b)
    }

    /// The weak-coupling figure of merit `γ/(S T)`; reported, never enforced.
    pub fn validity_ratio(&self, ctx: &SpinContext) -> T {
        self.gamma / (ctx.spin::<T>() * self.temperature)
    }

    /// The coupling as a matrix, checked to be Hermitian.
    pub fn coupling_operator(&self, ctx: &SpinContext) -> Result<OperatorMatrix<T>> {
        self.coupling.require_hermitian(ctx)
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let xs: Vec<f64> = [5.0f64, 10.0, 20.0].iter().map(|s| s.ln()).collect();
        let ys: Vec<f64> = [5.0f64, 10.0, 20.0].iter().map(|s| (3.0 / (s * s)).ln()).collect();
        assert!((fit_slope(&xs, &ys) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn parameter_validation() {
        let d = [[1.0, 0.5, 0.0], [0.4, 0.0, 0.0], [0.0, 0.0, 0.0]];
        assert!(QuadraticHamiltonian::new(d, [0.0; 3]).is_err());
        assert!(BathSpec::bilinear([1.0, 0.0, 0.0], -0.1, 1.0).is_err());
        assert!(BathSpec::bilinear([1.0, 0.0, 0.0], 0.1, 0.0).is_err());
        let b = BathSpec::<f64>::bilinear([1.0, 0.0, 0.0], 0.1, 2.0).unwrap();
        let ctx = SpinContext::new(2).unwrap();
        assert!((b.validity_ratio(&ctx) - 0.05).abs() < 1e-15);
    }
}
