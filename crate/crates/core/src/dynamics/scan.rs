//! Quantum-to-classical convergence of the phase-space generators.

use std::fmt::Write as _;

use crate::bopp::{asymptotic_coefficients, bopp_coefficients, BoppOperators};
use crate::error::{domain, Result};
use crate::scalar::{abs, to_f64, Real};
use crate::sphere::{spectral_norm, PhaseSpaceOperator};
use crate::su2::SpinContext;
use crate::sw::OrderingParameter;

use super::generators::zeeman;
use super::{classical_generators, fit_slope, qfp_generator, unitary_generator, BathSpec, ClassicalModel, MPolynomial};

/// Families whose large-`S` behaviour is scanned.
///
/// Fields are held fixed as `S` grows: the quantum model uses `B = b/S` and
/// `γ = λ/S`, so the classical side sees `B_eff = b` and `Λ̃ = λ ξ̂ξ̂ᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScanModel<T: Real> {
    /// `H = −B·S`, no bath.
    LinearUnitary { field: [T; 3] },
    /// `H = −B·S`, `F = ξ̂·S`.
    Bilinear {
        field: [T; 3],
        lambda: T,
        xi: [T; 3],
        temperature: T,
    },
    /// Exact `f₁, f₂` tables against their large-`S` expansion.
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub spin: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
    /// Log–log slope of deviation against `S`; absent when any deviation
    /// is zero.
    pub slope: Option<f64>,
}

impl ScanResult {
    /// `S,deviation` with 17 significant digits.
    pub fn csv(&self) -> String {
        let mut out = String::from("S,deviation\n");
        for r in &self.rows {
            let _ = writeln!(out, "{:.16e},{:.16e}", r.spin, r.deviation);
        }
        out
    }
}

/// `max_l |f₁ − f₁^asym|, |f₂ − f₂^asym|` over `l ≤ l_max`.
pub fn asymptotic_deviation<T: Real>(ctx: &SpinContext, sigma: OrderingParameter, l_max: usize) -> T {
    let exact = bopp_coefficients::<T>(ctx, sigma);
    (0..=l_max.min(ctx.band_limit())).fold(T::zero(), |acc, l| {
        let (a1, a2) = asymptotic_coefficients::<T>(ctx, sigma, l);
        acc.max(abs(exact.f1[l] - a1)).max(abs(exact.f2[l] - a2))
    })
}

fn unit<T: Real>(v: [T; 3]) -> Result<[T; 3]> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if !(n > T::zero()) {
        return domain("coupling direction must be non-zero");
    }
    Ok(v.map(|x| x / n))
}

fn relative_block_deviation<T: Real>(q: &PhaseSpaceOperator<T>, c: &PhaseSpaceOperator<T>, l_test: usize) -> f64 {
    let band = q.band_limit();
    let diff = to_f64(spectral_norm(&q.sub(c).block(band, l_test)));
    if diff == 0.0 {
        return 0.0;
    }
    diff / to_f64(spectral_norm(&c.block(band, l_test)))
}

fn deviation_at<T: Real>(model: &ScanModel<T>, ctx: &SpinContext, sigma: OrderingParameter, l_test: usize) -> Result<f64> {
    let s: T = ctx.spin();
    // words of length ≤ 3 stay exact on columns l ≤ l_test
    let work = ctx.band_limit().min(l_test + 4);
    match model {
        ScanModel::Asymptotic => Ok(to_f64(asymptotic_deviation::<T>(ctx, sigma, l_test))),
        ScanModel::LinearUnitary { field } => {
            let ops = BoppOperators::<T>::with_band(ctx, sigma, work);
            let b = field.map(|x| x / s);
            let q = unitary_generator(&ops, &zeeman(b))?;
            let cl = classical_generators(
                &ClassicalModel {
                    spin: s,
                    hamiltonian: linear_energy(*field),
                    lambda: [[T::zero(); 3]; 3],
                    temperature: T::one(),
                },
                work,
            )?;
            Ok(relative_block_deviation(&q, &cl.liouville, l_test))
        }
        ScanModel::Bilinear {
            field,
            lambda,
            xi,
            temperature,
        } => {
            let xi = unit(*xi)?;
            let ops = BoppOperators::<T>::with_band(ctx, sigma, work);
            let b = field.map(|x| x / s);
            let bath = BathSpec::bilinear(xi, *lambda / s, *temperature)?;
            let q = qfp_generator(&ops, &zeeman(b), &bath)?;
            let cl = classical_generators(
                &ClassicalModel {
                    spin: s,
                    hamiltonian: linear_energy(*field),
                    lambda: std::array::from_fn(|j| std::array::from_fn(|k| *lambda * xi[j] * xi[k])),
                    temperature: *temperature,
                },
                work,
            )?;
            Ok(relative_block_deviation(&q, &cl.fokker_planck, l_test))
        }
    }
}

/// `H(m) = −b·m`, so that `B_eff = b`.
fn linear_energy<T: Real>(b: [T; 3]) -> MPolynomial<T> {
    (0..3).fold(MPolynomial::zero(), |h, i| h.add(&MPolynomial::coordinate(i).scale(-b[i])))
}

/// Deviation between quantum and classical generators on `l ≤ l_test` for
/// each spin `S = twice_s/2`, with a log–log fit.
pub fn classical_limit_scan<T: Real>(
    model: &ScanModel<T>,
    twice_spins: &[u32],
    sigma: OrderingParameter,
    l_test: usize,
) -> Result<ScanResult> {
    if twice_spins.is_empty() {
        return domain("scan needs at least one spin");
    }
    if twice_spins.windows(2).any(|w| w[1] <= w[0]) {
        return domain("scan spins must be strictly ascending");
    }
    let smallest = twice_spins[0] as usize;
    if l_test + 2 > smallest {
        return domain(format!(
            "test band {l_test} too large for the smallest spin (needs L_test ≤ 2S − 2 = {})",
            smallest as i64 - 2
        ));
    }
    let contexts = twice_spins
        .iter()
        .map(|&ts| SpinContext::new(ts))
        .collect::<Result<Vec<_>>>()?;
    let deviations: Vec<Result<f64>> = std::thread::scope(|scope| {
        let handles: Vec<_> = contexts
            .iter()
            .map(|ctx| scope.spawn(move || deviation_at(model, ctx, sigma, l_test)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("scan worker panicked")).collect()
    });
    let rows = contexts
        .iter()
        .zip(deviations)
        .map(|(ctx, d)| {
            Ok(ScanRow {
                spin: ctx.spin::<f64>(),
                deviation: d?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let slope = (rows.len() >= 2 && rows.iter().all(|r| r.deviation > 0.0)).then(|| {
        let xs: Vec<f64> = rows.iter().map(|r| r.spin.ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.deviation.ln()).collect();
        fit_slope(&xs, &ys)
    });
    Ok(ScanResult { rows, slope })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_unitary_scan_is_exact() {
        let r = classical_limit_scan(
            &ScanModel::LinearUnitary { field: [0.3, -0.2, 1.1] },
            &[6, 10, 20],
            OrderingParameter::SYMMETRIC,
            3,
        )
        .unwrap();
        assert!(r.rows.iter().all(|row| row.deviation == 0.0));
        assert_eq!(r.slope, None);
        assert!(r.csv().starts_with("S,deviation\n3.0000000000000000e0,0.0000000000000000e0\n"));
    }

    #[test]
    fn scan_validation() {
        let m = ScanModel::<f64>::Asymptotic;
        assert!(classical_limit_scan(&m, &[], OrderingParameter::SYMMETRIC, 1).is_err());
        assert!(classical_limit_scan(&m, &[10, 8], OrderingParameter::SYMMETRIC, 1).is_err());
        assert!(classical_limit_scan(&m, &[4, 8], OrderingParameter::SYMMETRIC, 3).is_err());
        assert!(classical_limit_scan(&m, &[5, 8], OrderingParameter::SYMMETRIC, 3).is_ok());
    }
}
