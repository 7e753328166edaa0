use crate::error::{domain, Result};
use crate::scalar::{int, lit, Complex, Real};

use super::{coefficient_count, lm_index};

/// Orthonormal associated Legendre functions `P̄_lm(cos θ)` for all
/// `0 ≤ m ≤ l ≤ L`, with the Condon–Shortley phase folded in, so that
/// `Y_lm(θ, φ) = P̄_lm(cos θ) e^{imφ}`. Entries for `m < 0` are filled with
/// `(−1)^m P̄_{l,|m|}`, making the same identity hold for negative `m`.
///
/// Stable three-term recurrence in `l` at fixed `m`.
pub fn legendre_table<T: Real>(band_limit: usize, cos_theta: T) -> Vec<T> {
    let x = cos_theta;
    let sin_theta = (T::one() - x * x).max(T::zero()).sqrt();
    let mut p = vec![T::zero(); coefficient_count(band_limit)];
    let four_pi = lit::<T>(4.0) * T::pi();
    let mut pmm = T::one() / four_pi.sqrt();
    for m in 0..=band_limit {
        if m > 0 {
            let mf = int::<T>(m as i64);
            pmm = -((lit::<T>(2.0) * mf + T::one()) / (lit::<T>(2.0) * mf)).sqrt() * sin_theta * pmm;
        }
        p[lm_index(m, m as i64)] = pmm;
        if m == band_limit {
            break;
        }
        let mf = int::<T>(m as i64);
        let mut prev2 = pmm;
        let mut prev1 = (lit::<T>(2.0) * mf + lit(3.0)).sqrt() * x * pmm;
        p[lm_index(m + 1, m as i64)] = prev1;
        for l in (m + 2)..=band_limit {
            let lf = int::<T>(l as i64);
            let a = ((lit::<T>(4.0) * lf * lf - T::one()) / (lf * lf - mf * mf)).sqrt();
            let lm1 = lf - T::one();
            let b = ((lm1 * lm1 - mf * mf) / (lit::<T>(4.0) * lm1 * lm1 - T::one())).sqrt();
            let cur = a * (x * prev1 - b * prev2);
            p[lm_index(l, m as i64)] = cur;
            prev2 = prev1;
            prev1 = cur;
        }
    }
    for l in 1..=band_limit {
        for m in 1..=l {
            let v = p[lm_index(l, m as i64)];
            p[lm_index(l, -(m as i64))] = if m % 2 == 0 { v } else { -v };
        }
    }
    p
}

/// Condon–Shortley spherical harmonic `Y_lm(θ, φ)`.
pub fn ylm_eval<T: Real>(l: usize, m: i64, theta: T, phi: T) -> Result<Complex<T>> {
    if m.unsigned_abs() as usize > l {
        return domain(format!("|m| = {} exceeds l = {l}", m.abs()));
    }
    let table = legendre_table(l, theta.cos());
    let p = table[lm_index(l, m)];
    let angle = int::<T>(m) * phi;
    Ok(Complex::new(p * angle.cos(), p * angle.sin()))
}

/// Coefficients of the three-term relations
/// `cos θ Y_lm = α1 Y_{l+1,m} + α2 Y_{l−1,m}` and
/// `sin θ ∂θ Y_lm = β1 Y_{l+1,m} + β2 Y_{l−1,m}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaBeta<T> {
    pub alpha1: T,
    pub alpha2: T,
    pub beta1: T,
    pub beta2: T,
}

pub fn alpha_beta<T: Real>(l: usize, m: i64) -> AlphaBeta<T> {
    let lf = int::<T>(l as i64);
    let mf = int::<T>(m);
    let two = lit::<T>(2.0);
    let alpha1 = ((lf - mf + T::one()) * (lf + mf + T::one())
        / ((two * lf + T::one()) * (two * lf + lit(3.0))))
    .sqrt();
    // the radicand vanishes at |m| = l, which also covers l = 0
    let alpha2 = if l == 0 || m.unsigned_abs() as usize >= l {
        T::zero()
    } else {
        ((lf - mf) * (lf + mf) / ((two * lf - T::one()) * (two * lf + T::one()))).sqrt()
    };
    AlphaBeta {
        alpha1,
        alpha2,
        beta1: alpha1 * lf,
        beta2: -alpha2 * (lf + T::one()),
    }
}
