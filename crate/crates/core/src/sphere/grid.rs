use std::fmt::Write as _;

use crate::error::{domain, Error, Result};
use crate::scalar::{int, lit, to_f64, Complex, Real};
use crate::su2::SpinContext;

use super::{coefficient_count, legendre_table, lm_index, SymbolCoefficients};

/// Gauss–Legendre nodes and weights on `[−1, 1]`, nodes ascending.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (
        nodes.into_iter().map(lit).collect(),
        weights.into_iter().map(lit).collect(),
    )
}

/// Product grid: Gauss–Legendre in `cos θ`, uniform in `φ`. Values are laid
/// out θ-major with `θ` ascending.
#[derive(Debug, Clone)]
pub struct SphereGrid<T: Real> {
    band_limit: usize,
    theta: Vec<T>,
    cos_theta: Vec<T>,
    weights: Vec<T>,
    phi: Vec<T>,
    measure: T,
    legendre: Vec<Vec<T>>,
}

impl<T: Real> SphereGrid<T> {
    /// Minimal exact grid for band limit `L`: `L+1` nodes in θ and `2L+2`
    /// in φ. The measure constant defaults to 1 (plain solid angle).
    pub fn new(band_limit: usize) -> Self {
        let (mut x, mut w) = gauss_legendre::<T>(band_limit + 1);
        // cos θ descending gives θ ascending
        x.reverse();
        w.reverse();
        let n_phi = 2 * band_limit + 2;
        let two_pi = lit::<T>(2.0) * T::pi();
        let phi = (0..n_phi)
            .map(|j| two_pi * int::<T>(j as i64) / int::<T>(n_phi as i64))
            .collect();
        let legendre = x.iter().map(|&c| legendre_table(band_limit, c)).collect();
        Self {
            band_limit,
            theta: x.iter().map(|c: &T| c.acos()).collect(),
            cos_theta: x,
            weights: w,
            phi,
            measure: T::one(),
            legendre,
        }
    }

    /// Attaches the measure `(2S+1)/(4π)` used for phase-space integrals.
    pub fn for_spin(band_limit: usize, ctx: SpinContext) -> Self {
        let mu = int::<T>(ctx.hilbert_dim() as i64) / (lit::<T>(4.0) * T::pi());
        Self::new(band_limit).with_measure(mu)
    }

    pub fn with_measure(mut self, measure: T) -> Self {
        self.measure = measure;
        self
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn measure(&self) -> T {
        self.measure
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn cos_theta(&self) -> &[T] {
        &self.cos_theta
    }

    pub fn phi(&self) -> &[T] {
        &self.phi
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phi.len()
    }

    pub fn len(&self) -> usize {
        self.n_theta() * self.n_phi()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(θ, φ)` of flat node index `k`.
    pub fn node(&self, k: usize) -> (T, T) {
        (self.theta[k / self.n_phi()], self.phi[k % self.n_phi()])
    }

    pub fn nodes(&self) -> impl Iterator<Item = (T, T)> + '_ {
        (0..self.len()).map(|k| self.node(k))
    }

    /// Evaluates a coefficient vector at every node.
    pub fn synthesize(&self, c: &SymbolCoefficients<T>) -> Result<Vec<Complex<T>>> {
        if c.band_limit() > self.band_limit {
            return Err(Error::BandLimit {
                found: c.band_limit(),
                limit: self.band_limit,
            });
        }
        let lc = c.band_limit() as i64;
        let n_phi = self.n_phi();
        let mut out = Vec::with_capacity(self.len());
        let phases = self.phase_table(lc);
        for p in &self.legendre {
            // g_m(θ) = Σ_l c_lm P̄_lm(cos θ)
            let g: Vec<Complex<T>> = (-lc..=lc)
                .map(|m| {
                    (m.unsigned_abs() as usize..=c.band_limit()).fold(
                        Complex::new(T::zero(), T::zero()),
                        |acc, l| acc + c.get(l, m) * p[lm_index(l, m)],
                    )
                })
                .collect();
            for j in 0..n_phi {
                let v = g
                    .iter()
                    .enumerate()
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (k, gm)| {
                        acc + *gm * phases[k][j]
                    });
                out.push(v);
            }
        }
        Ok(out)
    }

    fn phase_table(&self, band: i64) -> Vec<Vec<Complex<T>>> {
        (-band..=band)
            .map(|m| {
                self.phi
                    .iter()
                    .map(|&p| {
                        let a = int::<T>(m) * p;
                        Complex::new(a.cos(), a.sin())
                    })
                    .collect()
            })
            .collect()
    }

    fn check_len(&self, values: &[Complex<T>]) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: values.len(),
            });
        }
        Ok(())
    }

    /// Projects grid values onto harmonics up to `band_limit` (which must
    /// not exceed the grid's own band limit).
    pub fn analyze_to(&self, values: &[Complex<T>], band_limit: usize) -> Result<SymbolCoefficients<T>> {
        self.check_len(values)?;
        if band_limit > self.band_limit {
            return domain(format!(
                "analysis band limit {band_limit} exceeds grid band limit {}",
                self.band_limit
            ));
        }
        let n_phi = self.n_phi();
        let band = band_limit as i64;
        let phases = self.phase_table(band);
        let dphi = lit::<T>(2.0) * T::pi() / int::<T>(n_phi as i64);
        let mut out = vec![Complex::new(T::zero(), T::zero()); coefficient_count(band_limit)];
        for (i, p) in self.legendre.iter().enumerate() {
            let row = &values[i * n_phi..(i + 1) * n_phi];
            for m in -band..=band {
                let ph = &phases[(m + band) as usize];
                let fm = row
                    .iter()
                    .zip(ph)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (v, e)| acc + *v * e.conj())
                    * (dphi * self.weights[i]);
                for l in m.unsigned_abs() as usize..=band_limit {
                    out[lm_index(l, m)] += fm * p[lm_index(l, m)];
                }
            }
        }
        SymbolCoefficients::from_vec(band_limit, out)
    }

    pub fn analyze(&self, values: &[Complex<T>]) -> Result<SymbolCoefficients<T>> {
        self.analyze_to(values, self.band_limit)
    }

    /// `μ₀ Σ_ij w_i Δφ f(θ_i, φ_j)`.
    pub fn integrate(&self, values: &[Complex<T>]) -> Result<Complex<T>> {
        self.check_len(values)?;
        let n_phi = self.n_phi();
        let dphi = lit::<T>(2.0) * T::pi() / int::<T>(n_phi as i64);
        let mut total = Complex::new(T::zero(), T::zero());
        for (i, w) in self.weights.iter().enumerate() {
            let row = values[i * n_phi..(i + 1) * n_phi]
                .iter()
                .fold(Complex::new(T::zero(), T::zero()), |acc, v| acc + *v);
            total += row * (*w * dphi);
        }
        Ok(total * self.measure)
    }
}

/// Renders grid values as `theta,phi,value_re,value_im` with 17 significant
/// digits, θ-major.
pub fn write_grid_csv<T: Real>(grid: &SphereGrid<T>, values: &[Complex<T>]) -> Result<String> {
    grid.check_len(values)?;
    let mut s = String::from("theta,phi,value_re,value_im\n");
    for (k, v) in values.iter().enumerate() {
        let (t, p) = grid.node(k);
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            to_f64(t),
            to_f64(p),
            to_f64(v.re),
            to_f64(v.im)
        );
    }
    Ok(s)
}
