//! Classical spin dynamics on the sphere: Liouville and Fokker–Planck.

use std::collections::BTreeMap;

use crate::error::{domain, Result};
use crate::scalar::{Complex, Real};
use crate::sphere::{PhaseSpaceOperator, SphereGrid, SphereOperators, SymbolCoefficients};

/// Polynomial in the unit-vector components `m1, m2, m3`.
#[derive(Debug, Clone, PartialEq)]
pub struct MPolynomial<T: Real> {
    terms: BTreeMap<[u32; 3], T>,
}

impl<T: Real> Default for MPolynomial<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Real> MPolynomial<T> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::zero().with_term([0, 0, 0], c)
    }

    /// `m_i`, `i ∈ {0, 1, 2}`.
    pub fn coordinate(i: usize) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        Self::zero().with_term(e, T::one())
    }

    /// Adds `c · m1^a m2^b m3^c`.
    pub fn with_term(mut self, exponents: [u32; 3], c: T) -> Self {
        let slot = self.terms.entry(exponents).or_insert_with(T::zero);
        *slot += c;
        if *slot == T::zero() {
            self.terms.remove(&exponents);
        }
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = ([u32; 3], T)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|e| e.iter().sum::<u32>() as usize).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        other.terms().fold(self.clone(), |acc, (e, c)| acc.with_term(e, c))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-T::one()))
    }

    pub fn scale(&self, factor: T) -> Self {
        self.terms().fold(Self::zero(), |acc, (e, c)| acc.with_term(e, c * factor))
    }

    /// Divides every coefficient, rather than multiplying by the reciprocal.
    pub fn div(&self, divisor: T) -> Self {
        self.terms().fold(Self::zero(), |acc, (e, c)| acc.with_term(e, c / divisor))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                out = out.with_term([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]], ca * cb);
            }
        }
        out
    }

    /// `∂/∂m_i`, treating the components as independent.
    pub fn derivative(&self, i: usize) -> Self {
        self.terms().filter(|(e, _)| e[i] > 0).fold(Self::zero(), |acc, (mut e, c)| {
            let k = e[i];
            e[i] -= 1;
            acc.with_term(e, c * T::from_u32(k).expect("small exponent"))
        })
    }

    pub fn gradient(&self) -> [Self; 3] {
        std::array::from_fn(|i| self.derivative(i))
    }

    pub fn eval(&self, m: [T; 3]) -> T {
        self.terms().fold(T::zero(), |acc, (e, c)| {
            acc + c * m[0].powi(e[0] as i32) * m[1].powi(e[1] as i32) * m[2].powi(e[2] as i32)
        })
    }

    /// Multiplication by this polynomial, projected onto `l ≤ band`.
    ///
    /// Products of the band-limited `M_i` are exact on the columns that
    /// matter once the working band exceeds `band` by the degree.
    pub fn multiplication_operator(&self, band: usize) -> PhaseSpaceOperator<T> {
        let work = band + self.degree() + 1;
        let sphere = SphereOperators::<T>::new(work);
        self.multiplication_with(&sphere).with_band_limit(band)
    }

    fn multiplication_with(&self, sphere: &SphereOperators<T>) -> PhaseSpaceOperator<T> {
        let band = sphere.band_limit;
        let mut total = PhaseSpaceOperator::zeros(band);
        for (e, c) in self.terms() {
            let mut word = PhaseSpaceOperator::identity(band);
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    word = sphere.position.m[i].compose(&word);
                }
            }
            total = total.add(&word.scale_real(c));
        }
        total
    }
}

/// Classical spin of length `S` with energy `H(m)`, damping tensor `Λ̃` and
/// bath temperature `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalModel<T: Real> {
    pub spin: T,
    pub hamiltonian: MPolynomial<T>,
    pub lambda: [[T; 3]; 3],
    pub temperature: T,
}

impl<T: Real> ClassicalModel<T> {
    /// `B_eff = −∂H/∂m`.
    pub fn effective_field(&self) -> [MPolynomial<T>; 3] {
        self.hamiltonian.gradient().map(|g| g.scale(-T::one()))
    }

    /// `Λ̃ = S γ ξ ξᵀ`.
    pub fn bilinear_lambda(spin: T, gamma: T, xi: [T; 3]) -> [[T; 3]; 3] {
        std::array::from_fn(|j| std::array::from_fn(|k| spin * gamma * xi[j] * xi[k]))
    }
}

#[derive(Debug, Clone)]
pub struct ClassicalGenerators<T: Real> {
    pub liouville: PhaseSpaceOperator<T>,
    pub fokker_planck: PhaseSpaceOperator<T>,
}

/// `−(1/S) ∂_m · {m × B_eff − m × Λ̃ [m × (B_eff − T ∂_m)]}` and its
/// `Λ̃ = 0` part, written with `L = −i m × ∂_m` as
/// `(i/S) L·B_eff − (i/S) L·Λ̃[m × B_eff − iT L]`.
pub fn classical_generators<T: Real>(model: &ClassicalModel<T>, band: usize) -> Result<ClassicalGenerators<T>> {
    if !(model.spin > T::zero()) {
        return domain("spin length must be positive");
    }
    if !(model.temperature > T::zero()) {
        return domain("temperature must be positive");
    }
    let s = model.spin;
    let i = Complex::new(T::zero(), T::one());
    let field = model.effective_field();
    let sphere = SphereOperators::<T>::new(band);
    let l = &sphere.angular.l;

    let mut liouville = PhaseSpaceOperator::zeros(band);
    for j in 0..3 {
        let mult = field[j].div(s).multiplication_operator(band);
        liouville = liouville.add(&l[j].compose(&mult));
    }
    let liouville = liouville.scale(i);

    let mx_b: [MPolynomial<T>; 3] = std::array::from_fn(|a| {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        MPolynomial::coordinate(b)
            .mul(&field[c])
            .sub(&MPolynomial::coordinate(c).mul(&field[b]))
    });
    let inner: Vec<PhaseSpaceOperator<T>> = (0..3)
        .map(|b| {
            mx_b[b]
                .multiplication_operator(band)
                .sub(&l[b].scale(i * model.temperature))
        })
        .collect();
    let mut damping = PhaseSpaceOperator::zeros(band);
    for a in 0..3 {
        let mut row = PhaseSpaceOperator::zeros(band);
        for b in 0..3 {
            let lam = model.lambda[a][b];
            if lam != T::zero() {
                row = row.add(&inner[b].scale_real(lam / s));
            }
        }
        damping = damping.add(&l[a].compose(&row));
    }
    let fokker_planck = liouville.sub(&damping.scale(i));
    Ok(ClassicalGenerators {
        liouville,
        fokker_planck,
    })
}

/// Band-limited coefficients of `exp(−H(m)/T)`, by quadrature on a grid
/// well above `band`.
pub fn boltzmann_coefficients<T: Real>(
    hamiltonian: &MPolynomial<T>,
    temperature: T,
    band: usize,
) -> Result<SymbolCoefficients<T>> {
    if !(temperature > T::zero()) {
        return domain("temperature must be positive");
    }
    let grid = SphereGrid::<T>::new(2 * band + 16);
    let values: Vec<Complex<T>> = grid
        .nodes()
        .map(|(theta, phi)| {
            let m = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            Complex::new((-hamiltonian.eval(m) / temperature).exp(), T::zero())
        })
        .collect();
    grid.analyze_to(&values, band)
}
