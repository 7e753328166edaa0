//! Time stepping for phase-space generators and for the master equation.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{domain, Error, Result};
use crate::scalar::{lit, to_f64, Complex, Real};
use crate::sphere::{lm_of_index, PhaseSpaceOperator, SymbolCoefficients};
use crate::su2::{spin_matrices, OperatorMatrix, SpinContext};
use crate::sw::{expectation, symbol_scales, OrderingParameter, SwMap};

use super::{master_rhs, master_superoperator, BathSpec};

/// Largest state dimension for which the dense exponential is formed.
const EXPM_MAX_DIM: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rk4,
    Expm,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Method::Rk4),
            "expm" => Ok(Method::Expm),
            other => domain(format!("unknown integration method '{other}' (expected rk4 or expm)")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Rk4 => "rk4",
            Method::Expm => "expm",
        })
    }
}

/// `⟨S1⟩, ⟨S2⟩, ⟨S3⟩`, `Tr ρ` and `Tr ρ²` at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables<T: Real> {
    pub s: [T; 3],
    pub trace: T,
    pub purity: T,
}

impl<T: Real> Observables<T> {
    /// `|⟨S⟩|`.
    pub fn spin_length(&self) -> T {
        (self.s[0] * self.s[0] + self.s[1] * self.s[1] + self.s[2] * self.s[2]).sqrt()
    }

    pub fn of_density(rho: &OperatorMatrix<T>, spins: &[OperatorMatrix<T>; 3]) -> Self {
        let m = rho.matrix();
        Self {
            s: std::array::from_fn(|i| (m * spins[i].matrix()).trace().re),
            trace: m.trace().re,
            purity: (m * m).trace().re,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionResult<S, T: Real> {
    pub times: Vec<T>,
    pub states: Vec<S>,
    pub observables: Vec<Observables<T>>,
}

impl<S, T: Real> EvolutionResult<S, T> {
    pub fn final_state(&self) -> &S {
        self.states.last().expect("at least the initial state")
    }

    /// `t,Sx,Sy,Sz,trace,purity` with 17 significant digits.
    pub fn trajectory_csv(&self) -> String {
        let mut out = String::from("t,Sx,Sy,Sz,trace,purity\n");
        for (t, o) in self.times.iter().zip(&self.observables) {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                to_f64(*t),
                to_f64(o.s[0]),
                to_f64(o.s[1]),
                to_f64(o.s[2]),
                to_f64(o.trace),
                to_f64(o.purity)
            );
        }
        out
    }
}

/// Observables of a symbol at ordering `σ`, paired with the dual symbols
/// of the spin components.
#[derive(Debug, Clone)]
pub struct ObservableEvaluator<T: Real> {
    ctx: SpinContext,
    spins: [SymbolCoefficients<T>; 3],
    identity: SymbolCoefficients<T>,
    dual_ratio: Vec<T>,
}

impl<T: Real> ObservableEvaluator<T> {
    pub fn new(ctx: &SpinContext, sigma: OrderingParameter) -> Result<Self> {
        let dual = SwMap::<T>::new(*ctx, sigma.dual());
        let sm = spin_matrices::<T>(ctx);
        let spins = [
            dual.operator_to_symbol(&sm.s1)?,
            dual.operator_to_symbol(&sm.s2)?,
            dual.operator_to_symbol(&sm.s3)?,
        ];
        let identity = dual.operator_to_symbol(&OperatorMatrix::identity(ctx.hilbert_dim()))?;
        let here = symbol_scales::<T>(ctx, sigma);
        let there = symbol_scales::<T>(ctx, sigma.dual());
        let dual_ratio = here.iter().zip(&there).map(|(a, b)| *b / *a).collect();
        Ok(Self {
            ctx: *ctx,
            spins,
            identity,
            dual_ratio,
        })
    }

    pub fn evaluate(&self, c: &SymbolCoefficients<T>) -> Result<Observables<T>> {
        let mut dual = c.clone();
        for (k, z) in dual.as_mut_slice().iter_mut().enumerate() {
            *z *= self.dual_ratio[lm_of_index(k).0];
        }
        Ok(Observables {
            s: [
                expectation(&self.ctx, &self.spins[0], c)?.re,
                expectation(&self.ctx, &self.spins[1], c)?.re,
                expectation(&self.ctx, &self.spins[2], c)?.re,
            ],
            trace: expectation(&self.ctx, &self.identity, c)?.re,
            purity: expectation(&self.ctx, &dual, c)?.re,
        })
    }
}

/// One classical Runge–Kutta step of `y' = f(y)`.
pub fn rk4_step<T: Real>(
    y: &[Complex<T>],
    dt: T,
    mut f: impl FnMut(&[Complex<T>]) -> Vec<Complex<T>>,
) -> Vec<Complex<T>> {
    let half = dt * lit(0.5);
    let axpy = |a: T, x: &[Complex<T>]| -> Vec<Complex<T>> { y.iter().zip(x).map(|(y, x)| *y + *x * a).collect() };
    let k1 = f(y);
    let k2 = f(&axpy(half, &k1));
    let k3 = f(&axpy(half, &k2));
    let k4 = f(&axpy(dt, &k3));
    let sixth = dt / lit(6.0);
    let two: T = lit(2.0);
    (0..y.len())
        .map(|i| y[i] + (k1[i] + (k2[i] + k3[i]) * two + k4[i]) * sixth)
        .collect()
}

/// Number of equal steps covering `[0, t_end]` with step at most `dt`.
fn step_plan<T: Real>(t_end: T, dt: T) -> Result<(usize, T)> {
    if !(dt > T::zero()) || !to_f64(dt).is_finite() {
        return domain("time step must be positive and finite");
    }
    if !(t_end >= T::zero()) || !to_f64(t_end).is_finite() {
        return domain("end time must be non-negative and finite");
    }
    let ratio = to_f64(t_end) / to_f64(dt);
    let n = if (ratio - ratio.round()).abs() < 1e-9 {
        ratio.round()
    } else {
        ratio.ceil()
    } as usize;
    if n == 0 {
        return Ok((0, T::zero()));
    }
    Ok((n, t_end / lit::<T>(n as f64)))
}

fn check_finite<T: Real>(v: &[Complex<T>], step: usize, time: T) -> Result<()> {
    if v.iter().all(|z| to_f64(z.re).is_finite() && to_f64(z.im).is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            step,
            time: to_f64(time),
        })
    }
}

fn exponential<T: Real>(g: &DMatrix<Complex<T>>, dt: T) -> Result<DMatrix<Complex<T>>> {
    if g.nrows() > EXPM_MAX_DIM {
        return domain(format!(
            "expm needs a state dimension ≤ {EXPM_MAX_DIM}, got {}",
            g.nrows()
        ));
    }
    Ok((g * Complex::new(dt, T::zero())).exp())
}

/// Evolves `∂_t W = G W` from `initial` to `t_end`.
pub fn integrate<T: Real>(
    g: &PhaseSpaceOperator<T>,
    initial: &SymbolCoefficients<T>,
    t_end: T,
    dt: T,
    method: Method,
    evaluator: &ObservableEvaluator<T>,
) -> Result<EvolutionResult<SymbolCoefficients<T>, T>> {
    if initial.band_limit() != g.band_limit() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: initial.len(),
        });
    }
    let band = g.band_limit();
    let (n, h) = step_plan(t_end, dt)?;
    let propagator = match method {
        Method::Expm => Some(exponential(&g.to_dense(), h)?),
        Method::Rk4 => None,
    };
    let mut times = vec![T::zero()];
    let mut states = vec![initial.clone()];
    let mut observables = vec![evaluator.evaluate(initial)?];
    let mut y = initial.as_slice().to_vec();
    for step in 1..=n {
        y = match &propagator {
            Some(e) => (e * DVector::from_column_slice(&y)).as_slice().to_vec(),
            None => rk4_step(&y, h, |x| g.sparse().apply(x)),
        };
        let t = h * lit::<T>(step as f64);
        check_finite(&y, step, t)?;
        let c = SymbolCoefficients::from_vec(band, y.clone())?;
        observables.push(evaluator.evaluate(&c)?);
        states.push(c);
        times.push(t);
    }
    Ok(EvolutionResult {
        times,
        states,
        observables,
    })
}

/// Evolves the master equation for `ρ` from `rho0` to `t_end`.
pub fn integrate_density<T: Real>(
    h: &OperatorMatrix<T>,
    bath: &BathSpec<T>,
    rho0: &OperatorMatrix<T>,
    t_end: T,
    dt: T,
    method: Method,
) -> Result<EvolutionResult<OperatorMatrix<T>, T>> {
    let dim = rho0.dim();
    h.expect_dim(dim)?;
    let ctx = SpinContext::new(dim as u32 - 1)?;
    let sm = spin_matrices::<T>(&ctx);
    let spins = [sm.s1, sm.s2, sm.s3];
    let (n, step_dt) = step_plan(t_end, dt)?;
    let propagator = match method {
        Method::Expm => Some(exponential(&master_superoperator(h, bath)?, step_dt)?),
        Method::Rk4 => None,
    };
    let mut times = vec![T::zero()];
    let mut states = vec![rho0.clone()];
    let mut observables = vec![Observables::of_density(rho0, &spins)];
    let mut rho = rho0.clone();
    for step in 1..=n {
        let t = step_dt * lit::<T>(step as f64);
        let next = match &propagator {
            Some(e) => e * DVector::from_column_slice(rho.matrix().as_slice()),
            None => {
                let mut failure = None;
                let y = rk4_step(rho.matrix().as_slice(), step_dt, |x| {
                    let r = OperatorMatrix::from_matrix(DMatrix::from_column_slice(dim, dim, x))
                        .and_then(|r| master_rhs(&r, h, bath));
                    match r {
                        Ok(r) => r.into_matrix().as_slice().to_vec(),
                        Err(e) => {
                            failure = Some(e);
                            vec![Complex::new(T::zero(), T::zero()); x.len()]
                        }
                    }
                });
                if let Some(e) = failure {
                    return Err(e);
                }
                DVector::from_vec(y)
            }
        };
        check_finite(next.as_slice(), step, t)?;
        rho = OperatorMatrix::from_matrix(DMatrix::from_column_slice(dim, dim, next.as_slice()))?;
        debug_assert!(
            to_f64(rho.hermiticity_deviation()) < 1e-8 * (1.0 + to_f64(rho.max_abs())),
            "master-equation step lost Hermiticity"
        );
        observables.push(Observables::of_density(&rho, &spins));
        states.push(rho.clone());
        times.push(t);
    }
    Ok(EvolutionResult {
        times,
        states,
        observables,
    })
}
