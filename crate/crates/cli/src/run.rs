//! The five subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinphase::dynamics::{
    classical_limit_scan, coherent_state, integrate, integrate_density, qfp_generator, quadratic_generator,
    unitary_generator, BathSpec, Method, ObservableEvaluator, QuadraticHamiltonian, ScanModel,
};
use spinphase::expr::PolynomialSpinExpression;
use spinphase::sphere::{write_grid_csv, SphereGrid};
use spinphase::su2::{OperatorMatrix, SpinContext};
use spinphase::sw::{OrderingParameter, SwMap};
use spinphase::{BoppOps, Complex, Error, Operator, PhaseOperator};

use crate::config::{BathConfig, Command, InitialConfig, RunConfig};

/// How a run ended, mapped onto the exit status.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Tolerance(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Tolerance(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Tolerance(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numerical(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

const DENSITY_TOL: f64 = 1e-10;

struct Output {
    dir: PathBuf,
}

impl Output {
    fn new(dir: &str) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::Numerical(format!("cannot create output directory {dir}: {e}")))?;
        Ok(Self { dir: PathBuf::from(dir) })
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf, Failure> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| Failure::Numerical(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

pub fn run(mut cfg: RunConfig, config_dir: &Path) -> Outcome {
    match cfg.command {
        Command::Evolve | Command::Compare => {
            // everything that can be rejected is checked before integrating
            let ctx = cfg.context();
            let rho0 = initial_density(&cfg, &ctx, config_dir)?;
            let h = cfg.hamiltonian();
            let bath = bath_spec(cfg.bath.as_ref())?;
            let ops = BoppOps::new(&ctx, phase_sigma(&cfg));
            let g = generator(&cfg, &ops, &h, bath.as_ref())?;
            let time = cfg.time.as_mut().expect("validated");
            if time.dt.is_none() {
                time.dt = Some(default_dt(&g, time.t_end, time.method()));
            }
            let out = Output::new(&cfg.outputs.dir)?;
            out.write(&cfg.outputs.sidecar, &cfg.to_toml())?;
            if cfg.command == Command::Evolve {
                evolve(&cfg, &ctx, &g, &rho0, bath.as_ref(), &out)
            } else {
                compare(&cfg, &ctx, &g, &h, &rho0, bath.as_ref(), &out)
            }
        }
        Command::LimitScan => {
            let out = Output::new(&cfg.outputs.dir)?;
            out.write(&cfg.outputs.sidecar, &cfg.to_toml())?;
            limit_scan(&cfg, &out)
        }
        Command::Kernel => {
            let out = Output::new(&cfg.outputs.dir)?;
            out.write(&cfg.outputs.sidecar, &cfg.to_toml())?;
            kernel(&cfg, &out)
        }
        Command::Symbol => {
            let ctx = cfg.context();
            let op = symbol_operator(&cfg, &ctx)?;
            let out = Output::new(&cfg.outputs.dir)?;
            out.write(&cfg.outputs.sidecar, &cfg.to_toml())?;
            symbol(&cfg, &ctx, &op, &out)
        }
    }
}

/// Ordering used for the phase-space side of a run.
fn phase_sigma(cfg: &RunConfig) -> OrderingParameter {
    match cfg.command {
        Command::Compare => OrderingParameter::new(cfg.compare.phase_sigma).expect("validated"),
        _ => cfg.ordering(),
    }
}

fn bath_spec(cfg: Option<&BathConfig>) -> Result<Option<BathSpec<f64>>, Failure> {
    let Some(b) = cfg else { return Ok(None) };
    let spec = match (&b.coupling, b.xi) {
        (Some(c), _) => BathSpec::new(PolynomialSpinExpression::parse(c)?, b.gamma, b.temperature),
        (None, Some(xi)) => BathSpec::bilinear(xi, b.gamma, b.temperature),
        (None, None) => unreachable!("validated"),
    };
    spec.map(Some).map_err(|e| Failure::Validation(format!("bath: {e}")))
}

fn generator(
    cfg: &RunConfig,
    ops: &BoppOps,
    h: &PolynomialSpinExpression<f64>,
    bath: Option<&BathSpec<f64>>,
) -> Result<PhaseOperator, Failure> {
    let g = match (bath, &cfg.model.quadratic) {
        (Some(bath), _) => qfp_generator(ops, h, bath),
        (None, Some(q)) => Ok(quadratic_generator(ops, &QuadraticHamiltonian::new(q.d, q.b)?)),
        (None, None) => unitary_generator(ops, h),
    };
    g.map_err(|e| Failure::Validation(format!("model: {e}")))
}

/// Step giving `‖G‖∞ dt ≤ 0.01`, and at least 100 steps over the run.
fn default_dt(g: &PhaseOperator, t_end: f64, method: Method) -> f64 {
    let span = if t_end > 0.0 { t_end } else { 1.0 };
    if method == Method::Expm {
        return span / 100.0;
    }
    let sparse = g.sparse();
    let norm = (0..sparse.nrows())
        .map(|i| sparse.row(i).iter().map(|(_, z)| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let dt = span / 100.0;
    if norm > 0.0 {
        dt.min(0.01 / norm)
    } else {
        dt
    }
}

fn initial_density(cfg: &RunConfig, ctx: &SpinContext, config_dir: &Path) -> Result<Operator, Failure> {
    let n = ctx.hilbert_dim();
    match &cfg.initial {
        InitialConfig::Coherent { theta, phi } => Ok(coherent_state(ctx, *theta, *phi)),
        InitialConfig::Mixed => Ok(OperatorMatrix::identity(n).scale(Complex::new(1.0 / n as f64, 0.0))),
        InitialConfig::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let a = DMatrix::from_fn(n, n, |_, _| {
                Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let p = &a * a.adjoint();
            let tr = p.trace();
            Ok(OperatorMatrix::from_matrix(p / tr)?)
        }
        InitialConfig::Matrix { path } => {
            let path = config_dir.join(path);
            let text = fs::read_to_string(&path)
                .map_err(|e| Failure::Validation(format!("initial.path {}: {e}", path.display())))?;
            read_density(&text, n).map_err(|m| Failure::Validation(format!("{}: {m}", path.display())))
        }
    }
}

/// Parses `n` rows of `re im` pairs and checks that the result is a
/// density matrix.
fn read_density(text: &str, n: usize) -> Result<Operator, String> {
    let rows: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    if rows.len() != n {
        return Err(format!("expected {n} rows for this spin, found {}", rows.len()));
    }
    let mut m = DMatrix::zeros(n, n);
    for (r, (line, content)) in rows.iter().enumerate() {
        let nums: Vec<f64> = content
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|_| format!("line {line}: `{s}` is not a number")))
            .collect::<Result<_, _>>()?;
        if nums.len() != 2 * n {
            return Err(format!("line {line}: expected {} numbers (re im pairs), found {}", 2 * n, nums.len()));
        }
        if nums.iter().any(|x| !x.is_finite()) {
            return Err(format!("line {line}: entries must be finite"));
        }
        for c in 0..n {
            m[(r, c)] = Complex::new(nums[2 * c], nums[2 * c + 1]);
        }
    }
    let rho = OperatorMatrix::from_matrix(m).map_err(|e| e.to_string())?;
    let herm = rho.hermiticity_deviation();
    if herm > DENSITY_TOL {
        return Err(format!("matrix is not Hermitian (deviation {herm:e})"));
    }
    let tr = rho.trace();
    if (tr - Complex::new(1.0, 0.0)).norm() > DENSITY_TOL {
        return Err(format!("trace must be 1, got {}", tr.re));
    }
    let eig = nalgebra::SymmetricEigen::new(rho.matrix().clone());
    let lowest = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if lowest < -DENSITY_TOL {
        return Err(format!("matrix is not positive semidefinite (eigenvalue {lowest:e})"));
    }
    Ok(rho)
}

fn write_snapshots(
    cfg: &RunConfig,
    times: &[f64],
    states: &[spinphase::Symbol],
    out: &Output,
) -> Outcome {
    if cfg.outputs.grid_times.is_empty() {
        return Ok(());
    }
    let grid = SphereGrid::<f64>::new(cfg.outputs.grid_resolution);
    let stem = cfg.outputs.grid.strip_suffix(".csv").unwrap_or(&cfg.outputs.grid);
    for (k, &t) in cfg.outputs.grid_times.iter().enumerate() {
        let i = times
            .iter()
            .position(|&s| s >= t - 1e-12)
            .unwrap_or(times.len() - 1);
        let values = grid.synthesize(&states[i])?;
        out.write(&format!("{stem}_{k}.csv"), &write_grid_csv(&grid, &values)?)?;
    }
    Ok(())
}

fn evolve(
    cfg: &RunConfig,
    ctx: &SpinContext,
    g: &PhaseOperator,
    rho0: &Operator,
    bath: Option<&BathSpec<f64>>,
    out: &Output,
) -> Outcome {
    let time = cfg.time.as_ref().expect("validated");
    let sigma = cfg.ordering();
    let map = SwMap::new(*ctx, sigma);
    let w0 = map.operator_to_symbol(rho0)?;
    let evaluator = ObservableEvaluator::new(ctx, sigma)?;
    let result = integrate(g, &w0, time.t_end, time.dt.expect("resolved"), time.method(), &evaluator)?;
    out.write(&cfg.outputs.trajectory, &result.trajectory_csv())?;
    write_snapshots(cfg, &result.times, &result.states, out)?;

    if let Some(b) = bath {
        eprintln!("validity ratio gamma/(S T) = {:e}", b.validity_ratio(ctx));
    }
    let trace_drift = result
        .observables
        .iter()
        .map(|o| (o.trace - 1.0).abs())
        .fold(0.0, f64::max);
    let first = result.observables[0];
    let last = *result.observables.last().expect("non-empty");
    eprintln!("steps = {}", result.times.len() - 1);
    eprintln!("max |trace - 1| = {trace_drift:e}");
    eprintln!("final purity = {:.16e}", last.purity);
    eprintln!("|<S>| drift = {:e}", (last.spin_length() - first.spin_length()).abs());
    if trace_drift > cfg.compare.tolerance {
        return Err(Failure::Tolerance(format!(
            "trace drift {trace_drift:e} exceeds tolerance {:e}",
            cfg.compare.tolerance
        )));
    }
    Ok(())
}

fn compare(
    cfg: &RunConfig,
    ctx: &SpinContext,
    g: &PhaseOperator,
    h: &PolynomialSpinExpression<f64>,
    rho0: &Operator,
    bath: Option<&BathSpec<f64>>,
    out: &Output,
) -> Outcome {
    let time = cfg.time.as_ref().expect("validated");
    let dt = time.dt.expect("resolved");
    let phase = SwMap::new(*ctx, phase_sigma(cfg));
    let reference = SwMap::new(*ctx, cfg.ordering());
    let evaluator = ObservableEvaluator::new(ctx, phase.sigma())?;
    let w = integrate(g, &phase.operator_to_symbol(rho0)?, time.t_end, dt, time.method(), &evaluator)?;

    let none = BathSpec::bilinear([0.0, 0.0, 1.0], 0.0, 1.0)?;
    let h_op = h.to_operator(ctx)?;
    let rho = integrate_density(&h_op, bath.unwrap_or(&none), rho0, time.t_end, dt, time.method())?;

    let mut csv = String::from("t,deviation\n");
    let mut worst = 0.0f64;
    for ((t, wt), rt) in w.times.iter().zip(&w.states).zip(&rho.states) {
        let d = wt.max_abs_diff(&reference.operator_to_symbol(rt)?);
        worst = worst.max(d);
        csv.push_str(&format!("{t:.16e},{d:.16e}\n"));
    }
    out.write(&cfg.outputs.comparison, &csv)?;
    println!("max deviation = {worst:.6e}");
    if worst > cfg.compare.tolerance {
        return Err(Failure::Tolerance(format!(
            "max deviation {worst:e} exceeds tolerance {:e}",
            cfg.compare.tolerance
        )));
    }
    Ok(())
}

fn limit_scan(cfg: &RunConfig, out: &Output) -> Outcome {
    let s = cfg.scan.as_ref().expect("validated");
    let model = match s.model.as_str() {
        "linear" => ScanModel::LinearUnitary { field: s.field },
        "bilinear" => ScanModel::Bilinear {
            field: s.field,
            lambda: s.lambda,
            xi: s.xi,
            temperature: s.temperature,
        },
        _ => ScanModel::Asymptotic,
    };
    let result = classical_limit_scan(&model, &s.spins, cfg.ordering(), s.l_test)
        .map_err(|e| match e {
            Error::Domain(m) => Failure::Validation(m),
            other => other.into(),
        })?;
    out.write(&cfg.outputs.scan, &result.csv())?;
    match result.slope {
        Some(slope) => println!("slope = {slope:.6}"),
        None => println!("slope = undefined (a deviation is zero or fewer than two spins)"),
    }
    if let Some(expected) = s.expected_slope {
        let ok = result.slope.is_some_and(|x| (x - expected).abs() <= s.slope_tolerance);
        if !ok {
            return Err(Failure::Tolerance(format!(
                "slope outside {expected} ± {}",
                s.slope_tolerance
            )));
        }
    }
    Ok(())
}

fn kernel(cfg: &RunConfig, out: &Output) -> Outcome {
    let ctx = cfg.context();
    let map = SwMap::<f64>::new(ctx, cfg.ordering());
    let grid = SphereGrid::<f64>::new(cfg.outputs.grid_resolution);
    let n = ctx.hilbert_dim();
    let mut csv = String::from("theta,phi,row,col,value_re,value_im\n");
    let mut worst_trace = 0.0f64;
    for (theta, phi) in grid.nodes() {
        let k = map.kernel_eval(theta, phi)?;
        worst_trace = worst_trace.max((k.trace() - Complex::new(1.0, 0.0)).norm());
        for r in 0..n {
            for c in 0..n {
                let z = k.get(r, c);
                csv.push_str(&format!("{theta:.16e},{phi:.16e},{r},{c},{:.16e},{:.16e}\n", z.re, z.im));
            }
        }
    }
    out.write(&cfg.outputs.kernel, &csv)?;
    eprintln!("max |Tr kernel - 1| = {worst_trace:e}");
    if worst_trace > cfg.compare.tolerance {
        return Err(Failure::Tolerance(format!(
            "kernel trace deviation {worst_trace:e} exceeds tolerance {:e}",
            cfg.compare.tolerance
        )));
    }
    Ok(())
}

fn symbol_operator(cfg: &RunConfig, ctx: &SpinContext) -> Result<Operator, Failure> {
    let s = cfg.symbol.as_ref().expect("validated");
    match &s.operator {
        Some(text) => Ok(PolynomialSpinExpression::parse(text)?.to_operator(ctx)?),
        None => {
            let n = ctx.hilbert_dim();
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let a = DMatrix::from_fn(n, n, |_, _| {
                Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            Ok(OperatorMatrix::from_matrix((&a + a.adjoint()) * Complex::new(0.5, 0.0))?)
        }
    }
}

fn symbol(cfg: &RunConfig, ctx: &SpinContext, op: &Operator, out: &Output) -> Outcome {
    let map = SwMap::new(*ctx, cfg.ordering());
    let c = map.operator_to_symbol(op)?;
    let grid = SphereGrid::<f64>::new(cfg.outputs.grid_resolution);
    let values = grid.synthesize(&c)?;
    out.write(&cfg.outputs.symbol, &write_grid_csv(&grid, &values)?)?;
    eprintln!("reality deviation = {:e}", c.reality_deviation());
    Ok(())
}
