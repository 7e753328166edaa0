//! Run configuration: TOML in, validated `RunConfig` out.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use spinphase::dynamics::Method;
use spinphase::expr::PolynomialSpinExpression;
use spinphase::su2::SpinContext;
use spinphase::sw::OrderingParameter;

/// A config problem, located by line when the offending key is known.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self { line: Some(l), message } => write!(f, "config line {l}: {message}"),
            Self { line: None, message } => write!(f, "config: {message}"),
        }
    }
}

/// Locates spans in the source text.
struct Source<'a>(&'a str);

impl Source<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        self.0[..span.start.min(self.0.len())].matches('\n').count() + 1
    }

    fn err<T>(&self, span: Range<usize>, message: impl Into<String>) -> Result<T, ValidationError> {
        Err(ValidationError {
            line: Some(self.line(span)),
            message: message.into(),
        })
    }
}

fn missing<T>(key: &str) -> Result<T, ValidationError> {
    Err(ValidationError {
        line: None,
        message: format!("missing required key `{key}`"),
    })
}

// ---------------------------------------------------------------------------
// Raw file layout

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    twice_s: Option<Spanned<i64>>,
    sigma: Option<Spanned<f64>>,
    seed: Option<Spanned<i64>>,
    model: Option<RawModel>,
    bath: Option<Spanned<RawBath>>,
    initial: Option<Spanned<RawInitial>>,
    time: Option<RawTime>,
    outputs: Option<RawOutputs>,
    compare: Option<RawCompare>,
    scan: Option<Spanned<RawScan>>,
    symbol: Option<Spanned<RawSymbol>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    hamiltonian: Option<Spanned<String>>,
    quadratic: Option<RawQuadratic>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuadratic {
    d: Option<Spanned<[[f64; 3]; 3]>>,
    b: Option<Spanned<[f64; 3]>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBath {
    coupling: Option<Spanned<String>>,
    xi: Option<Spanned<[f64; 3]>>,
    gamma: Option<Spanned<f64>>,
    temperature: Option<Spanned<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    kind: Option<Spanned<String>>,
    theta: Option<Spanned<f64>>,
    phi: Option<Spanned<f64>>,
    path: Option<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    t_end: Option<Spanned<f64>>,
    dt: Option<Spanned<f64>>,
    method: Option<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutputs {
    dir: Option<String>,
    trajectory: Option<String>,
    grid: Option<String>,
    grid_resolution: Option<Spanned<i64>>,
    grid_times: Option<Spanned<Vec<f64>>>,
    comparison: Option<String>,
    scan: Option<String>,
    kernel: Option<String>,
    symbol: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCompare {
    tolerance: Option<Spanned<f64>>,
    phase_sigma: Option<Spanned<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScan {
    model: Option<Spanned<String>>,
    spins: Option<Spanned<Vec<i64>>>,
    l_test: Option<Spanned<i64>>,
    field: Option<Spanned<[f64; 3]>>,
    lambda: Option<Spanned<f64>>,
    xi: Option<Spanned<[f64; 3]>>,
    temperature: Option<Spanned<f64>>,
    expected_slope: Option<Spanned<f64>>,
    slope_tolerance: Option<Spanned<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSymbol {
    operator: Option<Spanned<String>>,
    random: Option<bool>,
}

// ---------------------------------------------------------------------------
// Resolved configuration

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Evolve,
    Compare,
    LimitScan,
    Kernel,
    Symbol,
}

impl Command {
    fn needs_spin(self) -> bool {
        !matches!(self, Command::LimitScan)
    }

    fn needs_dynamics(self) -> bool {
        matches!(self, Command::Evolve | Command::Compare)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadraticConfig {
    pub d: [[f64; 3]; 3],
    pub b: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelConfig {
    /// Hamiltonian as an expression; rendered from `quadratic` when given.
    pub hamiltonian: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadratic: Option<QuadraticConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BathConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<[f64; 3]>,
    pub gamma: f64,
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InitialConfig {
    Coherent { theta: f64, phi: f64 },
    Mixed,
    Random,
    Matrix { path: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeConfig {
    pub t_end: f64,
    /// Filled in from the generator norm when absent from the file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub method: String,
}

impl TimeConfig {
    pub fn method(&self) -> Method {
        self.method.parse().expect("validated")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputConfig {
    pub dir: String,
    pub trajectory: String,
    pub grid: String,
    pub grid_resolution: usize,
    pub grid_times: Vec<f64>,
    pub comparison: String,
    pub scan: String,
    pub kernel: String,
    pub symbol: String,
    pub sidecar: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareConfig {
    pub tolerance: f64,
    pub phase_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanConfig {
    pub model: String,
    /// Values of `2S`, ascending.
    pub spins: Vec<u32>,
    pub l_test: usize,
    pub field: [f64; 3],
    pub lambda: f64,
    pub xi: [f64; 3],
    pub temperature: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_slope: Option<f64>,
    pub slope_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operator: Option<String>,
    pub random: bool,
}

/// Fully resolved run, defaults applied. Serialized as the sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub twice_s: Option<u32>,
    pub sigma: f64,
    pub seed: u64,
    pub model: ModelConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bath: Option<BathConfig>,
    pub initial: InitialConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeConfig>,
    pub outputs: OutputConfig,
    pub compare: CompareConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbol: Option<SymbolConfig>,
}

impl RunConfig {
    pub fn context(&self) -> SpinContext {
        SpinContext::new(self.twice_s.expect("validated")).expect("validated")
    }

    pub fn ordering(&self) -> OrderingParameter {
        OrderingParameter::new(self.sigma).expect("validated")
    }

    pub fn hamiltonian(&self) -> PolynomialSpinExpression<f64> {
        PolynomialSpinExpression::parse(&self.model.hamiltonian).expect("validated")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plain data serializes")
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<String>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
}

const DEFAULT_TOLERANCE: f64 = 1e-8;
const DEFAULT_SLOPE_TOLERANCE: f64 = 0.2;
const MAX_GRID_RESOLUTION: i64 = 1024;
/// Largest spin dimension for the Hilbert-space oracle.
const MAX_ORACLE_DIM: usize = 64;

pub fn parse(src: &str, command: Command, overrides: &Overrides) -> Result<RunConfig, ValidationError> {
    let raw: RawConfig = toml::from_str(src).map_err(|e| ValidationError {
        line: e.span().map(|s| Source(src).line(s)),
        message: e.message().trim().to_string(),
    })?;
    resolve(raw, &Source(src), command, overrides)
}

fn finite(src: &Source, v: &Spanned<f64>, what: &str) -> Result<f64, ValidationError> {
    let x = *v.get_ref();
    if x.is_finite() {
        Ok(x)
    } else {
        src.err(v.span(), format!("{what} must be finite"))
    }
}

fn resolve(raw: RawConfig, src: &Source, command: Command, overrides: &Overrides) -> Result<RunConfig, ValidationError> {
    let twice_s = match &raw.twice_s {
        Some(v) => {
            let ts = *v.get_ref();
            if !(1..=4096).contains(&ts) {
                return src.err(v.span(), format!("twice_s must be in 1..=4096, got {ts}"));
            }
            Some(ts as u32)
        }
        None if command.needs_spin() => return missing("twice_s"),
        None => None,
    };
    let ctx = twice_s.map(|ts| SpinContext::new(ts).expect("checked range"));

    let sigma = match &raw.sigma {
        Some(v) => {
            let s = finite(src, v, "sigma")?;
            if s.abs() > 1.0 {
                return src.err(v.span(), format!("sigma must satisfy |sigma| ≤ 1, got {s}"));
            }
            s
        }
        None => 0.0,
    };

    let seed = match (overrides.seed, &raw.seed) {
        (Some(s), _) => s,
        (None, Some(v)) if *v.get_ref() < 0 => return src.err(v.span(), "seed must be non-negative"),
        (None, Some(v)) => *v.get_ref() as u64,
        (None, None) => 0,
    };

    let model = resolve_model(src, raw.model, ctx.as_ref())?;
    let bath = match raw.bath {
        Some(b) if command.needs_dynamics() => Some(resolve_bath(src, b, ctx.as_ref())?),
        _ => None,
    };
    let initial = resolve_initial(src, raw.initial)?;

    let time = if command.needs_dynamics() {
        let t = match raw.time {
            Some(t) => t,
            None => return missing("time.t_end"),
        };
        Some(resolve_time(src, t, ctx.as_ref().expect("spin required"))?)
    } else {
        None
    };

    let outputs = resolve_outputs(src, raw.outputs, overrides, twice_s, time.as_ref())?;

    let compare = {
        let (tolerance, phase_sigma) = match raw.compare {
            Some(c) => {
                let tol = match &c.tolerance {
                    Some(v) => {
                        let t = finite(src, v, "compare.tolerance")?;
                        if t <= 0.0 {
                            return src.err(v.span(), "compare.tolerance must be positive");
                        }
                        t
                    }
                    None => DEFAULT_TOLERANCE,
                };
                let ps = match &c.phase_sigma {
                    Some(v) => {
                        let s = finite(src, v, "compare.phase_sigma")?;
                        if s.abs() > 1.0 {
                            return src.err(v.span(), "compare.phase_sigma must satisfy |sigma| ≤ 1");
                        }
                        s
                    }
                    None => sigma,
                };
                (tol, ps)
            }
            None => (DEFAULT_TOLERANCE, sigma),
        };
        CompareConfig {
            tolerance: overrides.tolerance.unwrap_or(tolerance),
            phase_sigma,
        }
    };
    if let Some(t) = overrides.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(ValidationError {
                line: None,
                message: format!("--tolerance must be positive, got {t}"),
            });
        }
    }
    if command == Command::Compare {
        let n = ctx.as_ref().expect("spin required").hilbert_dim();
        if n > MAX_ORACLE_DIM {
            let span = raw.twice_s.as_ref().expect("present").span();
            return src.err(span, format!("compare needs 2S+1 ≤ {MAX_ORACLE_DIM}, got {n}"));
        }
    }

    let scan = match (command, raw.scan) {
        (Command::LimitScan, Some(s)) => Some(resolve_scan(src, s, overrides)?),
        (Command::LimitScan, None) => return missing("scan"),
        _ => None,
    };

    let symbol = match (command, raw.symbol) {
        (Command::Symbol, Some(s)) => {
            let span = s.span();
            let s = s.into_inner();
            let random = s.random.unwrap_or(false);
            match (&s.operator, random) {
                (Some(_), true) => return src.err(span, "give either symbol.operator or symbol.random, not both"),
                (None, false) => return src.err(span, "symbol needs `operator` or `random = true`"),
                _ => {}
            }
            let operator = match s.operator {
                Some(op) => {
                    let e = parse_expression(src, &op, "symbol.operator")?;
                    e.to_operator(ctx.as_ref().expect("spin required"))
                        .or_else(|err| src.err(op.span(), err.to_string()))?;
                    Some(op.into_inner())
                }
                None => None,
            };
            Some(SymbolConfig { operator, random })
        }
        (Command::Symbol, None) => return missing("symbol"),
        _ => None,
    };

    Ok(RunConfig {
        command,
        twice_s,
        sigma,
        seed,
        model,
        bath,
        initial,
        time,
        outputs,
        compare,
        scan,
        symbol,
    })
}

fn parse_expression(
    src: &Source,
    text: &Spanned<String>,
    key: &str,
) -> Result<PolynomialSpinExpression<f64>, ValidationError> {
    PolynomialSpinExpression::parse(text.get_ref()).or_else(|e| src.err(text.span(), format!("{key}: {e}")))
}

fn resolve_model(src: &Source, raw: Option<RawModel>, ctx: Option<&SpinContext>) -> Result<ModelConfig, ValidationError> {
    let Some(raw) = raw else {
        return Ok(ModelConfig {
            hamiltonian: "0".into(),
            quadratic: None,
        });
    };
    match (raw.hamiltonian, raw.quadratic) {
        (Some(_), Some(_)) => Err(ValidationError {
            line: None,
            message: "give either model.hamiltonian or model.quadratic, not both".into(),
        }),
        (Some(h), None) => {
            let e = parse_expression(src, &h, "model.hamiltonian")?;
            if let Some(ctx) = ctx {
                e.require_hermitian(ctx)
                    .or_else(|err| src.err(h.span(), format!("model.hamiltonian: {err}")))?;
            }
            Ok(ModelConfig {
                hamiltonian: h.into_inner(),
                quadratic: None,
            })
        }
        (None, Some(q)) => {
            let d = q.d.as_ref().map(|v| *v.get_ref()).unwrap_or([[0.0; 3]; 3]);
            let b = q.b.as_ref().map(|v| *v.get_ref()).unwrap_or([0.0; 3]);
            if d.iter().flatten().chain(b.iter()).any(|x| !x.is_finite()) {
                return Err(ValidationError {
                    line: None,
                    message: "model.quadratic entries must be finite".into(),
                });
            }
            if let Err(e) = spinphase::dynamics::QuadraticHamiltonian::new(d, b) {
                let span = q.d.as_ref().expect("non-zero D present").span();
                return src.err(span, format!("model.quadratic.d: {e}"));
            }
            Ok(ModelConfig {
                hamiltonian: render_quadratic(&d, &b),
                quadratic: Some(QuadraticConfig { d, b }),
            })
        }
        (None, None) => Ok(ModelConfig {
            hamiltonian: "0".into(),
            quadratic: None,
        }),
    }
}

/// `−Σ D_ij S_i S_j − Σ B_i S_i` in expression syntax.
fn render_quadratic(d: &[[f64; 3]; 3], b: &[f64; 3]) -> String {
    let mut terms = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            if d[i][j] != 0.0 {
                terms.push(format!("{:?}*S{}*S{}", -d[i][j], i + 1, j + 1));
            }
        }
    }
    for i in 0..3 {
        if b[i] != 0.0 {
            terms.push(format!("{:?}*S{}", -b[i], i + 1));
        }
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn resolve_bath(src: &Source, raw: Spanned<RawBath>, ctx: Option<&SpinContext>) -> Result<BathConfig, ValidationError> {
    let span = raw.span();
    let raw = raw.into_inner();
    let gamma = match &raw.gamma {
        Some(v) => {
            let g = finite(src, v, "bath.gamma")?;
            if g < 0.0 {
                return src.err(v.span(), format!("bath.gamma must be ≥ 0, got {g}"));
            }
            g
        }
        None => return src.err(span, "bath needs `gamma`"),
    };
    let temperature = match &raw.temperature {
        Some(v) => {
            let t = finite(src, v, "bath.temperature")?;
            if t <= 0.0 {
                return src.err(v.span(), format!("bath.temperature must be > 0, got {t}"));
            }
            t
        }
        None => return src.err(span, "bath needs `temperature`"),
    };
    match (raw.coupling, raw.xi) {
        (Some(_), Some(_)) | (None, None) => src.err(span, "bath needs exactly one of `coupling` or `xi`"),
        (Some(c), None) => {
            let e = parse_expression(src, &c, "bath.coupling")?;
            if let Some(ctx) = ctx {
                e.require_hermitian(ctx)
                    .or_else(|err| src.err(c.span(), format!("bath.coupling: {err}")))?;
            }
            Ok(BathConfig {
                coupling: Some(c.into_inner()),
                xi: None,
                gamma,
                temperature,
            })
        }
        (None, Some(xi)) => {
            if xi.get_ref().iter().any(|x| !x.is_finite()) {
                return src.err(xi.span(), "bath.xi entries must be finite");
            }
            Ok(BathConfig {
                coupling: None,
                xi: Some(*xi.get_ref()),
                gamma,
                temperature,
            })
        }
    }
}

fn resolve_initial(src: &Source, raw: Option<Spanned<RawInitial>>) -> Result<InitialConfig, ValidationError> {
    let Some(raw) = raw else {
        return Ok(InitialConfig::Coherent { theta: 0.0, phi: 0.0 });
    };
    let span = raw.span();
    let raw = raw.into_inner();
    let kind = raw.kind.as_ref().map(|k| k.get_ref().as_str()).unwrap_or("coherent");
    let angle = |v: &Option<Spanned<f64>>, what: &str| -> Result<f64, ValidationError> {
        v.as_ref().map(|v| finite(src, v, what)).transpose().map(|x| x.unwrap_or(0.0))
    };
    match kind {
        "coherent" => Ok(InitialConfig::Coherent {
            theta: angle(&raw.theta, "initial.theta")?,
            phi: angle(&raw.phi, "initial.phi")?,
        }),
        "mixed" => Ok(InitialConfig::Mixed),
        "random" => Ok(InitialConfig::Random),
        "matrix" => match raw.path {
            Some(p) => Ok(InitialConfig::Matrix { path: p.into_inner() }),
            None => src.err(span, "initial kind `matrix` needs `path`"),
        },
        other => {
            let kspan = raw.kind.as_ref().expect("non-default kind").span();
            src.err(
                kspan,
                format!("unknown initial kind `{other}` (expected coherent, mixed, random or matrix)"),
            )
        }
    }
}

fn resolve_time(src: &Source, raw: RawTime, ctx: &SpinContext) -> Result<TimeConfig, ValidationError> {
    let t_end = match &raw.t_end {
        Some(v) => {
            let t = finite(src, v, "time.t_end")?;
            if t < 0.0 {
                return src.err(v.span(), format!("time.t_end must be ≥ 0, got {t}"));
            }
            t
        }
        None => return missing("time.t_end"),
    };
    let dt = match &raw.dt {
        Some(v) => {
            let d = finite(src, v, "time.dt")?;
            if d <= 0.0 {
                return src.err(v.span(), format!("time.dt must be > 0, got {d}"));
            }
            Some(d)
        }
        None => None,
    };
    let method = match &raw.method {
        Some(m) => {
            let method: Method = m.get_ref().parse().or_else(|e: spinphase::Error| src.err(m.span(), e.to_string()))?;
            let dim = ctx.symbol_dim().max(ctx.hilbert_dim() * ctx.hilbert_dim());
            if method == Method::Expm && dim > 4096 {
                return src.err(m.span(), format!("expm needs state dimension ≤ 4096, this spin gives {dim}"));
            }
            method
        }
        None => Method::Rk4,
    };
    Ok(TimeConfig {
        t_end,
        dt,
        method: method.to_string(),
    })
}

fn resolve_outputs(
    src: &Source,
    raw: Option<RawOutputs>,
    overrides: &Overrides,
    twice_s: Option<u32>,
    time: Option<&TimeConfig>,
) -> Result<OutputConfig, ValidationError> {
    let default_resolution = twice_s.map(|t| (t as usize).max(16)).unwrap_or(16);
    let mut out = OutputConfig {
        dir: ".".into(),
        trajectory: "trajectory.csv".into(),
        grid: "grid.csv".into(),
        grid_resolution: default_resolution,
        grid_times: Vec::new(),
        comparison: "compare.csv".into(),
        scan: "limit_scan.csv".into(),
        kernel: "kernel.csv".into(),
        symbol: "symbol.csv".into(),
        sidecar: "resolved_config.toml".into(),
    };
    if let Some(raw) = raw {
        let set = |slot: &mut String, v: Option<String>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut out.dir, raw.dir);
        set(&mut out.trajectory, raw.trajectory);
        set(&mut out.grid, raw.grid);
        set(&mut out.comparison, raw.comparison);
        set(&mut out.scan, raw.scan);
        set(&mut out.kernel, raw.kernel);
        set(&mut out.symbol, raw.symbol);
        if let Some(r) = &raw.grid_resolution {
            let res = *r.get_ref();
            if !(1..=MAX_GRID_RESOLUTION).contains(&res) {
                return src.err(r.span(), format!("outputs.grid_resolution must be in 1..={MAX_GRID_RESOLUTION}"));
            }
            if let Some(ts) = twice_s {
                if (res as u32) < ts {
                    return src.err(r.span(), format!("outputs.grid_resolution must be ≥ 2S = {ts}"));
                }
            }
            out.grid_resolution = res as usize;
        }
        if let Some(g) = &raw.grid_times {
            let t_end = time.map(|t| t.t_end).unwrap_or(f64::INFINITY);
            if g.get_ref().iter().any(|&t| !(0.0..=t_end).contains(&t)) {
                return src.err(g.span(), "outputs.grid_times must lie in [0, t_end]");
            }
            out.grid_times = g.get_ref().clone();
        }
    }
    if let Some(dir) = &overrides.out {
        out.dir = dir.clone();
    }
    Ok(out)
}

fn resolve_scan(src: &Source, raw: Spanned<RawScan>, overrides: &Overrides) -> Result<ScanConfig, ValidationError> {
    let span = raw.span();
    let raw = raw.into_inner();
    let model = match &raw.model {
        Some(m) => match m.get_ref().as_str() {
            "linear" | "bilinear" | "asymptotic" => m.get_ref().clone(),
            other => {
                return src.err(
                    m.span(),
                    format!("unknown scan model `{other}` (expected linear, bilinear or asymptotic)"),
                )
            }
        },
        None => return src.err(span, "scan needs `model`"),
    };
    let spins = match &raw.spins {
        Some(v) => {
            let s = v.get_ref();
            if s.is_empty() {
                return src.err(v.span(), "scan.spins must not be empty");
            }
            if s.iter().any(|&x| !(1..=4096).contains(&x)) {
                return src.err(v.span(), "scan.spins holds values of 2S in 1..=4096");
            }
            if s.windows(2).any(|w| w[1] <= w[0]) {
                return src.err(v.span(), "scan.spins must be strictly ascending");
            }
            s.iter().map(|&x| x as u32).collect::<Vec<_>>()
        }
        None => return src.err(span, "scan needs `spins`"),
    };
    let l_test = match &raw.l_test {
        Some(v) => {
            let l = *v.get_ref();
            if l < 0 || l + 2 > spins[0] as i64 {
                return src.err(
                    v.span(),
                    format!("scan.l_test must be in 0..={} for the smallest spin", spins[0] as i64 - 2),
                );
            }
            l as usize
        }
        None => 3.min(spins[0].saturating_sub(2) as usize),
    };
    if spins[0] < 2 && raw.l_test.is_none() {
        return src.err(span, "smallest scan spin needs 2S ≥ 2");
    }
    let vec3 = |v: &Option<Spanned<[f64; 3]>>, default: [f64; 3], what: &str| -> Result<[f64; 3], ValidationError> {
        match v {
            Some(x) if x.get_ref().iter().all(|c| c.is_finite()) => Ok(*x.get_ref()),
            Some(x) => src.err(x.span(), format!("{what} entries must be finite")),
            None => Ok(default),
        }
    };
    let field = vec3(&raw.field, [0.0, 0.0, 1.0], "scan.field")?;
    let xi = vec3(&raw.xi, [1.0, 0.0, 0.0], "scan.xi")?;
    if xi.iter().all(|&c| c == 0.0) {
        let s = raw.xi.as_ref().expect("default is non-zero").span();
        return src.err(s, "scan.xi must be non-zero");
    }
    let lambda = match &raw.lambda {
        Some(v) => {
            let l = finite(src, v, "scan.lambda")?;
            if l < 0.0 {
                return src.err(v.span(), "scan.lambda must be ≥ 0");
            }
            l
        }
        None => 0.1,
    };
    let temperature = match &raw.temperature {
        Some(v) => {
            let t = finite(src, v, "scan.temperature")?;
            if t <= 0.0 {
                return src.err(v.span(), "scan.temperature must be > 0");
            }
            t
        }
        None => 1.0,
    };
    let expected_slope = raw.expected_slope.as_ref().map(|v| finite(src, v, "scan.expected_slope")).transpose()?;
    let slope_tolerance = match (&overrides.tolerance, &raw.slope_tolerance) {
        (Some(t), _) => *t,
        (None, Some(v)) => {
            let t = finite(src, v, "scan.slope_tolerance")?;
            if t <= 0.0 {
                return src.err(v.span(), "scan.slope_tolerance must be positive");
            }
            t
        }
        (None, None) => DEFAULT_SLOPE_TOLERANCE,
    };
    Ok(ScanConfig {
        model,
        spins,
        l_test,
        field,
        lambda,
        xi,
        temperature,
        expected_slope,
        slope_tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn evolve(src: &str) -> Result<RunConfig, ValidationError> {
        parse(src, Command::Evolve, &Overrides::default())
    }

    #[test]
    fn minimal_evolve_config_gets_defaults() {
        let c = evolve("twice_s = 2\n[time]\nt_end = 1.0\n").unwrap();
        assert_eq!(c.sigma, 0.0);
        assert_eq!(c.model.hamiltonian, "0");
        assert_eq!(c.initial, InitialConfig::Coherent { theta: 0.0, phi: 0.0 });
        assert_eq!(c.time.as_ref().unwrap().method, "rk4");
        assert_eq!(c.outputs.grid_resolution, 16);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = evolve("twice_s = 2\nsigma = 1.5\n[time]\nt_end = 1.0\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = evolve("twice_s = 2\n[time]\nt_end = 1.0\n[bath]\nxi = [1, 0, 0]\ngamma = -0.1\ntemperature = 1.0\n")
            .unwrap_err();
        assert_eq!(e.line, Some(6), "{e}");
        let e = evolve("twice_s = 2\n[time]\nt_end = 1.0\n[bath]\nxi = [1.0, 0.0, 0.0]\ngamma = 0.1\ntemperature = 0.0\n")
            .unwrap_err();
        assert_eq!(e.line, Some(7));
        let e = evolve("twice_s = 2\n[model]\nhamiltonian = \"S1 * * S2\"\n[time]\nt_end = 1\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        let e = evolve("twice_s = 2\n[time]\nt_end = = 1\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        let e = evolve("twice_s = 2\nbogus = 1\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        assert!(e.to_string().starts_with("config line 2:"));
    }

    #[test]
    fn non_hermitian_hamiltonian_is_rejected() {
        let e = evolve("twice_s = 2\n[model]\nhamiltonian = \"S1*S2\"\n[time]\nt_end = 1\n").unwrap_err();
        assert_eq!(e.line, Some(3));
    }

    #[test]
    fn overrides_win() {
        let o = Overrides {
            out: Some("elsewhere".into()),
            tolerance: Some(1e-3),
            seed: Some(9),
        };
        let c = parse(
            "twice_s = 2\nseed = 4\n[compare]\ntolerance = 1e-6\n[outputs]\ndir = \"here\"\n[time]\nt_end = 1\n",
            Command::Compare,
            &o,
        )
        .unwrap();
        assert_eq!((c.seed, c.compare.tolerance, c.outputs.dir.as_str()), (9, 1e-3, "elsewhere"));
    }

    #[test]
    fn scan_validation() {
        let scan = |body: &str| parse(&format!("[scan]\n{body}"), Command::LimitScan, &Overrides::default());
        assert!(scan("model = \"bilinear\"\nspins = [10, 20, 40, 80]\n").is_ok());
        assert_eq!(scan("model = \"bilinear\"\nspins = [10, 8]\n").unwrap_err().line, Some(3));
        assert_eq!(scan("model = \"bilinear\"\nspins = [4, 8]\nl_test = 3\n").unwrap_err().line, Some(4));
        assert_eq!(scan("model = \"quartic\"\nspins = [4]\n").unwrap_err().line, Some(2));
    }

    #[test]
    fn quadratic_model_is_rendered_as_expression() {
        let c = evolve("twice_s = 2\n[model.quadratic]\nd = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.5]]\nb = [0.0, 0.0, 1.0]\n[time]\nt_end = 1\n").unwrap();
        assert_eq!(c.model.hamiltonian, "-0.5*S3*S3 + -1.0*S3");
        assert!(PolynomialSpinExpression::<f64>::parse(&c.model.hamiltonian).is_ok());
        let e = evolve("twice_s = 2\n[model.quadratic]\nd = [[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.5]]\n[time]\nt_end = 1\n").unwrap_err();
        assert_eq!(e.line, Some(3));
    }

    #[test]
    fn sidecar_round_trips_through_toml() {
        let c = evolve("twice_s = 3\nsigma = -0.5\n[bath]\nxi = [0.0, 0.0, 1.0]\ngamma = 0.1\ntemperature = 2.0\n[time]\nt_end = 1\nmethod = \"expm\"\n").unwrap();
        let text = c.to_toml();
        let back: toml::Table = toml::from_str(&text).unwrap();
        assert_eq!(back["sigma"].as_float(), Some(-0.5));
        assert_eq!(back["command"].as_str(), Some("evolve"));
        assert_eq!(back["initial"]["kind"].as_str(), Some("coherent"));
    }
}
