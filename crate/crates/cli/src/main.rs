use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use hankelc_core::distributions::{
    liouville_solve, multiplier_check, pair_delta, pair_delta_exact, pair_delta_transform, taylor_coeffs,
    Multiplier, MultiplierOptions,
};
use hankelc_core::hankel::{hankel_nd, GridFunction, GridSpec};
use hankelc_core::quadrature::{build_quadrature, truncation_radius, QuadratureRule, DEFAULT_PANELS, DEFAULT_POINTS, DEFAULT_TAIL};
use hankelc_core::rational;
use hankelc_core::seminorm::{seminorm_gamma, seminorm_lambda, seminorm_rho, SupOptions};
use hankelc_core::symbolic::{OperatorPoly, SymbolicHFunction};
use hankelc_core::verify::{run_suite, VerifyOptions};
use hankelc_core::{Error, MultiIndex, MuVector};

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_HYPOTHESIS: u8 = 4;

#[derive(Parser)]
#[command(name = "hankelc", version, about = "Hankel transforms, Bessel operators and Liouville kernels")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Common {
    /// Problem spec (JSON)
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Output grid per axis, lo:hi:count
    #[arg(long, global = true, default_value = "0.1:4:64")]
    grid: String,
    /// Polynomial degree (kernel), Taylor order (taylor), derivative order (multiplier)
    #[arg(long, global = true)]
    degree: Option<u32>,
    /// Quadrature as points:panels[:radius]
    #[arg(long, global = true)]
    quad: Option<String>,
    /// Tolerance override
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, env = "HANKELC_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// n-D Hankel transform of the spec's function onto the grid
    Transform,
    /// Polynomial kernel of L(P) with its certificate
    Kernel,
    /// Run a property suite: identities, roundtrip, taylor, seminorms, liouville
    Verify {
        suite: String,
        #[arg(long)]
        negative_controls: bool,
    },
    /// gamma, lambda or rho seminorm of the spec's function
    Seminorm,
    /// Taylor coefficients at the origin and remainder samples
    Taylor,
    /// (T^k delta_mu, phi), plus the transform-side value for decaying phi
    PairDelta,
    /// Growth exponents and bounds of T^k theta
    Multiplier,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, msg: msg.into() }
    }
}

/// Errors found while reading the spec are usage errors; during computation only
/// hypothesis and shape problems keep their own codes.
fn numeric(e: Error) -> Failure {
    let code = match e {
        Error::HypothesisFailed(_) => EXIT_HYPOTHESIS,
        Error::DimensionMismatch { .. } | Error::Parse(_) | Error::DecayRequired => EXIT_USAGE,
        _ => EXIT_NUMERIC,
    };
    Failure { code, msg: e.to_string() }
}

fn spec_error(e: impl std::fmt::Display) -> Failure {
    Failure::usage(format!("invalid spec: {e}"))
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum SeminormKind {
    #[default]
    Gamma,
    Lambda,
    Rho,
}

/// One JSON document per run; fields a command does not use are ignored by it
/// but still validated.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemSpec {
    mu: MuVector,
    #[serde(rename = "P", default)]
    p: Option<OperatorPoly>,
    /// A symbolic function; `mu` may be omitted and is then taken from the spec.
    #[serde(default)]
    function: Option<Value>,
    #[serde(default)]
    multiplier: Option<Multiplier>,
    #[serde(default)]
    k: Option<MultiIndex>,
    #[serde(default)]
    m: Option<u32>,
    #[serde(default)]
    seminorm: SeminormKind,
    #[serde(default)]
    order: Option<u32>,
}

impl ProblemSpec {
    fn load(path: Option<&PathBuf>) -> Result<Self, Failure> {
        let path = path.ok_or_else(|| Failure::usage("--spec FILE is required"))?;
        let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(spec_error)
    }

    fn function(&self) -> Result<SymbolicHFunction, Failure> {
        let mut v = self.function.clone().ok_or_else(|| Failure::usage("spec has no \"function\""))?;
        if let Value::Object(map) = &mut v {
            map.entry("mu").or_insert_with(|| serde_json::to_value(&self.mu).expect("mu serializes"));
        }
        let f: SymbolicHFunction = serde_json::from_value(v).map_err(spec_error)?;
        if f.mu != self.mu {
            return Err(Failure::usage("function mu differs from the spec mu"));
        }
        Ok(f)
    }

    fn operator(&self) -> Result<&OperatorPoly, Failure> {
        let p = self.p.as_ref().ok_or_else(|| Failure::usage("spec has no \"P\""))?;
        if p.dim() != self.mu.dim() {
            return Err(Failure::usage(format!(
                "P has dimension {} but mu has {}",
                p.dim(),
                self.mu.dim()
            )));
        }
        Ok(p)
    }

    fn k(&self) -> Result<MultiIndex, Failure> {
        let k = self.k.clone().unwrap_or_else(|| MultiIndex::zero(self.mu.dim()));
        if k.dim() != self.mu.dim() {
            return Err(Failure::usage(format!("k has dimension {} but mu has {}", k.dim(), self.mu.dim())));
        }
        Ok(k)
    }
}

fn parse_grid(s: &str, n: usize) -> Result<GridSpec, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Failure::usage(format!("--grid expects lo:hi:count, got '{s}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    if !(lo > 0.0 && hi > lo && count >= 1) {
        return Err(Failure::usage("--grid needs 0 < lo < hi and count >= 1"));
    }
    GridSpec::uniform(n, lo, hi, count).map_err(|e| Failure::usage(e.to_string()))
}

fn parse_quad(s: Option<&str>, decay: f64, tail: f64) -> Result<QuadratureRule, Failure> {
    let (mut points, mut panels, mut radius) = (DEFAULT_POINTS, DEFAULT_PANELS, None);
    if let Some(s) = s {
        let bad = || Failure::usage(format!("--quad expects points:panels[:radius], got '{s}'"));
        let parts: Vec<&str> = s.split(':').collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(bad());
        }
        points = parts[0].parse().map_err(|_| bad())?;
        panels = parts[1].parse().map_err(|_| bad())?;
        if let Some(r) = parts.get(2) {
            radius = Some(r.parse::<f64>().map_err(|_| bad())?);
        }
    }
    let radius = match radius {
        Some(r) => r,
        None if decay > 0.0 => truncation_radius(decay, tail),
        None => return Err(numeric(Error::DecayRequired)),
    };
    if !(radius > 0.0 && points > 0 && panels > 0) {
        return Err(Failure::usage("--quad values must be positive"));
    }
    build_quadrature(radius, points, panels).map_err(numeric)
}

fn sink(out: Option<&PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_json(c: &Common, v: &impl Serialize) -> Result<(), Failure> {
    if c.format == Format::Csv {
        return Err(Failure::usage("this command only writes json"));
    }
    let mut w = sink(c.out.as_ref())?;
    serde_json::to_writer_pretty(&mut w, v).map_err(|e| Failure { code: EXIT_NUMERIC, msg: e.to_string() })?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| Failure { code: EXIT_NUMERIC, msg: e.to_string() })
}

fn cmd_transform(c: &Common, spec: &ProblemSpec) -> Result<(), Failure> {
    let f = spec.function()?;
    let grid = parse_grid(&c.grid, spec.mu.dim())?;
    let out = if f.is_zero() {
        GridFunction::new(grid.clone(), vec![0.0; grid.len()], spec.mu.clone()).map_err(numeric)?
    } else {
        let rule = parse_quad(c.quad.as_deref(), rational::to_f64(&f.decay), c.tol.unwrap_or(DEFAULT_TAIL))?;
        let cf = f.compile();
        hankel_nd(&spec.mu, |x| cf.eval_unchecked(x), &grid, &rule).map_err(numeric)?
    };
    if out.values.iter().any(|v| !v.is_finite()) {
        return Err(Failure { code: EXIT_NUMERIC, msg: "transform produced non-finite values".into() });
    }
    match c.format {
        Format::Json => write_json(c, &out),
        Format::Csv => {
            let w = sink(c.out.as_ref())?;
            out.write_csv(w).map_err(numeric)
        }
    }
}

fn cmd_kernel(c: &Common, spec: &ProblemSpec) -> Result<bool, Failure> {
    let p = spec.operator()?;
    let sol = liouville_solve(p, &spec.mu, c.degree.unwrap_or(3)).map_err(numeric)?;
    let tol = c.tol.unwrap_or(1e-6);
    let ok = sol.certificate.exact() && sol.certificate.max_weak_residual() <= tol;
    write_json(c, &sol)?;
    Ok(ok)
}

fn cmd_verify(c: &Common, suite: &str, negative_controls: bool) -> Result<bool, Failure> {
    let opts = VerifyOptions { tol: c.tol, negative_controls };
    let report = run_suite(suite, &opts).map_err(|e| match e {
        Error::Parse(m) => Failure::usage(m),
        e => numeric(e),
    })?;
    for cr in &report.criteria {
        eprintln!("{}", cr.summary());
        for check in cr.checks.iter().filter(|k| k.expected_fail) {
            eprintln!(
                "    expected-fail: {} = {:.3e} ({})",
                check.name,
                check.value,
                if check.pass { "failed as designed" } else { "UNEXPECTEDLY PASSED" }
            );
        }
    }
    write_json(c, &report)?;
    Ok(report.pass)
}

fn cmd_seminorm(c: &Common, spec: &ProblemSpec) -> Result<(), Failure> {
    let f = spec.function()?;
    let k = spec.k()?;
    let m = spec.m.unwrap_or(0);
    let opts = SupOptions::for_function(&f).map_err(numeric)?.refined();
    let value = match spec.seminorm {
        SeminormKind::Gamma => seminorm_gamma(m, &k, &spec.mu, &f, &opts),
        SeminormKind::Lambda => seminorm_lambda(m, &k, &spec.mu, &f, &opts),
        SeminormKind::Rho => seminorm_rho(spec.order.unwrap_or(1), &spec.mu, &f, &opts),
    }
    .map_err(numeric)?;
    let kind = format!("{:?}", spec.seminorm).to_lowercase();
    let v = match spec.seminorm {
        SeminormKind::Rho => json!({"kind": kind, "order": spec.order.unwrap_or(1), "value": value}),
        _ => json!({"kind": kind, "m": m, "k": k, "value": value}),
    };
    write_json(c, &v)
}

fn cmd_taylor(c: &Common, spec: &ProblemSpec) -> Result<(), Failure> {
    let f = spec.function()?;
    let r = c.degree.or(spec.order).unwrap_or(2);
    let rep = taylor_coeffs(&spec.mu, &f, r).map_err(numeric)?;
    write_json(c, &rep)
}

fn cmd_pair_delta(c: &Common, spec: &ProblemSpec) -> Result<(), Failure> {
    let f = spec.function()?;
    let k = spec.k()?;
    let value = pair_delta(&k, &spec.mu, &f).map_err(numeric)?;
    let exact = pair_delta_exact(&k, &spec.mu, &f).map_err(numeric)?;
    let mut v = json!({"k": k, "value": value, "exact_constant_term": exact});
    let decay = rational::to_f64(&f.decay);
    if decay > 0.0 {
        let rule = parse_quad(c.quad.as_deref(), decay, c.tol.unwrap_or(DEFAULT_TAIL))?;
        let t = pair_delta_transform(&k, &spec.mu, &f, &rule).map_err(numeric)?;
        v["transform"] = json!({"lhs": t.lhs, "rhs": t.rhs, "relative_gap": t.relative_gap()});
    }
    write_json(c, &v)
}

fn cmd_multiplier(c: &Common, spec: &ProblemSpec) -> Result<(), Failure> {
    let theta = spec.multiplier.as_ref().ok_or_else(|| Failure::usage("spec has no \"multiplier\""))?;
    if theta.dim() != spec.mu.dim() {
        return Err(Failure::usage("multiplier dimension differs from mu"));
    }
    let rep = multiplier_check(theta, c.degree.unwrap_or(1), &MultiplierOptions::default()).map_err(numeric)?;
    write_json(c, &rep)
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let c = &cli.common;
    if let Some(t) = c.threads {
        if t == 0 {
            return Err(Failure::usage("--threads must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::usage(e.to_string()))?;
    }
    if let Some(t) = c.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::usage("--tol must be a positive number"));
        }
    }
    match &cli.cmd {
        Command::Verify { suite, negative_controls } => cmd_verify(c, suite, *negative_controls),
        cmd => {
            let spec = ProblemSpec::load(c.spec.as_ref())?;
            match cmd {
                Command::Transform => cmd_transform(c, &spec).map(|_| true),
                Command::Kernel => cmd_kernel(c, &spec),
                Command::Seminorm => cmd_seminorm(c, &spec).map(|_| true),
                Command::Taylor => cmd_taylor(c, &spec).map(|_| true),
                Command::PairDelta => cmd_pair_delta(c, &spec).map(|_| true),
                Command::Multiplier => cmd_multiplier(c, &spec).map(|_| true),
                Command::Verify { .. } => unreachable!(),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY),
        Err(f) => {
            eprintln!("hankelc: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
