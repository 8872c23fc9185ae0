//! Command-line frontend. Data goes to standard output (or `--out`),
//! diagnostics to standard error.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{integrate_geodesic, torsion_trace, write_trace_csv};
use crate::geometry::{self, MetricField};
use crate::verify::{self, Claim, ClaimSuite, Normalize, Quantity, SamplePlan, Target, Tolerance, ToleranceKind};
use crate::zoo::{self, MetricSpec};

#[derive(Debug, Parser)]
#[command(name = "finsler", version, about = "Numerical Finsler geometry and claim verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate pointwise quantities at (x, y).
    Eval(EvalArgs),
    /// Integrate a geodesic and write its trace as CSV.
    Geodesic(GeodesicArgs),
    /// Run a claim suite and write the JSON report.
    Suite(SuiteArgs),
    /// List the metric families, or emit one spec per family.
    #[command(name = "zoo-list")]
    ZooList(ZooListArgs),
    /// Run one claim, from a suite file or from flags.
    Claim(ClaimArgs),
}

/// Comma-separated coordinates such as `0.1,-0.2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coords(pub Vec<f64>);

impl std::str::FromStr for Coords {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        parse_vector(s).map(Coords)
    }
}

fn parse_vector(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect()
}

fn parse_span(s: &str) -> std::result::Result<(f64, f64), String> {
    match parse_vector(s)?.as_slice() {
        [a, b] if a.is_finite() && b.is_finite() => Ok((*a, *b)),
        _ => Err("expected `t0,t1`".into()),
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Metric spec file, or inline `kind:key=value;...`.
    #[arg(long)]
    pub metric: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Coords,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Coords,
    /// Second flag vector for `K`.
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<Coords>,
    /// Any of F, g, G, N, R, K, S, I, J, tau, sigma, I_norm, J_norm,
    /// cartan_norm; comma separated or repeated.
    #[arg(long, value_delimiter = ',', default_value = "F")]
    pub quantity: Vec<String>,
    /// Emit a JSON object instead of lines.
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[arg(long)]
    pub metric: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Coords,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Coords,
    #[arg(long, value_parser = parse_span, allow_hyphen_values = true, default_value = "0,1")]
    pub t_span: (f64, f64),
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Leave the phi and residual columns empty.
    #[arg(long)]
    pub no_torsion: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Claim file (a list of `[[claim]]` tables).
    pub claims: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Replace every claim's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Multiply every tolerance by this factor.
    #[arg(long)]
    pub tol_scale: Option<f64>,
    /// JSON report path (standard output by default).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the flat CSV table here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ZooListArgs {
    /// Print a representative spec for every family as `[[metric]]` tables.
    #[arg(long)]
    pub emit_specs: bool,
    /// With `--emit-specs`, write one `<kind>.toml` per family into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClaimArgs {
    /// Claim file to pick from; otherwise the claim is built from flags.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub id: Option<String>,
    #[arg(long)]
    pub metric: Option<String>,
    #[arg(long)]
    pub quantity: Option<String>,
    /// Expected value; without it the target is zero.
    #[arg(long, allow_hyphen_values = true)]
    pub target: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Interpret `--tol` relative to the target.
    #[arg(long)]
    pub relative: bool,
    #[arg(long, default_value_t = 200)]
    pub count: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Divide the observed value by `(n + 1) F` (for S).
    #[arg(long)]
    pub per_n_plus_one_f: bool,
    /// The constant `c` for `closed_one_form`.
    #[arg(long, allow_hyphen_values = true)]
    pub constant: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `v` with twelve digits after the point, in scientific notation outside
/// `[1e-4, 1e6)`.
pub fn format_value(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) {
        format!("{v:.12}")
    } else {
        format!("{v:.12e}")
    }
}

fn emit(path: &Option<PathBuf>, bytes: &[u8], stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => {
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
enum EvalValue {
    Scalar(f64),
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

fn vector(v: &DVector<f64>) -> EvalValue {
    EvalValue::Vector(v.iter().copied().collect())
}

fn matrix(m: &DMatrix<f64>) -> EvalValue {
    EvalValue::Matrix(m.row_iter().map(|r| r.iter().copied().collect()).collect())
}

fn evaluate(metric: &MetricField, name: &str, x: &[f64], y: &[f64], u: Option<&[f64]>) -> Result<EvalValue> {
    let at = metric.sample(x, y)?;
    Ok(match name {
        "F" => EvalValue::Scalar(metric.value(x, y)),
        "g" => matrix(&geometry::fundamental_tensor(metric, &at)?.g),
        "G" => vector(&geometry::spray(metric, &at)?.g_coeffs),
        "N" => matrix(&geometry::spray(metric, &at)?.connection),
        "R" => matrix(&geometry::riemann(metric, &at)?.r),
        "K" => {
            let u = u.ok_or_else(|| Error::InvalidParameter("K needs --u".into()))?;
            EvalValue::Scalar(geometry::flag_curvature(metric, &at, u)?)
        }
        "S" => EvalValue::Scalar(geometry::s_curvature(metric, &at)?),
        "I" => vector(&geometry::mean_cartan(metric, &at)?.covariant),
        "J" => vector(&geometry::mean_landsberg(metric, &at)?.covariant),
        "I_norm" => EvalValue::Scalar(geometry::mean_cartan(metric, &at)?.norm()),
        "J_norm" => EvalValue::Scalar(geometry::mean_landsberg(metric, &at)?.norm()),
        "tau" => EvalValue::Scalar(geometry::distortion(metric, &at)?),
        "sigma" => EvalValue::Scalar(geometry::volume_density(metric, x)?),
        "cartan_norm" => EvalValue::Scalar(geometry::cartan_norm(metric, x)?.value),
        other => return Err(Error::InvalidParameter(format!("unknown quantity `{other}`"))),
    })
}

fn cmd_eval(args: &EvalArgs, stdout: &mut dyn Write) -> Result<()> {
    let metric = MetricSpec::load(&args.metric)?.build()?;
    let mut values = Vec::with_capacity(args.quantity.len());
    for q in &args.quantity {
        values.push((q.clone(), evaluate(&metric, q.trim(), &args.x.0, &args.y.0, args.u.as_ref().map(|u| u.0.as_slice()))?));
    }
    let mut out = Vec::new();
    if args.json {
        let map: serde_json::Map<String, serde_json::Value> = values
            .into_iter()
            .map(|(k, v)| Ok((k, serde_json::to_value(v)?)))
            .collect::<Result<_>>()?;
        serde_json::to_writer_pretty(&mut out, &map)?;
        writeln!(out)?;
    } else {
        for (name, v) in values {
            let text = match v {
                EvalValue::Scalar(s) => format_value(s),
                EvalValue::Vector(v) => v.iter().map(|a| format_value(*a)).collect::<Vec<_>>().join(" "),
                EvalValue::Matrix(m) => m
                    .iter()
                    .map(|r| r.iter().map(|a| format_value(*a)).collect::<Vec<_>>().join(" "))
                    .collect::<Vec<_>>()
                    .join(" ; "),
            };
            writeln!(out, "{name} {text}")?;
        }
    }
    emit(&args.out, &out, stdout)
}

fn cmd_geodesic(args: &GeodesicArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let metric = MetricSpec::load(&args.metric)?.build()?;
    let trace = integrate_geodesic(&metric, &args.x.0, &args.y.0, args.t_span, args.tol)?;
    let torsion = if args.no_torsion {
        None
    } else {
        match torsion_trace(&metric, &trace) {
            Ok(t) => Some(t),
            Err(e) => {
                writeln!(stderr, "warning: torsion columns left empty: {e}")?;
                None
            }
        }
    };
    let mut out = Vec::new();
    write_trace_csv(&mut out, &trace, torsion.as_ref())?;
    emit(&args.out, &out, stdout)?;
    if let Some(t) = trace.exit {
        writeln!(stderr, "geodesic left the chart at t = {}", format_value(t))?;
    }
    if let Some(tt) = &torsion {
        writeln!(
            stderr,
            "max phi {}, max interior residual {}",
            format_value(tt.max_phi()),
            format_value(tt.max_interior_residual())
        )?;
    }
    Ok(())
}

fn adjust(claims: &mut [Claim], seed: Option<u64>, tol_scale: Option<f64>) -> Result<()> {
    if let Some(f) = tol_scale {
        if !(f > 0.0 && f.is_finite()) {
            return Err(Error::Config(format!("--tol-scale must be positive, got {f}")));
        }
    }
    for c in claims.iter_mut() {
        if let Some(s) = seed {
            c.samples.seed = s;
        }
        if let Some(f) = tol_scale {
            c.tolerance = c.tolerance.scaled(f);
        }
    }
    Ok(())
}

fn cmd_suite(args: &SuiteArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<bool> {
    let mut suite = ClaimSuite::load(&args.claims)?;
    adjust(&mut suite.claim, args.seed, args.tol_scale)?;
    let report = verify::run_suite(&suite.claim, args.jobs);
    let mut out = Vec::new();
    report.write_json(&mut out)?;
    emit(&args.out, &out, stdout)?;
    if let Some(p) = &args.csv {
        report.write_csv(BufWriter::new(File::create(p)?))?;
    }
    for c in &report.claims {
        let status = if c.pass { "pass" } else { "FAIL" };
        write!(stderr, "{status} {} ({:.2}s)", c.id, c.runtime_seconds)?;
        if let Some(d) = &c.diagnostic {
            write!(stderr, ": {d}")?;
        }
        writeln!(stderr)?;
    }
    writeln!(
        stderr,
        "{} of {} claims passed in {:.1}s",
        report.passed, report.total, report.runtime_seconds
    )?;
    Ok(report.pass)
}

#[derive(Serialize)]
struct Catalog {
    metric: Vec<MetricSpec>,
}

fn cmd_zoo_list(args: &ZooListArgs, stdout: &mut dyn Write) -> Result<()> {
    let specs = zoo::catalog();
    if !args.emit_specs {
        for spec in &specs {
            let m = spec.build()?;
            writeln!(stdout, "{:18} n={} {}", spec.kind(), m.dimension(), m.name())?;
        }
        return Ok(());
    }
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for spec in &specs {
                std::fs::write(dir.join(format!("{}.toml", spec.kind())), spec.to_toml()?)?;
            }
        }
        None => {
            let text = toml::to_string(&Catalog { metric: specs })?;
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn parse_quantity(name: &str) -> Result<Quantity> {
    serde_json::from_value(serde_json::Value::String(name.to_string()))
        .map_err(|_| Error::Config(format!("unknown quantity `{name}`")))
}

fn claim_from_args(args: &ClaimArgs) -> Result<Claim> {
    if let Some(path) = &args.file {
        let suite = ClaimSuite::load(path)?;
        let mut picked: Vec<Claim> = match &args.id {
            Some(id) => suite.claim.into_iter().filter(|c| &c.id == id).collect(),
            None => suite.claim,
        };
        return match picked.len() {
            1 => Ok(picked.remove(0)),
            0 => Err(Error::Config("no claim with that id".into())),
            _ => Err(Error::Config("the file holds several claims; pick one with --id".into())),
        };
    }
    let metric = args
        .metric
        .as_deref()
        .ok_or_else(|| Error::Config("--metric or --file is required".into()))?;
    let quantity = parse_quantity(
        args.quantity
            .as_deref()
            .ok_or_else(|| Error::Config("--quantity is required".into()))?,
    )?;
    let tol = args.tol.unwrap_or(1e-8);
    Ok(Claim {
        id: args.id.clone().unwrap_or_else(|| quantity.name()),
        statement: format!("{} from the command line", quantity.name()),
        metric: MetricSpec::load(metric)?,
        quantity,
        target: match args.target {
            Some(value) => Target::Value { value },
            None => Target::Zero,
        },
        tolerance: Tolerance {
            value: tol,
            kind: if args.relative {
                ToleranceKind::Relative
            } else {
                ToleranceKind::Absolute
            },
        },
        samples: SamplePlan::new(args.count, args.seed.unwrap_or(0)),
        normalize: if args.per_n_plus_one_f {
            Normalize::NPlusOneF
        } else {
            Normalize::None
        },
        constant: args.constant,
        geodesic: None,
    })
}

fn cmd_claim(args: &ClaimArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<bool> {
    let mut claim = claim_from_args(args)?;
    claim.validate()?;
    if let Some(s) = args.seed {
        claim.samples.seed = s;
    }
    let report = verify::run_claim(&claim);
    let mut out = Vec::new();
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    emit(&args.out, &out, stdout)?;
    let status = if report.pass { "pass" } else { "FAIL" };
    writeln!(stderr, "{status} {}", report.diagnostic.as_deref().unwrap_or(&report.id))?;
    Ok(report.pass)
}

/// Run a parsed command. Returns the process exit code: 0 on success, 1 when
/// a claim fails, 2 on any error.
pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(a, stdout).map(|_| true),
        Command::Geodesic(a) => cmd_geodesic(a, stdout, stderr).map(|_| true),
        Command::Suite(a) => cmd_suite(a, stdout, stderr),
        Command::ZooList(a) => cmd_zoo_list(a, stdout).map(|_| true),
        Command::Claim(a) => cmd_claim(a, stdout, stderr),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

/// Parse the process arguments and run.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock()),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                2
            } else {
                0
            }
        }
    }
}
