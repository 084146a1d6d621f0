//! Command-line front end.
//!
//! Every command reads typed flags, optionally merged over a JSON
//! `--config` document with the same keys (flags win), and writes JSON or
//! CSV to stdout or `--output`. Exit status: 0 success, 1 rejected input,
//! 2 numerical failure, 64 usage error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::moving_plane::{default_lambda_grid, sample_field, sweep_lambda0, GridSpec};
use crate::output::{csv_table, fmt_f64, to_json};
use crate::power_law::{
    critical_exponents, hls_conjugate, misprinted_decay_exponent, riesz_power,
    solve_params, PowerLawTerm,
};
use crate::radial::{default_grid, riesz_radial_at, QuadratureConfig, RadialProfile};
use crate::verifier::verify_solution;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "hartree",
    version,
    about = "Explicit singular solutions of the Hartree equation, Riesz potentials and moving-plane checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format [default: csv for verify, json otherwise]
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the result here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// JSON document with the same keys as the flags; flags take precedence
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Human-readable table instead of JSON/CSV
    #[arg(long, global = true)]
    pretty: bool,

    /// Worker threads [default: available cores]
    #[arg(long, global = true, value_name = "K")]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the decay exponent s and amplitude A and check every constraint
    SolveParams(ModelArgs),
    /// Residual of the explicit solution at given radii
    Verify(VerifyArgs),
    /// Riesz potential of a power law or of a profile file
    Riesz(RieszArgs),
    /// Moving-plane sweep on a sampled field
    MovingPlane(MovingPlaneArgs),
    /// Conjugate exponent r with 1/t + 1/r + mu/N = 2
    Hls(HlsArgs),
    /// Lower and upper critical exponents (2N-mu)/N and (2N-mu)/(N-2)
    CriticalExponents(CriticalArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    q: Option<f64>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Comma-separated evaluation radii [default: 0.5,1,2]
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    /// Relative quadrature tolerance [default: 1e-8]
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Debug, Args)]
struct RieszArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    dim: Option<usize>,
    /// Source |x|^(-a), sampled on the default grid with exact tails
    #[arg(long)]
    a: Option<f64>,
    /// Source profile (.csv with columns r,value or .json with tails)
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Comma-separated radii [default: the source grid]
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Debug, Args)]
struct MovingPlaneArgs {
    /// Field dimension, 2 or 3 [default: 3]
    #[arg(long)]
    dim: Option<usize>,
    /// Nodes per axis, odd [default: 65]
    #[arg(long)]
    nodes: Option<usize>,
    /// Half-width L of the box [-L, L]^N [default: 2]
    #[arg(long)]
    extent: Option<f64>,
    /// Use the explicit solution for these parameters (needs --p, --q)
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    /// Profile |x|^(-s) instead of the explicit solution
    #[arg(long)]
    s: Option<f64>,
    /// Amplitude used with --s [default: 1]
    #[arg(long)]
    amplitude: Option<f64>,
    /// Singular points as "x1,x2,x3;..." on the plane x1 = 0 [default: origin]
    #[arg(long, value_parser = parse_points, allow_hyphen_values = true)]
    centers: Option<Points>,
    /// Comma-separated plane positions, multiples of h/2 [default: -L, -L+h, ..., -h]
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    lambdas: Option<Vec<f64>>,
    /// Zero threshold for sup w+ [default: 1e-12 max|u|]
    #[arg(long)]
    tol: Option<f64>,
    /// Also write the sampled field in text form
    #[arg(long, value_name = "PATH")]
    field_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HlsArgs {
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Debug, Args)]
struct CriticalArgs {
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
}

type Points = Vec<Vec<f64>>;

fn parse_points(text: &str) -> Result<Points, String> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|pt| {
            pt.split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|e| format!("{c:?}: {e}")))
                .collect()
        })
        .collect()
}

/// Every key a command accepts, from flags or `--config`.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct Settings {
    dim: Option<usize>,
    mu: Option<f64>,
    p: Option<f64>,
    q: Option<f64>,
    radii: Option<Vec<f64>>,
    rel_tol: Option<f64>,
    alpha: Option<f64>,
    a: Option<f64>,
    input: Option<PathBuf>,
    t: Option<f64>,
    nodes: Option<usize>,
    extent: Option<f64>,
    s: Option<f64>,
    amplitude: Option<f64>,
    centers: Option<Points>,
    lambdas: Option<Vec<f64>>,
    tol: Option<f64>,
    field_out: Option<PathBuf>,
    format: Option<Format>,
    output: Option<PathBuf>,
    pretty: Option<bool>,
    threads: Option<usize>,
}

macro_rules! overlay {
    ($hi:expr, $lo:expr, $($f:ident),*) => {
        Settings { $($f: $hi.$f.or($lo.$f)),* }
    };
}

impl Settings {
    /// Flag values first, config values where a flag is absent.
    fn over(self, base: Settings) -> Settings {
        overlay!(
            self, base, dim, mu, p, q, radii, rel_tol, alpha, a, input, t, nodes, extent, s,
            amplitude, centers, lambdas, tol, field_out, format, output, pretty, threads
        )
    }
}

const GLOBAL_KEYS: &[&str] = &["format", "output", "pretty", "threads"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    SolveParams,
    Verify,
    Riesz,
    MovingPlane,
    Hls,
    CriticalExponents,
}

impl Kind {
    fn keys(self) -> &'static [&'static str] {
        match self {
            Kind::SolveParams => &["dim", "mu", "p", "q"],
            Kind::Verify => &["dim", "mu", "p", "q", "radii", "rel-tol"],
            Kind::Riesz => &["alpha", "dim", "a", "input", "radii", "rel-tol"],
            Kind::MovingPlane => &[
                "dim", "nodes", "extent", "mu", "p", "q", "s", "amplitude", "centers", "lambdas",
                "tol", "field-out",
            ],
            Kind::Hls => &["t", "mu", "dim"],
            Kind::CriticalExponents => &["dim", "mu"],
        }
    }

    fn default_format(self) -> Format {
        match self {
            Kind::Verify => Format::Csv,
            _ => Format::Json,
        }
    }
}

impl Command {
    fn split(self) -> (Kind, Settings) {
        let model = |m: ModelArgs| Settings {
            dim: m.dim,
            mu: m.mu,
            p: m.p,
            q: m.q,
            ..Settings::default()
        };
        match self {
            Command::SolveParams(m) => (Kind::SolveParams, model(m)),
            Command::Verify(v) => (
                Kind::Verify,
                Settings {
                    radii: v.radii,
                    rel_tol: v.rel_tol,
                    ..model(v.model)
                },
            ),
            Command::Riesz(r) => (
                Kind::Riesz,
                Settings {
                    alpha: r.alpha,
                    dim: r.dim,
                    a: r.a,
                    input: r.input,
                    radii: r.radii,
                    rel_tol: r.rel_tol,
                    ..Settings::default()
                },
            ),
            Command::MovingPlane(m) => (
                Kind::MovingPlane,
                Settings {
                    dim: m.dim,
                    nodes: m.nodes,
                    extent: m.extent,
                    mu: m.mu,
                    p: m.p,
                    q: m.q,
                    s: m.s,
                    amplitude: m.amplitude,
                    centers: m.centers,
                    lambdas: m.lambdas,
                    tol: m.tol,
                    field_out: m.field_out,
                    ..Settings::default()
                },
            ),
            Command::Hls(h) => (
                Kind::Hls,
                Settings {
                    t: h.t,
                    mu: h.mu,
                    dim: h.dim,
                    ..Settings::default()
                },
            ),
            Command::CriticalExponents(c) => (
                Kind::CriticalExponents,
                Settings {
                    dim: c.dim,
                    mu: c.mu,
                    ..Settings::default()
                },
            ),
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing required value --{flag}")))
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_REJECTED
    }
}

fn load_config(path: &Path, kind: Kind) -> Result<Settings, Failure> {
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))?;
    let Value::Object(map) = &value else {
        return Err(Failure::Usage(format!("config {} must be a JSON object", path.display())));
    };
    let allowed: BTreeSet<&str> = kind.keys().iter().chain(GLOBAL_KEYS).copied().collect();
    let unknown: Vec<&str> = map.keys().map(String::as_str).filter(|k| !allowed.contains(k)).collect();
    if !unknown.is_empty() {
        return Err(Failure::Usage(format!(
            "config {}: unknown keys for this command: {}",
            path.display(),
            unknown.join(", ")
        )));
    }
    serde_json::from_value(value).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let (kind, flags) = cli.command.split();
    let flags = Settings {
        format: cli.format,
        output: cli.output,
        pretty: cli.pretty.then_some(true),
        threads: cli.threads,
        ..flags
    };
    let settings = match &cli.config {
        Some(path) => flags.over(load_config(path, kind)?),
        None => flags,
    };
    if let Some(k) = settings.threads {
        if k == 0 {
            return Err(Failure::Usage("--threads must be positive".into()));
        }
        // only the first configuration in a process takes effect
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    let format = settings.format.unwrap_or(kind.default_format());
    let pretty = settings.pretty.unwrap_or(false);
    let doc = match kind {
        Kind::SolveParams => cmd_solve_params(&settings)?,
        Kind::Verify => cmd_verify(&settings)?,
        Kind::Riesz => cmd_riesz(&settings)?,
        Kind::MovingPlane => cmd_moving_plane(&settings)?,
        Kind::Hls => cmd_hls(&settings)?,
        Kind::CriticalExponents => cmd_critical(&settings)?,
    };
    let text = if pretty {
        doc.pretty
    } else {
        match format {
            Format::Json => to_json(&doc.json)? + "\n",
            Format::Csv => doc.csv,
        }
    };
    match &settings.output {
        Some(path) => std::fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    if let Some(err) = doc.rejection {
        return Err(Failure::Lib(err));
    }
    Ok(())
}

/// A command result in every output form, plus an error to report after
/// the document is written.
struct Doc {
    json: Value,
    csv: String,
    pretty: String,
    rejection: Option<Error>,
}

impl Doc {
    fn named(json: Value, fields: &[(&str, f64)]) -> Self {
        let mut csv = String::from("name,value\n");
        for (k, v) in fields {
            writeln!(csv, "{k},{}", fmt_f64(*v)).unwrap();
        }
        Doc {
            json,
            csv,
            pretty: named_pretty(fields),
            rejection: None,
        }
    }
}

fn named_pretty(fields: &[(&str, f64)]) -> String {
    let w = fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in fields {
        writeln!(s, "{k:<w$}  {v:.10}").unwrap();
    }
    s
}

fn table_pretty(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = String::new();
    for h in header {
        write!(s, "{h:>18}").unwrap();
    }
    s.push('\n');
    for row in rows {
        for v in row {
            write!(s, "{v:>18.8e}").unwrap();
        }
        s.push('\n');
    }
    s
}

fn quadrature(settings: &Settings) -> QuadratureConfig {
    let mut cfg = QuadratureConfig::default();
    if let Some(t) = settings.rel_tol {
        cfg.rel_tol = t;
    }
    cfg
}

const ALTERNATE_FORMULA: &str = "(N-mu+2)/(p-q+1)";
const ALTERNATE_NOTE: &str = "This form of the decay exponent appears in some statements of the \
    result. It balances the powers of |x| only when q = 1; the reported s uses (N-mu+2)/(p+q-1).";

fn alternate_exponent(dim: usize, mu: f64, p: f64, q: f64) -> Value {
    let value = misprinted_decay_exponent(dim, mu, p, q);
    // N-2+s(q-1) - (2N-mu-sp): zero exactly when the powers of |x| balance
    let imbalance = value.map(|s| dim as f64 - 2.0 + s * (q - 1.0) - (2.0 * dim as f64 - mu - s * p));
    json!({
        "formula": ALTERNATE_FORMULA,
        "value": value,
        "power_imbalance": imbalance,
        "note": ALTERNATE_NOTE,
    })
}

fn model(settings: &Settings) -> Result<(usize, f64, f64, f64), Failure> {
    Ok((
        require(settings.dim, "dim")?,
        require(settings.mu, "mu")?,
        require(settings.p, "p")?,
        require(settings.q, "q")?,
    ))
}

fn cmd_solve_params(settings: &Settings) -> Result<Doc, Failure> {
    let (dim, mu, p, q) = model(settings)?;
    let alternate = alternate_exponent(dim, mu, p, q);
    let params = match solve_params(dim, mu, p, q) {
        Ok(params) => params,
        Err(Error::Validation(violations)) => {
            let json = json!({
                "accepted": false,
                "dim": dim,
                "mu": mu,
                "p": p,
                "q": q,
                "violations": violations,
                "alternate_exponent_formula": alternate,
            });
            let mut csv = String::from("constraint,detail\n");
            let mut pretty = String::from("rejected\n");
            for v in &violations {
                writeln!(csv, "{},\"{}\"", v.constraint, v.detail.replace('"', "\"\"")).unwrap();
                writeln!(pretty, "  {v}").unwrap();
            }
            return Ok(Doc {
                json,
                csv,
                pretty,
                rejection: Some(Error::Validation(violations)),
            });
        }
        Err(e) => return Err(e.into()),
    };
    let n = dim as f64;
    let s = params.s;
    let constraints: Vec<Value> = [
        ("N>=3", n),
        ("0<mu<N", mu),
        ("p>=1", p),
        ("q>=1", q),
        ("p+q>1", p + q),
        ("0<sp<N", s * p),
        ("2-N<s(q-1)<2", s * (q - 1.0)),
        ("0<s<N-2", s),
        ("A>0", params.amplitude),
    ]
    .iter()
    .map(|(name, value)| json!({"constraint": name, "value": value, "satisfied": true}))
    .collect();
    let json = json!({
        "accepted": true,
        "dim": dim,
        "mu": mu,
        "p": p,
        "q": q,
        "s": s,
        "amplitude": params.amplitude,
        "symmetry_range": params.symmetry_range,
        "critical_exponents": critical_exponents(dim, mu).ok(),
        "constraints": constraints,
        "alternate_exponent_formula": alternate,
    });
    let fields = [
        ("s", s),
        ("amplitude", params.amplitude),
        ("symmetry_range", if params.symmetry_range { 1.0 } else { 0.0 }),
    ];
    let mut doc = Doc::named(json, &fields);
    if let Some(v) = misprinted_decay_exponent(dim, mu, p, q) {
        writeln!(doc.pretty, "note: {ALTERNATE_FORMULA} = {v:.10} is not used. {ALTERNATE_NOTE}").unwrap();
    }
    Ok(doc)
}

const DEFAULT_VERIFY_RADII: [f64; 3] = [0.5, 1.0, 2.0];

fn cmd_verify(settings: &Settings) -> Result<Doc, Failure> {
    let (dim, mu, p, q) = model(settings)?;
    let radii = settings.radii.clone().unwrap_or(DEFAULT_VERIFY_RADII.to_vec());
    let params = solve_params(dim, mu, p, q)?;
    let report = verify_solution(&params, &radii, &quadrature(settings))?;
    let rows: Vec<Vec<f64>> = (0..report.radii.len())
        .map(|i| {
            vec![
                report.radii[i],
                report.lhs[i],
                report.rhs[i],
                report.ratio[i],
                report.quadrature_error[i],
            ]
        })
        .collect();
    let mut pretty = table_pretty(&["r", "lhs", "rhs", "ratio", "err"], &rows);
    writeln!(pretty, "max |ratio - 1| = {:.3e}", report.max_deviation()).unwrap();
    writeln!(pretty, "note: {ALTERNATE_FORMULA} is not used. {ALTERNATE_NOTE}").unwrap();
    let mut json = serde_json::to_value(&report).map_err(Error::from)?;
    json["alternate_exponent_formula"] = alternate_exponent(dim, mu, p, q);
    Ok(Doc {
        json,
        csv: report.to_csv(),
        pretty,
        rejection: None,
    })
}

const DEFAULT_RIESZ_RADII: [f64; 5] = [0.1, 0.3, 1.0, 3.0, 10.0];

fn read_profile(path: &Path) -> Result<RadialProfile, Error> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        return Ok(serde_json::from_str(&text)?);
    }
    let mut radii = Vec::new();
    let mut values = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = cells.iter().map(|c| c.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() >= 2 => {
                radii.push(v[0]);
                values.push(v[1]);
            }
            // header row
            None if n == 0 => {}
            _ => return Err(Error::Parse(format!("{}:{}: expected r,value", path.display(), n + 1))),
        }
    }
    Ok(RadialProfile::new(radii, values)?.with_fitted_tails())
}

fn cmd_riesz(settings: &Settings) -> Result<Doc, Failure> {
    let alpha = require(settings.alpha, "alpha")?;
    let dim = require(settings.dim, "dim")?;
    let (profile, source, exact) = match (settings.a, &settings.input) {
        (Some(a), None) => {
            let term = PowerLawTerm::new(1.0, a)?;
            let profile = RadialProfile::from_power_law(term, default_grid())?;
            (profile, json!({"power_law": a}), riesz_power(alpha, a, dim).ok())
        }
        (None, Some(path)) => (
            read_profile(path)?,
            json!({"file": path.display().to_string()}),
            None,
        ),
        _ => return Err(Failure::Usage("exactly one of --a and --input is required".into())),
    };
    let radii = settings.radii.clone().unwrap_or(DEFAULT_RIESZ_RADII.to_vec());
    let points = riesz_radial_at(&profile, alpha, dim, &radii, &quadrature(settings))?;
    let closed_form: Option<Vec<f64>> = exact.map(|t| radii.iter().map(|&r| t.eval(r)).collect());
    let mut header = vec!["r", "value", "err", "truncation"];
    let rows: Vec<Vec<f64>> = points
        .iter()
        .enumerate()
        .map(|(i, pt)| {
            let mut row = vec![pt.radius, pt.value, pt.error, pt.truncation];
            if let Some(c) = &closed_form {
                row.push(c[i]);
            }
            row
        })
        .collect();
    if closed_form.is_some() {
        header.push("closed_form");
    }
    let json = json!({
        "alpha": alpha,
        "dim": dim,
        "source": source,
        "points": points,
        "closed_form": closed_form,
    });
    Ok(Doc {
        json,
        csv: csv_table(&header, rows.iter().cloned()),
        pretty: table_pretty(&header, &rows),
        rejection: None,
    })
}

fn cmd_moving_plane(settings: &Settings) -> Result<Doc, Failure> {
    let dim = settings.dim.unwrap_or(3);
    let grid = GridSpec::new(dim, settings.nodes.unwrap_or(65), settings.extent.unwrap_or(2.0))?;
    let term = match settings.s {
        Some(s) => PowerLawTerm::new(settings.amplitude.unwrap_or(1.0), s)?,
        None => {
            let (mu, p, q) = (
                require(settings.mu, "mu (or --s)")?,
                require(settings.p, "p (or --s)")?,
                require(settings.q, "q (or --s)")?,
            );
            solve_params(dim, mu, p, q)?.profile()
        }
    };
    let profile = RadialProfile::from_power_law(term, default_grid())?;
    let centers = settings.centers.clone().unwrap_or_else(|| vec![vec![0.0; dim]]);
    let field = sample_field(&profile, &centers, &grid)?;
    if let Some(path) = &settings.field_out {
        std::fs::write(path, field.to_text())?;
    }
    let lambdas = settings
        .lambdas
        .clone()
        .unwrap_or_else(|| default_lambda_grid(&field));
    let report = sweep_lambda0(&field, &lambdas, settings.tol)?;
    let rows: Vec<Vec<f64>> = (0..report.lambdas.len())
        .map(|i| vec![report.lambdas[i], report.sup_w_plus[i], report.opposite.sup_w_plus[i]])
        .collect();
    let mut pretty = table_pretty(&["lambda", "sup_w_plus", "sup_w_plus_opposite"], &rows);
    let show = |l: Option<f64>| l.map_or("none".to_string(), |v| format!("{v:.10}"));
    writeln!(pretty, "lambda0 estimate           {}", show(report.lambda0_estimate)).unwrap();
    writeln!(pretty, "lambda0 estimate, opposite {}", show(report.opposite.lambda0_estimate)).unwrap();
    writeln!(pretty, "monotonicity min           {:.10e}", report.monotonicity_min).unwrap();
    if !report.theorem_scope {
        writeln!(pretty, "note: N = 2 is outside the symmetry theorem").unwrap();
    }
    Ok(Doc {
        json: serde_json::to_value(&report).map_err(Error::from)?,
        csv: report.to_csv(),
        pretty,
        rejection: None,
    })
}

fn cmd_hls(settings: &Settings) -> Result<Doc, Failure> {
    let t = require(settings.t, "t")?;
    let mu = require(settings.mu, "mu")?;
    let dim = require(settings.dim, "dim")?;
    let h = hls_conjugate(t, mu, dim)?;
    let sum = 1.0 / h.t + 1.0 / h.r + h.mu / h.dim as f64;
    let json = json!({"t": h.t, "r": h.r, "mu": h.mu, "dim": h.dim, "exponent_sum": sum});
    Ok(Doc::named(json, &[("t", h.t), ("r", h.r), ("exponent_sum", sum)]))
}

fn cmd_critical(settings: &Settings) -> Result<Doc, Failure> {
    let dim = require(settings.dim, "dim")?;
    let mu = require(settings.mu, "mu")?;
    let (lower, upper) = critical_exponents(dim, mu)?;
    let json = json!({"dim": dim, "mu": mu, "lower": lower, "upper": upper});
    Ok(Doc::named(json, &[("lower", lower), ("upper", upper)]))
}
