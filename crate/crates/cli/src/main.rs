//! `debranges`: sampling, reconstruction and diagnostics in `H(E^nu)` from the
//! command line.
//!
//! Exit status: 0 success, 1 a check failed, 2 usage or configuration error,
//! 3 numerical failure or unwritable output.

mod config;
mod functions;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use debranges::corpus::g_combination_corpus;
use debranges::diagnostics::{default_probe_nodes, frame_report, nearest_nodes, thm3_sweep, verify_suite, FrameOptions, VerifyConfig};
use debranges::interpolation::{reconstruct, sample, BasisKind, SampleSet};
use debranges::kernels::kernel_eval;
use debranges::structure::{node_set, node_window, phase_derivative};
use debranges::{DiagnosticReport, EntireFunction, Error};
use num_complex::Complex64;
use serde_json::{json, Value};

use config::Settings;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn status(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

/// Bad input (parse and domain errors) is a configuration error; everything
/// else the library reports is numerical.
pub fn core_err(e: Error) -> CliError {
    if e.is_numerical() || matches!(e, Error::Io(_)) {
        CliError::Numerical(e.to_string())
    } else {
        CliError::Config(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "debranges", version, about = "Sampling and reconstruction in de Branges spaces H(E^nu)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Structure function JSON, or a run config with a `space` field.
    #[arg(long)]
    space: PathBuf,
    /// Power of the space H(E^nu) [default: 1, or the run config's value].
    #[arg(long)]
    nu: Option<u32>,
    /// Corpus seed [default: the library default, or the run config's value].
    #[arg(long)]
    seed: Option<u64>,
    /// Numerical tolerance [default: 1e-10].
    #[arg(long)]
    tol: Option<f64>,
    /// Primary output file [default: standard output].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run summary JSON file [default: standard error].
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    G,
    B,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zeros of B for e^{i theta} E in a range: CSV `t,phase_derivative`.
    Zeros {
        #[command(flatten)]
        common: Common,
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true, required = true)]
        range: Vec<f64>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta: f64,
    },
    /// K_nu(w, z) on a grid.
    Kernel {
        #[command(flatten)]
        common: Common,
        /// Kernel centre as `RE,IM`.
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        #[arg(long)]
        grid: PathBuf,
    },
    /// A basis function G_{nu,j}(., t) or B_{nu,j}(., t) on a grid.
    Basis {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, value_enum, default_value_t = Kind::G)]
        kind: Kind,
        #[arg(long, default_value_t = 0)]
        j: usize,
        #[arg(long)]
        grid: PathBuf,
    },
    /// Derivative samples F^(j)(t), j < nu, at the zeros of B: CSV `t,j,value_re,value_im`.
    Sample {
        #[command(flatten)]
        common: Common,
        /// sinc:P[:S] | sinc-product:A | kernel:RE,IM | g:T:J | b:T:J | corpus:I
        #[arg(long, allow_hyphen_values = true)]
        function: String,
        /// Nodes on each side of the origin [default: 20].
        #[arg(long)]
        window: Option<usize>,
    },
    /// Interpolation series from a sample file, evaluated on a grid.
    Reconstruct {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        grid: PathBuf,
    },
    /// Frame ratio stability over a corpus of G-combinations: CSV `id,r_D,r_G`.
    Framecheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        corpus_size: usize,
        /// Basis functions per corpus member.
        #[arg(long, default_value_t = 3)]
        terms: usize,
        /// Nodes on each side of the origin used by the corpus.
        #[arg(long, default_value_t = 10)]
        corpus_window: usize,
        /// Nodes on each side of the origin in the frame sums [default: 50].
        #[arg(long)]
        window: Option<usize>,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 100.0)]
        max_spread: f64,
        /// Report JSON file [default: embedded in the run summary].
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Mass fraction rho(t) of B_{nu,1}(., t) at nodes: CSV `t,rho,phase_deriv_pow`.
    #[command(name = "probe-thm3")]
    ProbeThm3 {
        #[command(flatten)]
        common: Common,
        /// Number of default probe nodes.
        #[arg(long, default_value_t = 8)]
        nodes: usize,
        /// Probe the nodes nearest these abscissae instead.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        at: Vec<f64>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Every invariant check on the space: JSON array of reports.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        corpus_size: Option<usize>,
        /// Nodes on each side of the origin for the node checks.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        frame_corpus: Option<usize>,
        #[arg(long)]
        frame_window: Option<usize>,
        #[arg(long)]
        probe_nodes: Option<usize>,
    },
}

/// What a successful run produced, for the summary.
struct Outcome {
    passed: bool,
    details: Value,
}

impl Outcome {
    fn ok(details: Value) -> Self {
        Outcome { passed: true, details }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(passed) => ExitCode::from(if passed { 0 } else { 1 }),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status())
        }
    }
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Zeros { common, .. }
        | Command::Kernel { common, .. }
        | Command::Basis { common, .. }
        | Command::Sample { common, .. }
        | Command::Reconstruct { common, .. }
        | Command::Framecheck { common, .. }
        | Command::ProbeThm3 { common, .. }
        | Command::Verify { common, .. } => common,
    }
}

fn run(cmd: Command) -> Result<bool, CliError> {
    let c = common(&cmd);
    let loaded = config::load(&c.space)?;
    let settings = config::resolve(loaded, c.nu, c.seed, c.tol)?;
    let out = c.out.clone();
    let summary_path = c.summary.clone();
    let name = command_name(&cmd);
    let outcome = dispatch(cmd, &settings, out.as_ref())?;

    let summary = json!({
        "command": name,
        "schema": debranges::structure::SCHEMA_VERSION,
        "space": serde_json::from_str::<Value>(&settings.space.sf.to_json()).unwrap_or(Value::Null),
        "nu": settings.space.nu,
        "seed": settings.seed,
        "tol": settings.tol,
        "out": out.as_ref().map(|p| p.display().to_string()),
        "pass": outcome.passed,
        "details": outcome.details,
    });
    match summary_path {
        Some(p) => io::emit(Some(&p), &io::json_bytes(&summary)?)?,
        None => eprintln!("{summary}"),
    }
    Ok(outcome.passed)
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Zeros { .. } => "zeros",
        Command::Kernel { .. } => "kernel",
        Command::Basis { .. } => "basis",
        Command::Sample { .. } => "sample",
        Command::Reconstruct { .. } => "reconstruct",
        Command::Framecheck { .. } => "framecheck",
        Command::ProbeThm3 { .. } => "probe-thm3",
        Command::Verify { .. } => "verify",
    }
}

fn positive(name: &str, v: usize) -> Result<usize, CliError> {
    if v == 0 {
        return Err(CliError::Config(format!("{name} must be at least 1")));
    }
    Ok(v)
}

fn eval_grid(f: &dyn EntireFunction, points: &[Complex64]) -> Result<Vec<Complex64>, CliError> {
    points.iter().map(|&z| f.eval(z).map_err(core_err)).collect()
}

fn dispatch(cmd: Command, s: &Settings, out: Option<&PathBuf>) -> Result<Outcome, CliError> {
    let space = &s.space;
    match cmd {
        Command::Zeros { range, theta, .. } => {
            let (a, b) = (range[0], range[1]);
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(CliError::Config(format!("range must satisfy A < B, got {a} {b}")));
            }
            if !theta.is_finite() {
                return Err(CliError::Config("theta must be finite".into()));
            }
            let set = node_set(&space.sf, theta, (a, b)).map_err(core_err)?;
            let rows = set
                .nodes
                .iter()
                .map(|&t| Ok(vec![io::num(t), io::num(phase_derivative(&space.sf, t).map_err(core_err)?)]))
                .collect::<Result<Vec<_>, CliError>>()?;
            io::emit(out, &io::table_csv(&["t", "phase_derivative"], &rows)?)?;
            Ok(Outcome::ok(json!({ "range": [a, b], "theta": theta, "count": set.len() })))
        }
        Command::Kernel { w, grid, .. } => {
            let w = parse_complex(&w)?;
            let grid = io::read_grid(&grid)?;
            let values = grid
                .points
                .iter()
                .map(|&z| kernel_eval(space, w, z).map_err(core_err))
                .collect::<Result<Vec<_>, _>>()?;
            io::emit(out, &io::values_csv(&grid, &values)?)?;
            Ok(Outcome::ok(json!({ "w": [w.re, w.im], "points": grid.points.len() })))
        }
        Command::Basis { t, kind, j, grid, .. } => {
            let kind = match kind {
                Kind::G => BasisKind::G,
                Kind::B => BasisKind::B,
            };
            let f = functions::basis_function(space, t, kind, j)?;
            let grid = io::read_grid(&grid)?;
            let values = eval_grid(&f, &grid.points)?;
            io::emit(out, &io::values_csv(&grid, &values)?)?;
            Ok(Outcome::ok(json!({ "t": f.entry.t, "kind": kind, "j": j, "points": grid.points.len() })))
        }
        Command::Sample { function, window, .. } => {
            let window = positive("window", window.or(s.window).unwrap_or(20))?;
            let f = functions::parse_function(&function, space, s.seed)?;
            let nodes = node_window(&space.sf, 1, 0.0, window).map_err(core_err)?;
            let set = sample(space, &f, &nodes).map_err(core_err)?;
            let mut buf = Vec::new();
            set.write_csv(&mut buf).map_err(|e| CliError::Io(e.to_string()))?;
            io::emit(out, &buf)?;
            Ok(Outcome::ok(json!({ "function": function, "window": window, "nodes": set.nodes.len() })))
        }
        Command::Reconstruct { samples, grid, .. } => {
            let file = std::fs::File::open(&samples).map_err(|e| CliError::Config(format!("cannot read {}: {e}", samples.display())))?;
            let set = SampleSet::read_csv(space, file).map_err(|e| match e {
                Error::Parse(m) | Error::Domain(m) => CliError::Config(format!("{}: {m}", samples.display())),
                other => core_err(other),
            })?;
            let grid = io::read_grid(&grid)?;
            let r = reconstruct(space, &set, &grid.points).map_err(core_err)?;
            io::emit(out, &io::values_csv(&grid, &r.values)?)?;
            Ok(Outcome::ok(json!({
                "terms": r.terms,
                "window": [r.window.0, r.window.1],
                "tail_indicator": r.tail_indicator,
                "weighted_square_sum": r.weighted_square_sum,
            })))
        }
        Command::Framecheck {
            corpus_size,
            terms,
            corpus_window,
            window,
            delta,
            max_spread,
            report,
            ..
        } => {
            let window = positive("window", window.or(s.window).unwrap_or(50))?;
            positive("corpus size", corpus_size)?;
            positive("terms", terms)?;
            positive("corpus window", corpus_window)?;
            if !(delta > 0.0 && max_spread >= 1.0) {
                return Err(CliError::Config("delta must be positive and max-spread at least 1".into()));
            }
            let corpus = g_combination_corpus(space, corpus_size, terms, corpus_window, s.seed).map_err(core_err)?;
            let refs: Vec<&dyn EntireFunction> = corpus.iter().map(|f| f as &dyn EntireFunction).collect();
            let nodes = node_window(&space.sf, 1, 0.0, window).map_err(core_err)?;
            let opts = FrameOptions { tol: s.tol, delta, max_spread };
            let fr = frame_report(space, &refs, &nodes, opts).map_err(core_err)?;
            let rows: Vec<Vec<String>> = fr.rows.iter().map(|r| vec![r.id.clone(), io::num(r.r_d), io::num(r.r_g)]).collect();
            io::emit(out, &io::table_csv(&["id", "r_D", "r_G"], &rows)?)?;
            let passed = fr.report.pass;
            let details = embed_reports(report.as_ref(), std::slice::from_ref(&fr.report))?;
            Ok(Outcome { passed, details })
        }
        Command::ProbeThm3 { nodes, at, report, .. } => {
            let ts = if at.is_empty() {
                default_probe_nodes(space, positive("nodes", nodes)?)
            } else {
                nearest_nodes(space, &at)
            }
            .map_err(core_err)?;
            let r = thm3_sweep(space, &ts, s.tol).map_err(core_err)?;
            let pow = r.context.get("phase_deriv_pow").and_then(Value::as_array).cloned().unwrap_or_default();
            let rows: Vec<Vec<String>> = ts
                .iter()
                .zip(&r.measured)
                .zip(&pow)
                .map(|((t, rho), p)| vec![io::num(*t), io::num(*rho), io::num(p.as_f64().unwrap_or(f64::NAN))])
                .collect();
            io::emit(out, &io::table_csv(&["t", "rho", "phase_deriv_pow"], &rows)?)?;
            let passed = r.pass;
            let details = embed_reports(report.as_ref(), std::slice::from_ref(&r))?;
            Ok(Outcome { passed, details })
        }
        Command::Verify {
            format,
            corpus_size,
            window,
            frame_corpus,
            frame_window,
            probe_nodes,
            ..
        } => {
            let mut cfg = VerifyConfig {
                seed: s.seed,
                tol: s.tol,
                ..VerifyConfig::default()
            };
            cfg.suite.seed = s.seed;
            if let Some(v) = corpus_size {
                cfg.corpus_size = positive("corpus size", v)?;
            }
            if let Some(v) = window.or(s.window) {
                cfg.window = positive("window", v)?;
            }
            if let Some(v) = frame_corpus {
                cfg.frame_corpus = positive("frame corpus", v)?;
            }
            if let Some(v) = frame_window {
                cfg.frame_window = positive("frame window", v)?;
            }
            if let Some(v) = probe_nodes {
                cfg.probe_nodes = positive("probe nodes", v)?;
            }
            let reports = verify_suite(space, &cfg).map_err(core_err)?;
            let bytes = match format {
                Format::Json => io::reports_json(&reports)?,
                Format::Csv => io::reports_csv(&reports)?,
            };
            io::emit(out, &bytes)?;
            let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
            Ok(Outcome {
                passed: failed.is_empty(),
                details: json!({ "reports": reports.len(), "failed": failed }),
            })
        }
    }
}

/// Writes the reports to `path` when given; otherwise returns them for the summary.
fn embed_reports(path: Option<&PathBuf>, reports: &[DiagnosticReport]) -> Result<Value, CliError> {
    match path {
        Some(p) => {
            io::emit(Some(p), &io::reports_json(reports)?)?;
            Ok(json!({ "report": p.display().to_string() }))
        }
        None => Ok(json!({ "reports": reports })),
    }
}

fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Config(format!("expected RE,IM, got `{s}`"));
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}
