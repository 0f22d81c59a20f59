//! The `fht` command line: `eval | invert | norm | verify | probe-domain`.
//!
//! Exit codes: 0 on success, 1 when a verification case fails or the input is
//! rejected by the solver, 2 on usage errors (bad flags, unparsable
//! expressions, unreadable files, out-of-domain requests).

use std::f64::consts::{E, PI};
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::airfoil;
use crate::error::{FhtError, Result};
use crate::expr::parse_function;
use crate::function::FunctionHandle;
use crate::norms::{self, NormReport};
use crate::operators::{self, Method, Operator, OperatorRequest};
use crate::verify::{self, Case, Summary, VerificationReport};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "fht", version, about = "Finite Hilbert transform on (-1, 1): evaluation, inversion, norms and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate T, T_check, T_hat, Q, Q_exp or phi.
    Eval {
        /// Expression in x, or csv:PATH.
        #[arg(long = "f", allow_hyphen_values = true)]
        f: String,
        #[arg(long, default_value = "T")]
        op: String,
        /// Comma-separated points of (-1, 1).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
        points: Vec<f64>,
        #[arg(long, default_value = "auto")]
        method: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve the airfoil equation T(f) = g.
    Invert {
        #[arg(long = "g", allow_hyphen_values = true)]
        g: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Solve even when g fails the range check.
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Zygmund norms of f.
    Norm {
        #[arg(long = "f", allow_hyphen_values = true)]
        f: String,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = norms::DEFAULT_GRID)]
        grid: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a verification suite, or `all`.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random cases; defaults per suite.
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Lower bounds for the optimal-domain norm of an unbounded f.
    ProbeDomain {
        #[arg(long = "f", allow_hyphen_values = true)]
        f: String,
        /// Largest level n; defaults to ceil(5 pi e^2).
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value_t = 5.0)]
        cap: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Default number of random cases per suite.
pub fn default_cases(suite: &str) -> usize {
    match suite {
        "parseval" => 50,
        "lowerbound" => 200,
        "kernel" => 100,
        _ => 20,
    }
}

/// `ceil(5 pi e^2)`
pub fn default_probe_levels() -> u32 {
    (5.0 * PI * E * E).ceil() as u32
}

#[derive(Serialize)]
struct Timestamp {
    unix_seconds: u64,
    wall_time_s: f64,
}

#[derive(Serialize)]
struct Envelope {
    tool_version: &'static str,
    command: String,
    seed: Option<u64>,
    cases: Vec<Case>,
    summary: Summary,
    result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    timestamp: Timestamp,
}

/// Writes floats with 17 significant digits.
struct FixedDigits;

impl serde_json::ser::Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

/// Compact JSON with the fixed-digit float format.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| FhtError::Io(e.to_string()))?;
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits);
    v.serialize(&mut ser).map_err(|e| FhtError::Io(e.to_string()))?;
    Ok(String::from_utf8(buf).expect("json is utf-8"))
}

/// An expression, or `csv:PATH` with an `x,value` header.
pub fn load_function(spec: &str) -> Result<FunctionHandle> {
    match spec.strip_prefix("csv:") {
        Some(path) => {
            let (xs, ys) = read_csv(path)?;
            Ok(FunctionHandle::from_samples(path, xs, ys))
        }
        None => parse_function(spec),
    }
}

fn read_csv(path: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    norms::read_samples(File::open(path)?)
}

struct Outcome {
    command: String,
    seed: Option<u64>,
    cases: Vec<Case>,
    result: Value,
    csv: Vec<Vec<String>>,
    failed: bool,
    error: Option<String>,
}

impl Outcome {
    fn new(command: &str, result: Value, csv: Vec<Vec<String>>) -> Self {
        Outcome {
            command: command.into(),
            seed: None,
            cases: Vec::new(),
            result,
            csv,
            failed: false,
            error: None,
        }
    }
}

fn value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn cases_csv(cases: &[Case]) -> Vec<Vec<String>> {
    let mut rows = vec![["id", "inputs", "residual", "margin", "tolerance", "pass", "anchor"]
        .map(String::from)
        .to_vec()];
    for c in cases {
        rows.push(vec![
            c.id.clone(),
            c.inputs.clone(),
            c.residual.map(num).unwrap_or_default(),
            c.margin.map(num).unwrap_or_default(),
            num(c.tolerance),
            c.pass.to_string(),
            c.anchor.clone(),
        ]);
    }
    rows
}

fn run(command: Command) -> Result<(Outcome, OutputArgs)> {
    match command {
        Command::Eval {
            f,
            op,
            points,
            method,
            tol,
            output,
        } => {
            let op: Operator = op.parse()?;
            let method: Method = method.parse()?;
            let req = OperatorRequest::new(op, load_function(&f)?)
                .points(points)
                .method(method)
                .tol(tol);
            let r = operators::apply(&req)?;
            let mut csv = vec![vec!["t".to_string(), "value".to_string()]];
            csv.extend(r.values.iter().map(|&(t, v)| vec![num(t), num(v)]));
            Ok((Outcome::new("eval", value(&r), csv), output))
        }
        Command::Invert { g, tol, force, output } => {
            let g = load_function(&g)?;
            match airfoil::solve(&g, tol, force) {
                Ok(sol) => {
                    let mut csv = vec![vec!["x".to_string(), "value".to_string()]];
                    for j in 0..airfoil::RESIDUAL_POINTS {
                        let x = ((2 * j + 1) as f64 * PI / (2 * airfoil::RESIDUAL_POINTS) as f64).cos();
                        csv.push(vec![num(x), num(sol.eval(x))]);
                    }
                    Ok((Outcome::new("invert", value(&sol), csv), output))
                }
                Err(e @ FhtError::NotInRange { .. }) => {
                    let report = airfoil::check_range(&g, tol).ok();
                    let mut o = Outcome::new("invert", value(&report), Vec::new());
                    o.failed = true;
                    o.error = Some(e.to_string());
                    Ok((o, output))
                }
                Err(e) => Err(e),
            }
        }
        Command::Norm { f, alpha, grid, output } => {
            let r = match f.strip_prefix("csv:") {
                Some(path) => {
                    let (xs, ys) = read_csv(path)?;
                    norms::rearrange_samples(&xs, &ys)?
                }
                None => norms::rearrange(&parse_function(&f)?, grid)?,
            };
            let report = NormReport::new(&r, alpha, grid)?;
            let csv = vec![
                vec!["quantity".to_string(), "value".to_string()],
                vec!["lexp_primary".into(), num(report.lexp_primary)],
                vec!["lexp_equiv".into(), num(report.lexp_equiv)],
                vec!["llogl".into(), num(report.llogl)],
            ];
            Ok((Outcome::new("norm", value(&report), csv), output))
        }
        Command::Verify { suite, seed, n, output } => {
            let names: Vec<&str> = if suite == "all" {
                verify::SUITES.to_vec()
            } else {
                vec![suite.as_str()]
            };
            let mut reports: Vec<VerificationReport> = Vec::new();
            for name in names {
                reports.push(verify::run_suite(name, seed, n.unwrap_or_else(|| default_cases(name)))?);
            }
            let mut cases = Vec::new();
            for r in &reports {
                cases.extend(r.cases.iter().cloned().map(|mut c| {
                    if reports.len() > 1 {
                        c.id = format!("{}/{}", r.suite, c.id);
                    }
                    c
                }));
            }
            let mut o = Outcome::new(
                "verify",
                serde_json::json!({ "suites": reports.iter().map(|r| value(&serde_json::json!({
                    "suite": r.suite,
                    "engines": r.engines,
                    "summary": r.summary,
                }))).collect::<Vec<_>>() }),
                cases_csv(&cases),
            );
            o.failed = cases.iter().any(|c| !c.pass);
            o.seed = Some(seed);
            o.cases = cases;
            Ok((o, output))
        }
        Command::ProbeDomain { f, n, cap, output } => {
            let f = load_function(&f)?;
            let r = verify::probe_optimal_domain(&f, n.unwrap_or_else(default_probe_levels), cap)?;
            if let Some(w) = &r.warning {
                eprintln!("warning: {w}");
            }
            let mut csv = vec![["n", "measure", "norm", "lower_bound"].map(String::from).to_vec()];
            csv.extend(
                r.sequence
                    .iter()
                    .map(|s| vec![s.n.to_string(), num(s.measure), num(s.norm), num(s.lower_bound)]),
            );
            let mut o = Outcome::new(
                "probe-domain",
                serde_json::json!({
                    "function": r.function,
                    "n_max": r.n_max,
                    "cap": r.cap,
                    "declined": r.declined,
                    "warning": r.warning,
                    "sequence": value(&r.sequence),
                    "first_exceeding": r.first_exceeding,
                }),
                csv,
            );
            o.failed = !r.report.all_pass();
            o.cases = r.report.cases;
            Ok((o, output))
        }
    }
}

fn usage_error(e: &FhtError) -> bool {
    matches!(
        e,
        FhtError::Parse { .. }
            | FhtError::InvalidRequest(_)
            | FhtError::Csv(_)
            | FhtError::Io(_)
            | FhtError::Domain { .. }
            | FhtError::RejectedInput { .. }
            | FhtError::SingularPoint { .. }
    )
}

fn emit(outcome: Outcome, output: &OutputArgs, started: Instant) -> Result<()> {
    let text = match output.format {
        Format::Json => {
            let pass = outcome.cases.iter().filter(|c| c.pass).count();
            let env = Envelope {
                tool_version: TOOL_VERSION,
                command: outcome.command,
                seed: outcome.seed,
                summary: Summary {
                    pass,
                    fail: outcome.cases.len() - pass,
                },
                cases: outcome.cases,
                result: outcome.result,
                error: outcome.error,
                timestamp: Timestamp {
                    unix_seconds: SystemTime::now()
                        .duration_since(UNIX_EPOCH)
                        .map_or(0, |d| d.as_secs()),
                    wall_time_s: started.elapsed().as_secs_f64(),
                },
            };
            to_json(&env)? + "\n"
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &outcome.csv {
                w.write_record(row)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| FhtError::Io(e.to_string()))?).expect("csv is utf-8")
        }
    };
    match &output.out {
        Some(path) => std::fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs the command line and returns the process exit code.
pub fn cli_main<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let started = Instant::now();
    match run(cli.command) {
        Ok((outcome, output)) => {
            let failed = outcome.failed;
            if let Some(e) = &outcome.error {
                eprintln!("error: {e}");
            }
            match emit(outcome, &output, started) {
                Ok(()) => i32::from(failed),
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if usage_error(&e) {
                2
            } else {
                1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let s = to_json(&serde_json::json!({ "v": 0.1 })).unwrap();
        assert_eq!(s, r#"{"v":1.0000000000000001e-1}"#);
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["v"].as_f64(), Some(0.1));
    }

    #[test]
    fn probe_default_levels() {
        assert_eq!(default_probe_levels(), 117);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(cli_main(["fht", "frobnicate"]), 2);
        assert_eq!(cli_main(["fht", "eval", "--f", "x +", "--points", "0.5"]), 2);
        assert_eq!(cli_main(["fht", "eval", "--f", "x", "--points", "1.5"]), 2);
    }
}
