//! Command-line front end for the bihyperbolic toolkit.
//!
//! Every subcommand prints exactly one newline-terminated JSON document on
//! stdout (or a short text rendering with `--format plain`). Identical
//! arguments and seed produce identical bytes. Exit codes: 0 on success —
//! including verifications whose expected verdict is a failure — 1 on
//! domain errors (reported as `{"error":"<code>"}`), 2 on usage errors.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use bihyp::{
    gauge, registry, run_suite, run_suite_from_path, tol, verify, Bih, CanonicalCoords, Error,
    H2Metric, HVec, Instance, PropertySpec, Seminorm, SuiteConfig, SuiteReport, VerifyReport,
};

#[derive(Parser)]
#[command(
    name = "bihyp",
    version,
    about = "Bihyperbolic arithmetic, gauges, seminorms, metrics and a property verifier",
    after_help = "Numbers are accepted as canonical text ('1 + 2 j1 - 3 j3'), a bare float, \
                  JSON ({\"canonical\":[x,y,z,w]}, {\"idempotent\":[l1,l2,l3,l4]} or a bare \
                  idempotent array), or @file. Structured arguments (sets, seminorms, \
                  families, vectors, instances) take inline JSON or a file path."
)]
struct Cli {
    /// Seed for randomized checks; BIHYP_SEED applies when the flag is absent
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trial budget for randomized checks [default: 1000]
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Membership and comparison tolerance [default: 1e-9]
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Series depth for the family metric [default: 40]
    #[arg(long, global = true)]
    truncation: Option<usize>,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Plain,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// Linear program / closed form, picked by the set's parts
    Lp,
    /// Membership-only bisection, the independent cross-check
    Bisection,
}

#[derive(Subcommand)]
enum Cmd {
    /// Convert a number to canonical coordinates and text form
    Canon {
        /// One number, or four floats x y z w
        #[arg(required = true)]
        number: Vec<String>,
    },
    /// Convert a number to idempotent coordinates
    Idem {
        #[arg(required = true)]
        number: Vec<String>,
    },
    /// Multiply two numbers
    Mul {
        /// Two numbers, or eight floats (two canonical quadruples)
        #[arg(required = true)]
        numbers: Vec<String>,
    },
    /// Invert a number; fails on the null cone
    Inv {
        #[arg(required = true)]
        number: Vec<String>,
    },
    /// Componentwise modulus
    Mod {
        #[arg(required = true)]
        number: Vec<String>,
    },
    /// Compare two numbers under the componentwise partial order
    Order {
        #[arg(required = true)]
        numbers: Vec<String>,
    },
    /// Minkowski gauge of a product set at a point
    Gauge {
        /// Set descriptor (inline JSON or file path)
        #[arg(long)]
        set: String,
        /// Point (JSON vector, module element or file path)
        #[arg(long)]
        point: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Lp)]
        method: MethodArg,
    },
    /// Evaluate a seminorm on a module element
    SeminormEval {
        /// Seminorm descriptor (inline JSON or file path)
        #[arg(long)]
        seminorm: String,
        #[arg(long)]
        vector: String,
    },
    /// Distance under the metric of a seminorm family
    Metric {
        /// Family: JSON array of seminorms, or a metric object, or file path
        #[arg(long)]
        family: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Run registered properties and report verdicts against expectations
    Verify {
        /// Single property id; omitting it runs the whole registry
        #[arg(long, conflicts_with = "list", conflicts_with = "config")]
        id: Option<String>,
        /// Instance override for --id (inline JSON or file path)
        #[arg(long, requires = "id")]
        instance: Option<String>,
        /// Suite configuration file (JSON)
        #[arg(long, conflicts_with = "list")]
        config: Option<String>,
        /// Dump the registry: id, claim, expected verdict, default instance
        #[arg(long)]
        list: bool,
    },
}

enum CliError {
    /// Wrong shape of arguments: reported on stderr, exit 2.
    Usage(String),
    /// Library error: reported as a JSON document on stdout, exit 1.
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

type CliResult<T> = Result<T, CliError>;

struct Output {
    text: String,
    ok: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, ok: true }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = match resolve_seed(cli.seed) {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match run(&cli, seed) {
        Ok(out) => {
            emit(&out.text);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            emit(&json!({ "error": e.code() }).to_string());
            ExitCode::from(1)
        }
    }
}

/// Prints the single output document; dies quietly when the consumer has
/// closed the pipe (e.g. `bihyp verify | head`).
fn emit(text: &str) {
    use std::io::Write;
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    if let Err(e) = writeln!(lock, "{text}") {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write to stdout: {e}");
        std::process::exit(1);
    }
}

/// `--seed` wins; otherwise BIHYP_SEED; otherwise 0.
fn resolve_seed(flag: Option<u64>) -> Result<u64, String> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("BIHYP_SEED") {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map_err(|_| format!("BIHYP_SEED must be an unsigned integer, got '{text}'")),
        Err(_) => Ok(0),
    }
}

fn run(cli: &Cli, seed: u64) -> CliResult<Output> {
    let trials = cli.trials.unwrap_or(1000);
    let tol_flag = cli.tol.unwrap_or(tol::MEMBERSHIP);
    match &cli.cmd {
        Cmd::Canon { number } => {
            let b = parse_numbers(number, 1)?[0];
            let cc = b.to_canonical();
            let doc = json!({
                "canonical": [cc.x, cc.y, cc.z, cc.w],
                "text": cc.to_string(),
            });
            Ok(Output::ok(render(cli.format, &doc, || cc.to_string())))
        }
        Cmd::Idem { number } => {
            let b = parse_numbers(number, 1)?[0];
            let doc = json!({ "idempotent": b.components() });
            Ok(Output::ok(render(cli.format, &doc, || {
                format!("{:?}", b.components())
            })))
        }
        Cmd::Mul { numbers } => {
            let ns = parse_numbers(numbers, 2)?;
            Ok(number_output(cli.format, ns[0] * ns[1]))
        }
        Cmd::Inv { number } => {
            let b = parse_numbers(number, 1)?[0];
            let inv = match cli.tol {
                Some(t) => b.inverse_with_tol(t),
                None => b.inverse(),
            }?;
            Ok(number_output(cli.format, inv))
        }
        Cmd::Mod { number } => {
            let b = parse_numbers(number, 1)?[0];
            Ok(number_output(cli.format, b.modulus()))
        }
        Cmd::Order { numbers } => {
            let ns = parse_numbers(numbers, 2)?;
            let (a, b) = (ns[0], ns[1]);
            let mut doc = serde_json::to_value(a.compare(b)).expect("serializable relation");
            let obj = doc.as_object_mut().expect("relation is an object");
            obj.insert("le".into(), json!(a.le(b)));
            obj.insert("lt".into(), json!(a.lt(b)));
            obj.insert("ge".into(), json!(a.ge(b)));
            obj.insert("gt".into(), json!(a.gt(b)));
            Ok(Output::ok(render(cli.format, &doc, || {
                format!(
                    "relation: {} (le {}, lt {}, ge {}, gt {})",
                    doc["relation"].as_str().unwrap_or("?"),
                    a.le(b),
                    a.lt(b),
                    a.ge(b),
                    a.gt(b)
                )
            })))
        }
        Cmd::Gauge { set, point, method } => {
            let set = parse_structured::<bihyp::H2Set>(set)?;
            let x = parse_vector(point)?;
            let result = match method {
                MethodArg::Lp => gauge::h2_gauge(&set, &x)?,
                MethodArg::Bisection => gauge::gauge_bisection(&set, &x, tol_flag)?,
            };
            let doc = json!({
                "value": result.value.components(),
                "per_component": result.per_component,
                "method": serde_json::to_value(result.method).expect("serializable method"),
            });
            Ok(Output::ok(render(cli.format, &doc, || {
                format!(
                    "gauge {:?} via {}",
                    result.per_component,
                    doc["method"].as_str().unwrap_or("?")
                )
            })))
        }
        Cmd::SeminormEval { seminorm, vector } => {
            let p = parse_structured::<Seminorm>(seminorm)?;
            let x = parse_vector(vector)?;
            let value = p.eval(&x)?;
            let doc = json!({ "value": value.components() });
            Ok(Output::ok(render(cli.format, &doc, || {
                format!("{:?}", value.components())
            })))
        }
        Cmd::Metric { family, x, y } => {
            let metric = parse_metric(family, cli.truncation)?;
            let x = parse_vector(x)?;
            let y = parse_vector(y)?;
            let value = metric.eval(&x, &y)?;
            let doc = json!({
                "truncation": metric.truncation(),
                "value": value.components(),
            });
            Ok(Output::ok(render(cli.format, &doc, || {
                format!("{:?}", value.components())
            })))
        }
        Cmd::Verify { id, instance, config, list } => {
            if *list {
                let rows = registry();
                let doc = serde_json::to_value(&rows).expect("serializable registry");
                return Ok(Output::ok(render(cli.format, &doc, || {
                    rows.iter()
                        .map(|r| format!("{:<28} {}", r.id, r.claim))
                        .collect::<Vec<_>>()
                        .join("\n")
                })));
            }
            if let Some(path) = config {
                let suite = run_suite_from_path(path)?;
                return Ok(suite_output(cli.format, suite));
            }
            if let Some(id) = id {
                let spec = PropertySpec {
                    id: id.clone(),
                    instance: match instance {
                        Some(text) => Some(parse_structured::<Instance>(text)?),
                        None => None,
                    },
                    trials,
                    seed,
                    tol: tol_flag,
                };
                let report = verify(&spec)?;
                let ok = report.as_expected;
                let doc = serde_json::to_value(&report).expect("serializable report");
                return Ok(Output {
                    text: render(cli.format, &doc, || report_line(&report)),
                    ok,
                });
            }
            let suite = run_suite(&SuiteConfig { seed, trials, tol: tol_flag, ids: None })?;
            Ok(suite_output(cli.format, suite))
        }
    }
}

fn render(format: Format, doc: &Value, plain: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => doc.to_string(),
        Format::Plain => plain(),
    }
}

fn number_output(format: Format, b: Bih) -> Output {
    let cc = b.to_canonical();
    let doc = json!({
        "canonical": [cc.x, cc.y, cc.z, cc.w],
        "idempotent": b.components(),
        "text": cc.to_string(),
    });
    Output::ok(render(format, &doc, || cc.to_string()))
}

fn report_line(report: &VerifyReport) -> String {
    format!(
        "{:<28} {:?} (expected {:?}) {}",
        report.id,
        report.report.verdict,
        report.expected,
        if report.as_expected { "ok" } else { "UNEXPECTED" }
    )
}

fn suite_output(format: Format, suite: SuiteReport) -> Output {
    let ok = suite.all_expected;
    let doc = serde_json::to_value(&suite).expect("serializable suite");
    Output {
        text: render(format, &doc, || {
            let mut lines: Vec<String> = suite.reports.iter().map(report_line).collect();
            lines.push(format!("all expected: {}", suite.all_expected));
            lines.join("\n")
        }),
        ok,
    }
}

/// Inline JSON (`{...}` / `[...]`), or `@path`, or a bare file path.
fn structured_text(arg: &str) -> CliResult<String> {
    let trimmed = arg.trim();
    if let Some(path) = trimmed.strip_prefix('@') {
        return read_file(path);
    }
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(trimmed.to_string());
    }
    read_file(trimmed)
}

fn read_file(path: &str) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Domain(Error::ConfigError(format!("cannot read {path}: {e}"))))
}

fn parse_structured<T: serde::de::DeserializeOwned>(arg: &str) -> CliResult<T> {
    let text = structured_text(arg)?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Domain(Error::InvalidInput(format!("bad JSON argument: {e}"))))
}

/// A vector argument: a bare real array embeds along the diagonal; a module
/// element uses the `{"dim":n,"comps":[..]}` wire form.
fn parse_vector(arg: &str) -> CliResult<HVec> {
    let text = structured_text(arg)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Domain(Error::InvalidInput(format!("bad vector JSON: {e}"))))?;
    if value.is_array() {
        let reals: Vec<f64> = serde_json::from_value(value).map_err(|e| {
            CliError::Domain(Error::InvalidInput(format!("bad real vector: {e}")))
        })?;
        if reals.is_empty() || reals.iter().any(|v| !v.is_finite()) {
            return Err(CliError::Domain(Error::InvalidInput(
                "real vector must be nonempty and finite".into(),
            )));
        }
        return Ok(HVec::from_real_vec(&reals));
    }
    serde_json::from_value(value)
        .map_err(|e| CliError::Domain(Error::InvalidInput(format!("bad module element: {e}"))))
}

/// The family argument accepts a metric object or a bare seminorm array;
/// `--truncation` overrides the depth in either case.
fn parse_metric(arg: &str, truncation: Option<usize>) -> CliResult<H2Metric> {
    let text = structured_text(arg)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Domain(Error::InvalidInput(format!("bad family JSON: {e}"))))?;
    let metric = if value.is_array() {
        let family: Vec<Seminorm> = serde_json::from_value(value).map_err(|e| {
            CliError::Domain(Error::InvalidInput(format!("bad seminorm family: {e}")))
        })?;
        H2Metric::new(family)?
    } else {
        serde_json::from_value::<H2Metric>(value)
            .map_err(|e| CliError::Domain(Error::InvalidInput(format!("bad metric: {e}"))))?
    };
    match truncation {
        Some(depth) => Ok(H2Metric::with_truncation(metric.family().to_vec(), depth)?),
        None => Ok(metric),
    }
}

/// `want` number specs, or `4 * want` bare floats read as canonical
/// quadruples `x y z w`.
fn parse_numbers(args: &[String], want: usize) -> CliResult<Vec<Bih>> {
    let floats: Vec<f64> = args
        .iter()
        .map_while(|a| a.trim().parse::<f64>().ok())
        .collect();
    if floats.len() == args.len() && args.len() == 4 * want {
        return floats
            .chunks(4)
            .map(|q| {
                Bih::from_canonical(CanonicalCoords::new(q[0], q[1], q[2], q[3]))
                    .map_err(CliError::from)
            })
            .collect();
    }
    if args.len() != want {
        return Err(CliError::Usage(format!(
            "expected {want} number argument(s) or {} floats, got {} argument(s)",
            4 * want,
            args.len()
        )));
    }
    args.iter().map(|a| parse_number(a)).collect()
}

/// One number token: JSON, bare float, canonical text, or @file of any of
/// those.
fn parse_number(token: &str) -> CliResult<Bih> {
    let trimmed = token.trim();
    let body = if let Some(path) = trimmed.strip_prefix('@') {
        read_file(path)?
    } else {
        trimmed.to_string()
    };
    let text = body.trim();
    if text.starts_with('{') || text.starts_with('[') {
        return serde_json::from_str::<Bih>(text)
            .map_err(|e| CliError::Domain(Error::InvalidInput(format!("bad number JSON: {e}"))));
    }
    if let Ok(v) = text.parse::<f64>() {
        if !v.is_finite() {
            return Err(CliError::Domain(Error::InvalidInput(
                "number must be finite".into(),
            )));
        }
        return Ok(Bih::from_real(v));
    }
    let cc = CanonicalCoords::from_text(text)?;
    Ok(Bih::from_canonical(cc)?)
}
