//! The `ozaki` command-line front end.
//!
//! Every command prints one envelope on standard output:
//!
//! ```json
//! {"tool_version": "...", "command_echo": "...", "seed": 0, "payload": {...}, "status": "ok"}
//! ```
//!
//! `status` is `ok`, `bound_violation` or `error`, and the exit code is 0, 2
//! or 1 respectively. Usage errors print a single diagnostic line on standard
//! error and exit with 1. Floats are printed with 17 significant digits in
//! `%.17g` style, so every value survives a text round trip.

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

use crate::classes::{
    build_member, caratheodory_from_schwarz, coeffs_from_caratheodory_direct,
    coeffs_from_schwarz_direct, extremal_member, CaratheodoryCoeffs, ClassLabel, ExtremalName,
    OzakiFunction, Provenance, SchwarzCoeffs,
};
use crate::functionals::{full_report, CoeffTriple, FunctionalReport};
use crate::serde_util::complex_vec;
use crate::verifier::{
    check_extremals_for, grid_extremize, sample_and_check, BoundLedger, ExtremalCheck, LedgerEntry,
    ObjectiveId, OptResult, SampleConfig, SampleReport, DEFAULT_VIOLATION_TOLERANCE,
    OPTIMIZATION_TOLERANCE, SHARPNESS_TOLERANCE,
};

pub const TOOL_VERSION: &str = concat!("ozaki ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Parser)]
#[command(
    name = "ozaki",
    version,
    about = "Coefficient functionals of Ozaki close-to-convex functions"
)]
pub struct Cli {
    /// Output format; csv applies to `sample` and `optimize` only.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    #[value(name = "F", alias = "f")]
    F,
    #[value(name = "G", alias = "g")]
    G,
}

impl From<ClassArg> for ClassLabel {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::F => ClassLabel::F,
            ClassArg::G => ClassLabel::G,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassSelection {
    #[value(name = "F", alias = "f")]
    F,
    #[value(name = "G", alias = "g")]
    G,
    All,
}

impl ClassSelection {
    fn classes(self) -> Vec<ClassLabel> {
        match self {
            ClassSelection::F => vec![ClassLabel::F],
            ClassSelection::G => vec![ClassLabel::G],
            ClassSelection::All => ClassLabel::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Taylor coefficients of an extremal function (f1, f2, g1, g2).
    Extremal {
        name: String,
        #[arg(long, default_value_t = 8)]
        order: usize,
    },
    /// Build a class member and compare with the direct coefficient formulas.
    Coeffs {
        #[arg(long, value_enum)]
        class: ClassArg,
        #[command(flatten)]
        input: GeneratorInput,
        #[arg(long, default_value_t = 8)]
        order: usize,
    },
    /// All functionals of one function, checked against the ledger.
    Report {
        /// Use an extremal function instead of Schwarz/Carathéodory data.
        #[arg(long, conflicts_with_all = ["class", "schwarz", "caratheodory"])]
        extremal: Option<String>,
        #[arg(long, value_enum)]
        class: Option<ClassArg>,
        #[command(flatten)]
        input: GeneratorInput,
        #[arg(long, default_value_t = 8)]
        order: usize,
        #[arg(long, default_value_t = DEFAULT_VIOLATION_TOLERANCE)]
        tol: f64,
    },
    /// Evaluate every ledger bound at its extremal witness.
    Verify {
        #[arg(long, value_enum, default_value_t = ClassSelection::All)]
        class: ClassSelection,
    },
    /// Grid-extremize the reduced objectives.
    Optimize {
        /// Objective id (UpsilonF, PsiF, PhiG, NG, ChiF, MF, SG, DeltaG) or `all`.
        #[arg(long, default_value = "all")]
        objective: String,
        #[arg(long, default_value_t = 2000)]
        resolution: usize,
        #[arg(long, default_value_t = 3)]
        refine: usize,
    },
    /// Sample random class members and search for bound violations.
    Sample {
        #[arg(long, value_enum, default_value_t = ClassSelection::All)]
        class: ClassSelection,
        #[arg(long, default_value_t = 10000)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_VIOLATION_TOLERANCE)]
        tol: f64,
        #[arg(long, default_value_t = 3)]
        max_zeros: usize,
        /// Do not inject the class extremals into the sample.
        #[arg(long)]
        no_extremals: bool,
    },
}

/// Schwarz or Carathéodory coefficients as `re:im,re:im,...`.
#[derive(Debug, Clone, clap::Args)]
pub struct GeneratorInput {
    /// Coefficients c1,c2,... of the Schwarz function.
    #[arg(long, conflicts_with = "caratheodory")]
    pub schwarz: Option<String>,
    /// Coefficients p1,p2,... of the Carathéodory function.
    #[arg(long)]
    pub caratheodory: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    BoundViolation,
    Error,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::BoundViolation => 2,
            Status::Error => 1,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct OutputEnvelope {
    pub tool_version: String,
    pub command_echo: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub payload: Value,
    pub status: Status,
}

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: u8,
    pub stdout: String,
    pub stderr: String,
}

enum Output {
    Json(Value),
    Csv(String),
}

struct Produced {
    output: Output,
    status: Status,
    seed: Option<u64>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Runtime(e.to_string())
    }
}

/// Parses `args` (without the program name) and executes the command.
pub fn run(args: &[String]) -> Outcome {
    let command_echo = std::iter::once("ozaki")
        .chain(args.iter().map(String::as_str))
        .collect::<Vec<_>>()
        .join(" ");
    let cli =
        match Cli::try_parse_from(std::iter::once("ozaki".to_string()).chain(args.iter().cloned()))
        {
            Ok(cli) => cli,
            Err(e) => {
                use clap::error::ErrorKind;
                return match e.kind() {
                    ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                        exit_code: 0,
                        stdout: e.to_string(),
                        stderr: String::new(),
                    },
                    _ => usage_error(first_line(&e.to_string())),
                };
            }
        };

    match execute(&cli) {
        Ok(produced) => {
            let stdout = match produced.output {
                Output::Json(payload) => render_envelope(&OutputEnvelope {
                    tool_version: TOOL_VERSION.to_string(),
                    command_echo,
                    seed: produced.seed,
                    payload,
                    status: produced.status,
                }),
                Output::Csv(text) => text,
            };
            Outcome {
                exit_code: produced.status.exit_code(),
                stdout,
                stderr: String::new(),
            }
        }
        Err(Failure::Usage(msg)) => usage_error(&msg),
        Err(Failure::Runtime(msg)) => {
            let envelope = OutputEnvelope {
                tool_version: TOOL_VERSION.to_string(),
                command_echo,
                seed: None,
                payload: serde_json::json!({ "message": msg }),
                status: Status::Error,
            };
            Outcome {
                exit_code: Status::Error.exit_code(),
                stdout: render_envelope(&envelope),
                stderr: format!("error: {msg}"),
            }
        }
    }
}

fn first_line(s: &str) -> &str {
    s.lines().find(|l| !l.trim().is_empty()).unwrap_or(s).trim()
}

fn usage_error(msg: &str) -> Outcome {
    let msg = msg.strip_prefix("error: ").unwrap_or(msg);
    Outcome {
        exit_code: 1,
        stdout: String::new(),
        stderr: format!("error: {msg}"),
    }
}

fn execute(cli: &Cli) -> Result<Produced, Failure> {
    let tabular = matches!(
        cli.command,
        Command::Sample { .. } | Command::Optimize { .. }
    );
    if cli.format == Format::Csv && !tabular {
        return Err(Failure::Usage(
            "--format csv is only available for `sample` and `optimize`".into(),
        ));
    }
    match &cli.command {
        Command::Extremal { name, order } => cmd_extremal(name, *order),
        Command::Coeffs {
            class,
            input,
            order,
        } => cmd_coeffs((*class).into(), input, *order),
        Command::Report {
            extremal,
            class,
            input,
            order,
            tol,
        } => cmd_report(extremal.as_deref(), *class, input, *order, *tol),
        Command::Verify { class } => cmd_verify(*class),
        Command::Optimize {
            objective,
            resolution,
            refine,
        } => cmd_optimize(objective, *resolution, *refine, cli.format),
        Command::Sample {
            class,
            samples,
            order,
            seed,
            tol,
            max_zeros,
            no_extremals,
        } => {
            let configs = class
                .classes()
                .into_iter()
                .map(|label| SampleConfig {
                    class_label: label,
                    count: *samples,
                    order: *order,
                    seed: *seed,
                    blaschke_max_zeros: *max_zeros,
                    include_extremals: !no_extremals,
                    violation_tolerance: *tol,
                })
                .collect::<Vec<_>>();
            cmd_sample(&configs, cli.format)
        }
    }
}

fn json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("payload types serialize")
}

fn cmd_extremal(name: &str, order: usize) -> Result<Produced, Failure> {
    let name: ExtremalName = name
        .parse()
        .map_err(|e: crate::classes::ClassError| Failure::Usage(e.to_string()))?;
    let member = extremal_member(name, order)?;
    let coefficients: Vec<f64> = member.f.series().coeffs().iter().map(|c| c.re).collect();
    Ok(Produced {
        output: Output::Json(serde_json::json!({
            "name": name,
            "class": member.label,
            "order": member.order(),
            "coefficients": coefficients,
        })),
        status: Status::Ok,
        seed: None,
    })
}

/// Parses `re:im,re:im,...`; a bare number is real.
pub fn parse_complex_list(text: &str) -> Result<Vec<Complex64>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("invalid number {s:?} in coefficient list"))
            };
            match item.split_once(':') {
                Some((re, im)) => Ok(Complex64::new(parse(re)?, parse(im)?)),
                None => Ok(Complex64::new(parse(item)?, 0.0)),
            }
        })
        .collect()
}

/// Resolves the generator input to Schwarz coefficients `c_1 .. c_order`.
fn schwarz_input(
    input: &GeneratorInput,
    order: usize,
) -> Result<(&'static str, SchwarzCoeffs), Failure> {
    match (&input.schwarz, &input.caratheodory) {
        (Some(text), None) => {
            let c = parse_complex_list(text).map_err(Failure::Usage)?;
            Ok(("schwarz", SchwarzCoeffs::new(c)))
        }
        (None, Some(text)) => {
            let p = parse_complex_list(text).map_err(Failure::Usage)?;
            let p = CaratheodoryCoeffs::new(p)?;
            Ok(("caratheodory", SchwarzCoeffs::from_caratheodory(&p, order)))
        }
        _ => Err(Failure::Usage(
            "exactly one of --schwarz or --caratheodory is required".into(),
        )),
    }
}

#[derive(Serialize)]
struct FunctionPayload {
    class: ClassLabel,
    source: String,
    order: usize,
    #[serde(with = "complex_vec")]
    coefficients: Vec<Complex64>,
}

fn describe(member: &OzakiFunction) -> FunctionPayload {
    let source = match &member.provenance {
        Provenance::Extremal(name) => format!("extremal {name}"),
        Provenance::Schwarz(_) => "schwarz".to_string(),
    };
    FunctionPayload {
        class: member.label,
        source,
        order: member.order(),
        coefficients: member.f.series().coeffs().to_vec(),
    }
}

fn cmd_coeffs(
    label: ClassLabel,
    input: &GeneratorInput,
    order: usize,
) -> Result<Produced, Failure> {
    let (kind, w) = schwarz_input(input, order)?;
    let member = build_member(label, &w, order)?;
    let p = caratheodory_from_schwarz(&w, order);
    let built = CoeffTriple::from_function(&member.f)?;
    let from_schwarz = coeffs_from_schwarz_direct(label, &w.padded(3))?;
    let from_caratheodory = coeffs_from_caratheodory_direct(label, &p)?;
    let deviation = built
        .max_abs_diff(&from_schwarz)
        .max(built.max_abs_diff(&from_caratheodory));

    #[derive(Serialize)]
    struct Payload {
        input: &'static str,
        function: FunctionPayload,
        schwarz: SchwarzCoeffs,
        caratheodory: CaratheodoryCoeffs,
        from_ode: CoeffTriple,
        from_schwarz_direct: CoeffTriple,
        from_caratheodory_direct: CoeffTriple,
        max_formula_deviation: f64,
    }
    let payload = Payload {
        input: kind,
        function: describe(&member),
        schwarz: w.padded(order),
        caratheodory: p,
        from_ode: built,
        from_schwarz_direct: from_schwarz,
        from_caratheodory_direct: from_caratheodory,
        max_formula_deviation: deviation,
    };
    Ok(Produced {
        output: Output::Json(json(&payload)),
        status: Status::Ok,
        seed: None,
    })
}

#[derive(Serialize)]
struct BoundCheck {
    entry: LedgerEntry,
    value: f64,
    excess: f64,
    within: bool,
}

fn cmd_report(
    extremal: Option<&str>,
    class: Option<ClassArg>,
    input: &GeneratorInput,
    order: usize,
    tol: f64,
) -> Result<Produced, Failure> {
    let member = match extremal {
        Some(name) => {
            let name: ExtremalName = name
                .parse()
                .map_err(|e: crate::classes::ClassError| Failure::Usage(e.to_string()))?;
            extremal_member(name, order)?
        }
        None => {
            let label = class.ok_or_else(|| {
                Failure::Usage(
                    "either --extremal or --class with coefficient input is required".into(),
                )
            })?;
            let (_, w) = schwarz_input(input, order)?;
            build_member(label.into(), &w, order)?
        }
    };
    let report = full_report(&member)?;
    let ledger = BoundLedger::standard();
    let checks: Vec<BoundCheck> = ledger
        .for_class(member.label)
        .map(|entry| {
            let value = entry.functional.value(&report);
            let excess = entry.excess(value);
            BoundCheck {
                entry: *entry,
                value,
                excess,
                within: excess <= tol,
            }
        })
        .collect();
    let status = if checks.iter().all(|c| c.within) {
        Status::Ok
    } else {
        Status::BoundViolation
    };

    #[derive(Serialize)]
    struct Payload {
        function: FunctionPayload,
        report: FunctionalReport,
        tolerance: f64,
        bound_checks: Vec<BoundCheck>,
    }
    Ok(Produced {
        output: Output::Json(json(&Payload {
            function: describe(&member),
            report,
            tolerance: tol,
            bound_checks: checks,
        })),
        status,
        seed: None,
    })
}

fn cmd_verify(class: ClassSelection) -> Result<Produced, Failure> {
    let checks: Vec<ExtremalCheck> = match class {
        ClassSelection::All => check_extremals_for(None)?,
        ClassSelection::F => check_extremals_for(Some(ClassLabel::F))?,
        ClassSelection::G => check_extremals_for(Some(ClassLabel::G))?,
    };
    let all_passed = checks.iter().all(|c| c.passed);

    #[derive(Serialize)]
    struct Payload {
        tolerance: f64,
        entry_count: usize,
        all_passed: bool,
        entries: Vec<ExtremalCheck>,
    }
    Ok(Produced {
        output: Output::Json(json(&Payload {
            tolerance: SHARPNESS_TOLERANCE,
            entry_count: checks.len(),
            all_passed,
            entries: checks,
        })),
        status: if all_passed {
            Status::Ok
        } else {
            Status::BoundViolation
        },
        seed: None,
    })
}

fn cmd_optimize(
    objective: &str,
    resolution: usize,
    refine: usize,
    format: Format,
) -> Result<Produced, Failure> {
    let ids: Vec<ObjectiveId> = if objective == "all" {
        ObjectiveId::ALL.to_vec()
    } else {
        vec![objective
            .parse()
            .map_err(|e: crate::verifier::VerifierError| Failure::Usage(e.to_string()))?]
    };
    if resolution < crate::verifier::MIN_RESOLUTION {
        return Err(Failure::Usage(format!(
            "--resolution must be at least {}",
            crate::verifier::MIN_RESOLUTION
        )));
    }
    let results = ids
        .iter()
        .map(|&id| grid_extremize(id, id.mode(), resolution, refine))
        .collect::<Result<Vec<OptResult>, _>>()?;
    let status = if results.iter().all(OptResult::passed) {
        Status::Ok
    } else {
        Status::BoundViolation
    };
    let output = match format {
        Format::Json => Output::Json(serde_json::json!({
            "tolerance": OPTIMIZATION_TOLERANCE,
            "results": json(&results),
        })),
        Format::Csv => Output::Csv(optimize_csv(&results)?),
    };
    Ok(Produced {
        output,
        status,
        seed: None,
    })
}

fn optimize_csv(results: &[OptResult]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "objective_id",
        "mode",
        "value",
        "argpoint_u",
        "argpoint_v",
        "grid_resolution",
        "refine_iterations",
        "paper_value",
        "gap",
    ])?;
    for r in results {
        w.write_record([
            r.objective_id.name().to_string(),
            format!("{:?}", r.mode).to_lowercase(),
            format_g17(r.value),
            format_g17(r.argpoint.0),
            format_g17(r.argpoint.1),
            r.grid_resolution.to_string(),
            r.refine_iterations.to_string(),
            format_rational(&r.paper_value),
            format_g17(r.gap),
        ])?;
    }
    finish_csv(w)
}

fn cmd_sample(configs: &[SampleConfig], format: Format) -> Result<Produced, Failure> {
    let reports = configs
        .iter()
        .map(sample_and_check)
        .collect::<Result<Vec<SampleReport>, _>>()?;
    let status = if reports.iter().all(SampleReport::passed) {
        Status::Ok
    } else {
        Status::BoundViolation
    };
    let seed = configs.first().map(|c| c.seed);
    let output = match format {
        Format::Json => Output::Json(serde_json::json!({ "reports": json(&reports) })),
        Format::Csv => Output::Csv(sample_csv(&reports)?),
    };
    Ok(Produced {
        output,
        status,
        seed,
    })
}

fn sample_csv(reports: &[SampleReport]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["name", "empirical_min", "empirical_max", "bound", "margin"])?;
    for report in reports {
        for stat in &report.functionals {
            let bound = stat
                .bound
                .as_ref()
                .map_or(String::new(), |e| match &e.lower {
                    Some(lower) => format!(
                        "[{},{}]",
                        format_rational(&lower.value),
                        format_rational(&e.upper.value)
                    ),
                    None => format_rational(&e.upper.value),
                });
            w.write_record([
                format!("{}/{}", report.class, stat.name),
                format_g17(stat.empirical_min),
                format_g17(stat.empirical_max),
                bound,
                stat.margin.map_or(String::new(), format_g17),
            ])?;
        }
    }
    finish_csv(w)
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String, Failure> {
    let bytes = w
        .into_inner()
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn format_rational(r: &num_rational::Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `%.17g`: 17 significant digits, trailing zeros removed, exponent form
/// outside `1e-4 <= |x| < 1e17`.
pub fn format_g17(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    const P: i32 = 17;
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..P).contains(&exp) {
        let fixed = format!("{:.*}", (P - 1 - exp) as usize, x);
        trim_fraction(&fixed).to_string()
    } else {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Pretty JSON with two-space indentation and `%.17g` floats.
pub fn render_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, 0, &mut out);
    out.push('\n');
    out
}

fn render_envelope(envelope: &OutputEnvelope) -> String {
    render_json(&json(envelope))
}

fn write_value(value: &Value, indent: usize, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_g17(n.as_f64().expect("f64 number")));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // flat arrays of scalars stay on one line
            if items.iter().all(|v| !v.is_array() && !v.is_object()) {
                out.push('[');
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(v, indent, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, v) in items.iter().enumerate() {
                push_indent(indent + 1, out);
                write_value(v, indent + 1, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            push_indent(indent, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, v)) in map.iter().enumerate() {
                push_indent(indent + 1, out);
                out.push_str(&serde_json::to_string(k).expect("key serializes"));
                out.push_str(": ");
                write_value(v, indent + 1, out);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            push_indent(indent, out);
            out.push('}');
        }
    }
}

fn push_indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("  ");
    }
}
