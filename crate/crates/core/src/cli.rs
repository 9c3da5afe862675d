//! Command-line front-end: parses spec files, dispatches to the engine and
//! emits a deterministic report (`"schema": 1`) on standard output.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::classify::{classify, decide_iso, detect_blocks, ClassifyError, IsoResult};
use crate::lattice::Lattice;
use crate::psi::{support_lattice, PsiError, PsiSpec, SupportLattice};
use crate::realizer::{
    count_components, degree_box, twisted_count_components, Realization, RealizerError,
    RealizerOptions, DEFAULT_CAP, DEFAULT_RADIUS,
};
use crate::twisted::{
    check_complete_reducibility, decide_twisted_iso, twisted_classify, TwistedError, TwistedIsoResult, TwistedSpec,
};

pub const SCHEMA: u64 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_SATISFIED: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_STRUCTURAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "multiloop", version, about = "Classify finite-dimensional modules over multiloop algebras")]
pub struct Cli {
    /// Degree-box radius used by `verify`.
    #[arg(long = "box", global = true, default_value_t = DEFAULT_RADIUS, value_name = "R")]
    pub radius: i64,
    /// Dimension cap for the brute-force realizer.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP, value_name = "D")]
    pub cap: usize,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Support lattice of the weight functional.
    Support { spec: PathBuf },
    /// Full classification descriptor.
    Classify { spec: PathBuf },
    /// Block structure of the evaluation data.
    Blocks { spec: PathBuf },
    /// Decide isomorphism of two modules.
    Iso { first: PathBuf, second: PathBuf },
    /// Classify a twisted module.
    TwistedClassify { spec: PathBuf },
    /// Decide isomorphism of two twisted modules.
    TwistedIso { first: PathBuf, second: PathBuf },
    /// Complete-reducibility check for a twisted spec.
    Reducibility { spec: PathBuf },
    /// Cross-check the classifier against the brute-force realizer.
    Verify { spec: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Support { .. } => "support",
            Command::Classify { .. } => "classify",
            Command::Blocks { .. } => "blocks",
            Command::Iso { .. } => "iso",
            Command::TwistedClassify { .. } => "twisted-classify",
            Command::TwistedIso { .. } => "twisted-iso",
            Command::Reducibility { .. } => "reducibility",
            Command::Verify { .. } => "verify",
        }
    }

    fn inputs(&self) -> Vec<&PathBuf> {
        match self {
            Command::Iso { first, second } | Command::TwistedIso { first, second } => {
                vec![first, second]
            }
            Command::Support { spec }
            | Command::Classify { spec }
            | Command::Blocks { spec }
            | Command::TwistedClassify { spec }
            | Command::Reducibility { spec }
            | Command::Verify { spec } => vec![spec],
        }
    }
}

/// A typed failure with its exit code.
#[derive(Debug, Clone)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    fn malformed(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_MALFORMED,
            kind: "MalformedInput",
            message: message.into(),
        }
    }
}

impl From<PsiError> for Failure {
    fn from(e: PsiError) -> Self {
        let kind = match &e {
            PsiError::TrivialModule => "TrivialModule",
            PsiError::NoPeriodWithinBound { .. } => "NoPeriodWithinBound",
            PsiError::SupportNotSubgroup { .. } => "SupportNotSubgroup",
            PsiError::Input(_) | PsiError::Lie(_) | PsiError::Scalar(_) => "MalformedInput",
        };
        let code = if e.is_structural() {
            EXIT_STRUCTURAL
        } else {
            EXIT_MALFORMED
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Psi(p) => p.into(),
            ClassifyError::StructureViolation(_) => Failure {
                code: EXIT_STRUCTURAL,
                kind: "StructureViolation",
                message: e.to_string(),
            },
        }
    }
}

impl From<TwistedError> for Failure {
    fn from(e: TwistedError) -> Self {
        match e {
            TwistedError::Psi(p) => p.into(),
            TwistedError::StructureViolation(_) => Failure {
                code: EXIT_STRUCTURAL,
                kind: "StructureViolation",
                message: e.to_string(),
            },
            TwistedError::ImageMismatch => Failure {
                code: EXIT_NOT_SATISFIED,
                kind: "ImageMismatch",
                message: e.to_string(),
            },
        }
    }
}

impl From<RealizerError> for Failure {
    fn from(e: RealizerError) -> Self {
        let kind = match &e {
            RealizerError::CapExceeded { .. } => "CapExceeded",
            RealizerError::Lie(_) => "MalformedInput",
            RealizerError::Internal(_) => "Internal",
        };
        Failure {
            code: EXIT_MALFORMED,
            kind,
            message: e.to_string(),
        }
    }
}

/// Outcome of one subcommand: exit code, result payload, diagnostics.
struct Outcome {
    code: i32,
    result: Value,
    diagnostics: Vec<Value>,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Outcome {
            code: EXIT_OK,
            result,
            diagnostics: Vec::new(),
        }
    }
}

fn diagnostic(level: &str, kind: &str, message: impl Into<String>) -> Value {
    json!({"level": level, "kind": kind, "message": message.into()})
}

struct Input {
    path: PathBuf,
    text: String,
    digest: String,
}

fn read_input(path: &PathBuf) -> Result<Input, Failure> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::malformed(format!("cannot read {}: {e}", path.display())))?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes)
        .map_err(|_| Failure::malformed(format!("{} is not UTF-8", path.display())))?;
    Ok(Input {
        path: path.clone(),
        text,
        digest,
    })
}

fn parse_value(input: &Input) -> Result<Value, Failure> {
    serde_json::from_str(&input.text)
        .map_err(|e| Failure::malformed(format!("{}: invalid JSON: {e}", input.path.display())))
}

fn parse_untwisted(input: &Input) -> Result<PsiSpec, Failure> {
    let v = parse_value(input)?;
    if v.get("aut").is_some() {
        return Err(Failure::malformed(format!(
            "{}: twisted spec given to an untwisted subcommand",
            input.path.display()
        )));
    }
    Ok(PsiSpec::from_json(&v)?)
}

fn parse_twisted(input: &Input) -> Result<TwistedSpec, Failure> {
    let v = parse_value(input)?;
    if v.get("aut").is_none() {
        return Err(Failure::malformed(format!(
            "{}: missing \"aut\" object",
            input.path.display()
        )));
    }
    Ok(TwistedSpec::from_json(&v)?)
}

fn lattice_json(l: &Lattice) -> Value {
    json!({"n": l.n(), "basis": l.basis(), "ordering": l.ordering()})
}

fn support_json(s: &SupportLattice) -> Value {
    json!({"lattice": lattice_json(&s.lattice), "periods": s.periods, "index": s.index})
}

fn degree_key(m: &[i64]) -> String {
    let parts: Vec<String> = m.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

fn verify_untwisted(spec: &PsiSpec, radius: i64, options: RealizerOptions) -> Result<Outcome, Failure> {
    let desc = classify(spec)?;
    let report = count_components(spec, radius, options)?;
    let r = Realization::new(spec, options)?;
    let comp = r.component(&vec![0; spec.n()], radius);
    let hw = comp.highest_weight_support(r.dim(), r.field());
    let mut table = Vec::new();
    let mut hw_ok = true;
    let mut full_on_gamma = true;
    for m in degree_box(spec.n(), radius) {
        let in_gamma = desc.gamma.contains(&m);
        let dim = comp.fiber_dim(&m);
        let hw_here = hw.contains(&m);
        hw_ok &= hw_here == in_gamma;
        full_on_gamma &= (dim == r.dim()) == in_gamma;
        let per_component: Vec<usize> = report.components.iter().map(|c| c.fiber_dim(&m)).collect();
        table.push(json!({
            "degree": m,
            "in_gamma": in_gamma,
            "fiber_dim": dim,
            "highest_weight_line": hw_here,
            "component_dims": per_component,
        }));
    }
    let count_ok = report.count() as u64 == desc.p;
    let pass = count_ok && hw_ok && report.disjoint && report.exhaustive;
    let mut diagnostics = Vec::new();
    if !full_on_gamma {
        diagnostics.push(diagnostic(
            "info",
            "PartialFibers",
            "fibers of the v(0) component are not all full-dimensional on Gamma; \
             membership of the highest-weight line is the exact support test",
        ));
    }
    if !pass {
        diagnostics.push(diagnostic("error", "VerificationMismatch", "realizer disagrees with the classifier"));
    }
    Ok(Outcome {
        code: if pass { EXIT_OK } else { EXIT_NOT_SATISFIED },
        result: json!({
            "mode": "untwisted",
            "radius": radius,
            "module_dim": r.dim(),
            "p": desc.p,
            "gamma": support_json(&desc.gamma),
            "components": report.count(),
            "component_starts": report.starts,
            "checks": {
                "component_count_equals_p": count_ok,
                "highest_weight_support_equals_gamma": hw_ok,
                "components_disjoint": report.disjoint,
                "dimension_conservation": report.exhaustive,
                "fibers_full_exactly_on_gamma": full_on_gamma,
            },
            "table": table,
            "pass": pass,
        }),
        diagnostics,
    })
}

fn verify_twisted(spec: &TwistedSpec, radius: i64, options: RealizerOptions) -> Result<Outcome, Failure> {
    let desc = twisted_classify(spec)?;
    let report = twisted_count_components(spec, radius, options)?;
    // The first start degree is the origin, so the first component is v(0)'s.
    let tw = &report.components[0];
    let un = Realization::new(spec.base(), options)?;
    let un_comp = un.component(&vec![0; spec.base().n()], radius);
    let hw = tw.highest_weight_support(un.dim(), un.field());
    let mut table = Vec::new();
    let mut hw_ok = true;
    let mut contained = true;
    for m in degree_box(spec.base().n(), radius) {
        let in_gamma_mu = desc.gamma_mu.contains(&m);
        let hw_here = hw.contains(&m);
        hw_ok &= hw_here == in_gamma_mu;
        if let Some(f) = tw.fibers.get(&m) {
            contained &= f.rows().all(|row| un_comp.contains(&m, row));
        }
        table.push(json!({
            "degree": m,
            "in_gamma_mu": in_gamma_mu,
            "twisted_fiber_dim": tw.fiber_dim(&m),
            "untwisted_fiber_dim": un_comp.fiber_dim(&m),
            "highest_weight_line": hw_here,
        }));
    }
    let pass = hw_ok && contained && report.disjoint;
    let mut diagnostics = Vec::new();
    if !pass {
        diagnostics.push(diagnostic("error", "VerificationMismatch", "realizer disagrees with the classifier"));
    }
    Ok(Outcome {
        code: if pass { EXIT_OK } else { EXIT_NOT_SATISFIED },
        result: json!({
            "mode": "twisted",
            "radius": radius,
            "module_dim": un.dim(),
            "type": desc.kind.as_str(),
            "gamma_mu": support_json(&desc.gamma_mu),
            "components": report.count(),
            "component_starts": report.starts,
            "checks": {
                "highest_weight_support_equals_gamma_mu": hw_ok,
                "contained_in_untwisted": contained,
                "components_disjoint": report.disjoint,
                "dimension_conservation": report.exhaustive,
            },
            "table": table,
            "pass": pass,
        }),
        diagnostics,
    })
}

fn dispatch(cli: &Cli, inputs: &[Input]) -> Result<Outcome, Failure> {
    let options = RealizerOptions {
        cap: cli.cap,
        ..RealizerOptions::default()
    };
    if cli.radius < 0 {
        return Err(Failure::malformed("--box must be non-negative"));
    }
    match &cli.command {
        Command::Support { .. } => {
            let spec = parse_untwisted(&inputs[0])?;
            Ok(Outcome::ok(support_json(&support_lattice(&spec)?)))
        }
        Command::Classify { .. } => {
            let spec = parse_untwisted(&inputs[0])?;
            Ok(Outcome::ok(classify(&spec)?.to_json()))
        }
        Command::Blocks { .. } => {
            let spec = parse_untwisted(&inputs[0])?;
            let gamma = support_lattice(&spec)?;
            Ok(Outcome::ok(detect_blocks(&spec, &gamma)?.to_json()))
        }
        Command::Iso { .. } => {
            let d1 = classify(&parse_untwisted(&inputs[0])?)?;
            let d2 = classify(&parse_untwisted(&inputs[1])?)?;
            let res = decide_iso(&d1, &d2)?;
            let code = match res {
                IsoResult::Witness(_) => EXIT_OK,
                IsoResult::NotSatisfied { .. } => EXIT_NOT_SATISFIED,
            };
            Ok(Outcome {
                code,
                result: res.to_json(),
                diagnostics: Vec::new(),
            })
        }
        Command::TwistedClassify { .. } => {
            let spec = parse_twisted(&inputs[0])?;
            Ok(Outcome::ok(twisted_classify(&spec)?.to_json()))
        }
        Command::TwistedIso { .. } => {
            let d1 = twisted_classify(&parse_twisted(&inputs[0])?)?;
            let d2 = twisted_classify(&parse_twisted(&inputs[1])?)?;
            let res = decide_twisted_iso(&d1, &d2)?;
            let code = match res {
                TwistedIsoResult::Witness(_) => EXIT_OK,
                TwistedIsoResult::NotSatisfied { .. } => EXIT_NOT_SATISFIED,
            };
            Ok(Outcome {
                code,
                result: res.to_json(),
                diagnostics: Vec::new(),
            })
        }
        Command::Reducibility { .. } => {
            let spec = parse_twisted(&inputs[0])?;
            let (reducible, reason) = check_complete_reducibility(&spec)?;
            Ok(Outcome {
                code: if reducible { EXIT_OK } else { EXIT_NOT_SATISFIED },
                result: json!({"completely_reducible": reducible, "reason": reason}),
                diagnostics: Vec::new(),
            })
        }
        Command::Verify { .. } => {
            let v = parse_value(&inputs[0])?;
            if v.get("aut").is_some() {
                verify_twisted(&TwistedSpec::from_json(&v)?, cli.radius, options)
            } else {
                verify_untwisted(&PsiSpec::from_json(&v)?, cli.radius, options)
            }
        }
    }
}

/// Runs a parsed command; returns the exit code and the rendered report.
pub fn execute(cli: &Cli) -> (i32, String) {
    let paths = cli.command.inputs();
    let mut inputs = Vec::new();
    let mut failure = None;
    for p in &paths {
        match read_input(p) {
            Ok(i) => inputs.push(i),
            Err(f) => {
                failure = Some(f);
                break;
            }
        }
    }
    let outcome = match failure {
        Some(f) => Err(f),
        None => dispatch(cli, &inputs),
    };
    let (code, result, diagnostics) = match outcome {
        Ok(o) => (o.code, o.result, o.diagnostics),
        Err(f) => (
            f.code,
            Value::Null,
            vec![diagnostic("error", f.kind, f.message)],
        ),
    };
    let report = json!({
        "schema": SCHEMA,
        "command": {
            "subcommand": cli.command.name(),
            "inputs": paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "box": cli.radius,
            "cap": cli.cap,
        },
        "input_digest": inputs.iter().map(|i| format!("sha256:{}", i.digest)).collect::<Vec<_>>(),
        "exit_code": code,
        "result": result,
        "diagnostics": diagnostics,
    });
    let text = match cli.output {
        OutputFormat::Json => serde_json::to_string_pretty(&report).expect("report serializes"),
        OutputFormat::Text => render_text(&report),
    };
    (code, text)
}

fn render_text(report: &Value) -> String {
    let mut out = String::new();
    let cmd = &report["command"];
    out.push_str(&format!("command: {}\n", cmd["subcommand"].as_str().unwrap_or("")));
    if let Some(ds) = report["input_digest"].as_array() {
        for d in ds {
            out.push_str(&format!("input: {}\n", d.as_str().unwrap_or("")));
        }
    }
    out.push_str(&format!("exit code: {}\n", report["exit_code"]));
    render_value(&mut out, "result", &report["result"], 0);
    if let Some(ds) = report["diagnostics"].as_array() {
        for d in ds {
            out.push_str(&format!(
                "{}: {}: {}\n",
                d["level"].as_str().unwrap_or(""),
                d["kind"].as_str().unwrap_or(""),
                d["message"].as_str().unwrap_or("")
            ));
        }
    }
    out
}

fn render_value(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (k, x) in map {
                render_value(out, k, x, depth + 1);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object()) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (i, x) in items.iter().enumerate() {
                if let (Some(m), true) = (x.get("degree"), x.is_object()) {
                    let degree: Vec<i64> = m
                        .as_array()
                        .map(|a| a.iter().filter_map(Value::as_i64).collect())
                        .unwrap_or_default();
                    render_value(out, &degree_key(&degree), x, depth + 1);
                } else {
                    render_value(out, &format!("[{i}]"), x, depth + 1);
                }
            }
        }
        other => out.push_str(&format!("{pad}{key}: {other}\n")),
    }
}

/// Parses `argv` and runs; usage errors exit with code 2.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (code, text) = execute(&cli);
    println!("{text}");
    code
}
