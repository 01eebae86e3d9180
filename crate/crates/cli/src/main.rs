use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use pentagon_core::certify::{
    a_gate_constraints, certify_gate, heisenberg_constraints, scan, scan_serial, AxisRange,
    GateDescriptor, GateFamily, ScanGrid, DEFAULT_SCAN_TOL,
};
use pentagon_core::circuit::{
    circuit_phase_distance, matrix_from_value, Circuit, GateInstance, GateKind,
};
use pentagon_core::gates::{AGateParams, HeisenbergParams};
use pentagon_core::rewrite::{rewrite, FusionGateDescriptor, Rule};
use pentagon_core::{ComplexMatrix, Error, DEFAULT_TOL};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_NEGATIVE: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "pentagon",
    version,
    about = "Fusion-operator certification and pentagon rewriting for quantum circuits"
)]
struct Cli {
    /// Suppress diagnostics on stderr (reports still go to stdout).
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify a two-qubit gate against the pentagon equation.
    Certify(CertifyArgs),
    /// Entrywise pentagon residuals for an A-gate or Heisenberg point.
    Constraints(ConstraintsArgs),
    /// Grid scan of a gate family for pentagon solutions.
    Scan(ScanArgs),
    /// Compress or expand pentagon templates in a circuit.
    Transpile(TranspileArgs),
    /// Check two circuits for equality up to global phase.
    Verify(VerifyArgs),
    /// Route non-adjacent two-qubit gates onto a line with SWAPs.
    Route(RouteArgs),
    /// Print gate count, depth and locality counts.
    Stats(StatsArgs),
}

#[derive(Args, Debug)]
struct CertifyArgs {
    /// Built-in gate name (e.g. CNOT, SWAP, A, HEIS) or `custom`.
    #[arg(long)]
    gate: Option<String>,
    /// Comma-separated gate parameters.
    #[arg(long, allow_hyphen_values = true)]
    params: Option<String>,
    /// JSON file holding a 4x4 matrix of [re, im] pairs.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct ConstraintsArgs {
    /// `a` or `heis`.
    #[arg(long)]
    family: String,
    /// Comma-separated parameter triple.
    #[arg(long, allow_hyphen_values = true)]
    params: String,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// `a` or `heis`.
    #[arg(long)]
    family: String,
    /// Inclusive range `lo:hi`, applied to all three parameters.
    #[arg(long, allow_hyphen_values = true)]
    range: String,
    #[arg(long)]
    step: f64,
    #[arg(long, default_value_t = DEFAULT_SCAN_TOL)]
    tol: f64,
    /// Run on the calling thread only.
    #[arg(long)]
    serial: bool,
}

#[derive(Args, Debug)]
struct TranspileArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "out")]
    output: PathBuf,
    /// `compress` or `expand`.
    #[arg(long)]
    rule: String,
    /// Built-in gate name, or `@file.json` with a custom 4x4 matrix.
    #[arg(long)]
    fusion_gate: String,
    #[arg(long, allow_hyphen_values = true)]
    fusion_params: Option<String>,
    /// Repeat passes until no site is found.
    #[arg(long)]
    fixed_point: bool,
    /// Skip the full-unitary equivalence check.
    #[arg(long)]
    no_verify: bool,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct RouteArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "out")]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[arg(long = "in")]
    input: PathBuf,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::VerificationFailed { .. } => EXIT_NEGATIVE,
            _ => EXIT_INVALID,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

struct Ctx {
    quiet: bool,
}

impl Ctx {
    fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let ctx = Ctx { quiet: cli.quiet };
    let result = match cli.command {
        Command::Certify(a) => cmd_certify(&ctx, a),
        Command::Constraints(a) => cmd_constraints(a),
        Command::Scan(a) => cmd_scan(&ctx, a),
        Command::Transpile(a) => cmd_transpile(&ctx, a),
        Command::Verify(a) => cmd_verify(a),
        Command::Route(a) => cmd_route(&ctx, a),
        Command::Stats(a) => cmd_stats(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(v: &Value) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(v).expect("JSON values serialize")
    );
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Failure::usage(format!(
            "--tol must be a positive number, got {tol}"
        )))
    }
}

fn parse_list(s: &str, flag: &str) -> Result<Vec<f64>, Failure> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Failure::usage(format!("{flag}: '{x}' is not a finite number")))
        })
        .collect()
}

fn parse_triple(s: &str, flag: &str) -> Result<[f64; 3], Failure> {
    let v = parse_list(s, flag)?;
    <[f64; 3]>::try_from(v.as_slice()).map_err(|_| {
        Failure::usage(format!(
            "{flag} takes exactly three values, got {}",
            v.len()
        ))
    })
}

fn parse_family(s: &str) -> Result<GateFamily, Failure> {
    s.parse::<GateFamily>()
        .map_err(|_| Failure::usage(format!("unknown family '{s}' (expected a or heis)")))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn read_circuit(path: &Path) -> Result<Circuit, Failure> {
    Circuit::parse(&read_text(path)?)
        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

/// A bare matrix, or an object with a `matrix` field.
fn read_matrix(path: &Path) -> Result<ComplexMatrix, Failure> {
    let text = read_text(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| {
        Failure::from(Error::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    })?;
    let (m, at) = match value.get("matrix") {
        Some(m) => (m, "$.matrix"),
        None => (&value, "$"),
    };
    Ok(matrix_from_value(m, at)?)
}

fn resolve_kind(name: &str) -> Result<GateKind, Failure> {
    GateKind::from_name(name)
        .or_else(|_| GateKind::from_name(&name.to_uppercase()))
        .map_err(|e| Failure::invalid(e.to_string()))
}

/// Writes through a sibling temp file so the target is never half-written.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Failure::usage(format!("{}: not a file path", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let io = |e: std::io::Error| Failure::invalid(format!("{}: {e}", path.display()));
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

fn cmd_certify(ctx: &Ctx, a: CertifyArgs) -> CmdResult {
    check_tol(a.tol)?;
    let params = a
        .params
        .as_deref()
        .map(|p| parse_list(p, "--params"))
        .transpose()?
        .unwrap_or_default();
    let custom = a
        .gate
        .as_deref()
        .is_none_or(|g| g.eq_ignore_ascii_case("custom"));
    let (desc, matrix) = match (custom, &a.matrix) {
        (true, Some(path)) => {
            if !params.is_empty() {
                return Err(Failure::usage("--params does not apply to a custom matrix"));
            }
            (GateDescriptor::custom(), read_matrix(path)?)
        }
        (true, None) => return Err(Failure::usage("give --gate NAME or --matrix FILE")),
        (false, Some(_)) => return Err(Failure::usage("--matrix only applies to --gate custom")),
        (false, None) => {
            let kind = resolve_kind(a.gate.as_deref().expect("named gate"))?;
            let gate = GateInstance::new(kind, vec![0, 1], params.clone())?;
            (GateDescriptor::new(kind.name(), params), gate.matrix())
        }
    };
    let report = certify_gate(desc, &matrix, 2, a.tol)?;
    ctx.note(format!(
        "pentagon residual {:.6e} (tol {:.1e})",
        report.residual, a.tol
    ));
    emit(&to_value(&report));
    Ok(if report.is_fusion() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn cmd_constraints(a: ConstraintsArgs) -> CmdResult {
    check_tol(a.tol)?;
    let family = parse_family(&a.family)?;
    let [x, y, z] = parse_triple(&a.params, "--params")?;
    let report = match family {
        GateFamily::AGate => a_gate_constraints(AGateParams::new(x, y, z), a.tol),
        GateFamily::Heisenberg => heisenberg_constraints(HeisenbergParams::new(x, y, z), a.tol),
    };
    emit(&to_value(&report));
    Ok(if report.active_count == 0 {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn parse_range(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::usage(format!("--range must look like lo:hi, got '{s}'"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

fn cmd_scan(ctx: &Ctx, a: ScanArgs) -> CmdResult {
    check_tol(a.tol)?;
    let family = parse_family(&a.family)?;
    let (lo, hi) = parse_range(&a.range)?;
    let axis = AxisRange::new(lo, hi, a.step).map_err(|e| Failure::usage(e.to_string()))?;
    let grid = ScanGrid::uniform(axis);
    let started = Instant::now();
    let solutions = if a.serial {
        scan_serial(family, &grid, a.tol)?
    } else {
        scan(family, &grid, a.tol)?
    };
    ctx.note(format!(
        "scanned {} grid points in {:.3} s, {} solution class(es)",
        grid.len(),
        started.elapsed().as_secs_f64(),
        solutions.len()
    ));
    emit(&json!({
        "family": family,
        "grid": grid,
        "grid_size": grid.len(),
        "tolerance": a.tol,
        "solutions": solutions,
    }));
    Ok(EXIT_OK)
}

fn resolve_fusion_gate(
    spec: &str,
    params: Option<&str>,
    tol: f64,
) -> Result<FusionGateDescriptor, Failure> {
    let params = params
        .map(|p| parse_list(p, "--fusion-params"))
        .transpose()?;
    let gate = if let Some(path) = spec.strip_prefix('@') {
        if params.is_some() {
            return Err(Failure::usage(
                "--fusion-params does not apply to a matrix file",
            ));
        }
        GateInstance::custom(read_matrix(Path::new(path))?, vec![0, 1])?
    } else {
        GateInstance::new(resolve_kind(spec)?, vec![0, 1], params.unwrap_or_default())?
    };
    FusionGateDescriptor::new(gate, tol).map_err(|e| match e {
        Error::NotFusion { residual, .. } => Failure::invalid(format!(
            "fusion gate {spec} is not certified: pentagon residual {residual:.6e} >= {tol:.1e}"
        )),
        other => other.into(),
    })
}

fn cmd_transpile(ctx: &Ctx, a: TranspileArgs) -> CmdResult {
    check_tol(a.tol)?;
    let rule: Rule = a
        .rule
        .parse()
        .map_err(|e: Error| Failure::usage(e.to_string()))?;
    let circuit = read_circuit(&a.input)?;
    let t = resolve_fusion_gate(&a.fusion_gate, a.fusion_params.as_deref(), a.tol)?;
    ctx.note(format!(
        "fusion gate {} certified, pentagon residual {:.3e}",
        a.fusion_gate,
        t.certification().residual
    ));
    let (out, report) = rewrite(&circuit, &t, rule, !a.no_verify, a.fixed_point, a.tol)?;
    write_atomic(&a.output, &out.to_json())?;
    ctx.note(format!(
        "{} site(s) rewritten: {} -> {} gates, depth {} -> {}",
        report.sites_rewritten,
        report.gate_count_before,
        report.gate_count_after,
        report.depth_before,
        report.depth_after
    ));
    emit(&to_value(&report));
    Ok(EXIT_OK)
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    check_tol(a.tol)?;
    let (ca, cb) = (read_circuit(&a.a)?, read_circuit(&a.b)?);
    let d = circuit_phase_distance(&ca, &cb)?;
    let equivalent = d < a.tol;
    emit(&json!({
        "equivalent": equivalent,
        "phase_distance": d,
        "tolerance": a.tol,
    }));
    Ok(if equivalent { EXIT_OK } else { EXIT_NEGATIVE })
}

fn cmd_route(ctx: &Ctx, a: RouteArgs) -> CmdResult {
    let c = read_circuit(&a.input)?;
    let routed = c.route_line();
    write_atomic(&a.output, &routed.to_json())?;
    let (before, after) = (c.stats(), routed.stats());
    ctx.note(format!(
        "routed {} non-local gate(s), {} SWAP(s) inserted",
        before.nonlocal_count,
        after.gate_count - before.gate_count
    ));
    emit(&json!({ "before": before, "after": after }));
    Ok(EXIT_OK)
}

fn cmd_stats(a: StatsArgs) -> CmdResult {
    let c = read_circuit(&a.input)?;
    emit(&to_value(&c.stats()));
    Ok(EXIT_OK)
}
