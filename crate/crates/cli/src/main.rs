//! Command-line driver for the graded-superalgebra engine: builds models,
//! runs the verification sweeps, and exports structure constants and
//! spectra as deterministic machine-readable reports.
//!
//! All verification output goes to stdout as JSON and is byte-identical
//! across repeated runs and thread counts; wall-clock timing per phase is
//! printed to stderr so it never perturbs the report bytes. Exit codes:
//! 0 = everything passed, 1 = a verification failure, 2 = usage error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gradedsusy_core::{
    build_cl2n, build_cl2nm2, build_cl6b, build_gamma, build_graded_oscillator, build_ladder,
    build_realization, eval_model, excited_levels, extract_cl6b_constants, verify_clifford,
    verify_oscillator, verify_realization, BetaPoly, BracketKind, BracketTable, CliffordError,
    GradedError, GradedModel, ModelKind, Rational, Scalar, ScqmError, SpectrumError,
};

#[derive(Parser)]
#[command(
    name = "gradedsusy",
    about = "Exact construction and verification of higher-graded extensions of superconformal mechanics",
    version
)]
struct Cli {
    /// Worker threads for the parallel sweeps (default: GRADEDSUSY_THREADS
    /// environment variable, then the logical core count).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print one Hermitian gamma matrix of Cl(2m), or verify the family.
    Gamma {
        /// Number of generator pairs; the representation acts on 2^m states.
        #[arg(long)]
        m: usize,
        /// Generator index, 1-based up to 2m. Required unless --verify.
        #[arg(long)]
        j: Option<usize>,
        /// Check every anticommutator and Hermiticity; print a JSON report.
        #[arg(long)]
        verify: bool,
    },
    /// Build a graded model and serialize it as JSON.
    Model {
        #[command(subcommand)]
        command: ModelCommand,
    },
    /// Run one verification pass against a serialized model file.
    Verify {
        #[command(subcommand)]
        command: VerifyCommand,
    },
    /// Build a model fresh and run the full verification sweep.
    VerifyAll {
        #[arg(long, value_enum)]
        kind: PresetKind,
        /// Construction rank. Defaults to 3; ranks other than 3 build the
        /// general-rank tensor model and run closure and Jacobi only.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Export the bracket table in the reference normalization; for cl6b
    /// also the four-index constant families.
    StructureConstants {
        #[arg(long, value_enum)]
        kind: PresetKind,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Superconformal realization commands.
    Scqm {
        #[command(subcommand)]
        command: ScqmCommand,
    },
    /// Exact spectrum of a graded model at a rational coupling > 1.
    Spectrum {
        #[arg(long, value_enum)]
        kind: SpectrumKind,
        /// Coupling constant as an exact rational, e.g. 2 or 3/2.
        #[arg(long)]
        beta: String,
        /// Highest excited level to generate (level 0 is the ground space).
        #[arg(long, default_value_t = 4)]
        levels: usize,
        /// Write the spectrum report to this file instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ModelCommand {
    /// Construct the graded algebra from a superalgebra realization.
    Build {
        #[arg(long, value_enum)]
        kind: BuildKind,
        /// Grading rank: degrees live in (Z_2)^n.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Realization of the underlying superalgebra.
        #[arg(long, default_value = "osp12")]
        algebra: String,
        /// Write the model JSON to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Every bracket decomposes exactly over its degree slice.
    Closure {
        #[arg(long)]
        model: PathBuf,
    },
    /// Graded Jacobi identity over all generator triples.
    Jacobi {
        #[arg(long)]
        model: PathBuf,
    },
    /// Hermiticity of every generator.
    Hermiticity {
        #[arg(long)]
        model: PathBuf,
    },
    /// Grading-involution conditions of the model's realization.
    Gamma {
        #[arg(long)]
        model: PathBuf,
    },
}

#[derive(Subcommand)]
enum ScqmCommand {
    /// Build the realization, check its defining relations and adjoints.
    Build {
        #[arg(long, value_enum)]
        kind: PresetKind,
    },
    /// Verify the ladder-operator identities with the coupling kept formal.
    VerifyOscillator {
        #[arg(long, value_enum)]
        kind: PresetKind,
    },
}

/// Ready-made model presets. `cl4` is the rank-3 `cl2nm2` construction
/// (its Clifford factor is Cl(4)).
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PresetKind {
    Cl4,
    Cl2n,
    Cl6b,
}

impl PresetKind {
    fn resolve(self) -> (ModelKind, usize) {
        match self {
            PresetKind::Cl4 => (ModelKind::Cl2nm2, 3),
            PresetKind::Cl2n => (ModelKind::Cl2n, 3),
            PresetKind::Cl6b => (ModelKind::Cl6b, 3),
        }
    }

    fn name(self) -> &'static str {
        match self {
            PresetKind::Cl4 => "cl4",
            PresetKind::Cl2n => "cl2n",
            PresetKind::Cl6b => "cl6b",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BuildKind {
    Cl2nm2,
    Cl2n,
    Cl6b,
}

impl From<BuildKind> for ModelKind {
    fn from(kind: BuildKind) -> ModelKind {
        match kind {
            BuildKind::Cl2nm2 => ModelKind::Cl2nm2,
            BuildKind::Cl2n => ModelKind::Cl2n,
            BuildKind::Cl6b => ModelKind::Cl6b,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpectrumKind {
    Cl4,
    Cl6b,
}

impl SpectrumKind {
    fn resolve(self) -> (ModelKind, usize) {
        match self {
            SpectrumKind::Cl4 => (ModelKind::Cl2nm2, 3),
            SpectrumKind::Cl6b => (ModelKind::Cl6b, 3),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// CLI failure split by exit code: usage errors exit 2, verification or
/// runtime failures exit 1.
enum CliError {
    Usage(String),
    Failure(String),
}

fn usage(msg: impl ToString) -> CliError {
    CliError::Usage(msg.to_string())
}

fn failure(msg: impl ToString) -> CliError {
    CliError::Failure(msg.to_string())
}

fn graded_err(e: GradedError) -> CliError {
    match e {
        GradedError::BadRank(_) | GradedError::BadGreekIndex(_) => usage(e),
        _ => failure(e),
    }
}

fn scqm_err(e: ScqmError) -> CliError {
    match e {
        ScqmError::UnknownAlgebra(_) | ScqmError::BadRankForKind { .. } => usage(e),
        ScqmError::Graded(inner) => graded_err(inner),
        other => failure(other),
    }
}

fn spectrum_err(e: SpectrumError) -> CliError {
    match e {
        SpectrumError::CouplingOutOfRange(_) => usage(e),
        SpectrumError::Scqm(inner) => scqm_err(inner),
        other => failure(other),
    }
}

fn clifford_err(e: CliffordError) -> CliError {
    usage(e)
}

/// Run a phase and report its wall-clock time on stderr only, keeping the
/// stdout report bytes independent of timing.
fn timed<T>(label: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    eprintln!("# {}: {:.3}s", label, start.elapsed().as_secs_f64());
    out
}

#[derive(Serialize)]
struct ModelMeta {
    kind: String,
    n: usize,
    algebra: String,
    dim: usize,
    generators: usize,
}

impl ModelMeta {
    fn of<S: Scalar>(model: &GradedModel<S>) -> Self {
        ModelMeta {
            kind: model.kind.to_string(),
            n: model.n,
            algebra: model.algebra.clone(),
            dim: model.dim,
            generators: model.basis.len(),
        }
    }
}

#[derive(Serialize)]
struct CheckLine {
    name: String,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    details: Option<String>,
}

impl CheckLine {
    fn new(name: impl ToString, pass: bool, details: Option<String>) -> Self {
        CheckLine { name: name.to_string(), status: status_of(pass), details }
    }

    fn computed(name: impl ToString, details: impl ToString) -> Self {
        CheckLine {
            name: name.to_string(),
            status: "computed",
            details: Some(details.to_string()),
        }
    }
}

fn status_of(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

#[derive(Serialize)]
struct RunReport {
    command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<ModelMeta>,
    checks: Vec<CheckLine>,
}

impl RunReport {
    fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != "fail")
    }
}

fn emit<T: Serialize>(value: &T) -> Result<(), CliError> {
    println!("{}", to_pretty(value)?);
    Ok(())
}

fn to_pretty<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(failure)
}

fn write_or_print(out: Option<&Path>, mut text: String) -> Result<(), CliError> {
    text.push('\n');
    match out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| failure(format!("{}: {}", path.display(), e)))?;
            eprintln!("# wrote {}", path.display());
        }
        None => print!("{}", text),
    }
    Ok(())
}

fn build_named_model(kind: ModelKind, n: usize, algebra: &str) -> Result<GradedModel<BetaPoly>, CliError> {
    let r = build_realization(algebra).map_err(scqm_err)?;
    match kind {
        ModelKind::Cl2nm2 => build_cl2nm2(&r, n).map_err(graded_err),
        ModelKind::Cl2n => build_cl2n(&r, n).map_err(graded_err),
        ModelKind::Cl6b => {
            if n != 3 {
                return Err(usage(ScqmError::BadRankForKind { kind, n }));
            }
            Ok(build_cl6b(&r))
        }
    }
}

fn load_model(path: &Path) -> Result<GradedModel<BetaPoly>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read model file {}: {}", path.display(), e)))?;
    serde_json::from_str(&text)
        .map_err(|e| usage(format!("{} is not a serialized model: {}", path.display(), e)))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("GRADEDSUSY_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(count) = threads {
        if count == 0 {
            eprintln!("usage error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        gradedsusy_core::configure_threads(count);
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {}", msg);
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<bool, CliError> {
    match command {
        Command::Gamma { m, j, verify } => cmd_gamma(m, j, verify),
        Command::Model { command: ModelCommand::Build { kind, n, algebra, out } } => {
            cmd_model_build(kind, n, &algebra, out.as_deref())
        }
        Command::Verify { command } => cmd_verify(command),
        Command::VerifyAll { kind, n } => cmd_verify_all(kind, n),
        Command::StructureConstants { kind, format } => cmd_structure_constants(kind, format),
        Command::Scqm { command } => cmd_scqm(command),
        Command::Spectrum { kind, beta, levels, json } => {
            cmd_spectrum(kind, &beta, levels, json.as_deref())
        }
    }
}

fn cmd_gamma(m: usize, j: Option<usize>, verify: bool) -> Result<bool, CliError> {
    if verify {
        let report = timed("verify", || verify_clifford(m)).map_err(clifford_err)?;
        emit(&report)?;
        Ok(report.pass)
    } else {
        let j = j.ok_or_else(|| usage("--j <index> is required unless --verify is given"))?;
        let gamma = build_gamma(m, j).map_err(clifford_err)?;
        // The matrix rendering is already newline-terminated.
        print!("{}", gamma);
        Ok(true)
    }
}

fn cmd_model_build(
    kind: BuildKind,
    n: usize,
    algebra: &str,
    out: Option<&Path>,
) -> Result<bool, CliError> {
    let model = timed("build", || build_named_model(kind.into(), n, algebra))?;
    eprintln!(
        "# model: kind={} n={} generators={} dim={}",
        model.kind,
        model.n,
        model.basis.len(),
        model.dim
    );
    write_or_print(out, to_pretty(&model)?)?;
    Ok(true)
}

fn cmd_verify(command: VerifyCommand) -> Result<bool, CliError> {
    let (label, path) = match &command {
        VerifyCommand::Closure { model } => ("closure", model.clone()),
        VerifyCommand::Jacobi { model } => ("jacobi", model.clone()),
        VerifyCommand::Hermiticity { model } => ("hermiticity", model.clone()),
        VerifyCommand::Gamma { model } => ("gamma", model.clone()),
    };
    let model = load_model(&path)?;
    let mut checks = Vec::new();
    match command {
        VerifyCommand::Closure { .. } => {
            checks.push(closure_line(&model));
        }
        VerifyCommand::Jacobi { .. } => {
            jacobi_lines(&model, &mut checks);
        }
        VerifyCommand::Hermiticity { .. } => {
            let report = timed("hermiticity", || model.verify_hermiticity());
            for check in &report.checks {
                checks.push(CheckLine::new(format!("{} hermitian", check.name), check.pass, None));
            }
        }
        VerifyCommand::Gamma { .. } => {
            gamma_condition_lines(&model, &mut checks)?;
        }
    }
    let report = RunReport {
        command: format!("verify {}", label),
        model: Some(ModelMeta::of(&model)),
        checks,
    };
    emit(&report)?;
    Ok(report.pass())
}

/// Closure as a single report line: pass with the pair count, or fail
/// carrying the first violation's residual rendering.
fn closure_line(model: &GradedModel<BetaPoly>) -> CheckLine {
    match timed("closure", || model.verify_closure()) {
        Ok(_) => CheckLine::new(
            "closure",
            true,
            Some(format!(
                "{} ordered brackets decompose over their degree slices",
                model.basis.len() * model.basis.len()
            )),
        ),
        Err(e) => CheckLine::new("closure", false, Some(e.to_string())),
    }
}

fn jacobi_lines(model: &GradedModel<BetaPoly>, checks: &mut Vec<CheckLine>) {
    let report = timed("jacobi", || model.verify_jacobi());
    checks.push(CheckLine::new(
        "jacobi",
        report.pass,
        Some(format!(
            "{} deduplicated triples ({} ordered triples via graded antisymmetry)",
            report.triples_checked, report.ordered_triples_covered
        )),
    ));
    for [x, y, z] in &report.violations {
        checks.push(CheckLine::new(format!("jacobi [{}, {}, {}]", x, y, z), false, None));
    }
}

fn gamma_condition_lines(
    model: &GradedModel<BetaPoly>,
    checks: &mut Vec<CheckLine>,
) -> Result<(), CliError> {
    if model.kind == ModelKind::Cl2nm2 {
        let r = build_realization(&model.algebra).map_err(scqm_err)?;
        let report = timed("gamma-condition", || r.verify_gamma_condition()).map_err(graded_err)?;
        for check in &report.checks {
            checks.push(CheckLine::new(check.name.clone(), check.pass, None));
        }
    } else {
        checks.push(CheckLine::computed(
            "gamma-condition",
            format!(
                "not applicable: construction {} does not use a grading involution",
                model.kind
            ),
        ));
    }
    Ok(())
}

fn cmd_verify_all(kind: PresetKind, n_override: Option<usize>) -> Result<bool, CliError> {
    let (model_kind, default_n) = kind.resolve();
    let n = n_override.unwrap_or(default_n);
    let model = timed("build", || build_named_model(model_kind, n, "osp12"))?;
    let mut checks = Vec::new();
    let full_sweep = n == 3;

    if full_sweep {
        gamma_condition_lines(&model, &mut checks)?;
    }

    checks.push(closure_line(&model));
    jacobi_lines(&model, &mut checks);

    if full_sweep {
        let hermiticity = timed("hermiticity", || model.verify_hermiticity());
        let failing: Vec<&str> = hermiticity
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        checks.push(CheckLine::new(
            "hermiticity",
            hermiticity.pass,
            Some(if hermiticity.pass {
                format!("all {} generators Hermitian", hermiticity.checks.len())
            } else {
                format!("failing: {}", failing.join(", "))
            }),
        ));

        let oscillator = timed("oscillator", || verify_oscillator(&model)).map_err(scqm_err)?;
        let failing: Vec<&str> = oscillator
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        checks.push(CheckLine::new(
            "oscillator",
            oscillator.pass,
            Some(if oscillator.pass {
                format!("all {} ladder identities hold with formal coupling", oscillator.checks.len())
            } else {
                format!("failing: {}", failing.join(", "))
            }),
        ));

        let components = timed("coupling-graph", || model.coupling_graph());
        let rendered: Vec<String> = components
            .iter()
            .map(|c| {
                let indices: Vec<String> = c.iter().map(ToString::to_string).collect();
                format!("{{{}}}", indices.join(", "))
            })
            .collect();
        let detail = if components.len() == 1 {
            format!("connected: all {} states couple", model.dim)
        } else {
            format!("{} components (reducible): {}", components.len(), rendered.join(" | "))
        };
        checks.push(CheckLine::computed("coupling-graph", detail));
    } else {
        checks.push(CheckLine::computed(
            "sweep",
            format!("rank {} preset runs closure and Jacobi only", n),
        ));
    }

    let report = RunReport {
        command: format!("verify-all --kind {}", kind.name()),
        model: Some(ModelMeta::of(&model)),
        checks,
    };
    emit(&report)?;
    Ok(report.pass())
}

#[derive(Serialize)]
struct TermEntry {
    target: String,
    coefficient: String,
}

#[derive(Serialize)]
struct BracketEntry {
    left: String,
    right: String,
    bracket: &'static str,
    terms: Vec<TermEntry>,
}

#[derive(Serialize)]
struct ConstantEntry {
    indices: [usize; 4],
    value: i64,
}

#[derive(Serialize)]
struct StructureWire {
    model: ModelMeta,
    brackets: Vec<BracketEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f: Option<Vec<ConstantEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g: Option<Vec<ConstantEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h: Option<Vec<ConstantEntry>>,
}

fn bracket_entries(
    model: &GradedModel<BetaPoly>,
    table: &BracketTable<BetaPoly>,
) -> Vec<BracketEntry> {
    let count = model.basis.len();
    let mut entries = Vec::with_capacity(count * count);
    for i in 0..count {
        for j in 0..count {
            let terms = table
                .get(i, j)
                .iter()
                .map(|(k, coeff)| TermEntry {
                    target: model.basis[*k].name.clone(),
                    coefficient: model.reference_coefficient(i, j, *k, coeff).to_string(),
                })
                .collect();
            entries.push(BracketEntry {
                left: model.basis[i].name.clone(),
                right: model.basis[j].name.clone(),
                bracket: match model.bracket_kind(i, j) {
                    BracketKind::Commutator => "commutator",
                    BracketKind::Anticommutator => "anticommutator",
                },
                terms,
            });
        }
    }
    entries
}

fn constant_entries(map: &std::collections::BTreeMap<[usize; 4], i64>) -> Vec<ConstantEntry> {
    map.iter()
        .map(|(indices, value)| ConstantEntry { indices: *indices, value: *value })
        .collect()
}

fn render_structure_text(wire: &StructureWire) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {} model: {} generators on {} states",
        wire.model.kind, wire.model.generators, wire.model.dim
    );
    let lhs: Vec<String> = wire
        .brackets
        .iter()
        .map(|e| {
            let (open, close) = match e.bracket {
                "anticommutator" => ('{', '}'),
                _ => ('[', ']'),
            };
            format!("{}{}, {}{}", open, e.left, e.right, close)
        })
        .collect();
    let width = lhs.iter().map(String::len).max().unwrap_or(0);
    for (entry, left) in wire.brackets.iter().zip(&lhs) {
        let rhs = if entry.terms.is_empty() {
            "0".to_string()
        } else {
            entry
                .terms
                .iter()
                .map(|t| format!("({}) {}", t.coefficient, t.target))
                .collect::<Vec<_>>()
                .join(" + ")
        };
        let _ = writeln!(out, "{:width$} = {}", left, rhs, width = width);
    }
    for (label, family) in [("f", &wire.f), ("g", &wire.g), ("h", &wire.h)] {
        if let Some(entries) = family {
            let _ = writeln!(out, "\n# nonzero {}-constants", label);
            for e in entries {
                let digits: String = e.indices.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "{}_{} = {}", label, digits, e.value);
            }
        }
    }
    out
}

fn cmd_structure_constants(kind: PresetKind, format: Format) -> Result<bool, CliError> {
    let (model_kind, n) = kind.resolve();
    let model = timed("build", || build_named_model(model_kind, n, "osp12"))?;
    let table = timed("closure", || model.verify_closure()).map_err(graded_err)?;
    let constants = if model_kind == ModelKind::Cl6b {
        Some(timed("extract", || extract_cl6b_constants(&model, &table)).map_err(graded_err)?)
    } else {
        None
    };
    let wire = StructureWire {
        model: ModelMeta::of(&model),
        brackets: bracket_entries(&model, &table),
        f: constants.as_ref().map(|c| constant_entries(&c.f)),
        g: constants.as_ref().map(|c| constant_entries(&c.g)),
        h: constants.as_ref().map(|c| constant_entries(&c.h)),
    };
    match format {
        Format::Json => emit(&wire)?,
        Format::Text => print!("{}", render_structure_text(&wire)),
    }
    Ok(true)
}

fn cmd_scqm(command: ScqmCommand) -> Result<bool, CliError> {
    match command {
        ScqmCommand::Build { kind } => {
            let (model_kind, n) = kind.resolve();
            let realization = build_realization("osp12").map_err(scqm_err)?;
            let verified =
                timed("realization", || verify_realization(&realization)).map_err(scqm_err)?;
            let model = timed("build", || build_named_model(model_kind, n, "osp12"))?;
            let mut checks = Vec::new();
            for relation in &verified.relations {
                checks.push(CheckLine::new(
                    relation.relation.clone(),
                    relation.pass,
                    relation.residual.clone(),
                ));
            }
            for check in &verified.hermiticity {
                checks.push(CheckLine::new(format!("{} hermitian", check.name), check.pass, None));
            }
            for check in &verified.gamma.checks {
                checks.push(CheckLine::new(check.name.clone(), check.pass, None));
            }
            let report = RunReport {
                command: format!("scqm build --kind {}", kind.name()),
                model: Some(ModelMeta::of(&model)),
                checks,
            };
            emit(&report)?;
            Ok(report.pass())
        }
        ScqmCommand::VerifyOscillator { kind } => {
            let (model_kind, n) = kind.resolve();
            let model = timed("build", || build_named_model(model_kind, n, "osp12"))?;
            let verified = timed("oscillator", || verify_oscillator(&model)).map_err(scqm_err)?;
            let checks = verified
                .checks
                .iter()
                .map(|c| CheckLine {
                    name: c.name.clone(),
                    status: status_of(c.pass),
                    details: c.residual.clone().or_else(|| c.note.clone()),
                })
                .collect();
            let report = RunReport {
                command: format!("scqm verify-oscillator --kind {}", kind.name()),
                model: Some(ModelMeta::of(&model)),
                checks,
            };
            emit(&report)?;
            Ok(report.pass())
        }
    }
}

fn parse_rational(text: &str) -> Result<Rational, CliError> {
    text.trim()
        .parse()
        .map_err(|_| usage(format!("cannot parse {:?} as a rational p or p/q", text)))
}

fn cmd_spectrum(
    kind: SpectrumKind,
    beta_text: &str,
    levels: usize,
    json_out: Option<&Path>,
) -> Result<bool, CliError> {
    let (model_kind, n) = kind.resolve();
    let beta = parse_rational(beta_text)?;
    let formal = timed("build", || build_graded_oscillator(model_kind, n)).map_err(scqm_err)?;
    let numeric = eval_model(&formal, &beta);
    let ladder = build_ladder(&numeric).map_err(scqm_err)?;
    let report =
        timed("spectrum", || excited_levels(&ladder, &beta, levels)).map_err(spectrum_err)?;
    write_or_print(json_out, to_pretty(&report)?)?;
    Ok(true)
}
