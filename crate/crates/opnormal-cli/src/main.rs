//! `opnormal`: classify operators on semi-Hilbertian spaces, run the
//! identity-registry suite, and search for class-separating witnesses.
//!
//! All reports are JSON on stdout (or `--out`), rendered deterministically:
//! identical inputs, seed, and tool version produce byte-identical output.
//!
//! Exit codes: 0 clean, 1 internal error or failing suite, 2 invalid input
//! or config, 3 search exhausted without a witness.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use opnormal::classes::{basic_classes, nm_normal, nm_quasinormal, ClassIndex};
use opnormal::files::{
    parse_matrix, parse_sequence, parse_suite_config, MatrixFile, SequenceFile,
    SuiteConfig,
};
use opnormal::lab::search::{
    run_search, SearchDomain, SearchFound, SearchTarget,
};
use opnormal::lab::suite::run_suite;
use opnormal::lab::LabError;
use opnormal::numerics::Tolerance;
use opnormal::report::{
    render, ClassifyInputs, ClassifyReport, DenseClasses, DenseClassifyReport,
    ExactClassifyReport, SearchOutcome, SearchReport, SearchWitness, SuiteVerdict,
    ToolInfo,
};
use opnormal::semihilbert::{a_adjoint, membership, operator_seminorm, MetricContext};
use opnormal::shiftcalc::{shift_class_check, ShiftClassKind, WeightedShiftInstance};

#[derive(Parser)]
#[command(name = "opnormal", version, about = "Operator class verification on semi-Hilbertian spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one operator against one metric at index (n, m).
    Classify(ClassifyArgs),
    /// Run the identity registry over seeded random instances.
    Verify(VerifyArgs),
    /// Search for operators separating the class conditions.
    Search(SearchArgs),
}

#[derive(Args)]
struct ClassifyArgs {
    /// Metric file: dense matrix JSON, or a diagonal sequence JSON with --exact.
    metric: PathBuf,
    /// Operator file: dense matrix JSON, or a weight sequence JSON with --exact.
    operator: PathBuf,
    /// Power applied to the operator.
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// Power applied to its A-adjoint.
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Treat the inputs as an eventually periodic weighted shift and decide
    /// the class conditions exactly.
    #[arg(long)]
    exact: bool,
    /// Report a failed membership check as the result instead of aborting.
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    tol: TolArgs,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite config JSON; the built-in defaults apply when omitted.
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    /// Target: not_normal(n,m) or qn_not_normal(n,m).
    target: String,
    /// Search domain.
    #[arg(long, value_enum, default_value_t = DomainArg::Dense)]
    domain: DomainArg,
    /// Matrix dimension (dense domain only).
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Number of candidate evaluations allowed.
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
    /// Seed for the deterministic candidate stream.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    tol: TolArgs,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Dense,
    Shift,
}

impl From<DomainArg> for SearchDomain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Dense => SearchDomain::Dense,
            DomainArg::Shift => SearchDomain::Shift,
        }
    }
}

#[derive(Args)]
struct TolArgs {
    /// Override the pass threshold for scaled residuals.
    #[arg(long = "tol-residual")]
    tol_residual: Option<f64>,
    /// Override the numerical rank cutoff.
    #[arg(long = "tol-rank")]
    tol_rank: Option<f64>,
    /// Override the decisive-failure margin.
    #[arg(long)]
    margin: Option<f64>,
}

impl TolArgs {
    fn any_set(&self) -> bool {
        self.tol_residual.is_some() || self.tol_rank.is_some() || self.margin.is_some()
    }

    fn resolve(&self) -> Result<Tolerance, Failure> {
        let base = Tolerance::default();
        Tolerance::new(
            self.tol_rank.unwrap_or(base.rank_cutoff),
            self.tol_residual.unwrap_or(base.residual_tol),
            self.margin.unwrap_or(base.distinctness_margin),
        )
        .map_err(|e| Failure::Invalid(e.to_string()))
    }
}

/// The two error exits; everything else flows through normal returns.
enum Failure {
    Invalid(String),
    Internal(String),
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(msg.into())
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))
}

fn emit(report_json: String, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        None => {
            print!("{report_json}");
            Ok(())
        }
        Some(path) => fs::write(path, report_json)
            .map_err(|e| invalid(format!("cannot write {}: {e}", path.display()))),
    }
}

fn render_report<T: serde::Serialize>(report: &T) -> Result<String, Failure> {
    render(report).map_err(|e| Failure::Internal(format!("report rendering: {e}")))
}

fn index_from(n: u32, m: u32) -> Result<ClassIndex, Failure> {
    ClassIndex::new(n, m).map_err(|e| invalid(e.to_string()))
}

fn classify_dense(args: &ClassifyArgs) -> Result<u8, Failure> {
    let idx = index_from(args.n, args.m)?;
    let tol = args.tol.resolve()?;
    let a = parse_matrix(&read_input(&args.metric)?)
        .map_err(|e| invalid(format!("metric {}: {e}", args.metric.display())))?;
    let t = parse_matrix(&read_input(&args.operator)?)
        .map_err(|e| invalid(format!("operator {}: {e}", args.operator.display())))?;
    if !a.is_square() {
        return Err(invalid(format!(
            "metric must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if t.shape() != a.shape() {
        return Err(invalid(format!(
            "dimension mismatch: metric is {}x{}, operator is {}x{}",
            a.nrows(),
            a.ncols(),
            t.nrows(),
            t.ncols()
        )));
    }
    let ctx = MetricContext::new(a, tol).map_err(|e| invalid(format!("metric: {e}")))?;
    let mem = membership(&ctx, &t)
        .map_err(|e| Failure::Internal(format!("membership check: {e}")))?;
    let admissible = mem.in_b_a.is_pass();
    if !admissible && !args.force {
        return Err(invalid(format!(
            "operator is outside the adjoint-admissible class (membership residual \
             {:.3e}); rerun with --force to report this as the result",
            mem.residual_b_a
        )));
    }
    let (classes, seminorm) = if admissible {
        let op = a_adjoint(&ctx, &t)
            .map_err(|e| Failure::Internal(format!("adjoint construction: {e}")))?;
        let basic = basic_classes(&ctx, &op)
            .map_err(|e| Failure::Internal(format!("basic classes: {e}")))?;
        let normal = nm_normal(&ctx, &op, idx)
            .map_err(|e| Failure::Internal(format!("normality check: {e}")))?;
        let quasi = nm_quasinormal(&ctx, &op, idx)
            .map_err(|e| Failure::Internal(format!("quasinormality check: {e}")))?;
        let seminorm = operator_seminorm(&ctx, &t)
            .map_err(|e| Failure::Internal(format!("seminorm: {e}")))?;
        (
            Some(DenseClasses {
                basic,
                nm_normal: normal,
                nm_quasinormal: quasi,
            }),
            Some(seminorm),
        )
    } else {
        (None, None)
    };
    let report = ClassifyReport::Dense(DenseClassifyReport {
        tool: ToolInfo::current(),
        inputs: ClassifyInputs {
            metric_path: args.metric.display().to_string(),
            operator_path: args.operator.display().to_string(),
            index: idx.into(),
        },
        tolerance: tol,
        metric_dim: ctx.dim(),
        metric_rank: ctx.rank(),
        membership: mem.into(),
        classes,
        seminorm,
    });
    emit(render_report(&report)?, args.out.as_deref())?;
    Ok(0)
}

fn classify_exact(args: &ClassifyArgs) -> Result<u8, Failure> {
    if args.force || args.tol.any_set() {
        return Err(invalid(
            "--exact decides the conditions exactly; it takes no tolerance or \
             --force flags",
        ));
    }
    let idx = index_from(args.n, args.m)?;
    let metric_file =
        parse_sequence(&read_input(&args.metric)?).map_err(|e| {
            invalid(format!("metric {}: {e}", args.metric.display()))
        })?;
    let operator_file =
        parse_sequence(&read_input(&args.operator)?).map_err(|e| {
            invalid(format!("operator {}: {e}", args.operator.display()))
        })?;
    let metric = metric_file
        .to_metric()
        .map_err(|e| invalid(format!("metric {}: {e}", args.metric.display())))?;
    let weights = operator_file
        .to_weights()
        .map_err(|e| invalid(format!("operator {}: {e}", args.operator.display())))?;
    let inst = WeightedShiftInstance::new(weights, metric)
        .map_err(|e| invalid(format!("shift instance: {e}")))?;
    let nn = shift_class_check(&inst, idx, ShiftClassKind::Normal);
    let qn = shift_class_check(&inst, idx, ShiftClassKind::Quasinormal);
    let seminorm_squared = inst.seminorm_squared();
    let report = ClassifyReport::Exact(ExactClassifyReport {
        tool: ToolInfo::current(),
        inputs: ClassifyInputs {
            metric_path: args.metric.display().to_string(),
            operator_path: args.operator.display().to_string(),
            index: idx.into(),
        },
        nm_normal: nn.into(),
        nm_quasinormal: qn.into(),
        seminorm_squared: [
            seminorm_squared.numer().to_string(),
            seminorm_squared.denom().to_string(),
        ],
    });
    emit(render_report(&report)?, args.out.as_deref())?;
    Ok(0)
}

fn cmd_classify(args: &ClassifyArgs) -> Result<u8, Failure> {
    if args.exact {
        classify_exact(args)
    } else {
        classify_dense(args)
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let config = match &args.config {
        None => SuiteConfig::default(),
        Some(path) => parse_suite_config(&read_input(path)?)
            .map_err(|e| invalid(format!("config {}: {e}", path.display())))?,
    };
    let report = run_suite(&config).map_err(|e| match e {
        LabError::Config(msg) | LabError::UnknownCheck(msg) => {
            invalid(format!("config: {msg}"))
        }
        other => Failure::Internal(other.to_string()),
    })?;
    let verdict = report.verdict;
    emit(render_report(&report)?, args.out.as_deref())?;
    // A failing suite is a real finding, not an invalid invocation.
    Ok(if verdict == SuiteVerdict::Pass { 0 } else { 1 })
}

fn cmd_search(args: &SearchArgs) -> Result<u8, Failure> {
    let target =
        SearchTarget::parse(&args.target).map_err(|e| invalid(e.to_string()))?;
    if args.budget == 0 {
        return Err(invalid("budget must be at least 1"));
    }
    if args.dim == 0 || args.dim > 16 {
        return Err(invalid("dim must be between 1 and 16"));
    }
    let tol = args.tol.resolve()?;
    let domain: SearchDomain = args.domain.into();
    let result = run_search(target, domain, args.dim, args.budget, args.seed, tol)
        .map_err(|e| Failure::Internal(e.to_string()))?;
    let witness = match &result.found {
        None => None,
        Some(SearchFound::Dense(w)) => Some(SearchWitness::Dense {
            metric: MatrixFile::from_matrix(&w.a),
            operator: MatrixFile::from_matrix(&w.t),
            nm_normal_residual: w.nn_residual,
            nm_quasinormal_residual: w.qn_residual,
        }),
        Some(SearchFound::Shift(w)) => Some(SearchWitness::Shift {
            weights: SequenceFile::from_weights(&w.weights).ok_or_else(|| {
                Failure::Internal("witness weights exceed the file range".into())
            })?,
            metric: SequenceFile::from_metric(&w.metric).ok_or_else(|| {
                Failure::Internal("witness metric exceeds the file range".into())
            })?,
            nm_normal: w.nn.clone().into(),
            nm_quasinormal: w.qn.clone().into(),
        }),
    };
    let outcome = if witness.is_some() {
        SearchOutcome::Witness
    } else {
        SearchOutcome::Exhausted
    };
    let report = SearchReport {
        tool: ToolInfo::current(),
        target: target.id_string(),
        domain: domain.id_string().to_string(),
        index: target.index().into(),
        dim: args.dim,
        budget: args.budget,
        seed: args.seed,
        evaluated: result.evaluated,
        outcome,
        witness,
    };
    emit(render_report(&report)?, args.out.as_deref())?;
    Ok(if outcome == SearchOutcome::Witness { 0 } else { 3 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Classify(args) => cmd_classify(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Search(args) => cmd_search(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}
