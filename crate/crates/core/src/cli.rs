//! The `mmp` command line: `solve`, `rip`, `verify` and `benchmark`.
//!
//! Column indices on the command line and in JSON output are 1-based.
//! Structured output goes to stdout, logs to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{
    self, first_iter_bound, reference_conditions, GuaranteeConstants, RipReport,
};
use crate::bench::{self, ExperimentConfig};
use crate::error::{MmpError, Result};
use crate::linalg::{parse_vector_text, SensingMatrix};
use crate::solvers::{Algorithm, RecoveryOutput, SolverConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mmp", version, about = "Multipath matching pursuit sparse recovery")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recover a sparse signal from one measurement vector.
    Solve(SolveArgs),
    /// Exact restricted isometry constants of a small matrix.
    Rip(RipArgs),
    /// Check the recovery bounds on random certified instances.
    Verify(VerifyArgs),
    /// Run a Monte Carlo sweep from a JSON config.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Matrix text file: a "m n" header line, then m rows of n numbers.
    #[arg(long)]
    pub matrix: PathBuf,
    /// Measurement vector file ("m 1" header then m numbers, or a bare list).
    #[arg(long)]
    pub measurements: PathBuf,
    /// Target sparsity K.
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value = "mmp-bf", value_parser = parse_algorithm)]
    pub algorithm: Algorithm,
    /// Expansion factor L.
    #[arg(long, default_value_t = 2)]
    pub l: usize,
    /// Depth-first budget of full paths.
    #[arg(long, default_value_t = 50)]
    pub nmax: usize,
    /// Depth-first residual threshold (default 1e-12·‖y‖²).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Breadth-first cap on candidates per iteration.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Known support for the oracle, 1-based, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub support: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct RipArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// Largest order to enumerate.
    #[arg(long)]
    pub max_order: usize,
    /// Sparsities for which to evaluate the guarantee constants.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// Expansion factors paired with every --k.
    #[arg(long, value_delimiter = ',')]
    pub l: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of certified instances.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory for summary.csv, trials.csv and plots.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write SVG charts.
    #[arg(long)]
    pub plot: bool,
    /// Keep one sensing matrix for all trials.
    #[arg(long)]
    pub fix_matrix: bool,
    /// Override the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: MmpError| e.to_string())
}

/// Exit code for a library error: input problems are usage errors,
/// numerical failures are not.
pub fn exit_code(err: &MmpError) -> i32 {
    match err {
        MmpError::Io(_)
        | MmpError::Parse(_)
        | MmpError::Json(_)
        | MmpError::Csv(_)
        | MmpError::InvalidInput(_)
        | MmpError::DimensionMismatch { .. }
        | MmpError::IndexOutOfRange { .. }
        | MmpError::DuplicateIndex(_) => EXIT_USAGE,
        _ => EXIT_NUMERIC,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(&a, out),
        Command::Rip(a) => rip(&a, out),
        Command::Verify(a) => verify(&a, out),
        Command::Benchmark(a) => benchmark(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| MmpError::InvalidInput(format!("{}: {e}", path.display())))
}

fn emit_json(out: &mut dyn Write, value: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string(value)?)?;
    Ok(())
}

fn one_based(support: &[usize]) -> Vec<usize> {
    support.iter().map(|i| i + 1).collect()
}

fn recovery_json(seed: u64, algorithm: Algorithm, out: &RecoveryOutput, partial: bool) -> Result<Value> {
    Ok(json!({
        "seed": seed,
        "algorithm": algorithm,
        "support": one_based(&out.support),
        "coefficients": out.coefficients,
        "residual_norm_sq": out.residual_norm_sq,
        "stats": serde_json::to_value(&out.stats)?,
        "partial": partial,
    }))
}

fn solve(a: &SolveArgs, out: &mut dyn Write) -> Result<i32> {
    log::info!("seed {}", a.seed);
    let matrix = SensingMatrix::from_text(&read(&a.matrix)?)?;
    let y = parse_vector_text(&read(&a.measurements)?)?;
    let mut config = SolverConfig::new(a.k, a.l).with_n_max(a.nmax);
    config.max_candidates = a.cap;
    config.epsilon = a.epsilon;
    let truth: Vec<usize> = a
        .support
        .iter()
        .map(|&i| {
            i.checked_sub(1)
                .ok_or_else(|| MmpError::InvalidInput("support indices are 1-based".into()))
        })
        .collect::<Result<_>>()?;
    let truth = (a.algorithm == Algorithm::Oracle).then_some(truth.as_slice());
    if a.algorithm == Algorithm::Oracle && a.support.is_empty() {
        return Err(MmpError::InvalidInput("--algorithm oracle needs --support".into()));
    }
    match a.algorithm.run(&matrix, &y, &config, truth) {
        Ok(res) => {
            emit_json(out, &recovery_json(a.seed, a.algorithm, &res, false)?)?;
            Ok(EXIT_OK)
        }
        Err(MmpError::PartialRecovery { best, target }) => {
            log::warn!("search exhausted at depth {} of {target}", best.support.len());
            emit_json(out, &recovery_json(a.seed, a.algorithm, &best, true)?)?;
            Ok(EXIT_NUMERIC)
        }
        Err(e) => Err(e),
    }
}

#[derive(Serialize)]
struct PairConstants {
    k: usize,
    l: usize,
    delta_kl: f64,
    first_iter_bound: f64,
    condition_holds: bool,
    #[serde(flatten)]
    constants: Option<GuaranteeConstants>,
}

fn rip(a: &RipArgs, out: &mut dyn Write) -> Result<i32> {
    log::info!("seed {}", a.seed);
    let matrix = SensingMatrix::from_text(&read(&a.matrix)?)?;
    if a.k.is_empty() != a.l.is_empty() {
        return Err(MmpError::InvalidInput("--k and --l must be given together".into()));
    }
    let needed = a
        .k
        .iter()
        .flat_map(|&k| a.l.iter().map(move |&l| analysis::required_order(k, l)))
        .max()
        .unwrap_or(0);
    let report = RipReport::compute(&matrix, a.max_order.max(needed))?;
    let mut pairs = Vec::new();
    let mut references = Vec::new();
    for &k in &a.k {
        for &l in &a.l {
            if k == 0 || l == 0 {
                return Err(MmpError::InvalidInput("K and L must be positive".into()));
            }
            let delta_kl = report.get(k + l)?;
            let (dk, d2k) = (report.get(k)?, report.get(2 * k)?);
            let constants = if dk < 1.0 && d2k < 1.0 && delta_kl < 1.0 {
                Some(GuaranteeConstants::from_report(&report, k, l)?)
            } else {
                None
            };
            pairs.push(PairConstants {
                k,
                l,
                delta_kl,
                first_iter_bound: first_iter_bound(k, l),
                condition_holds: delta_kl < analysis::bf_recovery_bound(k, l),
                constants,
            });
        }
        references.push(json!({ "k": k, "conditions": reference_conditions(k, a.l.first().copied().unwrap_or(1)) }));
    }
    let deltas: serde_json::Map<String, Value> = report
        .deltas
        .iter()
        .map(|(o, d)| (o.to_string(), json!(d)))
        .collect();
    emit_json(
        out,
        &json!({
            "seed": a.seed,
            "m": report.m,
            "n": report.n,
            "max_order": report.max_order,
            "deltas": deltas,
            "constants": serde_json::to_value(&pairs)?,
            "reference_conditions": references,
        }),
    )?;
    Ok(EXIT_OK)
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    log::info!("seed {}", a.seed);
    if a.trials == 0 {
        return Err(MmpError::InvalidInput("--trials must be at least 1".into()));
    }
    let summary = analysis::instances::implication_suite(a.seed, a.trials)?;
    let checks: serde_json::Map<String, Value> = summary
        .hard_checks()
        .iter()
        .map(|(name, t)| (name.to_string(), json!({"checked": t.checked, "passed": t.passed(), "failed": t.violations})))
        .collect();
    let noisy = summary.residual_gamma_noisy;
    let wide = summary.spectral_norm_wide;
    emit_json(
        out,
        &json!({
            "seed": a.seed,
            "instances": summary.instances,
            "checks": checks,
            "informational": {
                "residual_gamma_noisy": {"checked": noisy.checked, "passed": noisy.passed(), "failed": noisy.violations},
                "spectral_norm_wide": {"checked": wide.checked, "passed": wide.passed(), "failed": wide.violations}
            },
            "failed": summary.violations(),
            "pass": summary.violations() == 0,
        }),
    )?;
    Ok(EXIT_OK)
}

fn benchmark(a: &BenchmarkArgs, out: &mut dyn Write) -> Result<i32> {
    let mut config: ExperimentConfig = serde_json::from_str(&read(&a.config)?)?;
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    config.fix_matrix |= a.fix_matrix;
    log::info!("seed {}", config.seed);
    if let Some(t) = bench::configured_threads() {
        log::info!("{t} worker threads");
    }
    let result = bench::run_experiment(&config)?;
    let written = bench::emit_results(&result.rows, &result.trials, &a.out, a.plot)?;
    for p in &written {
        log::info!("wrote {}", p.display());
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &result.rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| MmpError::InvalidInput(e.to_string()))?;
    out.write_all(&bytes)?;
    Ok(EXIT_OK)
}
