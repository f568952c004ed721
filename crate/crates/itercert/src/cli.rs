//! Command-line surface.
//!
//! Exit codes: 0 success, 2 input/domain error, 3 numerical failure,
//! 4 sampling abort. Stdout carries JSON results only; logs go to stderr;
//! tabular outputs go to `--out` files with manifest sidecars.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use itercert_core::bounds::{
    self, BoundQuery, BoundsError, EpsilonInterval, EpsilonResult,
};
use itercert_core::mpc::{self, MpcError};
use itercert_core::scenario::{
    self, BoundChoice, CertifiedBound, SampleValues, ScenarioError, TradeoffPoint,
};
use itercert_core::validation::{CertMode, ValidationError};

use crate::csvio::{self, CsvError};
use crate::jsonio::{self, JsonError};
use crate::manifest::{digest_file, RunManifest};
use crate::{parallel, svg};

/// Certification toolkit for iterative solvers on sampled problem
/// instances: learns iteration budgets or metric bounds from recorded
/// samples and attaches probabilistic risk certificates.
#[derive(Parser)]
#[command(name = "itercert", version, about)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Invert a risk-bound equation directly.
    Bounds {
        #[command(subcommand)]
        family: BoundsCmd,
    },
    /// Solve the robust or relaxed scenario program over a samples file.
    Solve {
        #[command(subcommand)]
        program: SolveCmd,
    },
    /// Emit a trade-off curve as CSV (and optionally SVG).
    Sweep {
        #[command(subcommand)]
        kind: SweepCmd,
    },
    /// Generate datasets and metric traces from the control pipeline.
    Mpc {
        #[command(subcommand)]
        action: MpcCmd,
    },
    /// Monte-Carlo check of the certification statements on a synthetic
    /// distribution with exactly computable risk.
    Validate(ValidateArgs),
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// A-priori binomial bound for a d-dimensional convex program.
    Theorem1 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
    /// A-posteriori bound at complexity q.
    Theorem2 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        q: usize,
    },
    /// Two-sided bound at complexity q (non-accumulation regime).
    Theorem3 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        q: usize,
    },
    /// Test-set baseline at an observed violation count.
    Testset {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        violations: usize,
    },
}

#[derive(Subcommand)]
enum SolveCmd {
    /// Smallest value covering every sample, with its certificate.
    Robust {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        beta: f64,
    },
    /// Slack-penalized program trading the learned value against
    /// violations.
    Relaxed {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        beta: f64,
        /// Relaxation weight (exactly one of --rho / --target-q).
        #[arg(long, conflicts_with = "target_q")]
        rho: Option<f64>,
        /// Target violation count; sets rho = 1/target.
        #[arg(long = "target-q")]
        target_q: Option<u64>,
        #[arg(long, value_enum, default_value_t = TheoremChoice::Posteriori)]
        theorem: TheoremChoice,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoremChoice {
    Posteriori,
    Interval,
}

#[derive(Subcommand)]
enum SweepCmd {
    /// One relaxed solve per target violation count (rho = 1/target).
    Rho {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        beta: f64,
        /// Comma-separated target violation counts, e.g. 500,100,50,10,5,1.
        #[arg(long)]
        targets: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Test-set bound on a fixed budget grid, confidence split uniformly.
    Budget {
        #[arg(long)]
        input: PathBuf,
        /// Total confidence budget across the whole grid.
        #[arg(long)]
        beta: f64,
        #[arg(long = "grid-start")]
        grid_start: f64,
        #[arg(long = "grid-step")]
        grid_step: f64,
        #[arg(long = "grid-end")]
        grid_end: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Robust metric bound per iteration budget over a metric-trace file.
    PerfK {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        beta: f64,
        /// Budget range `lo:hi` (inclusive) or a single value.
        #[arg(long)]
        k: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MpcCmd {
    /// Rejection-sample initial states and record iteration counts.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Overrides the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (0 = auto). Output bytes do not depend on this.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Re-solve dataset samples with snapshots and trace the metric.
    Metrics {
        #[arg(long)]
        config: PathBuf,
        /// Dataset CSV produced by `mpc generate`.
        #[arg(long)]
        input: PathBuf,
        /// Budget range `lo:hi` (inclusive) or a single value.
        #[arg(long)]
        k: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

#[derive(Args)]
struct ValidateArgs {
    /// Synthetic-distribution spec JSON.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    beta: f64,
    #[arg(long, value_enum)]
    mode: ValidateMode,
    /// Relaxation weight (required for relaxed/interval modes).
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    reps: usize,
    /// Overrides the seed in the spec file.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ValidateMode {
    Robust,
    Relaxed,
    Interval,
}

/// Error carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Input, domain or environment problem (exit 2).
    Input(String),
    /// Numerical failure (exit 3).
    Numerical(String),
    /// Sampling abort (exit 4).
    SamplingAbort(String),
}

impl CliError {
    /// Process exit code.
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::SamplingAbort(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Numerical(m) | CliError::SamplingAbort(m) => {
                write!(f, "{m}")
            }
        }
    }
}

impl From<CsvError> for CliError {
    fn from(e: CsvError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<JsonError> for CliError {
    fn from(e: JsonError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::BracketFailure { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Bounds(inner) => inner.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<MpcError> for CliError {
    fn from(e: MpcError) -> Self {
        match e {
            MpcError::AcceptanceRateTooLow { .. } => CliError::SamplingAbort(e.to_string()),
            MpcError::NotConverged | MpcError::FactorizationFailed => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<ValidationError> for CliError {
    fn from(e: ValidationError) -> Self {
        match e {
            ValidationError::Scenario(inner) => inner.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// Parses and runs the process command line.
pub fn run() -> Result<(), CliError> {
    dispatch(Cli::parse())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Bounds { family } => run_bounds(family),
        Command::Solve { program } => run_solve(program),
        Command::Sweep { kind } => run_sweep(kind),
        Command::Mpc { action } => run_mpc(action),
        Command::Validate(args) => run_validate(args),
    }
}

fn run_bounds(family: BoundsCmd) -> Result<(), CliError> {
    let line = match family {
        BoundsCmd::Theorem1 { n, beta, dim } => {
            let r = bounds::binomial_epsilon(&BoundQuery::with_dimension(n, beta, dim))?;
            jsonio::epsilon_result_json(n, beta, dim, &r)
        }
        BoundsCmd::Theorem2 { n, beta, q } => {
            let r = bounds::epsilon_posteriori(&BoundQuery::with_complexity(n, beta, q))?;
            jsonio::epsilon_result_json(n, beta, q, &r)
        }
        BoundsCmd::Theorem3 { n, beta, q } => {
            let iv = bounds::epsilon_interval(&BoundQuery::with_complexity(n, beta, q))?;
            jsonio::epsilon_interval_json(n, beta, q, &iv)
        }
        BoundsCmd::Testset { n, beta, violations } => {
            let r = bounds::testset_epsilon(n, beta, violations)?;
            jsonio::epsilon_result_json(n, beta, violations, &r)
        }
    };
    println!("{line}");
    Ok(())
}

fn run_solve(program: SolveCmd) -> Result<(), CliError> {
    match program {
        SolveCmd::Robust { input, beta } => {
            let samples = csvio::read_sample_values(&input)?;
            let (solution, eps) = scenario::certify_robust(&samples, beta)?;
            println!("{}", jsonio::robust_json(samples.len(), beta, &solution, &eps));
        }
        SolveCmd::Relaxed { input, beta, rho, target_q, theorem } => {
            let samples = csvio::read_sample_values(&input)?;
            let rho = match (rho, target_q) {
                (Some(r), None) => r,
                (None, Some(q)) => scenario::rho_from_target(q)?,
                _ => {
                    return Err(CliError::Input(
                        "exactly one of --rho / --target-q is required".to_string(),
                    ))
                }
            };
            let choice = match theorem {
                TheoremChoice::Posteriori => BoundChoice::Posteriori,
                TheoremChoice::Interval => BoundChoice::Interval,
            };
            let cert = scenario::certify_relaxed(&samples, rho, beta, choice)?;
            let n = samples.len();
            let s_star = cert.solution.s_star;
            let (certificate, warnings) = match &cert.bound {
                CertifiedBound::Point(e) => {
                    (jsonio::epsilon_result_json(n, beta, s_star, e), None)
                }
                CertifiedBound::Interval {
                    interval,
                    accumulation_warning,
                    degenerate_fallback,
                } => (
                    jsonio::epsilon_interval_json(n, beta, s_star.min(n), interval),
                    Some(format!(
                        "{{\"accumulation\": {accumulation_warning}, \"degenerate_fallback\": {degenerate_fallback}}}"
                    )),
                ),
            };
            println!(
                "{}",
                jsonio::relaxed_json(n, beta, &cert.solution, certificate, warnings)
            );
        }
    }
    Ok(())
}

fn parse_targets(raw: &str) -> Result<Vec<u64>, CliError> {
    raw.split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Input(format!("invalid target `{part}`")))
        })
        .collect()
}

fn parse_k_range(raw: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::Input(format!("invalid budget range `{raw}` (expected lo:hi)"));
    if let Some((lo, hi)) = raw.split_once(':') {
        let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        Ok((lo..=hi).collect())
    } else {
        let k: u32 = raw.trim().parse().map_err(|_| bad())?;
        Ok(vec![k])
    }
}

fn budget_grid(start: f64, step: f64, end: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || !start.is_finite() || !end.is_finite() || end < start {
        return Err(CliError::Input(
            "budget grid requires finite start <= end and positive step".to_string(),
        ));
    }
    let mut grid = Vec::new();
    let mut i = 0u64;
    loop {
        let v = start + step * i as f64;
        if v > end + 1e-9 * step {
            break;
        }
        grid.push(v);
        i += 1;
    }
    Ok(grid)
}

fn emit_curve(
    points: &[TradeoffPoint],
    out: &Path,
    svg_path: Option<&Path>,
    input_digest: String,
    seed: u64,
    title: &str,
) -> Result<(), CliError> {
    csvio::write_tradeoff(out, points)?;
    let manifest = RunManifest::capture(input_digest, seed);
    manifest.write_sidecar(out)?;
    if let Some(p) = svg_path {
        svg::render_tradeoff(p, points, title)?;
        manifest.write_sidecar(p)?;
    }
    println!("{{\"out\": {:?}, \"rows\": {}}}", out.display().to_string(), points.len());
    Ok(())
}

fn run_sweep(kind: SweepCmd) -> Result<(), CliError> {
    match kind {
        SweepCmd::Rho { input, beta, targets, out, svg } => {
            let samples = csvio::read_sample_values(&input)?;
            let targets = parse_targets(&targets)?;
            let points = scenario::sweep_rho(&samples, &targets, beta)?;
            emit_curve(
                &points,
                &out,
                svg.as_deref(),
                digest_file(&input)?,
                0,
                "relaxed scenario trade-off",
            )
        }
        SweepCmd::Budget { input, beta, grid_start, grid_step, grid_end, out, svg } => {
            let samples = csvio::read_sample_values(&input)?;
            let grid = budget_grid(grid_start, grid_step, grid_end)?;
            let points = scenario::sweep_budget(&samples, &grid, beta)?;
            emit_curve(
                &points,
                &out,
                svg.as_deref(),
                digest_file(&input)?,
                0,
                "budget trade-off",
            )
        }
        SweepCmd::PerfK { input, beta, k, out, svg } => {
            let rows = csvio::read_metric_trace(&input)?;
            let budgets = parse_k_range(&k)?;
            let mut points = Vec::with_capacity(budgets.len());
            for k in budgets {
                let values: Vec<f64> =
                    rows.iter().filter(|r| r.k == k).map(|r| r.phi).collect();
                let ids: Vec<u64> =
                    rows.iter().filter(|r| r.k == k).map(|r| r.sample_id).collect();
                if values.is_empty() {
                    return Err(CliError::Input(format!(
                        "{}: no rows at k={k}",
                        input.display()
                    )));
                }
                let samples = SampleValues::new(values, ids).map_err(ScenarioError::from)?;
                let (solution, eps) = scenario::certify_robust(&samples, beta)?;
                points.push(TradeoffPoint {
                    control: k as f64,
                    y_value: solution.y_star,
                    q_star: 0,
                    s_star: None,
                    epsilon: eps.epsilon,
                    epsilon_lower: None,
                    empirical_violation: 0.0,
                });
            }
            emit_curve(
                &points,
                &out,
                svg.as_deref(),
                digest_file(&input)?,
                0,
                "metric bound per iteration budget",
            )
        }
    }
}

fn run_mpc(action: MpcCmd) -> Result<(), CliError> {
    match action {
        MpcCmd::Generate { config, samples, seed, out, threads } => {
            let (core_config, mut settings, file_seed) =
                jsonio::read_pipeline_config(&config)?.into_parts();
            let seed = seed.unwrap_or(file_seed);
            settings.seed = seed;
            let dataset =
                parallel::generate_dataset(&core_config, &settings, samples, seed, threads)?;
            csvio::write_dataset(&out, &dataset)?;
            RunManifest::capture(dataset.config_hash.clone(), seed).write_sidecar(&out)?;
            eprintln!(
                "generated {} samples (last candidate index {})",
                dataset.records.len(),
                dataset.records.last().map(|r| r.candidate_index).unwrap_or(0)
            );
            println!(
                "{{\"out\": {:?}, \"samples\": {}, \"seed\": {}, \"config_digest\": \"{}\"}}",
                out.display().to_string(),
                dataset.records.len(),
                seed,
                dataset.config_hash
            );
        }
        MpcCmd::Metrics { config, input, k, out, threads } => {
            let (core_config, settings, file_seed) =
                jsonio::read_pipeline_config(&config)?.into_parts();
            let records = csvio::read_dataset(&input)?;
            let budgets = parse_k_range(&k)?;
            let rows =
                parallel::record_metrics(&core_config, &settings, &records, &budgets, threads)?;
            csvio::write_metric_trace(&out, &rows)?;
            RunManifest::capture(mpc::config_digest(&core_config, &settings), file_seed)
                .write_sidecar(&out)?;
            println!(
                "{{\"out\": {:?}, \"rows\": {}, \"samples\": {}}}",
                out.display().to_string(),
                rows.len(),
                records.len()
            );
        }
    }
    Ok(())
}

fn run_validate(args: ValidateArgs) -> Result<(), CliError> {
    let spec = jsonio::read_synthetic_spec(&args.spec, args.seed)?;
    let mode = match args.mode {
        ValidateMode::Robust => CertMode::Robust,
        ValidateMode::Relaxed => CertMode::Relaxed {
            rho: args.rho.ok_or_else(|| {
                CliError::Input("--rho is required for relaxed mode".to_string())
            })?,
        },
        ValidateMode::Interval => CertMode::Interval {
            rho: args.rho.ok_or_else(|| {
                CliError::Input("--rho is required for interval mode".to_string())
            })?,
        },
    };
    let report =
        parallel::pac_monte_carlo(&spec, args.n, args.beta, mode, args.reps, args.threads)?;
    let mode_name = match args.mode {
        ValidateMode::Robust => "robust",
        ValidateMode::Relaxed => "relaxed",
        ValidateMode::Interval => "interval",
    };
    println!("{}", jsonio::coverage_json(mode_name, args.n, &report));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_and_range_parsers() {
        assert_eq!(parse_targets("500,100,50,10,5,1").unwrap(), vec![500, 100, 50, 10, 5, 1]);
        assert!(parse_targets("5,x").is_err());
        assert_eq!(parse_k_range("1:4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_k_range("7").unwrap(), vec![7]);
        assert!(parse_k_range("9:2").is_err());
    }

    #[test]
    fn budget_grid_is_inclusive() {
        let grid = budget_grid(25.0, 25.0, 100.0).unwrap();
        assert_eq!(grid, vec![25.0, 50.0, 75.0, 100.0]);
        assert_eq!(budget_grid(25.0, 25.0, 10000.0).unwrap().len(), 400);
        assert!(budget_grid(10.0, 0.0, 20.0).is_err());
    }

    #[test]
    fn exit_codes_by_error_kind() {
        assert_eq!(CliError::Input("x".into()).code(), 2);
        assert_eq!(CliError::Numerical("x".into()).code(), 3);
        assert_eq!(CliError::SamplingAbort("x".into()).code(), 4);
        let e: CliError = MpcError::AcceptanceRateTooLow { examined: 9, accepted: 0 }.into();
        assert_eq!(e.code(), 4);
        let e: CliError = BoundsError::InvalidSampleCount.into();
        assert_eq!(e.code(), 2);
        let e: CliError =
            BoundsError::BracketFailure { context: "t", trace: vec![] }.into();
        assert_eq!(e.code(), 3);
    }
}
