//! `glimps` command line: instance generation, detection, benchmarks.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use glimps_cli::bench::{run_sweep, Method, SweepKind, SweepSpec};
use glimps_cli::{io, CliError};
use glimps_core::clock::WallClock;
use glimps_core::milp::{LambdaMode, SolveContext};
use glimps_core::pipeline::{glimps_detect, glimps_detect_with, GlimpsConfig};
use glimps_core::synth::{generate, InstanceSpec};

#[derive(Parser)]
#[command(name = "glimps", about = "Super-robust matched subspace detection", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded synthetic instance as CSV files.
    Gen(GenArgs),
    /// Detect the inlier coordinates of an observation vector.
    Detect(DetectArgs),
    /// Run a benchmark sweep and write per-trial rows as CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Ambient dimension.
    #[arg(long)]
    d: usize,
    /// Subspace dimension.
    #[arg(long)]
    r: usize,
    /// Outlier probability per coordinate.
    #[arg(long)]
    p: f64,
    /// Inlier noise standard deviation.
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    /// Reproducibility seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Basis output path (d x r CSV).
    #[arg(long, value_name = "FILE")]
    out_basis: PathBuf,
    /// Observation output path (d rows).
    #[arg(long, value_name = "FILE")]
    out_obs: PathBuf,
    /// Ground-truth output path (index,outlier_flag,clean_value rows).
    #[arg(long, value_name = "FILE")]
    out_truth: PathBuf,
}

#[derive(Args)]
struct DetectArgs {
    /// Subspace basis CSV (d rows, r columns).
    #[arg(long, value_name = "FILE")]
    basis: PathBuf,
    /// Observation CSV (d rows).
    #[arg(long, value_name = "FILE")]
    obs: PathBuf,
    /// Stage-1 removal fraction of the ambient dimension.
    #[arg(long, default_value_t = 0.4)]
    removal: f64,
    /// Noise regularization: `none` for the noiseless formulation or a
    /// positive weight for the noisy one.
    #[arg(long, default_value = "none")]
    lambda: String,
    /// Stage-2 wall-clock budget in seconds.
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    /// Classification threshold; defaults to 1e-6 * (1 + max|x|).
    #[arg(long)]
    tau: Option<f64>,
    /// Output CSV path (index,residual,label rows).
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Optional greedy trace CSV (step,removed_index,ratio rows).
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    /// Stream solver progress lines to stderr.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Which experiment family to run.
    #[arg(long, value_name = "outliers|removal|noise|timing")]
    sweep: String,
    #[arg(long, default_value_t = 100)]
    d: usize,
    #[arg(long, default_value_t = 5)]
    r: usize,
    /// Trials per grid point.
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Per-trial solver budget in seconds.
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    /// Stage-1 removal fraction (overrides the sweep default grid).
    #[arg(long)]
    removal: Option<f64>,
    /// `none` or a positive regularization weight.
    #[arg(long)]
    lambda: Option<String>,
    /// Base seed for instance derivation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated methods: greedy,milp,glimps,l1,greedy-l1.
    #[arg(long, default_value = "greedy,milp,glimps")]
    methods: String,
    /// Override the outlier-probability grid, comma-separated.
    #[arg(long)]
    p_grid: Option<String>,
    /// Per-trial rows CSV output.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Optional per-cell mean/stddev CSV.
    #[arg(long, value_name = "FILE")]
    summary: Option<PathBuf>,
}

fn parse_lambda(text: &str) -> Result<LambdaMode, CliError> {
    if text == "none" {
        return Ok(LambdaMode::Noiseless);
    }
    let v: f64 = text
        .parse()
        .map_err(|_| CliError::Usage(format!("--lambda expects `none` or a number, got {text:?}")))?;
    if v < 0.0 {
        return Err(CliError::Usage("--lambda must be nonnegative".into()));
    }
    Ok(LambdaMode::Noisy(v))
}

fn parse_grid(text: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',') {
        out.push(
            part.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{flag}: bad number {part:?}")))?,
        );
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("{flag}: empty grid")));
    }
    Ok(out)
}

fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let spec = InstanceSpec::new(args.d, args.r, args.p, args.sigma, args.seed)?;
    let inst = generate(&spec);
    io::write_matrix_csv(&args.out_basis, &inst.u)?;
    io::write_vector_csv(&args.out_obs, &inst.x)?;
    io::write_truth_csv(&args.out_truth, &inst)?;
    println!(
        "generated d={} r={} p={} sigma={} seed={} ({} outliers)",
        args.d,
        args.r,
        args.p,
        args.sigma,
        args.seed,
        inst.num_outliers()
    );
    Ok(())
}

fn cmd_detect(args: &DetectArgs) -> Result<(), CliError> {
    let u = io::read_matrix_csv(&args.basis)?;
    let x = io::read_vector_csv(&args.obs)?;
    let cfg = GlimpsConfig {
        removal_fraction: args.removal,
        lambda: parse_lambda(&args.lambda)?,
        time_limit: args.time_limit,
        tau: args.tau,
        ..Default::default()
    };
    let res = if args.verbose {
        let clock = WallClock::start();
        let mut sink = |line: &str| eprintln!("{line}");
        let mut ctx = SolveContext::with_log(&clock, &mut sink, 256);
        glimps_detect_with(&u, &x, &cfg, &mut ctx)?
    } else {
        glimps_detect(&u, &x, &cfg)?
    };
    io::write_result_csv(&args.out, &res.residuals, &res.labels)?;
    if let (Some(path), Some(trace)) = (&args.trace, &res.stage1_trace) {
        io::write_trace_csv(path, trace)?;
    }
    let stage2 = res.stage2.as_ref();
    println!(
        "inliers={} recovered={} status={} nodes={} theta_hat={:?}",
        res.inliers.len(),
        res.recovered,
        stage2.map_or("-".into(), |s| format!("{:?}", s.status)),
        stage2.map_or(0, |s| s.nodes_explored),
        res.theta_hat.as_slice()
    );
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let kind = SweepKind::from_str(&args.sweep).map_err(CliError::Usage)?;
    let mut spec = SweepSpec::new(kind, args.d, args.r);
    spec.trials = args.trials;
    spec.time_limit = args.time_limit;
    spec.base_seed = args.seed;
    if let Some(removal) = args.removal {
        spec.removal_grid = vec![removal];
    }
    if let Some(lambda) = &args.lambda {
        spec.lambda = parse_lambda(lambda)?;
    }
    if let Some(p_grid) = &args.p_grid {
        spec.p_grid = parse_grid(p_grid, "--p-grid")?;
    }
    let mut methods = Vec::new();
    for m in args.methods.split(',') {
        methods.push(Method::from_str(m.trim()).map_err(CliError::Usage)?);
    }
    spec.methods = methods;

    let report = run_sweep(&spec, &args.out, args.summary.as_deref())?;
    println!(
        "sweep {} done: {} rows total ({} new, {} resumed, {} failures)",
        spec.experiment_id(),
        report.rows_total,
        report.rows_new,
        report.rows_skipped,
        report.failures
    );
    if report.failures > 0 {
        return Err(CliError::Usage(format!("{} trials failed", report.failures)));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Detect(args) => cmd_detect(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
