use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use ringflow::config::ConfigFile;
use ringflow::CliResult;
use ringflow_core::Method;

mod commands;

/// Quantum backflow on a ring: kernel eigenproblems, extrapolation,
/// parameter sweeps and oracle checks. Every command writes its outputs
/// and a `<command>.manifest.json` with SHA-256 digests to `--out`.
#[derive(Parser, Debug)]
#[command(name = "ringflow", version, about)]
struct Cli {
    /// Flat `key = value` file supplying defaults for command options.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "ringflow-out")]
    out: PathBuf,

    /// Worker threads for sweeps and schedules.
    #[arg(long, global = true, env = "RINGFLOW_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Smallest eigenvalue of one truncated kernel.
    Eigen(EigenArgs),
    /// Infimum estimate from a schedule of truncations and a 1/N fit.
    Extrapolate(ExtrapolateArgs),
    /// Infimum along a uniform alpha/pi grid at fixed flux.
    Sweep(SweepArgs),
    /// Staged grid search for the most negative infimum in a box.
    Infimum(InfimumArgs),
    /// Closed-form two-mode bound: one point, the global optimum, or curves.
    Twomode(TwoModeArgs),
    /// Maximizing state at one truncation, with a coefficient-decay report.
    State(StateArgs),
    /// Time-resolved current of a state.
    Current(CurrentArgs),
    /// Free-line limit by Nystrom discretization or the small-alpha ring route.
    #[command(alias = "lineline")]
    Line(LineArgs),
    /// Full kernel matrix as CSV.
    Kernel(KernelArgs),
    /// Runs the built-in oracle checks; exits nonzero if any fails.
    Verify,
}

#[derive(Args, Debug, Clone, Default)]
pub struct AlphaArgs {
    /// Dimensionless ring parameter alpha.
    #[arg(long, conflicts_with = "alpha_over_pi", allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// The same parameter given as alpha/pi.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_over_pi: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct PointArgs {
    #[command(flatten)]
    pub alpha: AlphaArgs,
    /// Magnetic flux parameter; any real value, reduced to (-1, 0].
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
}

#[derive(Args, Debug)]
pub struct EigenArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Truncation: modes 0..=n.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub method: Option<MethodArg>,
}

#[derive(Args, Debug)]
pub struct ExtrapolateArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Comma-separated truncations (at least four, distinct).
    #[arg(long, value_delimiter = ',')]
    pub schedule: Option<Vec<usize>>,
    #[arg(long)]
    pub method: Option<MethodArg>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// First alpha/pi of the grid.
    #[arg(long)]
    pub alpha_min: Option<f64>,
    /// Last alpha/pi of the grid.
    #[arg(long)]
    pub alpha_max: Option<f64>,
    /// Number of grid points, ends included.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub schedule: Option<Vec<usize>>,
    #[arg(long)]
    pub method: Option<MethodArg>,
}

#[derive(Args, Debug)]
pub struct InfimumArgs {
    /// Lower edge of the alpha/pi box.
    #[arg(long)]
    pub alpha_min: Option<f64>,
    /// Upper edge of the alpha/pi box.
    #[arg(long)]
    pub alpha_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta_max: Option<f64>,
    /// Maximum number of extrapolated evaluations.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Coarse grid points along alpha.
    #[arg(long)]
    pub coarse_alpha: Option<usize>,
    /// Coarse grid points along beta.
    #[arg(long)]
    pub coarse_beta: Option<usize>,
    /// Refinement stages after the coarse scan.
    #[arg(long)]
    pub stages: Option<usize>,
    /// Distinct best points refined at each stage.
    #[arg(long)]
    pub candidates: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub schedule: Option<Vec<usize>>,
    /// Schedule for the last stage; defaults to `--schedule`.
    #[arg(long, value_delimiter = ',')]
    pub final_schedule: Option<Vec<usize>>,
    /// Keep searching beta in the last stage instead of pinning it to 0.
    #[arg(long)]
    pub free_beta: bool,
    #[arg(long)]
    pub method: Option<MethodArg>,
}

#[derive(Args, Debug)]
pub struct TwoModeArgs {
    #[arg(long)]
    pub m1: Option<u64>,
    #[arg(long)]
    pub m2: Option<u64>,
    #[command(flatten)]
    pub point: PointArgs,
    /// Global optimum over alpha and the admissible flux window.
    #[arg(long, conflicts_with_all = ["alpha", "alpha_over_pi"])]
    pub global: bool,
    /// Upper alpha/pi of the curve grid.
    #[arg(long)]
    pub alpha_max_over_pi: Option<f64>,
    /// Points of the curve grid.
    #[arg(long)]
    pub alpha_points: Option<usize>,
}

#[derive(Args, Debug)]
pub struct StateArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub method: Option<MethodArg>,
}

#[derive(Args, Debug)]
pub struct CurrentArgs {
    /// State CSV written by `ringflow state`.
    #[arg(long, conflicts_with_all = ["alpha", "alpha_over_pi", "beta", "n"])]
    pub state_file: Option<PathBuf>,
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau_max: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub method: Option<MethodArg>,
}

#[derive(Args, Debug)]
pub struct LineArgs {
    /// Half-line cutoff of the Nystrom grid.
    #[arg(long)]
    pub u_max: Option<f64>,
    #[arg(long)]
    pub n_points: Option<usize>,
    /// Repeat with u_max and n_points doubled this many times.
    #[arg(long)]
    pub doublings: Option<usize>,
    /// Use the ring kernel at small alpha instead of the Nystrom grid.
    #[arg(long)]
    pub ring_route: bool,
    #[command(flatten)]
    pub point: PointArgs,
    /// Ring truncation for `--ring-route`.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub method: Option<MethodArg>,
}

#[derive(Args, Debug)]
pub struct KernelArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long)]
    pub n: Option<usize>,
}

/// Eigensolver choice as it appears on the command line and in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodArg(pub Method);

impl FromStr for MethodArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dense" => Ok(Self(Method::Dense)),
            "iterative" | "lanczos" => Ok(Self(Method::Iterative)),
            "auto" => Ok(Self(Method::Auto)),
            other => Err(format!("unknown method '{other}' (expected dense, iterative or auto)")),
        }
    }
}

pub struct Context {
    pub config: ConfigFile,
    pub out: PathBuf,
    pub jobs: usize,
}

fn run(cli: Cli) -> CliResult<()> {
    let config = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::empty(),
    };
    let jobs = cli.jobs.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    if jobs == 0 {
        return Err(ringflow::CliError::Validation("--jobs must be at least 1".into()));
    }
    std::fs::create_dir_all(&cli.out).map_err(|e| ringflow::CliError::Output { path: cli.out.clone(), source: e })?;
    let ctx = Context { config, out: cli.out, jobs };
    match cli.command {
        Command::Eigen(a) => commands::eigen(&ctx, a),
        Command::Extrapolate(a) => commands::extrapolate(&ctx, a),
        Command::Sweep(a) => commands::sweep(&ctx, a),
        Command::Infimum(a) => commands::infimum(&ctx, a),
        Command::Twomode(a) => commands::twomode(&ctx, a),
        Command::State(a) => commands::state(&ctx, a),
        Command::Current(a) => commands::current(&ctx, a),
        Command::Line(a) => commands::line(&ctx, a),
        Command::Kernel(a) => commands::kernel(&ctx, a),
        Command::Verify => commands::verify(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
