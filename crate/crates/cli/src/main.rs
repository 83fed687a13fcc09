use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod svg;

pub type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

#[derive(Parser, Debug)]
#[command(name = "revext", version, about = "Reversible extensions of partial dynamical systems")]
pub struct Cli {
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, global = true, default_value = "revext-out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample the strata of an extension and draw its ladder.
    Extend(ExtendArgs),
    /// Cascade parameter table and bifurcation diagram of the logistic family.
    Bifurcate(BifurcateArgs),
    /// Regime of a logistic parameter.
    Classify(ClassifyArgs),
    /// Decomposition graph of the inverse limit for a regime.
    ContinuumGraph(GraphArgs),
    /// Rotation number, compression case and classification of a circle map.
    Rotation(RotationArgs),
    /// Finite operator model checks.
    OperatorCheck(OperatorArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SystemKind {
    Logistic,
    Rotation,
    Constant,
    /// Perturbed circle lift `t + τ + a·sin(2πt)/2π`, or a lift read from `--grid`.
    Custom,
}

#[derive(Args, Debug)]
pub struct ExtendArgs {
    #[arg(long)]
    pub system: Option<SystemKind>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Value of the lift at 0 for circle systems; defaults to `tau`.
    #[arg(long)]
    pub gamma0: Option<f64>,
    /// Amplitude of the sine perturbation (custom system).
    #[arg(long)]
    pub a: Option<f64>,
    /// File of lift values `γ(j/K)`, `j = 0..=K`, one per line (custom system).
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// Image point of the constant map.
    #[arg(long)]
    pub p: Option<f64>,
    /// Largest finite stratum sampled.
    #[arg(long = "N")]
    pub n_max: Option<usize>,
    /// Truncation depth of `M_∞` chains.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Grid points per stratum.
    #[arg(long)]
    pub density: Option<usize>,
}

#[derive(Args, Debug)]
pub struct BifurcateArgs {
    /// Number of period doublings in the table.
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub mu_max: Option<usize>,
    #[arg(long)]
    pub windows: Option<usize>,
    #[arg(long)]
    pub lambda_min: Option<f64>,
    #[arg(long)]
    pub lambda_max: Option<f64>,
    /// Parameter steps in the diagram sweep.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub transient: Option<usize>,
    /// Orbit points kept per parameter.
    #[arg(long)]
    pub keep: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeKind {
    Cascade,
    Mu,
    Window,
    WindowCascade,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Dot,
    Json,
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    #[arg(long)]
    pub regime: Option<RegimeKind>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Classify this parameter instead of naming a regime.
    #[arg(long, conflicts_with = "regime")]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub format: Option<GraphFormat>,
}

#[derive(Args, Debug)]
pub struct RotationArgs {
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long)]
    pub n_iter: Option<usize>,
    #[arg(long)]
    pub max_denominator: Option<u64>,
    /// Accepted residual of a periodic point.
    #[arg(long)]
    pub periodic_tol: Option<f64>,
    /// Ladder arcs listed in the shape.
    #[arg(long = "N")]
    pub n_max: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Constant,
    Rotation,
    RotationUnitary,
    LogisticPeriod3,
}

#[derive(Args, Debug)]
pub struct OperatorArgs {
    #[arg(long)]
    pub system: Option<ModelKind>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub y_points: Option<usize>,
    /// Rotation by `m/n`.
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub n: Option<u32>,
    /// Shifts used to generate `B`; defaults to the model dimension.
    #[arg(long)]
    pub n_max: Option<usize>,
}

fn init_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("REVEXT_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| format!("REVEXT_THREADS must be a positive integer, got {v}"))?;
        if n == 0 {
            return Err("REVEXT_THREADS must be at least 1".into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> CliResult<bool> {
        init_threads()?;
        let cfg = match &cli.config {
            Some(p) => config::FileConfig::load(p)?,
            None => config::FileConfig::default(),
        };
        std::fs::create_dir_all(&cli.out)
            .map_err(|e| format!("cannot create {}: {e}", cli.out.display()))?;
        commands::run(&cli.command, &cfg, &cli.out)
    };
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
