mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cfraj_core::verify::Suite;
use cfraj_core::{Method, Profile};

pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_OPERATIONAL: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "cfraj", version, about = "Continued-fraction measures with Fourier decay")]
pub struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Block measures.
    #[command(subcommand)]
    Nu(NuCmd),
    /// Exceptional-index schedules.
    #[command(subcommand)]
    Schedule(ScheduleCmd),
    /// The mass distribution on forced-run paths.
    #[command(subcommand)]
    Lambda(LambdaCmd),
    /// Fourier transform estimates.
    #[command(subcommand)]
    Fourier(FourierCmd),
    /// Runs the invariant suites.
    Verify(VerifyArgs),
    /// Exponent bookkeeping.
    #[command(subcommand)]
    Audit(AuditCmd),
}

#[derive(Debug, Subcommand)]
pub enum NuCmd {
    /// Builds the uniform measure on a continuant window.
    Build(NuBuildArgs),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("scale").required(true).args(["sigma", "sigma_log", "sigma_median"]))]
pub struct NuBuildArgs {
    /// Largest partial quotient.
    #[arg(long = "N", value_name = "N")]
    pub n: u64,
    /// Block length.
    #[arg(long)]
    pub p: usize,
    /// Log-continuant centre of the window.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Centre the window at ln X.
    #[arg(long, value_name = "X")]
    pub sigma_log: Option<f64>,
    /// Centre the window at the median log-continuant.
    #[arg(long)]
    pub sigma_median: bool,
    /// Relative half-width of the window (defaults to the profile's).
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value = "desk")]
    pub profile: Profile,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ScheduleCmd {
    /// Builds `i_1, ..., i_depth` from the growth condition.
    Make(ScheduleMakeArgs),
}

#[derive(Debug, Args)]
pub struct ScheduleMakeArgs {
    /// Block measure produced by `nu build`.
    #[arg(long)]
    pub nu_file: std::path::PathBuf,
    /// Exponent of the power approximation function.
    #[arg(long, conflicts_with = "psi_exp")]
    pub tau: Option<String>,
    /// Use the exponential approximation function.
    #[arg(long)]
    pub psi_exp: bool,
    /// Run lengths, comma separated; the last one repeats.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub r: Vec<u64>,
    #[arg(long, default_value_t = 1)]
    pub i1: u64,
    #[arg(long)]
    pub depth: usize,
    /// Ratio for the superlacunary check.
    #[arg(long, default_value = "2")]
    pub ratio: String,
    #[arg(long, default_value = "desk")]
    pub profile: Profile,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum LambdaCmd {
    /// Exact masses of the label sets.
    Mass(LambdaMassArgs),
    /// Random paths.
    Sample(LambdaSampleArgs),
}

#[derive(Debug, Args)]
pub struct LambdaMassArgs {
    /// Measure configuration (JSON).
    #[arg(long)]
    pub config: std::path::PathBuf,
    /// Labels to report, comma separated (defaults to all built labels).
    #[arg(long, value_delimiter = ',')]
    pub labels: Vec<u64>,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct LambdaSampleArgs {
    #[arg(long)]
    pub config: std::path::PathBuf,
    /// Blocks per path (defaults to the horizon).
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum FourierCmd {
    /// Estimates the transform along a list of frequencies.
    Scan(FourierScanArgs),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("measure").required(true).args(["config", "nu_file"]))]
#[command(group = clap::ArgGroup::new("freqs").required(true).args(["xi", "dyadic"]))]
pub struct FourierScanArgs {
    /// Measure configuration (JSON).
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    /// Block measure file; scans the product measure.
    #[arg(long, requires = "kaufman_only")]
    pub nu_file: Option<std::path::PathBuf>,
    /// Scan the product of block measures without forced runs.
    #[arg(long)]
    pub kaufman_only: bool,
    /// Frequencies, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub xi: Vec<f64>,
    /// Dyadic frequencies 2^LO..2^HI.
    #[arg(long, value_name = "LO:HI")]
    pub dyadic: Option<String>,
    #[arg(long, default_value = "cylinder")]
    pub method: Method,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Blocks per leaf (defaults to the configured horizon, or 6 for a product).
    #[arg(long)]
    pub depth: Option<usize>,
    /// Scale exponent selecting the exceptional stage.
    #[arg(long, default_value = "50/358")]
    pub alpha: String,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: Suite,
    #[arg(long, default_value = "desk")]
    pub profile: Profile,
    /// Also check a block measure file.
    #[arg(long)]
    pub measure: Option<std::path::PathBuf>,
    /// Print the reports as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum AuditCmd {
    /// Recomputes the decay exponents.
    Exponents(AuditArgs),
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long, default_value = "50/358")]
    pub alpha: String,
    #[arg(long)]
    pub json: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_OPERATIONAL);
        }
    }
    match commands::dispatch(&cli.command) {
        Ok(commands::Outcome::Ok) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Violation) => ExitCode::from(EXIT_VIOLATION),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = if e.is::<commands::UsageError>() {
                EXIT_USAGE
            } else {
                EXIT_OPERATIONAL
            };
            ExitCode::from(code)
        }
    }
}
