//! `tdacp`: diagrams, models and change-point detection from the shell.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, thiserror::Error)]
#[error("{msg}")]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self { code: 2, msg: msg.into() }
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Self { code: 3, msg: msg.into() }
    }

    pub fn mismatch(msg: impl Into<String>) -> Self {
        Self { code: 4, msg: format!("model mismatch: {}", msg.into()) }
    }
}

impl From<tdacp::Error> for CliError {
    fn from(e: tdacp::Error) -> Self {
        match e {
            tdacp::Error::InvalidParameter(_) | tdacp::Error::InvalidBinCount(_) => {
                Self::usage(e.to_string())
            }
            _ => Self::data(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "tdacp", version, about = "Topological change-point detection for streams of frames")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one persistence diagram per frame
    Diagram(DiagramArgs),
    /// Fit histogram breakpoints on a prefix of a diagram file
    Train(TrainArgs),
    /// Run the scan detector over a diagram file
    Detect(DetectArgs),
    /// Write synthetic frames with a known change-point
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// Headerless CSV, one point per row
    CsvPoints,
    /// PGM image (P2 or P5)
    PgmGrid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Rips,
    #[value(alias = "lower_star")]
    LowerStar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DimsArg {
    #[value(name = "0")]
    Zero,
    #[value(name = "1")]
    One,
    Both,
}

#[derive(Args)]
pub struct DiagramArgs {
    /// A frame file, or a directory of frames read in file name order
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub format: InputFormat,
    /// Filtration; defaults to rips for points and lower-star for grids
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Rips truncation scale, or `auto` for the frame's diameter
    #[arg(long)]
    pub eps_max: Option<String>,
    /// Highest simplex dimension of the Rips complex
    #[arg(long, default_value_t = 2)]
    pub max_dim: usize,
    #[arg(long, value_enum, default_value = "both")]
    pub dims: DimsArg,
    /// Keep pairs with zero persistence
    #[arg(long)]
    pub keep_zero: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SigmaArg {
    Identity,
    /// Inverse per-bin variance over the training frames
    Invvar,
}

#[derive(Args)]
pub struct TrainArgs {
    /// Diagram file written by `diagram`
    pub diagrams: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    /// Number of leading records pooled for training
    #[arg(long, default_value_t = 1)]
    pub train_prefix: usize,
    #[arg(long, default_value_t = 0)]
    pub dim: usize,
    #[arg(long, value_enum, default_value = "identity")]
    pub sigma: SigmaArg,
    /// Count essential classes, which persist until the largest filtration value
    #[arg(long)]
    pub include_infinite: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("stop").required(true).args(["threshold", "calibrate"])))]
pub struct DetectArgs {
    /// Diagram file written by `diagram`
    pub diagrams: PathBuf,
    /// Model file; repeat to scan several dimensions jointly
    #[arg(long, required = true)]
    pub model: Vec<PathBuf>,
    /// Window length w in frames
    #[arg(long)]
    pub window: usize,
    /// Largest look-back in frames, or `inf`; defaults to 8 windows
    #[arg(long)]
    pub lookback: Option<String>,
    /// Alarm threshold (`inf` never alarms)
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Calibrate the threshold for this false alarm probability
    #[arg(long)]
    pub calibrate: Option<f64>,
    /// Length of each bootstrap stream; defaults to the number of records
    #[arg(long, requires = "calibrate")]
    pub horizon: Option<usize>,
    #[arg(long, default_value_t = 200)]
    pub replicates: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Pre-change frames used for calibration; defaults to the training prefix
    #[arg(long)]
    pub calib_prefix: Option<usize>,
    /// Weight frames by their raw persistence mass in window means
    #[arg(long)]
    pub pool_raw_mass: bool,
    /// Trace CSV; stdout when omitted
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[command(subcommand)]
    pub scenario: Scenario,
}

#[derive(Subcommand)]
pub enum Scenario {
    /// Gaussian bumps whose amplitude steps at the change-point (16-bit PGM frames)
    GridStream {
        #[arg(long, default_value_t = 32)]
        rows: usize,
        #[arg(long, default_value_t = 32)]
        cols: usize,
        #[arg(long, default_value_t = 120)]
        frames: usize,
        /// Number (1-based) of the first post-change frame
        #[arg(long, default_value_t = 60)]
        change_at: usize,
        #[arg(long, default_value_t = 1.0)]
        pre_amp: f64,
        #[arg(long, default_value_t = 2.0)]
        post_amp: f64,
        #[arg(long, default_value_t = 0.05)]
        noise_sd: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Noisy samples of one circle, then of two circles (CSV frames)
    Circles {
        #[arg(long, default_value_t = 60)]
        points: usize,
        #[arg(long, default_value_t = 40)]
        frames: usize,
        /// Number (1-based) of the first post-change frame
        #[arg(long, default_value_t = 20)]
        change_at: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 0.05)]
        noise_sd: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Diagram(a) => commands::diagram(&a),
        Command::Train(a) => commands::train(&a),
        Command::Detect(a) => commands::detect(&a),
        Command::Simulate(a) => commands::simulate(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
