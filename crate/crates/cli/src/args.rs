use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "canonphase", version, about = "Canonical phase estimation under photon loss")]
pub struct Cli {
    /// Worker threads for sweeps (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum detectable phase against photon number for one loss.
    Curve(CurveArgs),
    /// Optimal photon number over a grid of losses.
    Nopt(NoptArgs),
    /// Phase distribution P(phi) for one photon number and loss.
    Dist(DistArgs),
    /// Cross-check every computation against brute-force references.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Data file to write; a gnuplot script is written next to CSV output.
    /// Without it, data goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Divide the sharpness by the total probability of the phase distribution.
    #[arg(long)]
    pub normalized: bool,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Fraction of photons lost, in [0, 1).
    #[arg(long)]
    pub loss: f64,

    /// Photon numbers scanned, as lo:hi inclusive.
    #[arg(long, default_value = "1:1000")]
    pub n_range: NRange,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct NoptArgs {
    /// lo:hi:count, optionally followed by :log for logarithmic spacing.
    #[arg(long)]
    pub loss_grid: LossGridSpec,

    /// Largest photon number scanned.
    #[arg(long, default_value_t = canonphase::sweep::DEFAULT_N_MAX)]
    pub n: u32,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    /// Photon number.
    #[arg(long)]
    pub n: u32,

    #[arg(long, default_value_t = 0.0)]
    pub loss: f64,

    /// Equally spaced phases on [0, 2pi).
    #[arg(long, default_value_t = 4096)]
    pub phi_samples: usize,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Largest 2j for the rotation-element comparisons (at most 24).
    #[arg(long = "max-2j", default_value_t = 12)]
    pub max_two_j: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NRange {
    pub lo: u32,
    pub hi: u32,
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
        let lo: u32 = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
        let hi: u32 = hi.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
        if lo == 0 || lo > hi {
            return Err(format!("need 1 <= lo <= hi, got {lo}:{hi}"));
        }
        Ok(NRange { lo, hi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossGridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub log: bool,
}

impl FromStr for LossGridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let log = match parts.as_slice() {
            [_, _, _] => false,
            [_, _, _, "log"] => true,
            [_, _, _, "lin"] => false,
            _ => return Err(format!("expected lo:hi:count[:log], got {s:?}")),
        };
        let lo = parts[0].parse().map_err(|e| format!("bad lo: {e}"))?;
        let hi = parts[1].parse().map_err(|e| format!("bad hi: {e}"))?;
        let count = parts[2].parse().map_err(|e| format!("bad count: {e}"))?;
        Ok(LossGridSpec { lo, hi, count, log })
    }
}
