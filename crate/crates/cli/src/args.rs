use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::io::BUILTIN;

/// Loop ratio of the `loops` command. The halving ratio of single-shot
/// runs drops the last loops below half a quantizer step, where they stop
/// changing the output.
pub const LOOPS_RATIO: f64 = 0.6;

/// Fully resolved settings of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub output: Option<PathBuf>,
    pub wavelet: String,
    pub levels: usize,
    pub threshold: f64,
    pub loop_ratio: f64,
    pub loops: usize,
    pub quantizer: f64,
    pub csv: Option<PathBuf>,
    pub plot_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: PathBuf::from(BUILTIN),
            output: None,
            wavelet: "dhwt".into(),
            levels: 2,
            threshold: 100.0,
            loop_ratio: 0.5,
            loops: 11,
            quantizer: 1.0,
            csv: None,
            plot_dir: None,
        }
    }
}

impl RunConfig {
    /// Defaults of the `loops` command.
    pub fn loops_default() -> Self {
        Self {
            loop_ratio: LOOPS_RATIO,
            ..Self::default()
        }
    }
}

/// Discrete Hermite wavelet image codec.
#[derive(Debug, Parser)]
#[command(name = "dhwt", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compress an image into a .dhwt container and print its quality report.
    Compress(CompressArgs),
    /// Rebuild an 8-bit image from a .dhwt container.
    Decompress(DecompressArgs),
    /// One compression per loop with a geometrically shrinking threshold.
    Loops(LoopsArgs),
    /// Compare dhwt, sym2, coif2 and db2 over levels 1 to 8.
    Compare(CompareArgs),
    /// Print the header of a .dhwt container.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
pub struct InputArg {
    /// PNG, PPM or PGM image, or `builtin` for the synthetic test image.
    #[arg(short, long, default_value = BUILTIN)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    /// Detail threshold T₀.
    #[arg(short = 't', long, default_value_t = 100.0)]
    pub threshold: f64,
    /// Quantizer step.
    #[arg(short, long, default_value_t = 1.0)]
    pub quantizer: f64,
}

#[derive(Debug, Args)]
pub struct CodecArgs {
    /// dhwt, haar, db2, sym2 or coif2.
    #[arg(short, long, default_value = "dhwt")]
    pub wavelet: String,
    #[arg(short, long, default_value_t = 2)]
    pub levels: usize,
    #[command(flatten)]
    pub rate: RateArgs,
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    #[command(flatten)]
    pub input: InputArg,
    #[arg(short, long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub codec: CodecArgs,
    /// Also write the report as a one-row CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecompressArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// .png, .ppm or .pgm
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct LoopsArgs {
    #[command(flatten)]
    pub input: InputArg,
    #[command(flatten)]
    pub codec: CodecArgs,
    /// Threshold ratio r between consecutive loops.
    #[arg(short = 'r', long, default_value_t = LOOPS_RATIO)]
    pub loop_ratio: f64,
    #[arg(short = 'n', long, default_value_t = 11)]
    pub loops: usize,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: InputArg,
    #[command(flatten)]
    pub rate: RateArgs,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Directory for per-metric plot data (mse.dat, psnr.dat, cr.dat, bpp.dat).
    #[arg(long)]
    pub plot_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(short, long)]
    pub input: PathBuf,
}

impl Command {
    pub fn to_config(&self) -> RunConfig {
        let base = RunConfig::default();
        match self {
            Command::Compress(a) => RunConfig {
                input: a.input.input.clone(),
                output: Some(a.output.clone()),
                wavelet: a.codec.wavelet.clone(),
                levels: a.codec.levels,
                threshold: a.codec.rate.threshold,
                quantizer: a.codec.rate.quantizer,
                csv: a.csv.clone(),
                ..base
            },
            Command::Decompress(a) => RunConfig {
                input: a.input.clone(),
                output: Some(a.output.clone()),
                ..base
            },
            Command::Loops(a) => RunConfig {
                input: a.input.input.clone(),
                wavelet: a.codec.wavelet.clone(),
                levels: a.codec.levels,
                threshold: a.codec.rate.threshold,
                quantizer: a.codec.rate.quantizer,
                loop_ratio: a.loop_ratio,
                loops: a.loops,
                csv: a.csv.clone(),
                ..base
            },
            Command::Compare(a) => RunConfig {
                input: a.input.input.clone(),
                threshold: a.rate.threshold,
                quantizer: a.rate.quantizer,
                csv: a.csv.clone(),
                plot_dir: a.plot_dir.clone(),
                ..base
            },
            Command::Inspect(a) => RunConfig {
                input: a.input.clone(),
                ..base
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn loops_defaults_match_config() {
        let cli = Cli::parse_from(["dhwt", "loops"]);
        assert_eq!(cli.command.to_config(), RunConfig::loops_default());
        let cli = Cli::parse_from(["dhwt", "compress", "-o", "x.dhwt"]);
        let cfg = cli.command.to_config();
        assert_eq!((cfg.levels, cfg.threshold, cfg.quantizer), (2, 100.0, 1.0));
        assert_eq!(cfg.wavelet, "dhwt");
    }
}
