//! `nda` - offline dataset tooling for neuromorphic data augmentation.

mod commands;
mod labels;
mod manifest;
mod util;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use util::{Dims, Outcome, UsageError};

#[derive(Debug, Parser)]
#[command(name = "nda", version, about = "Event-camera frame integration and augmentation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate `.bin` / `.evt.txt` recordings into `.ndaf` frame tensors.
    Integrate(IntegrateArgs),
    /// Write augmented copies of `.ndaf` samples.
    Augment(AugmentArgs),
    /// Generate events from an image moved along a trajectory.
    Simulate(SimulateArgs),
    /// Check that augmenting generated events matches generating from augmented scenes.
    VerifyCommute(VerifyArgs),
    /// Measure per-sample augmentation latency.
    Bench(BenchArgs),
    /// Fire-rate and sparsity report for `.ndaf` spike tensors.
    Stats(StatsArgs),
    /// Dump `(t, p)` planes of a `.ndaf` file as PGM images.
    DumpFrames(DumpArgs),
    /// Seeded train/valid split of a directory's sample list.
    Split(SplitArgs),
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    pub in_dir: PathBuf,
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    pub bins: u32,
    /// `equal-duration` or `equal-count`.
    #[arg(long, default_value = "equal-duration")]
    pub mode: String,
    /// Target size as HxW, e.g. 48x48.
    #[arg(long)]
    pub resize: Option<Dims>,
    #[arg(long)]
    pub binarize: bool,
    /// Sensor size (HxW) for `.bin` inputs, which do not store it.
    #[arg(long, default_value = "34x34")]
    pub sensor: Dims,
    /// Label sidecar for the inputs; rewritten for the outputs.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    pub in_dir: PathBuf,
    pub out_dir: PathBuf,
    /// Policy as `key=value` pairs, e.g. `m=1,n=2,cutmix=on`.
    #[arg(long)]
    pub policy: Option<String>,
    /// Policy config file; `--policy` and `--seed` override its keys.
    #[arg(long)]
    pub policy_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub copies: u32,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Label sidecar; defaults to `<in_dir>/labels.txt` when present.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Number of classes; defaults to the largest label + 1.
    #[arg(long)]
    pub num_classes: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Grayscale image (PGM/PNG) or a built-in scene: `scene:bar`, `scene:square`, `scene:dot`.
    pub image: String,
    /// Output event file, `.bin` or `.evt.txt`.
    pub out_file: PathBuf,
    /// `static`, `translate:DX,DY` or `rotate:DEG` per step.
    #[arg(long, default_value = "translate:1,0")]
    pub trajectory: String,
    #[arg(long, default_value_t = 0.3)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    /// Microseconds between rendered frames.
    #[arg(long, default_value_t = 1000)]
    pub interval: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "default")]
    pub scene_suite: String,
    /// Write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 0.3)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory of `.ndaf` samples; synthetic (10,2,48,48) samples when omitted.
    pub in_dir: Option<PathBuf>,
    #[arg(long, default_value = "m=1,n=2")]
    pub policy: String,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub iters: u32,
    #[arg(long, default_value_t = 9000)]
    pub synthetic: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub in_dir: PathBuf,
    /// Dense MACs per input; adds a `synops` estimate per file.
    #[arg(long)]
    pub macs: Option<u64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    pub file: PathBuf,
    pub out_dir: PathBuf,
    /// Only this time bin.
    #[arg(long)]
    pub t: Option<usize>,
    /// Only this polarity channel.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub p: Option<u8>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    pub in_dir: PathBuf,
    pub out_dir: PathBuf,
    /// Fraction of samples in the training list.
    #[arg(long, default_value_t = 0.9)]
    pub train: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Integrate(a) => commands::integrate::run(&a),
        Command::Augment(a) => commands::augment::run(&a),
        Command::Simulate(a) => commands::simulate::run(&a),
        Command::VerifyCommute(a) => commands::verify::run(&a),
        Command::Bench(a) => commands::bench::run(&a),
        Command::Stats(a) => commands::stats::run(&a),
        Command::DumpFrames(a) => commands::dump::run(&a),
        Command::Split(a) => commands::split::run(&a),
    };
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(1),
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
