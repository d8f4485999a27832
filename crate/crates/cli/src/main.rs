//! `roomwave` command-line pipeline.
//!
//! Settings are resolved in this order, later wins: the desk profile (or
//! `--profile`), the `--config` file, then individual flags. The output root is
//! `--out`, else `out` from the config, else `$ROOMWAVE_OUT`, else
//! `./roomwave-out`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use roomwave::Error;

mod commands;

#[derive(Parser, Debug)]
#[command(name = "roomwave", version, about = "Indoor radio-map generation pipeline")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Global {
    /// Pipeline config file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base profile: desk or full.
    #[arg(long, global = true)]
    profile: Option<String>,
    /// Scene seed base.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of scenes.
    #[arg(long, global = true)]
    count: Option<usize>,
    /// Carrier frequency in GHz (repeatable).
    #[arg(long = "freq", global = true)]
    freq: Vec<f64>,
    /// Receiver grid height in meters (repeatable).
    #[arg(long = "grid-height", global = true)]
    grid_height: Vec<f64>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output root.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate scene files into `<out>/scenes`.
    Generate,
    /// Trace radio maps for scene files into `<out>/maps`.
    Simulate {
        /// Scene files or directories of them; generated from the seed when absent.
        #[arg(long = "scene")]
        scenes: Vec<PathBuf>,
    },
    /// Encode first-stage input tensors into `<out>/tensors`.
    Encode {
        #[arg(long = "scene")]
        scenes: Vec<PathBuf>,
        /// 128 x 128 first-stage prediction tensor; encodes the second-stage input instead.
        #[arg(long)]
        stage1_prediction: Option<PathBuf>,
    },
    /// Path-loss baseline maps, plus an RMSE comparison against a dataset split.
    Baseline {
        #[arg(long = "scene")]
        scenes: Vec<PathBuf>,
        /// Dataset root to compare against.
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Split to compare on.
        #[arg(long, default_value = "test")]
        split: String,
        /// Model table (TOML); the bundled table when absent.
        #[arg(long)]
        models: Option<PathBuf>,
        /// Restrict to one model by name (repeatable).
        #[arg(long = "model")]
        model: Vec<String>,
    },
    /// Score predictions against targets with matching file names.
    Evaluate {
        #[arg(long)]
        targets: PathBuf,
        #[arg(long)]
        predictions: PathBuf,
        /// MAPE on linear power instead of dBm.
        #[arg(long)]
        linear_mape: bool,
        /// Multi-scale SSIM levels.
        #[arg(long)]
        ms_ssim: Option<usize>,
    },
    /// Full pipeline: scenes, maps, tensors and manifest.
    BuildDataset,
    /// Summarize a scene, map, tensor or dataset; maps are also rendered to PNG.
    Inspect { path: PathBuf },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::Io { .. } | Error::NotFound { .. } | Error::Image(_) => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.global, &cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            let msg = serde_json::json!({ "error": e.to_string(), "code": code });
            eprintln!("{msg}");
            ExitCode::from(code)
        }
    }
}
