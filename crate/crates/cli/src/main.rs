mod config;
mod modes;

use anyhow::Context;
use clap::Parser;
use config::{ConfigError, ExperimentConfig};
use hetnet::HetnetError;
use modes::Mode;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

/// Coverage analysis, Monte Carlo validation and bias/partition search for
/// two-tier cellular networks.
#[derive(Parser, Debug)]
#[command(version)]
struct Args {
    /// Experiment file (JSON).
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides mc.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides mc.drops.
    #[arg(long)]
    drops: Option<usize>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Serialize)]
struct Checksum {
    file: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    config: &'a ExperimentConfig,
    mode: Mode,
    seed: u64,
    version: &'static str,
    wall_clock_s: f64,
    outputs: Vec<Checksum>,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_CLAIMS: u8 = 4;

fn init_threads() -> Result<(), ConfigError> {
    let Ok(value) = std::env::var("HETNET_THREADS") else {
        return Ok(());
    };
    let n: usize = value.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        ConfigError(format!(
            "HETNET_THREADS must be a positive integer, got {value:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError(format!("HETNET_THREADS: {e}")))
}

fn write_outputs(dir: &Path, files: &[modes::OutputFile]) -> anyhow::Result<Vec<Checksum>> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    files
        .iter()
        .map(|f| {
            let path = dir.join(&f.name);
            std::fs::write(&path, &f.contents)
                .with_context(|| format!("cannot write {}", path.display()))?;
            Ok(Checksum {
                file: f.name.clone(),
                sha256: hex::encode(Sha256::digest(f.contents.as_bytes())),
            })
        })
        .collect()
}

fn execute(args: &Args) -> anyhow::Result<bool> {
    let start = Instant::now();
    init_threads()?;
    let mut exp = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        exp.mc.seed = seed;
    }
    if let Some(drops) = args.drops {
        if drops == 0 {
            return Err(ConfigError("--drops must be > 0".into()).into());
        }
        exp.mc.drops = drops;
    }
    let min_window = 10.0 / exp.tiers[0].density_per_km2.sqrt();
    if args.mode == Mode::Validate && exp.mc.window_km < min_window {
        eprintln!("warning: mc.window_km {} is below {min_window:.1} km; edge effects may bias the simulation", exp.mc.window_km);
    }

    let report = modes::run(args.mode, &exp)?;
    let mut outputs = write_outputs(&args.out, &report.files)?;
    let manifest = RunManifest {
        config: &exp,
        mode: args.mode,
        seed: exp.mc.seed,
        version: env!("CARGO_PKG_VERSION"),
        wall_clock_s: start.elapsed().as_secs_f64(),
        outputs: std::mem::take(&mut outputs),
    };
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    let path = args.out.join("manifest.json");
    std::fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;

    if !args.quiet {
        for line in &report.summary {
            println!("{line}");
        }
        for f in &report.files {
            println!("wrote {}", args.out.join(&f.name).display());
        }
    }
    Ok(report.passed)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return EXIT_CONFIG;
    }
    match err.downcast_ref::<HetnetError>() {
        Some(HetnetError::InvalidConfig(_)) => EXIT_CONFIG,
        Some(HetnetError::NonConvergence { .. }) => EXIT_NUMERIC,
        _ => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CLAIMS),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
