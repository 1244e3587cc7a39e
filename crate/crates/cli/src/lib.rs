//! Command-line front end for staircase-code BER sweeps.

mod args;
mod manifest;

use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use staircase::montecarlo::run_point_with_progress;
use staircase::SimPoint;
use thiserror::Error;

pub use args::{parse_snr_list, Args, Format};
pub use manifest::{emit_results, read_manifest, write_csv, write_json, RunManifest, CSV_SCHEMA};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{flag}: {msg}")]
    Usage { flag: &'static str, msg: String },
    #[error(transparent)]
    Sim(#[from] staircase::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn usage(flag: &'static str, msg: impl Into<String>) -> Self {
        CliError::Usage { flag, msg: msg.into() }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage { .. } => 2,
            CliError::Sim(_) => 2,
            _ => 1,
        }
    }
}

/// Runs every (mode, SNR) point of the manifest's sweep and fills in its results.
pub fn execute(manifest: &mut RunManifest, quiet: bool) -> Result<(), CliError> {
    manifest.points.clear();
    for &mode in &manifest.modes {
        let cfg = manifest.sweep_for(mode);
        for (i, snr) in cfg.snr_db.iter().enumerate() {
            let mut last = Instant::now();
            let mut report = |p: &SimPoint| {
                if !quiet && last.elapsed() > Duration::from_secs(5) {
                    last = Instant::now();
                    eprintln!("  {mode} {snr:.3} dB: {} errors in {} bits", p.bit_errors, p.bits);
                }
            };
            let point = run_point_with_progress(&cfg, i, &mut report)?;
            if !quiet {
                let (lo, hi) = point.confidence_interval();
                eprintln!(
                    "{:>9} {snr:7.3} dB  BER {:.3e} [{lo:.2e}, {hi:.2e}]  {} errors / {} bits  {:.1}s",
                    mode.name(),
                    point.ber(),
                    point.bit_errors,
                    point.bits,
                    point.seconds
                );
            }
            manifest.points.push(point);
        }
    }
    Ok(())
}

pub fn run(args: Args) -> Result<(), CliError> {
    let mut manifest = match &args.replay {
        Some(path) => {
            let mut m = read_manifest(path)?;
            m.stamp();
            m
        }
        None => RunManifest::new(args.sweep_config()?, args.modes()),
    };
    execute(&mut manifest, args.quiet)?;
    match &args.out {
        Some(path) => emit_results(&manifest, args.format, Path::new(path)),
        None => {
            let mut buf = Vec::new();
            match args.format {
                Format::Csv => write_csv(&manifest, &mut buf)?,
                Format::Json => write_json(&manifest, &mut buf)
                    .map_err(|source| CliError::Json { path: "<stdout>".into(), source })?,
            }
            std::io::stdout().write_all(&buf).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}
