use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use staircase::{Mode, SimPoint, SweepConfig};

use crate::{CliError, Format};

pub const FORMAT_VERSION: u32 = 1;

/// First line of every CSV file. Bump the version whenever the columns change.
pub const CSV_SCHEMA: &str = "# scc-sim csv v1";

const CSV_COLUMNS: [&str; 12] = [
    "snr_db",
    "mode",
    "code",
    "modulation",
    "bits",
    "bit_errors",
    "ber",
    "ci_low",
    "ci_high",
    "blocks",
    "miscorrections_logged",
    "seconds",
];

/// Everything needed to rerun a sweep, plus its results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format_version: u32,
    pub tool_version: String,
    pub timestamp_unix: u64,
    pub config: SweepConfig,
    pub modes: Vec<Mode>,
    pub points: Vec<SimPoint>,
}

impl RunManifest {
    pub fn new(config: SweepConfig, modes: Vec<Mode>) -> Self {
        let mut m = RunManifest {
            format_version: FORMAT_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix: 0,
            config,
            modes,
            points: Vec::new(),
        };
        m.stamp();
        m
    }

    /// Refreshes the tool version and timestamp.
    pub fn stamp(&mut self) {
        self.tool_version = env!("CARGO_PKG_VERSION").to_string();
        self.timestamp_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    }

    /// The sweep configuration with the decoder switched to `mode`.
    pub fn sweep_for(&self, mode: Mode) -> SweepConfig {
        let mut cfg = self.config.clone();
        cfg.decoder.mode = mode;
        cfg
    }
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(manifest: &RunManifest, mut out: W) -> Result<(), CliError> {
    writeln!(out, "{CSV_SCHEMA}").map_err(|e| CliError::Csv(e.into()))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    let code = manifest.config.code.to_string();
    let modulation = manifest.config.modulation.to_string();
    for p in &manifest.points {
        let (lo, hi) = p.confidence_interval();
        w.write_record([
            float(p.snr_db),
            p.mode.to_string(),
            code.clone(),
            modulation.clone(),
            p.bits.to_string(),
            p.bit_errors.to_string(),
            float(p.ber()),
            float(lo),
            float(hi),
            p.blocks.to_string(),
            p.miscorrections.to_string(),
            float(p.seconds),
        ])?;
    }
    w.flush().map_err(|e| CliError::Csv(e.into()))?;
    Ok(())
}

/// Writes every finite float with 17 significant digits.
struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{value:.8e}")
    }
}

pub fn write_json<W: Write>(manifest: &RunManifest, out: W) -> serde_json::Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(out, FullPrecision);
    manifest.serialize(&mut ser)?;
    ser.into_inner().write_all(b"\n").map_err(serde_json::Error::io)
}

pub fn emit_results(manifest: &RunManifest, format: Format, path: &Path) -> Result<(), CliError> {
    let shown = path.display().to_string();
    let io_err = |source| CliError::Io { path: shown.clone(), source };
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    match format {
        Format::Csv => write_csv(manifest, &mut out)?,
        Format::Json => {
            write_json(manifest, &mut out).map_err(|source| CliError::Json { path: shown.clone(), source })?
        }
    }
    out.flush().map_err(io_err)
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<RunManifest, CliError> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let file = File::open(path).map_err(|source| CliError::Io { path: shown.clone(), source })?;
    let m: RunManifest = serde_json::from_reader(io::BufReader::new(file))
        .map_err(|source| CliError::Json { path: shown.clone(), source })?;
    if m.format_version != FORMAT_VERSION {
        return Err(CliError::usage("--replay", format!("{shown}: unsupported manifest version {}", m.format_version)));
    }
    m.config.validate()?;
    Ok(m)
}
