use clap::{Parser, ValueEnum};
use staircase::montecarlo::StopRule;
use staircase::{ComponentCodeSpec, DecoderConfig, Mode, Quantization, SweepConfig};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Standard,
    Smith,
    Marked,
    GenieMcf,
    GenieLb,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Standard => Mode::Standard,
            ModeArg::Smith => Mode::Smith,
            ModeArg::Marked => Mode::Marked,
            ModeArg::GenieMcf => Mode::GenieMcf,
            ModeArg::GenieLb => Mode::GenieLb,
        }
    }
}

/// Post-decoding BER sweeps of staircase codes over M-PAM/AWGN.
#[derive(Debug, Clone, Parser)]
#[command(name = "scc-sim", version)]
pub struct Args {
    /// Extended mother code and optional shortening: N,K,T[,S].
    #[arg(long, default_value = "256,239,2")]
    pub code: String,

    /// PAM order.
    #[arg(long = "mod", default_value_t = 2)]
    pub modulation: usize,

    /// SNR points in dB: comma-separated values and/or START:STEP:STOP ranges.
    #[arg(long = "snr-db", required_unless_present = "replay")]
    pub snr_db: Option<String>,

    /// Decoder mode; repeat to compare modes under common random numbers.
    #[arg(long, value_enum, default_value = "marked")]
    mode: Vec<ModeArg>,

    /// HRB threshold on |LLR| ("inf" disables HRB marking).
    #[arg(long, default_value = "10")]
    pub delta: String,

    /// Decoding window size L in blocks.
    #[arg(long, default_value_t = 9)]
    pub window: usize,

    /// Maximum iterations per window position.
    #[arg(long, default_value_t = 7)]
    pub iters: usize,

    /// Reliability quantization bits, or "exact".
    #[arg(long = "quant-bits", default_value = "5")]
    pub quant_bits: String,

    /// Disable bit flipping in marked mode.
    #[arg(long)]
    pub no_bit_flip: bool,

    /// Disable the zero-syndrome conflict rule in marked mode.
    #[arg(long)]
    pub no_zero_syndrome_rule: bool,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Stop a point once this many post-decoding bit errors are seen.
    #[arg(long = "min-errors", default_value_t = 500)]
    pub min_errors: u64,

    /// Stop a point once this many bits are counted.
    #[arg(long = "max-bits", default_value = "1e9")]
    pub max_bits: String,

    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,

    /// Counted blocks per simulated stream.
    #[arg(long = "stream-blocks", default_value_t = 200)]
    pub stream_blocks: usize,

    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<String>,

    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,

    /// Count only information bits of delivered blocks.
    #[arg(long)]
    pub count_info_bits_only: bool,

    /// Re-run the sweep recorded in a JSON manifest; other sweep flags are ignored.
    #[arg(long)]
    pub replay: Option<String>,

    /// No progress output on stderr.
    #[arg(long, short)]
    pub quiet: bool,
}

fn parse_f64(flag: &'static str, s: &str) -> Result<f64, CliError> {
    s.trim().parse::<f64>().map_err(|_| CliError::usage(flag, format!("not a number: {s:?}")))
}

/// Expands `a,b,c` and `start:step:stop` items (stop inclusive).
pub fn parse_snr_list(s: &str) -> Result<Vec<f64>, CliError> {
    const FLAG: &str = "--snr-db";
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(parse_f64(FLAG, v)?),
            [start, step, stop] => {
                let (start, step, stop) = (parse_f64(FLAG, start)?, parse_f64(FLAG, step)?, parse_f64(FLAG, stop)?);
                if step.is_nan() || step <= 0.0 || stop < start {
                    return Err(CliError::usage(FLAG, format!("bad range {item:?}")));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
                out.extend((0..n).map(|i| start + i as f64 * step));
            }
            _ => return Err(CliError::usage(FLAG, format!("cannot parse {item:?}"))),
        }
    }
    if out.is_empty() {
        return Err(CliError::usage(FLAG, "no SNR points given"));
    }
    if out.iter().any(|v| !v.is_finite()) {
        return Err(CliError::usage(FLAG, "SNR values must be finite"));
    }
    Ok(out)
}

fn parse_code(s: &str) -> Result<ComponentCodeSpec, CliError> {
    const FLAG: &str = "--code";
    let nums: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| CliError::usage(FLAG, format!("not an integer in {s:?}"))))
        .collect::<Result<_, _>>()?;
    let (n, k, t, sh) = match nums.as_slice() {
        [n, k, t] => (*n, *k, *t, 0),
        [n, k, t, sh] => (*n, *k, *t, *sh),
        _ => return Err(CliError::usage(FLAG, "expected N,K,T or N,K,T,S")),
    };
    let spec = ComponentCodeSpec::new(n, k, t)
        .and_then(|c| c.shorten(sh))
        .map_err(|e| CliError::usage(FLAG, e.to_string()))?;
    staircase::BchCode::new(&spec).map_err(|e| CliError::usage(FLAG, e.to_string()))?;
    Ok(spec)
}

impl Args {
    pub fn modes(&self) -> Vec<Mode> {
        let mut modes: Vec<Mode> = Vec::new();
        for &m in &self.mode {
            let m = Mode::from(m);
            if !modes.contains(&m) {
                modes.push(m);
            }
        }
        modes
    }

    pub fn decoder_config(&self) -> Result<DecoderConfig, CliError> {
        let delta = match self.delta.trim() {
            "inf" | "infinity" => f64::INFINITY,
            d => parse_f64("--delta", d)?,
        };
        if delta.is_nan() || delta <= 0.0 {
            return Err(CliError::usage("--delta", format!("must be positive, got {}", self.delta)));
        }
        let quant = match self.quant_bits.trim() {
            "exact" => Quantization::Exact,
            q => match q.parse::<u8>() {
                Ok(b) if (1..=16).contains(&b) => Quantization::Bits(b),
                _ => return Err(CliError::usage("--quant-bits", format!("expected 1..=16 or \"exact\", got {q:?}"))),
            },
        };
        if self.window < 3 {
            return Err(CliError::usage("--window", format!("must be at least 3, got {}", self.window)));
        }
        if self.iters == 0 {
            return Err(CliError::usage("--iters", "must be at least 1"));
        }
        let mode = self.modes().first().copied().unwrap_or(Mode::Marked);
        Ok(DecoderConfig {
            mode,
            window: self.window,
            iterations: self.iters,
            delta,
            quant,
            bit_flip: !self.no_bit_flip,
            zero_syndrome_rule: !self.no_zero_syndrome_rule,
        })
    }

    pub fn sweep_config(&self) -> Result<SweepConfig, CliError> {
        let code = parse_code(&self.code)?;
        if ![2, 4, 8].contains(&self.modulation) {
            return Err(CliError::usage("--mod", format!("must be 2, 4 or 8, got {}", self.modulation)));
        }
        let snr_db = parse_snr_list(self.snr_db.as_deref().unwrap_or(""))?;
        let max_bits = parse_f64("--max-bits", &self.max_bits)?;
        if max_bits.is_nan() || max_bits < 1.0 || max_bits > u64::MAX as f64 {
            return Err(CliError::usage("--max-bits", format!("out of range: {}", self.max_bits)));
        }
        let workers =
            self.workers.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
        if workers == 0 {
            return Err(CliError::usage("--workers", "must be at least 1"));
        }
        if self.stream_blocks == 0 {
            return Err(CliError::usage("--stream-blocks", "must be at least 1"));
        }
        let cfg = SweepConfig {
            code,
            modulation: self.modulation,
            decoder: self.decoder_config()?,
            snr_db,
            stop: StopRule { min_errors: self.min_errors, max_bits: max_bits as u64 },
            workers,
            base_seed: self.seed,
            stream_blocks: self.stream_blocks,
            count_info_bits_only: self.count_info_bits_only,
        };
        cfg.validate().map_err(|e| CliError::usage("--max-bits", e.to_string()))?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(extra: &[&str]) -> Args {
        let mut argv = vec!["scc-sim"];
        argv.extend_from_slice(extra);
        Args::try_parse_from(argv).unwrap()
    }

    #[test]
    fn defaults_match_reference_settings() {
        let a = parse(&["--snr-db", "7"]);
        let cfg = a.sweep_config().unwrap();
        assert_eq!(cfg.decoder.window, 9);
        assert_eq!(cfg.decoder.iterations, 7);
        assert_eq!(cfg.decoder.delta, 10.0);
        assert_eq!(cfg.decoder.quant, Quantization::Bits(5));
        assert_eq!(cfg.decoder.mode, Mode::Marked);
        assert_eq!((cfg.code.n_c(), cfg.code.k_c()), (256, 239));
        assert_eq!(cfg.stop, StopRule { min_errors: 500, max_bits: 1_000_000_000 });
        assert_eq!(cfg.stream_blocks, 200);
    }

    #[test]
    fn snr_range_expansion() {
        let v = parse_snr_list("6.0:0.25:8.0").unwrap();
        assert_eq!(v.len(), 9);
        assert_eq!(v[0], 6.0);
        assert_eq!(v[8], 8.0);
        assert_eq!(parse_snr_list("7, 7.5,8:1:9").unwrap(), vec![7.0, 7.5, 8.0, 9.0]);
        assert!(parse_snr_list("8:0.5:7").is_err());
        assert!(parse_snr_list("abc").is_err());
        assert!(parse_snr_list("").is_err());
    }

    #[test]
    fn rejects_nonpositive_delta_naming_the_flag() {
        let a = parse(&["--mode", "marked", "--delta", "0", "--snr-db", "7"]);
        let e = a.sweep_config().unwrap_err();
        assert!(e.to_string().starts_with("--delta"), "{e}");
        let a = parse(&["--delta", "inf", "--snr-db", "7"]);
        assert!(a.sweep_config().unwrap().decoder.delta.is_infinite());
    }

    #[test]
    fn code_parsing() {
        let a = parse(&["--code", "512,493,2,284", "--snr-db", "7"]);
        let c = a.sweep_config().unwrap().code;
        assert_eq!((c.n_c(), c.k_c(), c.t), (228, 209, 2));
        for bad in ["512,493", "512,493,2,3", "256,240,2", "x,1,2"] {
            let e = parse(&["--code", bad, "--snr-db", "7"]).sweep_config().unwrap_err();
            assert!(e.to_string().starts_with("--code"), "{bad}: {e}");
        }
    }

    #[test]
    fn other_range_checks() {
        for (flag, val) in
            [("--mod", "16"), ("--window", "2"), ("--iters", "0"), ("--quant-bits", "0"), ("--workers", "0")]
        {
            let e = parse(&[flag, val, "--snr-db", "7"]).sweep_config().unwrap_err();
            assert!(e.to_string().starts_with(flag), "{flag}: {e}");
        }
        assert!(Args::try_parse_from(["scc-sim", "--bogus", "--snr-db", "7"]).is_err());
        assert!(Args::try_parse_from(["scc-sim", "--mode", "turbo", "--snr-db", "7"]).is_err());
    }

    #[test]
    fn repeated_modes_keep_order_without_duplicates() {
        let a = parse(&["--mode", "standard", "--mode", "marked", "--mode", "standard", "--snr-db", "7"]);
        assert_eq!(a.modes(), vec![Mode::Standard, Mode::Marked]);
    }
}
