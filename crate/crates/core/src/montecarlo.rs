//! Monte Carlo BER estimation.
//!
//! A point is simulated as a sequence of independent streams. Stream `s` at SNR index
//! `i` draws all of its randomness (information bits and noise) from a generator seeded
//! with `stream_seed(base_seed, i, s)`, so results depend neither on the decoder mode
//! (common random numbers) nor on how many worker threads run the streams. Streams are
//! folded in index order and the stop rule is checked after each one.

use std::collections::VecDeque;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bch::{BchCode, ComponentCodeSpec};
use crate::channel::{self, compute_llrs_into, hard_bit, MarkPlane, Pam};
use crate::error::{Error, Result};
use crate::frame::{serialize_bits, Block, StaircaseEncoder};
use crate::window::{DecodeStats, DecoderConfig, DecodingWindow, Mode};

/// Stop when either bound is reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub min_errors: u64,
    pub max_bits: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule { min_errors: 500, max_bits: 1_000_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub code: ComponentCodeSpec,
    /// PAM order (2, 4 or 8).
    pub modulation: usize,
    pub decoder: DecoderConfig,
    pub snr_db: Vec<f64>,
    pub stop: StopRule,
    pub workers: usize,
    pub base_seed: u64,
    /// Counted blocks per stream, after the burn-in.
    pub stream_blocks: usize,
    /// Count only the information columns of delivered blocks.
    pub count_info_bits_only: bool,
}

impl SweepConfig {
    pub fn new(code: ComponentCodeSpec, decoder: DecoderConfig) -> Self {
        SweepConfig {
            code,
            modulation: 2,
            decoder,
            snr_db: Vec::new(),
            stop: StopRule::default(),
            workers: 1,
            base_seed: 1,
            stream_blocks: 200,
            count_info_bits_only: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.decoder.validate()?;
        Pam::new(self.modulation)?;
        if self.workers == 0 {
            return Err(Error::InvalidConfig("need at least one worker".into()));
        }
        if self.stream_blocks == 0 {
            return Err(Error::InvalidConfig("streams must count at least one block".into()));
        }
        let w = self.code.w() as u64;
        let window_bits = self.decoder.window as u64 * w * w;
        if self.stop.max_bits < window_bits {
            return Err(Error::InvalidConfig(format!(
                "max bits {} is below one window ({} bits)",
                self.stop.max_bits, window_bits
            )));
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidConfig("SNR values must be finite".into()));
        }
        Ok(())
    }

    /// Bits counted per delivered block.
    pub fn bits_per_block(&self) -> u64 {
        let w = self.code.w() as u64;
        if self.count_info_bits_only {
            w * (w - self.code.p() as u64)
        } else {
            w * w
        }
    }
}

/// Aggregated result for one SNR and one decoder mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimPoint {
    pub snr_db: f64,
    pub mode: Mode,
    pub snr_index: usize,
    pub base_seed: u64,
    pub streams: u64,
    pub blocks: u64,
    pub bits: u64,
    pub bit_errors: u64,
    /// Hard-decision errors on the same counted bits, before decoding.
    pub channel_bit_errors: u64,
    /// Accepted codeword decodes that did not match the transmitted codeword.
    pub miscorrections: u64,
    pub stats: DecodeStats,
    pub seconds: f64,
}

impl SimPoint {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits as f64
        }
    }

    pub fn channel_ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.channel_bit_errors as f64 / self.bits as f64
        }
    }

    /// 95% Wilson interval on the post-decoding BER.
    pub fn confidence_interval(&self) -> (f64, f64) {
        wilson_interval(self.bit_errors, self.bits)
    }

    /// Everything except wall time.
    pub fn same_counts(&self, other: &SimPoint) -> bool {
        let strip = |p: &SimPoint| SimPoint { seconds: 0.0, ..p.clone() };
        strip(self) == strip(other)
    }
}

/// 95% Wilson score interval for `errors` successes in `n` trials.
pub fn wilson_interval(errors: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    const Z: f64 = 1.959_963_984_540_054;
    let n = n as f64;
    let p = errors as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The endpoints are exactly 0 and 1 at the extremes; the subtraction would leave rounding residue.
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if p >= 1.0 { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Per-stream seed derived from the base seed, SNR index and stream index.
pub fn stream_seed(base_seed: u64, snr_index: usize, stream: u64) -> u64 {
    let mut h = splitmix(base_seed ^ 0x5c0d_e5ca_1e00_0000);
    h = splitmix(h ^ snr_index as u64);
    splitmix(h ^ stream)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counts from one stream.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StreamTally {
    pub blocks: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub channel_bit_errors: u64,
    pub stats: DecodeStats,
}

impl std::ops::AddAssign for StreamTally {
    fn add_assign(&mut self, o: Self) {
        self.blocks += o.blocks;
        self.bits += o.bits;
        self.bit_errors += o.bit_errors;
        self.channel_bit_errors += o.channel_bit_errors;
        self.stats += o.stats;
    }
}

/// Everything a stream needs, shared read-only across workers.
pub struct StreamSetup {
    code: BchCode,
    pam: Pam,
    rho: f64,
    decoder: DecoderConfig,
    stream_blocks: usize,
    count_cols: usize,
}

impl StreamSetup {
    pub fn new(cfg: &SweepConfig, snr_db: f64) -> Result<Self> {
        cfg.validate()?;
        let code = BchCode::new(&cfg.code)?;
        let w = cfg.code.w();
        Ok(StreamSetup {
            code,
            pam: Pam::new(cfg.modulation)?,
            rho: 10f64.powf(snr_db / 10.0),
            decoder: cfg.decoder,
            stream_blocks: cfg.stream_blocks,
            count_cols: if cfg.count_info_bits_only { w - cfg.code.p() } else { w },
        })
    }

    pub fn code(&self) -> &BchCode {
        &self.code
    }
}

struct Received {
    block: Block,
    marks: MarkPlane,
    channel_errors: u64,
}

/// Encoder, channel and window for one stream.
struct StreamRunner<'s> {
    setup: &'s StreamSetup,
    rng: ChaCha8Rng,
    encoder: StaircaseEncoder<'s>,
    llrs: Vec<f64>,
}

impl<'s> StreamRunner<'s> {
    fn next_transmitted(&mut self) -> Block {
        let spec = self.setup.code.spec();
        let n = spec.w() * (spec.w() - spec.p());
        let mut info = Vec::with_capacity(n + 64);
        while info.len() < n {
            let word: u64 = self.rng.random();
            info.extend((0..64).map(|i| ((word >> i) & 1) as u8));
        }
        info.truncate(n);
        self.encoder.next_block(&info).expect("sizes fixed by the code").clone()
    }

    /// Modulates one block, padding the final symbol with zeros when `w^2` is not a
    /// multiple of the bits per symbol.
    fn receive(&mut self, tx: &Block) -> Received {
        let setup = self.setup;
        let w = tx.width();
        let m = setup.pam.bits_per_symbol();
        let mut bits = serialize_bits(tx);
        bits.resize(bits.len().next_multiple_of(m), 0);
        let x = channel::map_symbols(&bits, &setup.pam).expect("padded to whole symbols");
        let y = channel::transmit(&x, setup.rho, &mut self.rng);
        self.llrs.clear();
        compute_llrs_into(&y, &setup.pam, setup.rho, &mut self.llrs);
        self.llrs.truncate(w * w);
        let hard: Vec<u8> = self.llrs.iter().map(|&l| hard_bit(l)).collect();
        let marks = channel::mark_bits(&self.llrs, setup.decoder.delta, setup.decoder.quant).expect("delta validated");
        let block = Block::from_bits(w, hard).expect("w*w bits");
        let channel_errors = block.distance_in_columns(tx, setup.count_cols) as u64;
        Received { block, marks, channel_errors }
    }
}

/// Simulates one stream: `L` burn-in deliveries then `stream_blocks` counted ones.
/// `on_deliver` sees every delivered block with its stream index.
pub fn run_stream(setup: &StreamSetup, seed: u64, mut on_deliver: impl FnMut(usize, &Block)) -> StreamTally {
    let spec = setup.code.spec();
    let w = spec.w();
    let window = setup.decoder.window;
    let total = window + setup.stream_blocks;
    let last_index = total - 1 + window;
    let mut runner = StreamRunner {
        setup,
        rng: ChaCha8Rng::seed_from_u64(seed),
        encoder: StaircaseEncoder::new(&setup.code),
        llrs: Vec::with_capacity(w * w + 2),
    };

    // Block 0 is known to the receiver: it enters noiselessly.
    let mut rx_blocks = vec![Block::zeros(w)];
    let mut truth: VecDeque<Block> = VecDeque::from([Block::zeros(w)]);
    let mut chan_errs: VecDeque<u64> = VecDeque::from([0]);
    let mut marks = MarkPlane::unmarked(w * w);
    for _ in 1..window {
        let tx = runner.next_transmitted();
        let r = runner.receive(&tx);
        rx_blocks.push(r.block);
        marks = r.marks;
        chan_errs.push_back(r.channel_errors);
        truth.push_back(tx);
    }
    let mut win =
        DecodingWindow::new(&setup.code, setup.decoder, rx_blocks, marks, Some(truth.iter().cloned().collect()))
            .expect("configuration validated");

    let mut tally = StreamTally::default();
    for index in window..=last_index {
        win.decode();
        let tx = runner.next_transmitted();
        let r = runner.receive(&tx);
        let delivered = win.slide(r.block, r.marks, Some(tx.clone())).expect("shapes match");
        let sent = truth.pop_front().expect("aligned with window");
        let raw = chan_errs.pop_front().expect("aligned with window");
        truth.push_back(tx);
        chan_errs.push_back(r.channel_errors);

        let d = index - window;
        on_deliver(d, &delivered);
        if d >= window {
            tally.blocks += 1;
            tally.bits += (w * setup.count_cols) as u64;
            tally.bit_errors += delivered.distance_in_columns(&sent, setup.count_cols) as u64;
            tally.channel_bit_errors += raw;
        }
    }
    tally.stats = win.stats();
    tally
}

/// Progress callback: called with the running point after each batch of streams.
pub type Progress<'a> = &'a mut dyn FnMut(&SimPoint);

pub fn run_point(cfg: &SweepConfig, snr_index: usize) -> Result<SimPoint> {
    run_point_with_progress(cfg, snr_index, &mut |_| {})
}

pub fn run_point_with_progress(cfg: &SweepConfig, snr_index: usize, progress: Progress<'_>) -> Result<SimPoint> {
    let snr_db = *cfg
        .snr_db
        .get(snr_index)
        .ok_or_else(|| Error::InvalidConfig(format!("SNR index {snr_index} out of range")))?;
    let setup = StreamSetup::new(cfg, snr_db)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let batch = cfg.workers as u64;
    let mut tally = StreamTally::default();
    let mut streams = 0u64;
    let point = |tally: &StreamTally, streams: u64| SimPoint {
        snr_db,
        mode: cfg.decoder.mode,
        snr_index,
        base_seed: cfg.base_seed,
        streams,
        blocks: tally.blocks,
        bits: tally.bits,
        bit_errors: tally.bit_errors,
        channel_bit_errors: tally.channel_bit_errors,
        miscorrections: tally.stats.miscorrections,
        stats: tally.stats,
        seconds: start.elapsed().as_secs_f64(),
    };
    'outer: loop {
        let results: Vec<StreamTally> = pool.install(|| {
            (streams..streams + batch)
                .into_par_iter()
                .map(|s| run_stream(&setup, stream_seed(cfg.base_seed, snr_index, s), |_, _| {}))
                .collect()
        });
        for r in results {
            tally += r;
            streams += 1;
            if tally.bit_errors >= cfg.stop.min_errors || tally.bits >= cfg.stop.max_bits {
                break 'outer;
            }
        }
        progress(&point(&tally, streams));
    }
    Ok(point(&tally, streams))
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SimPoint>> {
    if cfg.snr_db.is_empty() {
        return Err(Error::InvalidConfig("empty SNR list".into()));
    }
    (0..cfg.snr_db.len()).map(|i| run_point(cfg, i)).collect()
}
