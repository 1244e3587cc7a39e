//! Sliding-window iterative decoding of staircase codes.
//!
//! The window holds `L` received blocks, oldest first. Pair `p` joins blocks `p` and
//! `p + 1`, so the newest pair is `L - 2`. Every iteration decodes all `w` rows of
//! each pair, newest pair first, rows in ascending order.
//!
//! Only the newest pair gets the enhanced treatment (miscorrection detection and bit
//! flipping); reliability marks exist only for the newest block. Older pairs are
//! decoded with plain bounded-distance decoding, except in `GenieMcf` mode which
//! uses the truth everywhere.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::bch::{BchCode, DecodeOutcome, ErrorPattern, Syndrome};
use crate::channel::{MarkPlane, Quantization};
use crate::error::{Error, Result};
use crate::frame::{BitLocation, Block, CodewordAddress};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Iterative BDD, every result accepted.
    Standard,
    /// Reject newest-pair results that flip bits of zero-syndrome codewords in the previous pair.
    Smith,
    /// Zero-syndrome rule plus HRB protection plus bit flipping on the newest pair.
    Marked,
    /// Accept BDD only when the word holds at most `t` errors (uses the truth).
    GenieMcf,
    /// Idealized miscorrection detection and bit flipping on the newest pair (uses the truth).
    GenieLb,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::Standard, Mode::Smith, Mode::Marked, Mode::GenieMcf, Mode::GenieLb];

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Standard => "standard",
            Mode::Smith => "smith",
            Mode::Marked => "marked",
            Mode::GenieMcf => "genie-mcf",
            Mode::GenieLb => "genie-lb",
        }
    }

    pub fn needs_truth(&self) -> bool {
        matches!(self, Mode::GenieMcf | Mode::GenieLb)
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown decoder mode {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub mode: Mode,
    /// Window size `L` in blocks.
    pub window: usize,
    /// Maximum iterations per window position.
    pub iterations: usize,
    /// HRB threshold on `|llr|`; `f64::INFINITY` marks nothing.
    #[serde(with = "crate::serde_float")]
    pub delta: f64,
    pub quant: Quantization,
    /// Marked mode only: enable bit flipping on failures and detected miscorrections.
    pub bit_flip: bool,
    /// Marked mode only: enable the zero-syndrome conflict rule.
    pub zero_syndrome_rule: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            mode: Mode::Marked,
            window: 9,
            iterations: 7,
            delta: 10.0,
            quant: Quantization::default(),
            bit_flip: true,
            zero_syndrome_rule: true,
        }
    }
}

impl DecoderConfig {
    pub fn with_mode(mode: Mode) -> Self {
        DecoderConfig { mode, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < 3 {
            return Err(Error::InvalidConfig(format!("window size must be at least 3, got {}", self.window)));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be at least 1".into()));
        }
        if self.delta.is_nan() || self.delta <= 0.0 {
            return Err(Error::InvalidConfig(format!("delta must be positive, got {}", self.delta)));
        }
        if let Quantization::Bits(q) = self.quant {
            if !(1..=16).contains(&q) {
                return Err(Error::InvalidConfig(format!("quantization bits must be in 1..=16, got {q}")));
            }
        }
        Ok(())
    }

    fn rules(&self) -> Rules {
        let none = Rules { newest: NewestPath::Plain, zero_syndrome: false, hrb: false, bit_flip: false };
        match self.mode {
            Mode::Standard => none,
            Mode::Smith => Rules { newest: NewestPath::Enhanced, zero_syndrome: true, ..none },
            Mode::Marked => Rules {
                newest: NewestPath::Enhanced,
                zero_syndrome: self.zero_syndrome_rule,
                hrb: true,
                bit_flip: self.bit_flip,
            },
            Mode::GenieMcf => Rules { newest: NewestPath::GenieMcf, ..none },
            Mode::GenieLb => Rules { newest: NewestPath::GenieLb, ..none },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NewestPath {
    Plain,
    Enhanced,
    GenieMcf,
    GenieLb,
}

#[derive(Debug, Clone, Copy)]
struct Rules {
    newest: NewestPath,
    zero_syndrome: bool,
    hrb: bool,
    bit_flip: bool,
}

/// Why a proposed flip set was flagged as a miscorrection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdVerdict {
    Pass,
    /// Codeword index `k` lies on a crossing codeword of the previous pair with zero syndrome.
    ZeroSyndromeConflict {
        k: usize,
        crossing: CodewordAddress,
    },
    /// Codeword index `k` is a highly reliable bit of the newest block.
    HrbFlip {
        k: usize,
    },
}

impl MdVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, MdVerdict::Pass)
    }
}

/// What triggered bit flipping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BfTrigger {
    /// BDD failed: flip the single least reliable HUB.
    Failure,
    /// A detected miscorrection whose error pattern had this weight.
    Miscorrection { weight: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecoveryVerdict {
    /// Net codeword indices to flip (HUB flips combined with the second BDD pattern).
    Accepted(Vec<usize>),
    NotEnoughHubs,
    DecodeFailed,
    Miscorrection(MdVerdict),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recovery {
    /// Codeword indices of the HUBs flipped before re-decoding.
    pub hubs: Vec<usize>,
    pub verdict: RecoveryVerdict,
}

/// Outcome of decoding one newest-pair codeword through the enhanced path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnhancedOutcome {
    /// Zero syndrome; nothing to do.
    Clean,
    /// BDD succeeded and passed miscorrection detection.
    Accepted(ErrorPattern),
    /// BDD failed and no recovery was attempted or it was rejected.
    Failed(Option<Recovery>),
    /// BDD result flagged as miscorrection; recovery (if any) is reported.
    Rejected(MdVerdict, Option<Recovery>),
    /// Bit flipping recovered the codeword.
    Recovered(Recovery),
}

/// Counters accumulated while decoding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeStats {
    /// Accepted non-empty flip sets.
    pub accepted: u64,
    /// Accepted flip sets that did not land on the transmitted codeword (needs truth).
    pub miscorrections: u64,
    pub md_rejections: u64,
    pub bf_attempts: u64,
    pub bf_accepted: u64,
}

impl std::ops::AddAssign for DecodeStats {
    fn add_assign(&mut self, o: Self) {
        self.accepted += o.accepted;
        self.miscorrections += o.miscorrections;
        self.md_rejections += o.md_rejections;
        self.bf_attempts += o.bf_attempts;
        self.bf_accepted += o.bf_accepted;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct HubList {
    len: u8,
    cols: [u16; 4],
}

impl HubList {
    fn as_slice(&self) -> &[u16] {
        &self.cols[..self.len as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct PairState {
    syn: Vec<Syndrome>,
    /// Number of positions differing from the truth, per row. Empty without truth.
    errs: Vec<u16>,
}

#[derive(Debug, Clone)]
pub struct DecodingWindow<'c> {
    code: &'c BchCode,
    cfg: DecoderConfig,
    rules: Rules,
    w: usize,
    blocks: VecDeque<Block>,
    truth: Option<VecDeque<Block>>,
    pairs: VecDeque<PairState>,
    marks: MarkPlane,
    hubs: Vec<HubList>,
    stats: DecodeStats,
}

impl<'c> DecodingWindow<'c> {
    /// Builds a full window from `L` received blocks (oldest first) and the marks of the
    /// newest one. `truth` holds the transmitted blocks and is required by genie modes.
    pub fn new(
        code: &'c BchCode,
        cfg: DecoderConfig,
        blocks: Vec<Block>,
        marks: MarkPlane,
        truth: Option<Vec<Block>>,
    ) -> Result<Self> {
        cfg.validate()?;
        let w = code.spec().w();
        if blocks.len() != cfg.window {
            return Err(Error::LengthMismatch { expected: cfg.window, got: blocks.len() });
        }
        if cfg.mode.needs_truth() && truth.is_none() {
            return Err(Error::MissingTruth(cfg.mode.name()));
        }
        for b in blocks.iter().chain(truth.iter().flatten()) {
            if b.width() != w {
                return Err(Error::LengthMismatch { expected: w, got: b.width() });
            }
        }
        if let Some(t) = &truth {
            if t.len() != blocks.len() {
                return Err(Error::LengthMismatch { expected: blocks.len(), got: t.len() });
            }
        }
        if marks.len() != w * w {
            return Err(Error::LengthMismatch { expected: w * w, got: marks.len() });
        }
        let mut win = DecodingWindow {
            code,
            cfg,
            rules: cfg.rules(),
            w,
            blocks: blocks.into(),
            truth: truth.map(Into::into),
            pairs: VecDeque::new(),
            marks,
            hubs: Vec::new(),
            stats: DecodeStats::default(),
        };
        for p in 0..cfg.window - 1 {
            let state = win.compute_pair(p);
            win.pairs.push_back(state);
        }
        win.hubs = win.compute_hubs();
        Ok(win)
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.cfg
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block(&self, i: usize) -> &Block {
        &self.blocks[i]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &Block> {
        self.blocks.iter()
    }

    pub fn marks(&self) -> &MarkPlane {
        &self.marks
    }

    pub fn stats(&self) -> DecodeStats {
        self.stats
    }

    pub fn newest_pair(&self) -> usize {
        self.blocks.len() - 2
    }

    pub fn syndrome(&self, addr: CodewordAddress) -> Syndrome {
        self.pairs[addr.pair].syn[addr.row]
    }

    /// Current bits of a codeword.
    pub fn codeword_bits(&self, addr: CodewordAddress) -> Vec<u8> {
        (0..2 * self.w)
            .map(|k| {
                let loc = addr.locate(k, self.w);
                self.blocks[loc.block].get(loc.row, loc.col)
            })
            .collect()
    }

    /// Number of bits of a codeword that differ from the truth, if the truth is kept.
    pub fn true_errors(&self, addr: CodewordAddress) -> Option<usize> {
        self.truth.as_ref().map(|_| self.pairs[addr.pair].errs[addr.row] as usize)
    }

    /// HUB candidates of a newest-block row: codeword indices, least reliable first.
    pub fn hub_candidates(&self, row: usize) -> Vec<usize> {
        self.hubs[row].as_slice().iter().map(|&c| self.w + c as usize).collect()
    }

    /// Recomputes every cache from the bits and compares with the incremental state.
    pub fn caches_consistent(&self) -> bool {
        (0..self.pairs.len()).all(|p| self.compute_pair(p) == self.pairs[p])
    }

    fn compute_pair(&self, p: usize) -> PairState {
        let w = self.w;
        let mut syn = vec![Syndrome::default(); w];
        let older = &self.blocks[p];
        let newer = &self.blocks[p + 1];
        for r in 0..w {
            for (c, &b) in older.row(r).iter().enumerate() {
                if b != 0 {
                    self.code.toggle(&mut syn[c], r);
                }
            }
            let s = &mut syn[r];
            for (c, &b) in newer.row(r).iter().enumerate() {
                if b != 0 {
                    self.code.toggle(s, w + c);
                }
            }
        }
        let errs = match &self.truth {
            None => Vec::new(),
            Some(t) => {
                let mut errs = vec![0u16; w];
                for r in 0..w {
                    for (e, (a, b)) in errs.iter_mut().zip(older.row(r).iter().zip(t[p].row(r))) {
                        *e += (a != b) as u16;
                    }
                    let wrong = newer.row(r).iter().zip(t[p + 1].row(r)).filter(|(a, b)| a != b).count();
                    errs[r] += wrong as u16;
                }
                errs
            }
        };
        PairState { syn, errs }
    }

    fn compute_hubs(&self) -> Vec<HubList> {
        let w = self.w;
        let pool = (self.code.t() + 2).min(4);
        (0..w)
            .map(|r| {
                // Keep the `pool` smallest (level, column) keys among non-HRB bits.
                let mut best: [(u32, u16); 4] = [(u32::MAX, u16::MAX); 4];
                let mut len = 0usize;
                for c in 0..w {
                    let i = r * w + c;
                    if self.marks.is_hrb(i) {
                        continue;
                    }
                    let key = (self.marks.level(i), c as u16);
                    if len < pool {
                        best[len] = key;
                        len += 1;
                    } else if key < best[len - 1] {
                        best[len - 1] = key;
                    } else {
                        continue;
                    }
                    let mut j = len - 1;
                    while j > 0 && best[j] < best[j - 1] {
                        best.swap(j, j - 1);
                        j -= 1;
                    }
                }
                let mut hubs = HubList { len: len as u8, ..Default::default() };
                for (dst, &(_, c)) in hubs.cols.iter_mut().zip(&best[..len]) {
                    *dst = c;
                }
                hubs
            })
            .collect()
    }

    /// Flips one bit and keeps the syndrome and error-count caches in step.
    fn flip(&mut self, loc: BitLocation) {
        self.blocks[loc.block].flip(loc.row, loc.col);
        let now_wrong = self
            .truth
            .as_ref()
            .map(|t| self.blocks[loc.block].get(loc.row, loc.col) != t[loc.block].get(loc.row, loc.col));
        let n = self.blocks.len();
        for (addr, k) in [loc.as_newer(self.w), loc.as_older(n)].into_iter().flatten() {
            let state = &mut self.pairs[addr.pair];
            self.code.toggle(&mut state.syn[addr.row], k);
            if let Some(wrong) = now_wrong {
                let e = &mut state.errs[addr.row];
                *e = if wrong { *e + 1 } else { *e - 1 };
            }
        }
    }

    /// Applies a flip set to a codeword and records statistics.
    fn accept(&mut self, addr: CodewordAddress, flips: impl IntoIterator<Item = usize>) {
        let mut any = false;
        for k in flips {
            let loc = addr.locate(k, self.w);
            if self.rules.hrb && loc.block + 1 == self.blocks.len() {
                debug_assert!(!self.marks.is_hrb(loc.row * self.w + loc.col), "accepted flip on an HRB at {loc:?}");
            }
            self.flip(loc);
            any = true;
        }
        if any {
            self.stats.accepted += 1;
            if self.truth.is_some() && self.pairs[addr.pair].errs[addr.row] != 0 {
                self.stats.miscorrections += 1;
            }
        }
    }

    /// Miscorrection detection for a newest-pair codeword and a proposed error pattern.
    pub fn md_check(&self, addr: CodewordAddress, pattern: &ErrorPattern) -> MdVerdict {
        self.md_check_positions(addr, pattern.positions())
    }

    fn md_check_positions(&self, addr: CodewordAddress, positions: impl Iterator<Item = usize>) -> MdVerdict {
        let newest = self.newest_pair();
        assert_eq!(addr.pair, newest, "miscorrection detection applies to the newest pair only");
        let w = self.w;
        for k in positions {
            if k < w {
                if self.rules.zero_syndrome {
                    let crossing = CodewordAddress::new(newest - 1, k);
                    if self.syndrome(crossing).is_zero() {
                        return MdVerdict::ZeroSyndromeConflict { k, crossing };
                    }
                }
            } else if self.rules.hrb && self.marks.is_hrb(addr.row * w + (k - w)) {
                return MdVerdict::HrbFlip { k };
            }
        }
        MdVerdict::Pass
    }

    /// Bit flipping on a newest-pair codeword followed by a second BDD and miscorrection
    /// check. Never modifies the window; see [`DecodingWindow::decode_codeword_enhanced`].
    pub fn bit_flip_recover(&self, addr: CodewordAddress, trigger: BfTrigger) -> Recovery {
        let spec = self.code.spec();
        let need = match trigger {
            BfTrigger::Failure => 1,
            BfTrigger::Miscorrection { weight } => spec.d0().saturating_sub(weight + spec.t),
        };
        let cands = self.hubs[addr.row].as_slice();
        if cands.len() < need || need == 0 {
            return Recovery { hubs: Vec::new(), verdict: RecoveryVerdict::NotEnoughHubs };
        }
        let hubs: Vec<usize> = cands[..need].iter().map(|&c| self.w + c as usize).collect();
        let mut s = self.syndrome(addr);
        for &k in &hubs {
            self.code.toggle(&mut s, k);
        }
        let verdict = match self.code.decode_syndrome(s) {
            DecodeOutcome::Failure => RecoveryVerdict::DecodeFailed,
            DecodeOutcome::Corrected(e) => match self.md_check(addr, &e) {
                MdVerdict::Pass => {
                    let mut net = hubs.clone();
                    for k in e.positions() {
                        match net.iter().position(|&h| h == k) {
                            Some(i) => {
                                net.swap_remove(i);
                            }
                            None => net.push(k),
                        }
                    }
                    net.sort_unstable();
                    RecoveryVerdict::Accepted(net)
                }
                v => RecoveryVerdict::Miscorrection(v),
            },
        };
        Recovery { hubs, verdict }
    }

    /// BDD, miscorrection detection and bit flipping for one newest-pair codeword,
    /// applying whatever is accepted.
    pub fn decode_codeword_enhanced(&mut self, addr: CodewordAddress) -> EnhancedOutcome {
        let s = self.syndrome(addr);
        if s.is_zero() {
            return EnhancedOutcome::Clean;
        }
        let (trigger, verdict) = match self.code.decode_syndrome(s) {
            DecodeOutcome::Corrected(e) => match self.md_check(addr, &e) {
                MdVerdict::Pass => {
                    self.accept(addr, e.positions());
                    return EnhancedOutcome::Accepted(e);
                }
                v => {
                    self.stats.md_rejections += 1;
                    (BfTrigger::Miscorrection { weight: e.weight() }, Some(v))
                }
            },
            DecodeOutcome::Failure => (BfTrigger::Failure, None),
        };
        let recovery = if self.rules.bit_flip {
            self.stats.bf_attempts += 1;
            let r = self.bit_flip_recover(addr, trigger);
            if let RecoveryVerdict::Accepted(flips) = &r.verdict {
                self.stats.bf_accepted += 1;
                let flips = flips.clone();
                self.accept(addr, flips);
                return EnhancedOutcome::Recovered(r);
            }
            Some(r)
        } else {
            None
        };
        match verdict {
            Some(v) => EnhancedOutcome::Rejected(v, recovery),
            None => EnhancedOutcome::Failed(recovery),
        }
    }

    fn plain_decode(&mut self, addr: CodewordAddress) -> bool {
        let s = self.syndrome(addr);
        if s.is_zero() {
            return false;
        }
        match self.code.decode_syndrome(s) {
            DecodeOutcome::Corrected(e) => {
                self.accept(addr, e.positions());
                true
            }
            DecodeOutcome::Failure => false,
        }
    }

    /// Miscorrection-free BDD: accept only when the word holds at most `t` true errors.
    pub fn genie_mcf_decode(&mut self, addr: CodewordAddress) -> Result<bool> {
        let errs = self.true_errors(addr).ok_or(Error::MissingTruth("genie-mcf"))?;
        let s = self.syndrome(addr);
        if s.is_zero() || errs > self.code.t() {
            return Ok(false);
        }
        match self.code.decode_syndrome(s) {
            DecodeOutcome::Corrected(e) => {
                self.accept(addr, e.positions());
                debug_assert_eq!(self.pairs[addr.pair].errs[addr.row], 0);
                Ok(true)
            }
            DecodeOutcome::Failure => unreachable!("BDD must succeed within radius t"),
        }
    }

    /// Genie bound for the marked-bit decoder on a newest-pair codeword: ideal
    /// miscorrection detection, and bit flipping that flips exactly the needed number
    /// of true errors in the newest block (lowest index first).
    pub fn genie_lb_decode(&mut self, addr: CodewordAddress) -> Result<bool> {
        let errs = self.true_errors(addr).ok_or(Error::MissingTruth("genie-lb"))?;
        assert_eq!(addr.pair, self.newest_pair(), "genie-lb applies to the newest pair only");
        let s = self.syndrome(addr);
        if s.is_zero() {
            return Ok(false);
        }
        let spec = self.code.spec();
        let t = spec.t;
        let need = match self.code.decode_syndrome(s) {
            DecodeOutcome::Corrected(e) if errs <= t => {
                self.accept(addr, e.positions());
                return Ok(true);
            }
            DecodeOutcome::Corrected(e) => {
                self.stats.md_rejections += 1;
                spec.d0().saturating_sub(e.weight() + t)
            }
            DecodeOutcome::Failure => 1,
        };
        self.stats.bf_attempts += 1;
        let w = self.w;
        let newest = self.blocks.len() - 1;
        let truth = &self.truth.as_ref().expect("checked above")[newest];
        let wrong: Vec<usize> = (0..w)
            .filter(|&c| self.blocks[newest].get(addr.row, c) != truth.get(addr.row, c))
            .take(need)
            .map(|c| w + c)
            .collect();
        if wrong.len() < need || errs - need > t {
            return Ok(false);
        }
        let mut s = s;
        for &k in &wrong {
            self.code.toggle(&mut s, k);
        }
        match self.code.decode_syndrome(s) {
            DecodeOutcome::Corrected(e) => {
                self.stats.bf_accepted += 1;
                self.accept(addr, wrong.into_iter().chain(e.positions()));
                debug_assert_eq!(self.pairs[addr.pair].errs[addr.row], 0);
                Ok(true)
            }
            DecodeOutcome::Failure => unreachable!("at most t errors remain"),
        }
    }

    /// One pass over all pairs, newest first. Returns the number of codewords changed.
    pub fn run_iteration(&mut self) -> usize {
        let newest = self.newest_pair();
        let mut changed = 0;
        for p in (0..=newest).rev() {
            for j in 0..self.w {
                let addr = CodewordAddress::new(p, j);
                let hit = match (self.rules.newest, p == newest) {
                    (NewestPath::GenieMcf, _) => self.genie_mcf_decode(addr).expect("truth checked at construction"),
                    (NewestPath::Enhanced, true) => matches!(
                        self.decode_codeword_enhanced(addr),
                        EnhancedOutcome::Accepted(_) | EnhancedOutcome::Recovered(_)
                    ),
                    (NewestPath::GenieLb, true) => self.genie_lb_decode(addr).expect("truth checked at construction"),
                    _ => self.plain_decode(addr),
                };
                changed += hit as usize;
            }
        }
        changed
    }

    /// Runs up to the configured number of iterations, stopping early once an
    /// iteration changes nothing (later ones would not either).
    pub fn decode(&mut self) -> usize {
        let mut total = 0;
        for _ in 0..self.cfg.iterations {
            let changed = self.run_iteration();
            total += changed;
            if changed == 0 {
                break;
            }
        }
        total
    }

    /// Emits the oldest block and admits `block` as the newest, with its marks.
    pub fn slide(&mut self, block: Block, marks: MarkPlane, truth: Option<Block>) -> Result<Block> {
        let w = self.w;
        if block.width() != w {
            return Err(Error::LengthMismatch { expected: w, got: block.width() });
        }
        if marks.len() != w * w {
            return Err(Error::LengthMismatch { expected: w * w, got: marks.len() });
        }
        match (&mut self.truth, truth) {
            (Some(ring), Some(t)) => {
                ring.pop_front();
                ring.push_back(t);
            }
            (None, None) => {}
            (Some(_), None) => return Err(Error::MissingTruth(self.cfg.mode.name())),
            (None, Some(_)) => {
                return Err(Error::InvalidConfig("window was built without truth".into()));
            }
        }
        let delivered = self.blocks.pop_front().expect("window is never empty");
        self.pairs.pop_front();
        self.blocks.push_back(block);
        let state = self.compute_pair(self.blocks.len() - 2);
        self.pairs.push_back(state);
        self.marks = marks;
        self.hubs = self.compute_hubs();
        Ok(delivered)
    }
}
