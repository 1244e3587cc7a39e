#![allow(dead_code)]

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::Rng;
use staircase::window::{BfTrigger, EnhancedOutcome, MdVerdict, Recovery, RecoveryVerdict};
use staircase::{
    BchCode, Block, CodewordAddress, ComponentCodeSpec, DecodeOutcome, DecoderConfig, DecodingWindow, MarkPlane, Mode,
};

// ---------------------------------------------------------------------------
// Independent BCH reference: bitwise GF(2^m) arithmetic, generator from
// conjugate products, non-systematic codeword enumeration.

fn gf_mul(a: u32, b: u32, m: u32, poly: u32) -> u32 {
    let (mut a, mut b, mut r) = (a, b, 0u32);
    while b != 0 {
        if b & 1 != 0 {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & (1 << m) != 0 {
            a ^= poly;
        }
    }
    r
}

fn gf_pow(a: u32, e: usize, m: u32, poly: u32) -> u32 {
    (0..e).fold(1, |acc, _| gf_mul(acc, a, m, poly))
}

/// Minimal polynomial of alpha^e over GF(2), as a bit mask (bit i = x^i).
fn minimal_poly(e: usize, m: u32, poly: u32) -> u64 {
    let order = (1usize << m) - 1;
    let mut conj = Vec::new();
    let mut x = e % order;
    while !conj.contains(&x) {
        conj.push(x);
        x = 2 * x % order;
    }
    // Product of (x + beta) with coefficients in GF(2^m), lowest degree first.
    let mut coeffs = vec![1u32];
    for &c in &conj {
        let beta = gf_pow(2, c, m, poly);
        let mut next = vec![0u32; coeffs.len() + 1];
        for (i, &a) in coeffs.iter().enumerate() {
            next[i + 1] ^= a;
            next[i] ^= gf_mul(a, beta, m, poly);
        }
        coeffs = next;
    }
    coeffs.iter().enumerate().fold(0u64, |acc, (i, &c)| {
        assert!(c <= 1, "minimal polynomial must be binary");
        acc | ((c as u64) << i)
    })
}

fn poly_mul(a: u64, b: u64) -> u64 {
    (0..64).filter(|i| b >> i & 1 == 1).fold(0, |acc, i| acc ^ (a << i))
}

/// Generator of the narrow-sense BCH code correcting `t <= 2` errors.
pub fn reference_generator(m: u32, poly: u32, t: usize) -> u64 {
    match t {
        1 => minimal_poly(1, m, poly),
        2 => poly_mul(minimal_poly(1, m, poly), minimal_poly(3, m, poly)),
        _ => unimplemented!("t = {t}"),
    }
}

/// All codewords of a small shortened extended code as `n_c`-bit masks, bit `k` being
/// codeword index `k`. Index `k < n_c - 1` carries the coefficient of `x^(n_c - 2 - k)`;
/// the last index is overall parity.
pub fn reference_codewords(spec: &ComponentCodeSpec, m: u32, poly: u32) -> HashSet<u64> {
    let g = reference_generator(m, poly, spec.t);
    let n = spec.n_c();
    let k = spec.k_c();
    assert!(n <= 64 && k <= 24, "enumeration only for small codes");
    (0u64..1 << k)
        .map(|msg| {
            let c = poly_mul(msg, g);
            let mut word = 0u64;
            for d in 0..n - 1 {
                if c >> d & 1 == 1 {
                    word |= 1 << (n - 2 - d);
                }
            }
            word | ((word.count_ones() as u64 & 1) << (n - 1))
        })
        .collect()
}

/// Brute-force bounded-distance decoder: the error pattern to the unique codeword
/// within distance `t`, or `None`.
pub fn sphere_oracle(codewords: &HashSet<u64>, n: usize, t: usize, r: u64) -> Option<Vec<usize>> {
    assert!(t <= 2);
    if codewords.contains(&r) {
        return Some(vec![]);
    }
    for i in 0..n {
        if codewords.contains(&(r ^ 1 << i)) {
            return Some(vec![i]);
        }
    }
    if t == 2 {
        for i in 0..n {
            for j in i + 1..n {
                if codewords.contains(&(r ^ 1 << i ^ 1 << j)) {
                    return Some(vec![i, j]);
                }
            }
        }
    }
    None
}

pub fn to_bits(word: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| (word >> i & 1) as u8).collect()
}

pub fn from_bits(bits: &[u8]) -> u64 {
    bits.iter().enumerate().fold(0, |acc, (i, &b)| acc | ((b as u64) << i))
}

/// The shortened code used for exhaustive checks: (64,51,2) shortened to (28,15,2).
pub fn small_spec() -> ComponentCodeSpec {
    ComponentCodeSpec::new(64, 51, 2).unwrap().shorten(36).unwrap()
}

/// Outcome of the decoder under test, as a sorted pattern.
pub fn bdd(code: &BchCode, bits: &[u8]) -> Option<Vec<usize>> {
    match code.decode(bits).unwrap() {
        DecodeOutcome::Corrected(e) => Some(e.sorted()),
        DecodeOutcome::Failure => None,
    }
}

/// Checks all weight <= 3 patterns on `codewords_n` random codewords plus `random_n`
/// random words. Returns the number of comparisons.
pub fn check_bdd_against_oracle<R: Rng>(rng: &mut R, codewords_n: usize, random_n: usize) -> Result<usize, String> {
    let spec = small_spec();
    let code = BchCode::new(&spec).unwrap();
    let book = reference_codewords(&spec, 6, 0x43);
    if book.len() != 1 << spec.k_c() {
        return Err(format!("reference code has {} words", book.len()));
    }
    let n = spec.n_c();
    let mut checked = 0usize;
    let mut compare = |word: u64| -> Result<(), String> {
        let bits = to_bits(word, n);
        let got = bdd(&code, &bits);
        let want = sphere_oracle(&book, n, 2, word);
        checked += 1;
        if got != want {
            return Err(format!("word {word:#x}: decoder {got:?}, oracle {want:?}"));
        }
        Ok(())
    };
    for _ in 0..codewords_n {
        let msg: Vec<u8> = (0..spec.k_c()).map(|_| rng.random_range(0..2)).collect();
        let c = from_bits(&code.encode(&msg).unwrap());
        if !book.contains(&c) {
            return Err(format!("encoder output {c:#x} is not a reference codeword"));
        }
        compare(c)?;
        for i in 0..n {
            compare(c ^ 1 << i)?;
            for j in i + 1..n {
                compare(c ^ 1 << i ^ 1 << j)?;
                for k in j + 1..n {
                    compare(c ^ 1 << i ^ 1 << j ^ 1 << k)?;
                }
            }
        }
    }
    for _ in 0..random_n {
        compare(rng.random::<u64>() & ((1 << n) - 1))?;
    }
    Ok(checked)
}

// ---------------------------------------------------------------------------
// Scenario construction on a full-size window.

pub const L: usize = 9;
pub const ROW: usize = 5;

pub fn big_code() -> BchCode {
    BchCode::new(&ComponentCodeSpec::new(256, 239, 2).unwrap()).unwrap()
}

/// Newest-pair codeword the scenarios act on.
pub fn target() -> CodewordAddress {
    CodewordAddress::new(L - 2, ROW)
}

/// Finds a weight-6 codeword by decoding random weight-4 words drawn from `pool`.
/// Returns `(received, completion)` where `received ∪ completion` is the codeword.
pub fn find_weight6<R: Rng>(
    code: &BchCode,
    rng: &mut R,
    pool: std::ops::Range<usize>,
    accept: impl Fn(&[usize], &[usize]) -> bool,
) -> (Vec<usize>, Vec<usize>) {
    let n = code.n();
    for _ in 0..100_000 {
        let mut r: Vec<usize> = sample(rng, pool.len(), 4).into_iter().map(|i| pool.start + i).collect();
        r.sort_unstable();
        let mut bits = vec![0u8; n];
        for &i in &r {
            bits[i] = 1;
        }
        if let Some(p) = bdd(code, &bits) {
            assert_eq!(p.len(), 2);
            for &i in &p {
                bits[i] = 1;
            }
            assert!(code.is_codeword(&bits));
            if accept(&r, &p) {
                return (r, p);
            }
        }
    }
    panic!("no weight-6 codeword found");
}

/// An all-zero transmitted window with `errors` (codeword indices of the target) flipped
/// in the received copy.
pub struct Scenario {
    pub errors: Vec<usize>,
    pub hrb: Vec<bool>,
    pub level: Vec<u32>,
}

impl Scenario {
    pub fn new(w: usize, errors: &[usize]) -> Self {
        Scenario { errors: errors.to_vec(), hrb: vec![false; w * w], level: vec![31; w * w] }
    }

    /// Index into the newest block's mark plane of target codeword index `k >= w`.
    pub fn mark_index(w: usize, k: usize) -> usize {
        assert!(k >= w);
        ROW * w + (k - w)
    }

    pub fn set_hrb(&mut self, w: usize, k: usize) {
        self.hrb[Self::mark_index(w, k)] = true;
    }

    pub fn set_level(&mut self, w: usize, k: usize, level: u32) {
        self.level[Self::mark_index(w, k)] = level;
    }

    pub fn build<'c>(&self, code: &'c BchCode, cfg: DecoderConfig) -> DecodingWindow<'c> {
        let w = code.spec().w();
        let mut blocks = vec![Block::zeros(w); L];
        for &k in &self.errors {
            let loc = target().locate(k, w);
            blocks[loc.block].flip(loc.row, loc.col);
        }
        let marks = MarkPlane::from_parts(self.hrb.clone(), self.level.clone()).unwrap();
        DecodingWindow::new(code, cfg, blocks, marks, Some(vec![Block::zeros(w); L])).unwrap()
    }
}

pub fn marked(bit_flip: bool) -> DecoderConfig {
    DecoderConfig { bit_flip, ..DecoderConfig::with_mode(Mode::Marked) }
}

pub fn snapshot(win: &DecodingWindow<'_>) -> Vec<Block> {
    win.blocks().cloned().collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// (a) A BDD success whose flip lands on a crossing codeword with zero syndrome is
/// rejected. With the crossing codeword disturbed, the same miscorrection goes through.
pub fn scenario_zero_syndrome<R: Rng>(code: &BchCode, rng: &mut R) -> Result<String, String> {
    let w = code.spec().w();
    let (r, p) = find_weight6(code, rng, w..2 * w, |_, p| p[0] < w);
    let addr = target();
    let sc = Scenario::new(w, &r);
    let mut win = sc.build(code, marked(false));
    let before = snapshot(&win);
    let outcome = win.decode_codeword_enhanced(addr);
    let k = match outcome {
        EnhancedOutcome::Rejected(MdVerdict::ZeroSyndromeConflict { k, crossing }, None) => {
            ensure(crossing == CodewordAddress::new(L - 3, k), || format!("wrong crossing {crossing:?}"))?;
            k
        }
        other => return Err(format!("expected zero-syndrome rejection, got {other:?}")),
    };
    ensure(p.contains(&k) && k < w, || format!("flagged index {k} not in {p:?}"))?;
    ensure(snapshot(&win) == before, || "window changed after rejection".into())?;

    // Control: make every crossing codeword the completion touches non-zero.
    let mut blocks = before.clone();
    for &k in p.iter().filter(|&&k| k < w) {
        blocks[L - 3].flip(0, k);
    }
    let marks = MarkPlane::from_parts(sc.hrb.clone(), sc.level.clone()).unwrap();
    let mut ctl = DecodingWindow::new(code, marked(false), blocks, marks, Some(vec![Block::zeros(w); L])).unwrap();
    match ctl.decode_codeword_enhanced(addr) {
        EnhancedOutcome::Accepted(e) if e.sorted() == p => {}
        other => return Err(format!("control: expected the miscorrection to be accepted, got {other:?}")),
    }
    ensure(ctl.stats().miscorrections == 1, || "control miscorrection not logged".into())?;
    Ok(format!("errors {r:?}, completion {p:?}, rejected at index {k}"))
}

/// (b) A BDD success whose flip lands on an HRB of the newest block is rejected.
pub fn scenario_hrb<R: Rng>(code: &BchCode, rng: &mut R) -> Result<String, String> {
    let w = code.spec().w();
    let (r, p) = find_weight6(code, rng, w..2 * w, |_, p| p[0] >= w);
    let mut sc = Scenario::new(w, &r);
    sc.set_hrb(w, p[1]);
    let mut win = sc.build(code, marked(false));
    let before = snapshot(&win);
    match win.decode_codeword_enhanced(target()) {
        EnhancedOutcome::Rejected(MdVerdict::HrbFlip { k }, None) if k == p[1] => {}
        other => return Err(format!("expected HRB rejection at {}, got {other:?}", p[1])),
    }
    ensure(snapshot(&win) == before, || "window changed after rejection".into())?;

    // Without the mark the miscorrection is accepted.
    let sc = Scenario::new(w, &r);
    let mut ctl = sc.build(code, marked(false));
    match ctl.decode_codeword_enhanced(target()) {
        EnhancedOutcome::Accepted(e) if e.sorted() == p => {}
        other => return Err(format!("control: expected acceptance, got {other:?}")),
    }
    Ok(format!("errors {r:?}, completion {p:?}, HRB at {}", p[1]))
}

/// (c) Three errors make BDD fail; the least reliable HUB is a true error, so Case-1 bit
/// flipping followed by BDD corrects the word.
pub fn scenario_case1<R: Rng>(code: &BchCode, rng: &mut R) -> Result<String, String> {
    let w = code.spec().w();
    let mut cols: Vec<usize> = sample(rng, w, 3).into_iter().collect();
    cols.sort_unstable();
    let errors: Vec<usize> = cols.iter().map(|c| w + c).collect();
    let hub = errors[1];
    let mut sc = Scenario::new(w, &errors);
    sc.set_level(w, hub, 0);
    let mut win = sc.build(code, marked(true));
    ensure(win.hub_candidates(ROW)[0] == hub, || "HUB ordering".into())?;
    ensure(code.decode_syndrome(win.syndrome(target())) == DecodeOutcome::Failure, || {
        "three errors should defeat BDD".into()
    })?;
    let outcome = win.decode_codeword_enhanced(target());
    let expected =
        EnhancedOutcome::Recovered(Recovery { hubs: vec![hub], verdict: RecoveryVerdict::Accepted(errors.clone()) });
    ensure(outcome == expected, || format!("got {outcome:?}"))?;
    ensure(win.block(L - 1).is_zero(), || "newest block not fully corrected".into())?;
    ensure(win.true_errors(target()) == Some(0), || "codeword still wrong".into())?;
    ensure(win.caches_consistent(), || "caches out of step".into())?;
    let s = win.stats();
    ensure(s.bf_attempts == 1 && s.bf_accepted == 1 && s.miscorrections == 0, || format!("stats {s:?}"))?;
    Ok(format!("errors {errors:?}, HUB {hub}"))
}

/// (d) Five true errors sit at distance 1 from a weight-6 codeword; the proposed single
/// flip hits an HRB, Case-2 bit flipping flips exactly three HUBs (the true errors) and
/// the second BDD finishes the job.
pub fn scenario_case2<R: Rng>(code: &BchCode, rng: &mut R) -> Result<String, String> {
    let w = code.spec().w();
    let (r, p) = find_weight6(code, rng, w..2 * w, |_, _| true);
    let mut c: Vec<usize> = r.iter().chain(&p).copied().collect();
    c.sort_unstable();
    let newer: Vec<usize> = c.iter().copied().filter(|&k| k >= w).collect();
    let q = newer[0];
    let hubs = newer[1..4].to_vec();
    let errors: Vec<usize> = c.iter().copied().filter(|&k| k != q).collect();

    let mut sc = Scenario::new(w, &errors);
    sc.set_hrb(w, q);
    for (lvl, &h) in hubs.iter().enumerate() {
        sc.set_level(w, h, lvl as u32);
    }
    let mut win = sc.build(code, marked(true));
    match code.decode_syndrome(win.syndrome(target())) {
        DecodeOutcome::Corrected(e) if e.sorted() == vec![q] => {}
        other => return Err(format!("expected a weight-1 miscorrection onto {q}, got {other:?}")),
    }
    let rec = win.bit_flip_recover(target(), BfTrigger::Miscorrection { weight: 1 });
    ensure(rec.hubs.len() == 3, || format!("flipped {} HUBs", rec.hubs.len()))?;
    let outcome = win.decode_codeword_enhanced(target());
    let expected =
        EnhancedOutcome::Recovered(Recovery { hubs: hubs.clone(), verdict: RecoveryVerdict::Accepted(errors.clone()) });
    ensure(outcome == expected, || format!("got {outcome:?}"))?;
    ensure(win.true_errors(target()) == Some(0), || "codeword still wrong".into())?;
    ensure(win.blocks().all(Block::is_zero), || "window not restored to the transmitted blocks".into())?;
    ensure(win.stats().miscorrections == 0, || "miscorrection logged".into())?;
    Ok(format!("codeword {c:?}, HRB {q}, HUBs {hubs:?}"))
}

/// (e) Whenever bit flipping is rejected (second BDD fails, second result flagged, or
/// too few HUBs), the window is left bit-identical. Returns counts per rejection kind.
pub fn scenario_rejections_are_inert<R: Rng>(code: &BchCode, rng: &mut R) -> Result<String, String> {
    let w = code.spec().w();
    let (mut failed, mut flagged, mut short) = (0, 0, 0);
    let mut check = |win: &mut DecodingWindow<'_>| -> Result<(), String> {
        let before = snapshot(win);
        let stats = win.stats();
        let outcome = win.decode_codeword_enhanced(target());
        let recovery = match &outcome {
            EnhancedOutcome::Failed(Some(r)) | EnhancedOutcome::Rejected(_, Some(r)) => r,
            EnhancedOutcome::Recovered(_) | EnhancedOutcome::Accepted(_) => return Ok(()),
            other => return Err(format!("bit flipping was not attempted: {other:?}")),
        };
        match recovery.verdict {
            RecoveryVerdict::DecodeFailed => failed += 1,
            RecoveryVerdict::Miscorrection(_) => flagged += 1,
            RecoveryVerdict::NotEnoughHubs => short += 1,
            RecoveryVerdict::Accepted(_) => unreachable!(),
        }
        ensure(snapshot(win) == before, || format!("window changed after {outcome:?}"))?;
        ensure(win.caches_consistent(), || "caches out of step".into())?;
        ensure(win.stats().accepted == stats.accepted, || "a rejected recovery was counted as accepted".into())
    };

    for _ in 0..200 {
        // Case 1 with a HUB that is not an error.
        let picks: Vec<usize> = sample(rng, w, 4).into_iter().collect();
        let errors: Vec<usize> = picks[..3].iter().map(|c| w + c).collect();
        let mut sc = Scenario::new(w, &errors);
        sc.set_level(w, w + picks[3], 0);
        check(&mut sc.build(code, marked(true)))?;
    }
    for _ in 0..20 {
        // Case 2 where every non-HRB bit of the row is a wrong HUB.
        let (r, p) = find_weight6(code, rng, w..2 * w, |_, _| true);
        let mut c: Vec<usize> = r.iter().chain(&p).copied().collect();
        c.sort_unstable();
        let q = *c.iter().find(|&&k| k >= w).unwrap();
        let errors: Vec<usize> = c.iter().copied().filter(|&k| k != q).collect();
        let spare: Vec<usize> = (w..2 * w).filter(|k| !c.contains(k)).collect();
        // Two non-HRB bits are too few for Case 2; three are enough but all wrong.
        for keep in [2, 3] {
            let mut sc = Scenario::new(w, &errors);
            for k in w..2 * w {
                if !spare[..keep].contains(&k) {
                    sc.set_hrb(w, k);
                }
            }
            check(&mut sc.build(code, marked(true)))?;
        }
    }
    ensure(failed > 0 && flagged > 0 && short > 0, || {
        format!("rejection kinds not all exercised: failed {failed}, flagged {flagged}, short {short}")
    })?;
    Ok(format!("second BDD failed {failed}, flagged {flagged}, too few HUBs {short}"))
}
