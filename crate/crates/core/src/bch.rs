//! Extended, shortened binary BCH component codes with a bounded-distance decoder.
//!
//! Codeword layout (indices `0..n_c`): `k_c` message bits, then `p - 1` BCH parity
//! bits, then the overall (extension) parity bit. Index `k < n_c - 1` carries the
//! coefficient of `x^(n_c - 2 - k)` of the inner BCH codeword; the `s` shortened
//! coordinates are the high-degree message positions and are never stored.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldTable, Gf};

/// Parameters of an extended BCH code, optionally shortened.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComponentCodeSpec {
    /// Length of the extended mother code, `2^m`.
    pub n_mother: usize,
    pub k_mother: usize,
    pub t: usize,
    /// Number of leading message bits fixed to zero and not transmitted.
    pub shortening: usize,
}

impl ComponentCodeSpec {
    pub fn new(n_mother: usize, k_mother: usize, t: usize) -> Result<Self> {
        let spec = ComponentCodeSpec { n_mother, k_mother, t, shortening: 0 };
        spec.validate()?;
        Ok(spec)
    }

    /// Shortened version of this code. Shortening composes additively.
    pub fn shorten(&self, s: usize) -> Result<Self> {
        let spec = ComponentCodeSpec { shortening: self.shortening + s, ..*self };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if !self.n_mother.is_power_of_two() || !(16..=1024).contains(&self.n_mother) {
            return Err(Error::InvalidCode(format!("mother length {} must be 2^m with 4 <= m <= 10", self.n_mother)));
        }
        if self.t == 0 {
            return Err(Error::InvalidCode("t must be positive".into()));
        }
        if self.k_mother == 0 || self.k_mother >= self.n_mother {
            return Err(Error::InvalidCode(format!(
                "dimension {} out of range for length {}",
                self.k_mother, self.n_mother
            )));
        }
        if self.shortening >= self.k_mother {
            return Err(Error::InvalidCode(format!(
                "shortening by {} leaves no information bits (k = {})",
                self.shortening, self.k_mother
            )));
        }
        if !self.n_c().is_multiple_of(2) {
            return Err(Error::InvalidCode(format!("n_c = {} must be even", self.n_c())));
        }
        if self.p() >= self.w() {
            return Err(Error::InvalidCode(format!(
                "parity span p = {} leaves no payload in a {}-wide block",
                self.p(),
                self.w()
            )));
        }
        Ok(())
    }

    pub fn field_degree(&self) -> u32 {
        self.n_mother.trailing_zeros()
    }

    pub fn n_c(&self) -> usize {
        self.n_mother - self.shortening
    }

    pub fn k_c(&self) -> usize {
        self.k_mother - self.shortening
    }

    /// Staircase block width.
    pub fn w(&self) -> usize {
        self.n_c() / 2
    }

    /// Parity bits per component codeword.
    pub fn p(&self) -> usize {
        self.n_c() - self.k_c()
    }

    /// Minimum distance of the extended code.
    pub fn d0(&self) -> usize {
        2 * self.t + 2
    }

    /// Staircase code rate as an exact fraction `(2k_c - n_c) / n_c`.
    pub fn rate_fraction(&self) -> (usize, usize) {
        (2 * self.k_c() - self.n_c(), self.n_c())
    }

    pub fn rate(&self) -> f64 {
        let (num, den) = self.rate_fraction();
        num as f64 / den as f64
    }
}

impl std::fmt::Display for ComponentCodeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.n_c(), self.k_c(), self.t)
    }
}

/// Syndrome of a (possibly corrupted) extended codeword.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Syndrome {
    pub s1: Gf,
    pub s3: Gf,
    /// Overall parity of all `n_c` bits.
    pub parity: u8,
}

impl Syndrome {
    #[inline]
    pub fn is_zero(&self) -> bool {
        self.s1 == 0 && self.s3 == 0 && self.parity == 0
    }
}

/// Up to four flipped positions; enough for `t <= 2` plus slack.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ErrorPattern {
    len: u8,
    pos: [u16; 4],
}

impl ErrorPattern {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_positions(positions: &[usize]) -> Self {
        let mut e = Self::new();
        for &p in positions {
            e.push(p);
        }
        e
    }

    pub fn push(&mut self, p: usize) {
        assert!((self.len as usize) < self.pos.len(), "error pattern overflow");
        self.pos[self.len as usize] = p as u16;
        self.len += 1;
    }

    /// Hamming weight of the pattern.
    pub fn weight(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.pos[..self.len as usize].iter().map(|&p| p as usize)
    }

    pub fn sorted(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.positions().collect();
        v.sort_unstable();
        v
    }
}

impl std::fmt::Debug for ErrorPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.positions()).finish()
    }
}

/// Result of bounded-distance decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeOutcome {
    /// The word lies within distance `t` of a codeword; flipping `pattern` reaches it.
    /// This is also what a miscorrection looks like from the decoder's side.
    Corrected(ErrorPattern),
    /// No codeword within distance `t`.
    Failure,
}

/// A component code ready for encoding and decoding.
#[derive(Debug, Clone)]
pub struct BchCode {
    spec: ComponentCodeSpec,
    field: FieldTable,
    /// Generator polynomial, bit i = coefficient of x^i.
    generator: u64,
    parity_degree: usize,
    /// `alpha^deg(k)` and `alpha^(3 deg(k))` per codeword index (zero at the extension bit;
    /// `pow3` is all zero for t = 1).
    pow1: Vec<Gf>,
    pow3: Vec<Gf>,
    /// codeword index of the inner position with discrete log `d`, or `u16::MAX` if shortened.
    index_of_log: Vec<u16>,
    /// `quad_root[c]` solves `z^2 + z = c`, or `Gf::MAX` when no root exists.
    quad_root: Vec<Gf>,
}

impl BchCode {
    pub fn new(spec: &ComponentCodeSpec) -> Result<Self> {
        let field = FieldTable::with_default_poly(spec.field_degree())?;
        Self::with_field(spec, field)
    }

    pub fn with_field(spec: &ComponentCodeSpec, field: FieldTable) -> Result<Self> {
        if field.size() != spec.n_mother {
            return Err(Error::InvalidCode(format!(
                "field GF(2^{}) does not match mother length {}",
                field.degree(),
                spec.n_mother
            )));
        }
        if spec.t > 2 {
            return Err(Error::UnsupportedRadius(spec.t));
        }
        let order = field.order();

        // Narrow-sense generator: lcm of minimal polynomials of alpha^1, alpha^3, ...
        let mut minimal: Vec<u64> = Vec::new();
        for i in 0..spec.t {
            let m = field.minimal_poly(2 * i + 1);
            if !minimal.contains(&m) {
                minimal.push(m);
            }
        }
        let generator = minimal.iter().fold(1u64, |acc, &m| gf2_poly_mul(acc, m));
        let parity_degree = 63 - generator.leading_zeros() as usize;
        if parity_degree + 1 != spec.n_mother - spec.k_mother {
            return Err(Error::InvalidCode(format!(
                "t = {} generator has degree {}, so the extended code is ({}, {}), not ({}, {})",
                spec.t,
                parity_degree,
                spec.n_mother,
                spec.n_mother - 1 - parity_degree,
                spec.n_mother,
                spec.k_mother
            )));
        }

        let n_c = spec.n_c();
        let mut pow1 = vec![0; n_c];
        let mut pow3 = vec![0; n_c];
        let mut index_of_log = vec![u16::MAX; order];
        for k in 0..n_c - 1 {
            let deg = n_c - 2 - k;
            pow1[k] = field.alpha_pow(deg);
            if spec.t >= 2 {
                pow3[k] = field.alpha_pow(3 * deg);
            }
            index_of_log[deg] = k as u16;
        }

        let mut quad_root = vec![Gf::MAX; field.size()];
        for z in 0..field.size() as Gf {
            let c = field.mul(z, z) ^ z;
            quad_root[c as usize] = z;
        }

        Ok(BchCode { spec: *spec, field, generator, parity_degree, pow1, pow3, index_of_log, quad_root })
    }

    pub fn spec(&self) -> &ComponentCodeSpec {
        &self.spec
    }

    pub fn field(&self) -> &FieldTable {
        &self.field
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    pub fn n(&self) -> usize {
        self.spec.n_c()
    }

    pub fn k(&self) -> usize {
        self.spec.k_c()
    }

    pub fn t(&self) -> usize {
        self.spec.t
    }

    /// Systematic encoding of `k_c` message bits into an `n_c`-bit codeword.
    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        let mut out = vec![0u8; self.n()];
        self.encode_into(message, &mut out)?;
        Ok(out)
    }

    pub fn encode_into(&self, message: &[u8], out: &mut [u8]) -> Result<()> {
        if message.len() != self.k() {
            return Err(Error::LengthMismatch { expected: self.k(), got: message.len() });
        }
        if out.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), got: out.len() });
        }
        let r = self.parity_degree;
        let mask: u64 = (1u64 << r) - 1;
        let taps = self.generator & mask;
        let mut reg: u64 = 0;
        let mut parity = 0u8;
        for (dst, &bit) in out.iter_mut().zip(message) {
            let fb = (bit as u64 & 1) ^ (reg >> (r - 1));
            reg = (reg << 1) & mask;
            if fb != 0 {
                reg ^= taps;
            }
            *dst = bit & 1;
            parity ^= bit & 1;
        }
        let k = self.k();
        for i in 0..r {
            let b = ((reg >> (r - 1 - i)) & 1) as u8;
            out[k + i] = b;
            parity ^= b;
        }
        out[self.n() - 1] = parity;
        Ok(())
    }

    /// Syndrome contribution of a single bit at codeword index `k`.
    #[inline]
    pub fn toggle(&self, s: &mut Syndrome, k: usize) {
        s.s1 ^= self.pow1[k];
        s.s3 ^= self.pow3[k];
        s.parity ^= 1;
    }

    pub fn syndrome(&self, r: &[u8]) -> Syndrome {
        let mut s = Syndrome::default();
        for (k, &b) in r.iter().enumerate() {
            if b & 1 != 0 {
                self.toggle(&mut s, k);
            }
        }
        s
    }

    pub fn is_codeword(&self, r: &[u8]) -> bool {
        r.len() == self.n() && self.syndrome(r).is_zero()
    }

    /// Bounded-distance decoding of a received word.
    pub fn decode(&self, r: &[u8]) -> Result<DecodeOutcome> {
        if r.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), got: r.len() });
        }
        Ok(self.decode_syndrome(self.syndrome(r)))
    }

    /// Bounded-distance decoding from a syndrome alone.
    ///
    /// The inner BCH part is decoded first (`v` located errors), then the overall
    /// parity decides whether the extension bit is also in error:
    ///
    /// | v | parity | result |
    /// |---|--------|--------|
    /// | 0 | even   | no errors |
    /// | 0 | odd    | extension bit only |
    /// | 1 | odd    | one inner error |
    /// | 1 | even   | one inner error plus the extension bit |
    /// | 2 | even   | two inner errors |
    /// | 2 | odd    | three or more errors: failure |
    pub fn decode_syndrome(&self, s: Syndrome) -> DecodeOutcome {
        let ext = self.n() - 1;
        let mut e = ErrorPattern::new();
        let inner = match self.locate_inner(s, &mut e) {
            Some(v) => v,
            None => return DecodeOutcome::Failure,
        };
        let odd = s.parity != 0;
        // After removing `inner` inner errors, the residual parity tells whether the
        // extension bit must be flipped as well.
        let ext_flip = odd != (inner % 2 == 1);
        if ext_flip {
            if inner + 1 > self.t() {
                return DecodeOutcome::Failure;
            }
            e.push(ext);
        }
        DecodeOutcome::Corrected(e)
    }

    /// Locates errors in the inner BCH positions. Returns the count or `None` on failure.
    fn locate_inner(&self, s: Syndrome, e: &mut ErrorPattern) -> Option<usize> {
        let f = &self.field;
        if s.s1 == 0 {
            return if s.s3 == 0 { Some(0) } else { None };
        }
        let s1_cubed = f.mul(f.mul(s.s1, s.s1), s.s1);
        if self.t() == 1 || s.s3 == s1_cubed {
            let k = self.index_of_log[f.log(s.s1)];
            if k == u16::MAX {
                return None;
            }
            e.push(k as usize);
            return Some(1);
        }
        // Two errors X1, X2: X1 + X2 = S1, X1 X2 = S3/S1 + S1^2.
        // Substituting x = S1 z gives z^2 + z = S3/S1^3 + 1.
        let c = f.div(s.s3, s1_cubed) ^ 1;
        let z = self.quad_root[c as usize];
        if z == Gf::MAX {
            return None;
        }
        let x1 = f.mul(s.s1, z);
        let x2 = f.mul(s.s1, z ^ 1);
        let k1 = self.index_of_log[f.log(x1)];
        let k2 = self.index_of_log[f.log(x2)];
        if k1 == u16::MAX || k2 == u16::MAX {
            return None;
        }
        e.push(k1.min(k2) as usize);
        e.push(k1.max(k2) as usize);
        Some(2)
    }
}

fn gf2_poly_mul(a: u64, b: u64) -> u64 {
    let mut out = 0u64;
    for i in 0..64 {
        if (b >> i) & 1 != 0 {
            out ^= a << i;
        }
    }
    out
}
