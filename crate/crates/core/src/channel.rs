//! M-PAM over AWGN: Gray mapping, exact bit LLRs, hard decisions and reliability marks.
//!
//! The received sample is `y = sqrt(rho) x + z` with `z ~ N(0, 1)` and the
//! constellation normalized to unit average energy.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Equally spaced PAM constellation with binary reflected Gray labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Pam {
    bits_per_symbol: usize,
    /// Points in increasing order, unit average energy.
    points: Vec<f64>,
    /// `labels[i]` is the label of point `i`, most significant bit first.
    labels: Vec<usize>,
    /// `point_of_label[l]` inverts `labels`.
    point_of_label: Vec<usize>,
}

impl Pam {
    pub fn new(order: usize) -> Result<Self> {
        let bits_per_symbol = match order {
            2 => 1,
            4 => 2,
            8 => 3,
            _ => return Err(Error::InvalidConfig(format!("PAM order {order} not in {{2, 4, 8}}"))),
        };
        let m = order as f64;
        let scale = ((m * m - 1.0) / 3.0).sqrt();
        let points = (0..order).map(|i| (2.0 * i as f64 - (m - 1.0)) / scale).collect();
        let labels: Vec<usize> = (0..order).map(|i| i ^ (i >> 1)).collect();
        let mut point_of_label = vec![0; order];
        for (i, &l) in labels.iter().enumerate() {
            point_of_label[l] = i;
        }
        Ok(Pam { bits_per_symbol, points, labels, point_of_label })
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn label(&self, point: usize) -> usize {
        self.labels[point]
    }

    /// Bit `k` (0 = most significant) of the label of `point`.
    #[inline]
    pub fn label_bit(&self, point: usize, k: usize) -> u8 {
        ((self.labels[point] >> (self.bits_per_symbol - 1 - k)) & 1) as u8
    }
}

/// Maps groups of `log2 M` bits (MSB first) to unit-energy PAM points.
pub fn map_symbols(bits: &[u8], pam: &Pam) -> Result<Vec<f64>> {
    let m = pam.bits_per_symbol();
    if !bits.len().is_multiple_of(m) {
        return Err(Error::LengthMismatch { expected: bits.len().next_multiple_of(m), got: bits.len() });
    }
    Ok(bits
        .chunks_exact(m)
        .map(|g| {
            let label = g.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
            pam.points[pam.point_of_label[label]]
        })
        .collect())
}

/// `y = sqrt(rho) x + z`, one standard normal draw per symbol, in order.
pub fn transmit<R: Rng + ?Sized>(symbols: &[f64], rho: f64, rng: &mut R) -> Vec<f64> {
    let a = rho.sqrt();
    symbols
        .iter()
        .map(|&x| {
            let z: f64 = rng.sample(StandardNormal);
            a * x + z
        })
        .collect()
}

/// Exact bit LLRs `log p(y | b = 1) / p(y | b = 0)`, `log2 M` values per sample.
pub fn compute_llrs(y: &[f64], pam: &Pam, rho: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(y.len() * pam.bits_per_symbol());
    compute_llrs_into(y, pam, rho, &mut out);
    out
}

pub fn compute_llrs_into(y: &[f64], pam: &Pam, rho: f64, out: &mut Vec<f64>) {
    let a = rho.sqrt();
    let m = pam.bits_per_symbol();
    let mut metric = [0.0f64; 8];
    if pam.order() == 2 {
        // One point per bit value: the log-sum-exp terms vanish.
        let (s1, s0) =
            if pam.label_bit(1, 0) == 1 { (pam.points[1], pam.points[0]) } else { (pam.points[0], pam.points[1]) };
        out.extend(y.iter().map(|&yl| {
            let (d1, d0) = (yl - a * s1, yl - a * s0);
            0.5 * (d0 * d0 - d1 * d1)
        }));
        return;
    }
    for &yl in y {
        for (i, &s) in pam.points.iter().enumerate() {
            let d = yl - a * s;
            metric[i] = -0.5 * d * d;
        }
        for k in 0..m {
            let (mut best1, mut best0) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for i in 0..pam.order() {
                if pam.label_bit(i, k) == 1 {
                    best1 = best1.max(metric[i]);
                } else {
                    best0 = best0.max(metric[i]);
                }
            }
            let (mut sum1, mut sum0) = (0.0, 0.0);
            for i in 0..pam.order() {
                if pam.label_bit(i, k) == 1 {
                    sum1 += (metric[i] - best1).exp();
                } else {
                    sum0 += (metric[i] - best0).exp();
                }
            }
            out.push((best1 + sum1.ln()) - (best0 + sum0.ln()));
        }
    }
}

/// Hard decision from LLR sign: 1 iff `llr > 0`; exact ties give 0.
#[inline]
pub fn hard_bit(llr: f64) -> u8 {
    (llr > 0.0) as u8
}

pub fn hd_demap(y: &[f64], pam: &Pam, rho: f64) -> Vec<u8> {
    compute_llrs(y, pam, rho).into_iter().map(hard_bit).collect()
}

/// How reliability magnitudes are stored in a [`MarkPlane`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantization {
    /// `q`-bit levels spanning `[0, delta)`.
    Bits(u8),
    /// Exact magnitudes (kept as `f32`).
    Exact,
}

impl Default for Quantization {
    fn default() -> Self {
        Quantization::Bits(5)
    }
}

/// Per-bit marks for one block: highly-reliable flag plus a reliability rank key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkPlane {
    hrb: Vec<bool>,
    level: Vec<u32>,
}

impl MarkPlane {
    /// A plane with no HRBs and all levels zero.
    pub fn unmarked(len: usize) -> Self {
        MarkPlane { hrb: vec![false; len], level: vec![0; len] }
    }

    pub fn from_parts(hrb: Vec<bool>, level: Vec<u32>) -> Result<Self> {
        if hrb.len() != level.len() {
            return Err(Error::LengthMismatch { expected: hrb.len(), got: level.len() });
        }
        Ok(MarkPlane { hrb, level })
    }

    pub fn len(&self) -> usize {
        self.hrb.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hrb.is_empty()
    }

    #[inline]
    pub fn is_hrb(&self, i: usize) -> bool {
        self.hrb[i]
    }

    /// Reliability key: smaller means less reliable.
    #[inline]
    pub fn level(&self, i: usize) -> u32 {
        self.level[i]
    }

    pub fn set(&mut self, i: usize, hrb: bool, level: u32) {
        self.hrb[i] = hrb;
        self.level[i] = level;
    }
}

/// Marks bits from LLR magnitudes: HRB iff `|llr| >= delta`, level
/// `clamp(floor(|llr| (2^q - 1) / delta), 0, 2^q - 1)`.
pub fn mark_bits(llrs: &[f64], delta: f64, quant: Quantization) -> Result<MarkPlane> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidConfig(format!("HRB threshold must be positive, got {delta}")));
    }
    let mut plane = MarkPlane { hrb: Vec::with_capacity(llrs.len()), level: Vec::with_capacity(llrs.len()) };
    for &l in llrs {
        let (hrb, level) = mark_one(l, delta, quant);
        plane.hrb.push(hrb);
        plane.level.push(level);
    }
    Ok(plane)
}

#[inline]
pub(crate) fn mark_one(llr: f64, delta: f64, quant: Quantization) -> (bool, u32) {
    let mag = llr.abs();
    let level = match quant {
        Quantization::Bits(q) => {
            let top = ((1u64 << q) - 1) as f64;
            let scaled = (mag * top / delta).floor();
            if scaled.is_nan() {
                0
            } else {
                scaled.clamp(0.0, top) as u32
            }
        }
        // Non-negative f32 bit patterns sort like the values.
        Quantization::Exact => (mag as f32).to_bits(),
    };
    (mag >= delta, level)
}
