//! Staircase block geometry and encoding.
//!
//! Each row `j` of `[B_{i-1}^T B_i]` is a component codeword: its first `w` bits are
//! column `j` of the older block and its last `w` bits are row `j` of the newer one.
//! Information bits fill the first `w - p` columns of each block; parity sits in the
//! last `p` columns.

use crate::bch::{BchCode, ComponentCodeSpec};
use crate::error::{Error, Result};

/// A `w x w` matrix of hard bits, stored row-major as 0/1 bytes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Block {
    w: usize,
    bits: Vec<u8>,
}

impl Block {
    pub fn zeros(w: usize) -> Self {
        Block { w, bits: vec![0; w * w] }
    }

    pub fn from_bits(w: usize, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != w * w {
            return Err(Error::LengthMismatch { expected: w * w, got: bits.len() });
        }
        Ok(Block { w, bits: bits.into_iter().map(|b| b & 1).collect() })
    }

    pub fn width(&self) -> usize {
        self.w
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.bits[row * self.w + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, bit: u8) {
        self.bits[row * self.w + col] = bit & 1;
    }

    #[inline]
    pub fn flip(&mut self, row: usize, col: usize) {
        self.bits[row * self.w + col] ^= 1;
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.bits[row * self.w..(row + 1) * self.w]
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = u8> + '_ {
        (0..self.w).map(move |r| self.get(r, col))
    }

    pub fn as_bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    /// Number of positions where the two blocks differ.
    pub fn distance(&self, other: &Block) -> usize {
        self.bits.iter().zip(&other.bits).filter(|(a, b)| a != b).count()
    }

    /// Differences restricted to the first `cols` columns.
    pub fn distance_in_columns(&self, other: &Block, cols: usize) -> usize {
        (0..self.w).map(|r| self.row(r)[..cols].iter().zip(&other.row(r)[..cols]).filter(|(a, b)| a != b).count()).sum()
    }
}

impl std::fmt::Debug for Block {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Block({}x{})", self.w, self.w)?;
        for r in 0..self.w {
            let line: String = self.row(r).iter().map(|&b| if b == 1 { '1' } else { '.' }).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// Row-major bit stream of a block.
pub fn serialize_bits(block: &Block) -> Vec<u8> {
    block.bits.clone()
}

pub fn deserialize_bits(w: usize, bits: &[u8]) -> Result<Block> {
    Block::from_bits(w, bits.to_vec())
}

/// Staircase code rate `R = 2 k_c / n_c - 1`.
pub fn code_rate(spec: &ComponentCodeSpec) -> f64 {
    spec.rate()
}

pub fn shorten_spec(mother: &ComponentCodeSpec, s: usize) -> Result<ComponentCodeSpec> {
    mother.shorten(s)
}

/// Location of a bit within the window: block position, row and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitLocation {
    pub block: usize,
    pub row: usize,
    pub col: usize,
}

/// A component codeword in the window: the `row`-th row of pair `pair`, which joins
/// window blocks `pair` and `pair + 1`. All indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodewordAddress {
    pub pair: usize,
    pub row: usize,
}

impl CodewordAddress {
    pub fn new(pair: usize, row: usize) -> Self {
        CodewordAddress { pair, row }
    }

    /// Where bit `k` (`0..2w`) of this codeword lives.
    #[inline]
    pub fn locate(&self, k: usize, w: usize) -> BitLocation {
        if k < w {
            BitLocation { block: self.pair, row: k, col: self.row }
        } else {
            BitLocation { block: self.pair + 1, row: self.row, col: k - w }
        }
    }
}

impl BitLocation {
    /// The codeword in which this bit is part of the newer half, if the block has a predecessor.
    pub fn as_newer(&self, w: usize) -> Option<(CodewordAddress, usize)> {
        (self.block > 0).then(|| (CodewordAddress::new(self.block - 1, self.row), w + self.col))
    }

    /// The codeword in which this bit is part of the older half, given `blocks` resident.
    pub fn as_older(&self, blocks: usize) -> Option<(CodewordAddress, usize)> {
        (self.block + 1 < blocks).then(|| (CodewordAddress::new(self.block, self.col), self.row))
    }
}

/// Encodes the next staircase block from its predecessor and `w (w - p)` information bits
/// given row-major.
pub fn encode_block(code: &BchCode, prev: &Block, info: &[u8]) -> Result<Block> {
    let spec = code.spec();
    let w = spec.w();
    let payload = w - spec.p();
    if prev.width() != w {
        return Err(Error::LengthMismatch { expected: w, got: prev.width() });
    }
    if info.len() != w * payload {
        return Err(Error::LengthMismatch { expected: w * payload, got: info.len() });
    }
    let mut block = Block::zeros(w);
    let mut message = vec![0u8; spec.k_c()];
    let mut codeword = vec![0u8; spec.n_c()];
    for j in 0..w {
        for (dst, b) in message[..w].iter_mut().zip(prev.column(j)) {
            *dst = b;
        }
        message[w..].copy_from_slice(&info[j * payload..(j + 1) * payload]);
        code.encode_into(&message, &mut codeword)?;
        block.bits[j * w..(j + 1) * w].copy_from_slice(&codeword[w..]);
    }
    Ok(block)
}

/// Extracts the information bits of a block (row-major, first `w - p` columns).
pub fn info_bits(spec: &ComponentCodeSpec, block: &Block) -> Vec<u8> {
    let payload = spec.w() - spec.p();
    (0..spec.w()).flat_map(|r| block.row(r)[..payload].iter().copied()).collect()
}

/// Sequential staircase encoder. Block 0 is the all-zero block.
#[derive(Debug, Clone)]
pub struct StaircaseEncoder<'c> {
    code: &'c BchCode,
    prev: Block,
    index: usize,
}

impl<'c> StaircaseEncoder<'c> {
    pub fn new(code: &'c BchCode) -> Self {
        StaircaseEncoder { code, prev: Block::zeros(code.spec().w()), index: 0 }
    }

    /// Index of the most recently produced block (0 before any call to `next_block`).
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn last_block(&self) -> &Block {
        &self.prev
    }

    pub fn next_block(&mut self, info: &[u8]) -> Result<&Block> {
        let block = encode_block(self.code, &self.prev, info)?;
        self.prev = block;
        self.index += 1;
        Ok(&self.prev)
    }
}
