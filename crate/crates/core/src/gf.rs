//! GF(2^m) arithmetic backed by log/antilog tables.

use crate::error::{Error, Result};

/// Field element. Degrees up to 10 fit comfortably in 16 bits.
pub type Gf = u16;

/// Conventional primitive polynomials, indexed by degree.
pub fn default_primitive_poly(degree: u32) -> Option<u32> {
    match degree {
        4 => Some(0b1_0011),    // x^4 + x + 1
        5 => Some(0b10_0101),   // x^5 + x^2 + 1
        6 => Some(0b100_0011),  // x^6 + x + 1
        7 => Some(0b1000_1001), // x^7 + x^3 + 1
        8 => Some(0x11d),       // x^8 + x^4 + x^3 + x^2 + 1
        9 => Some(0x211),       // x^9 + x^4 + 1
        10 => Some(0x409),      // x^10 + x^3 + 1
        _ => None,
    }
}

#[derive(Debug, Clone)]
pub struct FieldTable {
    degree: u32,
    poly: u32,
    /// `exp[i] = alpha^i`, stored twice over so products of two logs never need a reduction.
    exp: Vec<Gf>,
    /// `log[a]` for nonzero `a`; `log[0]` is unused.
    log: Vec<u16>,
}

impl FieldTable {
    pub fn new(degree: u32, poly: u32) -> Result<Self> {
        if !(4..=10).contains(&degree) {
            return Err(Error::UnsupportedDegree(degree));
        }
        if poly >> degree != 1 {
            return Err(Error::NotPrimitive { degree, poly, order: 0 });
        }
        let size = 1usize << degree;
        let order = size - 1;
        let mut exp = vec![0 as Gf; 2 * order];
        let mut log = vec![0u16; size];
        let mut x: u32 = 1;
        for i in 0..order {
            if i > 0 && x == 1 {
                return Err(Error::NotPrimitive { degree, poly, order: i });
            }
            exp[i] = x as Gf;
            log[x as usize] = i as u16;
            x <<= 1;
            if x & (1 << degree) != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            // alpha^order must come back to one; otherwise the polynomial is reducible.
            return Err(Error::NotPrimitive { degree, poly, order: 0 });
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Ok(FieldTable { degree, poly, exp, log })
    }

    pub fn with_default_poly(degree: u32) -> Result<Self> {
        let poly = default_primitive_poly(degree).ok_or(Error::UnsupportedDegree(degree))?;
        Self::new(degree, poly)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// Number of field elements, `2^m`.
    pub fn size(&self) -> usize {
        1 << self.degree
    }

    /// Multiplicative group order, `2^m - 1`.
    pub fn order(&self) -> usize {
        self.size() - 1
    }

    #[inline]
    pub fn alpha_pow(&self, e: usize) -> Gf {
        self.exp[e % self.order()]
    }

    /// Discrete log of a nonzero element.
    #[inline]
    pub fn log(&self, a: Gf) -> usize {
        debug_assert!(a != 0);
        self.log[a as usize] as usize
    }

    #[inline]
    pub fn mul(&self, a: Gf, b: Gf) -> Gf {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
    }

    #[inline]
    pub fn div(&self, a: Gf, b: Gf) -> Gf {
        assert!(b != 0, "division by zero in GF(2^m)");
        if a == 0 {
            return 0;
        }
        let order = self.order();
        self.exp[self.log[a as usize] as usize + order - self.log[b as usize] as usize]
    }

    #[inline]
    pub fn inv(&self, a: Gf) -> Gf {
        self.div(1, a)
    }

    pub fn pow(&self, a: Gf, e: usize) -> Gf {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] as usize * e) % self.order()]
    }

    /// Minimal polynomial over GF(2) of `alpha^e`, as a bitmask (bit i = coefficient of x^i).
    pub fn minimal_poly(&self, e: usize) -> u64 {
        let order = self.order();
        let mut conjugates = Vec::new();
        let mut c = e % order;
        loop {
            conjugates.push(c);
            c = (c * 2) % order;
            if c == e % order {
                break;
            }
        }
        // Multiply out prod (x + alpha^c) with coefficients in GF(2^m).
        let mut coeffs: Vec<Gf> = vec![1];
        for &c in &conjugates {
            let root = self.alpha_pow(c);
            let mut next = vec![0 as Gf; coeffs.len() + 1];
            for (i, &a) in coeffs.iter().enumerate() {
                next[i + 1] ^= a;
                next[i] ^= self.mul(a, root);
            }
            coeffs = next;
        }
        coeffs.iter().enumerate().fold(0u64, |acc, (i, &a)| {
            debug_assert!(a <= 1, "minimal polynomial must have binary coefficients");
            acc | ((a as u64) << i)
        })
    }
}
