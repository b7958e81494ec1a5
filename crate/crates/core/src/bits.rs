//! Fixed-capacity binary vectors.
//!
//! Every code handled by this crate has length at most [`MAX_LEN`], so a
//! codeword fits in a small inline array of words and can be copied freely
//! during the tree search.

use std::fmt;

const WORDS: usize = 5;

/// Largest supported code length in bits.
pub const MAX_LEN: usize = WORDS * 64;

/// A binary vector of up to [`MAX_LEN`] bits. Bit `j` is position `j` of the
/// vector; unused high bits are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Bits([u64; WORDS]);

impl Bits {
    pub const fn zero() -> Self {
        Bits([0; WORDS])
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        assert!(bits.len() <= MAX_LEN, "vector longer than {MAX_LEN} bits");
        let mut out = Bits::zero();
        for (j, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                out.set(j);
            }
        }
        out
    }

    pub fn to_vec(&self, len: usize) -> Vec<u8> {
        (0..len).map(|j| self.get(j) as u8).collect()
    }

    #[inline]
    pub fn get(&self, j: usize) -> bool {
        (self.0[j >> 6] >> (j & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, j: usize) {
        self.0[j >> 6] |= 1 << (j & 63);
    }

    #[inline]
    pub fn clear(&mut self, j: usize) {
        self.0[j >> 6] &= !(1 << (j & 63));
    }

    #[inline]
    pub fn assign(&mut self, j: usize, value: bool) {
        if value {
            self.set(j)
        } else {
            self.clear(j)
        }
    }

    #[inline]
    pub fn flip(&mut self, j: usize) {
        self.0[j >> 6] ^= 1 << (j & 63);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a ^= b;
        }
    }

    #[inline]
    pub fn xor(mut self, other: &Bits) -> Bits {
        self.xor_assign(other);
        self
    }

    #[inline]
    pub fn and(mut self, other: &Bits) -> Bits {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a &= b;
        }
        self
    }

    #[inline]
    pub fn count_ones(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    /// Lowest set position, if any.
    pub fn first_one(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    /// Bits `lo..hi` cleared everywhere else.
    pub fn masked(&self, lo: usize, hi: usize) -> Bits {
        let mut out = Bits::zero();
        for (i, w) in self.0.iter().enumerate() {
            let base = i * 64;
            if base + 64 <= lo || base >= hi {
                continue;
            }
            let from = lo.saturating_sub(base);
            let to = (hi - base).min(64);
            let mut mask = if to == 64 { u64::MAX } else { (1u64 << to) - 1 };
            mask &= u64::MAX << from;
            out.0[i] = w & mask;
        }
        out
    }

    /// Iterator over set positions in ascending order.
    pub fn ones(&self) -> Ones<'_> {
        Ones {
            words: &self.0,
            idx: 0,
            cur: self.0[0],
        }
    }
}

pub struct Ones<'a> {
    words: &'a [u64; WORDS],
    idx: usize,
    cur: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let t = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * 64 + t);
            }
            self.idx += 1;
            if self.idx >= WORDS {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits{{")?;
        for (n, j) in self.ones().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "}}")
    }
}
