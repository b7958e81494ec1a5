//! Rate-1/2 inner codes: cascaded short block codes and unterminated
//! feedforward convolutional codes.

use std::fmt;
use std::str::FromStr;

use super::matrix::GeneratorMatrix;
use crate::bits::Bits;
use crate::error::{invalid, Error, Result};

/// Parity parts of the systematic (8,4,4) extended Hamming code, one byte per
/// message bit (bit `b` of the byte is code position `4 + b`).
const HAMMING84_PARITY: [u8; 4] = [0b1110, 0b1101, 0b1011, 0b0111];

/// Parity parts of the shipped systematic (16,8,5) code, one byte per message
/// bit (bit `b` of the byte is code position `8 + b`).
pub const BLOCK168_PARITY: [u8; 8] = [0x0f, 0x33, 0x55, 0x6a, 0x96, 0xab, 0xdb, 0xed];

/// A rate-1/2 feedforward convolutional code with a single input.
///
/// Generators are written in the usual octal convention: the most significant
/// tap multiplies the current input bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvCodeSpec {
    pub memory: u32,
    pub generators: [u32; 2],
}

impl ConvCodeSpec {
    /// (2,1,4) code with generators 23, 35 (octal).
    pub const M4: ConvCodeSpec = ConvCodeSpec {
        memory: 4,
        generators: [0o23, 0o35],
    };

    /// (2,1,6) code with generators 133, 171 (octal).
    pub const M6: ConvCodeSpec = ConvCodeSpec {
        memory: 6,
        generators: [0o133, 0o171],
    };

    pub fn num_states(&self) -> usize {
        1 << self.memory
    }

    /// Output pair and next state for input `bit` from `state`. The state
    /// holds the previous `memory` inputs, most recent in the high bit.
    #[inline]
    pub fn step(&self, state: usize, bit: u8) -> ([u8; 2], usize) {
        let reg = ((bit as u32) << self.memory) | state as u32;
        let out = [
            ((reg & self.generators[0]).count_ones() & 1) as u8,
            ((reg & self.generators[1]).count_ones() & 1) as u8,
        ];
        (out, (reg >> 1) as usize)
    }

    /// Encodes from the all-zero state without tail bits; for every input bit
    /// the generator-0 output precedes the generator-1 output.
    pub fn encode(&self, bits: &[u8]) -> Vec<u8> {
        let mut state = 0;
        let mut out = Vec::with_capacity(2 * bits.len());
        for &b in bits {
            let (pair, next) = self.step(state, b & 1);
            out.extend_from_slice(&pair);
            state = next;
        }
        out
    }
}

/// The four inner codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InnerCodeKind {
    /// Cascade of (8,4,4) extended Hamming codes.
    ExtHamming8_4,
    /// Cascade of (16,8,5) block codes.
    Block16_8,
    /// (2,1,4) convolutional code, unterminated.
    Conv2_1_4,
    /// (2,1,6) convolutional code, unterminated.
    Conv2_1_6,
}

impl InnerCodeKind {
    pub const ALL: [InnerCodeKind; 4] = [
        InnerCodeKind::ExtHamming8_4,
        InnerCodeKind::Block16_8,
        InnerCodeKind::Conv2_1_4,
        InnerCodeKind::Conv2_1_6,
    ];

    /// Message chunk length of a cascaded block code.
    pub fn chunk_len(&self) -> Option<usize> {
        match self {
            InnerCodeKind::ExtHamming8_4 => Some(4),
            InnerCodeKind::Block16_8 => Some(8),
            _ => None,
        }
    }

    pub fn conv_spec(&self) -> Option<ConvCodeSpec> {
        match self {
            InnerCodeKind::Conv2_1_4 => Some(ConvCodeSpec::M4),
            InnerCodeKind::Conv2_1_6 => Some(ConvCodeSpec::M6),
            _ => None,
        }
    }

    /// Generator matrix of one block of a cascaded code.
    pub fn block_generator(&self) -> Option<GeneratorMatrix> {
        let (k, parity): (usize, &[u8]) = match self {
            InnerCodeKind::ExtHamming8_4 => (4, &HAMMING84_PARITY),
            InnerCodeKind::Block16_8 => (8, &BLOCK168_PARITY),
            _ => return None,
        };
        let rows = parity
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let mut row = Bits::zero();
                row.set(i);
                for b in 0..k {
                    if p >> b & 1 == 1 {
                        row.set(k + b);
                    }
                }
                row
            })
            .collect();
        Some(GeneratorMatrix::new(2 * k, rows).expect("systematic rows are independent"))
    }

    /// All codewords of one block (index = packed message), each as bits.
    pub fn block_codebook(&self) -> Option<Vec<Vec<u8>>> {
        let g = self.block_generator()?;
        Some(
            (0..1u128 << g.k())
                .map(|m| g.encode_packed(m).to_vec(g.n()))
                .collect(),
        )
    }

    /// Encodes `bits`; output length is `2 * bits.len()`.
    pub fn encode(&self, bits: &[u8]) -> Result<Vec<u8>> {
        if let Some(conv) = self.conv_spec() {
            return Ok(conv.encode(bits));
        }
        let chunk = self.chunk_len().expect("block kind");
        if bits.is_empty() || !bits.len().is_multiple_of(chunk) {
            return invalid(format!(
                "{} input bits is not a multiple of the chunk length {chunk}",
                bits.len()
            ));
        }
        let g = self.block_generator().expect("block kind");
        let mut out = Vec::with_capacity(2 * bits.len());
        for c in bits.chunks(chunk) {
            out.extend(g.encode(c)?);
        }
        Ok(out)
    }

    pub fn name(&self) -> &'static str {
        match self {
            InnerCodeKind::ExtHamming8_4 => "ham8_4",
            InnerCodeKind::Block16_8 => "blk16_8",
            InnerCodeKind::Conv2_1_4 => "conv2_1_4",
            InnerCodeKind::Conv2_1_6 => "conv2_1_6",
        }
    }
}

impl fmt::Display for InnerCodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InnerCodeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InnerCodeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown inner code `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::matrix::min_distance_bruteforce;

    #[test]
    fn shipped_block_distances() {
        let h = InnerCodeKind::ExtHamming8_4.block_generator().unwrap();
        assert_eq!(min_distance_bruteforce(&h).unwrap(), 4);
        let b = InnerCodeKind::Block16_8.block_generator().unwrap();
        assert_eq!(min_distance_bruteforce(&b).unwrap(), 5);
    }

    #[test]
    fn hamming_table_weights() {
        let book = InnerCodeKind::ExtHamming8_4.block_codebook().unwrap();
        assert_eq!(book.len(), 16);
        for (m, cw) in book.iter().enumerate().skip(1) {
            let w: u8 = cw.iter().sum();
            assert!(w == 4 || w == 8, "message {m} has weight {w}");
        }
        assert!(book.contains(&vec![1; 8]));
        let out = InnerCodeKind::ExtHamming8_4.encode(&[1, 0, 0, 0]).unwrap();
        assert_eq!(out.iter().sum::<u8>(), 4);
    }

    #[test]
    fn lengths_and_zero_input() {
        for kind in InnerCodeKind::ALL {
            let out = kind.encode(&[0; 64]).unwrap();
            assert_eq!(out, vec![0; 128]);
        }
        assert!(InnerCodeKind::ExtHamming8_4.encode(&[0; 6]).is_err());
        assert!(InnerCodeKind::Block16_8.encode(&[0; 12]).is_err());
        assert_eq!(InnerCodeKind::Conv2_1_6.encode(&[1; 7]).unwrap().len(), 14);
    }

    #[test]
    fn cascade_locality() {
        let mut a = vec![0u8; 64];
        a[17] = 1;
        let base = InnerCodeKind::Block16_8.encode(&a).unwrap();
        a[40] = 1;
        let changed = InnerCodeKind::Block16_8.encode(&a).unwrap();
        // input bit 40 lives in chunk 5 -> outputs 80..96
        for j in 0..128 {
            if !(80..96).contains(&j) {
                assert_eq!(base[j], changed[j], "position {j}");
            }
        }
    }

    #[test]
    fn conv_impulse_response() {
        // 23 octal = 10011, 35 octal = 11101, current input is the MSB
        let out = ConvCodeSpec::M4.encode(&[1, 0, 0, 0, 0]);
        assert_eq!(out, vec![1, 1, 0, 1, 0, 1, 1, 0, 1, 1]);
    }

    fn weight_min(spec: ConvCodeSpec, len: usize, terminated_only: bool) -> usize {
        (1u32..1 << len)
            .filter(|u| !terminated_only || u >> (len - spec.memory as usize) == 0)
            .map(|u| {
                let bits: Vec<u8> = (0..len).map(|i| (u >> i & 1) as u8).collect();
                spec.encode(&bits).iter().map(|&b| b as usize).sum()
            })
            .min()
            .unwrap()
    }

    #[test]
    fn free_distances_by_enumeration() {
        assert_eq!(weight_min(ConvCodeSpec::M4, 16, true), 7);
        assert_eq!(weight_min(ConvCodeSpec::M6, 20, true), 10);
        // without termination a final input one is seen by a single section
        assert_eq!(weight_min(ConvCodeSpec::M6, 12, false), 2);
    }

    #[test]
    fn kind_names_parse() {
        for k in InnerCodeKind::ALL {
            assert_eq!(k.name().parse::<InnerCodeKind>().unwrap(), k);
        }
        assert!("conv2_1_5".parse::<InnerCodeKind>().is_err());
    }
}
