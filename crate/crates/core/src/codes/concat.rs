use super::inner::InnerCodeKind;
use super::matrix::GeneratorMatrix;
use crate::bits::Bits;
use crate::error::{invalid, Result};
use crate::gf::RsSpec;

/// Reed-Solomon outer code composed with a rate-1/2 binary inner code.
///
/// Message bits are grouped LSB-first into `m`-bit outer symbols; the outer
/// codeword is expanded back to bits in the same order and the expansion is
/// fed to the inner encoder, outer symbol `i` occupying inner input bits
/// `i*m .. (i+1)*m`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcatSpec {
    pub outer: RsSpec,
    pub inner: InnerCodeKind,
}

impl ConcatSpec {
    pub fn new(outer: RsSpec, inner: InnerCodeKind) -> Result<Self> {
        let k_in = outer.n_out * outer.m() as usize;
        if let Some(chunk) = inner.chunk_len() {
            if !k_in.is_multiple_of(chunk) {
                return invalid(format!(
                    "inner input length {k_in} is not a multiple of {chunk}"
                ));
            }
        }
        Ok(ConcatSpec { outer, inner })
    }

    /// Message length, `k_out * m`.
    pub fn k(&self) -> usize {
        self.outer.k_out * self.outer.m() as usize
    }

    /// Inner input length, `n_out * m`.
    pub fn k_in(&self) -> usize {
        self.outer.n_out * self.outer.m() as usize
    }

    /// Code length, `2 * k_in`.
    pub fn n(&self) -> usize {
        2 * self.k_in()
    }

    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.k() {
            return invalid(format!(
                "message has {} bits, expected {}",
                message.len(),
                self.k()
            ));
        }
        let symbols = self.outer.bits_to_symbols(message);
        let outer_cw = self.outer.encode(&symbols)?;
        let expanded = self.outer.symbols_to_bits(&outer_cw);
        self.inner.encode(&expanded)
    }

    /// Generator matrix whose row `i` is the encoding of unit vector `e_i`.
    pub fn derive_generator(&self) -> Result<GeneratorMatrix> {
        let k = self.k();
        let mut rows = Vec::with_capacity(k);
        let mut unit = vec![0u8; k];
        for i in 0..k {
            unit[i] = 1;
            rows.push(Bits::from_bits(&self.encode(&unit)?));
            unit[i] = 0;
        }
        GeneratorMatrix::new(self.n(), rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let a = ConcatSpec::new(RsSpec::rs16_9(), InnerCodeKind::ExtHamming8_4).unwrap();
        assert_eq!((a.n(), a.k(), a.k_in()), (128, 36, 64));
        let b = ConcatSpec::new(RsSpec::rs16_6(), InnerCodeKind::Conv2_1_6).unwrap();
        assert_eq!((b.n(), b.k()), (128, 24));
        let c = ConcatSpec::new(RsSpec::rs26_13(), InnerCodeKind::Conv2_1_6).unwrap();
        assert_eq!((c.k_in(), c.k()), (130, 65));
        assert_eq!(c.n(), 260);
    }

    #[test]
    fn incompatible_cascade_rejected() {
        // 26 * 5 = 130 input bits do not split into 4-bit chunks
        assert!(ConcatSpec::new(RsSpec::rs26_13(), InnerCodeKind::ExtHamming8_4).is_err());
    }

    #[test]
    fn zero_message_and_length_check() {
        let a = ConcatSpec::new(RsSpec::rs16_9(), InnerCodeKind::Conv2_1_4).unwrap();
        assert_eq!(a.encode(&[0; 36]).unwrap(), vec![0; 128]);
        assert!(a.encode(&[0; 35]).is_err());
    }
}
