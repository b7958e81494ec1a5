//! Arithmetic in GF(2^m) and systematic Reed-Solomon encoding.
//!
//! Elements are stored as `u16` bit-polynomials over GF(2). Multiplication
//! goes through log/antilog tables built from the primitive polynomial.

use crate::error::{invalid, Error, Result};

/// A binary extension field GF(2^m) defined by a primitive polynomial.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    m: u32,
    primitive_poly: u32,
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.primitive_poly == other.primitive_poly
    }
}

impl FieldSpec {
    /// Builds the field, rejecting polynomials that are not primitive.
    ///
    /// `primitive_poly` includes the leading `x^m` term, e.g. `0b10011` for
    /// `x^4 + x + 1`.
    pub fn new(m: u32, primitive_poly: u32) -> Result<Self> {
        if !(2..=15).contains(&m) {
            return invalid(format!("extension degree {m} outside 2..=15"));
        }
        if primitive_poly >> m != 1 {
            return invalid(format!("polynomial {primitive_poly:#x} is not of degree {m}"));
        }
        let order = (1usize << m) - 1;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u16; order + 1];
        let mut x: u32 = 1;
        for i in 0..order {
            if i > 0 && x == 1 {
                // x has order i < 2^m - 1
                return invalid(format!("polynomial {primitive_poly:#x} is not primitive"));
            }
            exp[i] = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x >> m & 1 == 1 {
                x ^= primitive_poly;
            }
        }
        if x != 1 {
            return invalid(format!("polynomial {primitive_poly:#x} is not primitive"));
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Ok(FieldSpec {
            m,
            primitive_poly,
            exp,
            log,
        })
    }

    /// GF(16) with `x^4 + x + 1`.
    pub fn gf16() -> Self {
        Self::new(4, 0b1_0011).expect("x^4+x+1 is primitive")
    }

    /// GF(32) with `x^5 + x^2 + 1`.
    pub fn gf32() -> Self {
        Self::new(5, 0b10_0101).expect("x^5+x^2+1 is primitive")
    }

    /// GF(128) with `x^7 + x^3 + 1`, used for the length-127 BCH codes.
    pub fn gf128() -> Self {
        Self::new(7, 0b1000_1001).expect("x^7+x^3+1 is primitive")
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn primitive_poly(&self) -> u32 {
        self.primitive_poly
    }

    /// Number of field elements, `2^m`.
    pub fn size(&self) -> usize {
        1 << self.m
    }

    /// Multiplicative order of the field, `2^m - 1`.
    pub fn order(&self) -> usize {
        self.size() - 1
    }

    fn check(&self, a: u16) -> Result<()> {
        if (a as usize) < self.size() {
            Ok(())
        } else {
            invalid(format!("{a} is not an element of GF(2^{})", self.m))
        }
    }

    pub fn mul(&self, a: u16, b: u16) -> Result<u16> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub fn inv(&self, a: u16) -> Result<u16> {
        self.check(a)?;
        if a == 0 {
            return Err(Error::DivisionByZero { m: self.m });
        }
        Ok(self.exp[(self.order() - self.log[a as usize] as usize) % self.order()])
    }

    /// `alpha^e` for the primitive element `alpha = x`.
    pub fn alpha_pow(&self, e: usize) -> u16 {
        self.exp[e % self.order()]
    }

    #[inline]
    pub(crate) fn mul_unchecked(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    /// Evaluates `sum_i coeffs[i] * x^(len-1-i)` at `x` (highest degree first).
    pub fn eval_poly(&self, coeffs: &[u16], x: u16) -> u16 {
        coeffs
            .iter()
            .fold(0u16, |acc, &c| self.mul_unchecked(acc, x) ^ c)
    }
}

/// A Reed-Solomon code over GF(2^m), optionally shortened and/or singly
/// extended by an overall-sum symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct RsSpec {
    pub field: FieldSpec,
    pub n_out: usize,
    pub k_out: usize,
    pub shorten_by: usize,
    pub extended: bool,
    /// Generator polynomial, highest degree first, monic.
    generator: Vec<u16>,
}

impl RsSpec {
    /// Narrow-sense RS code with roots `alpha^1 .. alpha^r` of natural length
    /// `2^m - 1`, shortened by `shorten_by` symbols and optionally extended
    /// with one overall-sum symbol.
    pub fn new(field: FieldSpec, k_out: usize, shorten_by: usize, extended: bool) -> Result<Self> {
        let natural = field.order();
        if shorten_by >= natural {
            return invalid("shortening removes the whole code");
        }
        let base_len = natural - shorten_by;
        if k_out == 0 || k_out >= base_len {
            return invalid(format!("k_out = {k_out} outside 1..{base_len}"));
        }
        let redundancy = base_len - k_out;
        let mut generator = vec![1u16];
        for i in 1..=redundancy {
            // multiply by (x + alpha^i)
            let root = field.alpha_pow(i);
            let mut next = vec![0u16; generator.len() + 1];
            for (j, &g) in generator.iter().enumerate() {
                next[j] ^= g;
                next[j + 1] ^= field.mul_unchecked(g, root);
            }
            generator = next;
        }
        Ok(RsSpec {
            n_out: base_len + extended as usize,
            k_out,
            shorten_by,
            extended,
            field,
            generator,
        })
    }

    /// (16,9) over GF(16): the (15,9) code extended by one symbol.
    pub fn rs16_9() -> Self {
        Self::new(FieldSpec::gf16(), 9, 0, true).expect("valid parameters")
    }

    /// (16,6) over GF(16): the (15,6) code extended by one symbol.
    pub fn rs16_6() -> Self {
        Self::new(FieldSpec::gf16(), 6, 0, true).expect("valid parameters")
    }

    /// (26,13) over GF(32): the (31,18) code shortened by five symbols.
    pub fn rs26_13() -> Self {
        Self::new(FieldSpec::gf32(), 13, 5, false).expect("valid parameters")
    }

    pub fn m(&self) -> u32 {
        self.field.m()
    }

    /// Number of roots `alpha^1 .. alpha^r` of the generator polynomial.
    pub fn redundancy(&self) -> usize {
        self.generator.len() - 1
    }

    /// Designed symbol minimum distance, `n_out - k_out + 1`.
    pub fn min_distance(&self) -> usize {
        self.n_out - self.k_out + 1
    }

    pub fn generator_poly(&self) -> &[u16] {
        &self.generator
    }

    /// Systematic encoding: the message symbols come first, verbatim, followed
    /// by the parity symbols and, for extended codes, the overall-sum symbol.
    pub fn encode(&self, message: &[u16]) -> Result<Vec<u16>> {
        if message.len() != self.k_out {
            return invalid(format!(
                "message has {} symbols, expected {}",
                message.len(),
                self.k_out
            ));
        }
        for &s in message {
            self.field.check(s)?;
        }
        let r = self.redundancy();
        // long division of message(x) * x^r by the generator
        let mut rem = vec![0u16; r];
        for &s in message {
            let feedback = s ^ rem[0];
            rem.rotate_left(1);
            rem[r - 1] = 0;
            if feedback != 0 {
                for (j, slot) in rem.iter_mut().enumerate() {
                    *slot ^= self.field.mul_unchecked(feedback, self.generator[j + 1]);
                }
            }
        }
        let mut codeword = Vec::with_capacity(self.n_out);
        codeword.extend_from_slice(message);
        codeword.extend_from_slice(&rem);
        if self.extended {
            let sum = codeword.iter().fold(0u16, |a, &b| a ^ b);
            codeword.push(sum);
        }
        Ok(codeword)
    }

    /// Message symbols (LSB-first `m`-bit groups) to symbols.
    pub fn bits_to_symbols(&self, bits: &[u8]) -> Vec<u16> {
        let m = self.m() as usize;
        bits.chunks(m)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u16, |acc, (i, &b)| acc | ((b as u16 & 1) << i))
            })
            .collect()
    }

    /// Binary expansion of a symbol sequence, least-significant bit first.
    pub fn symbols_to_bits(&self, symbols: &[u16]) -> Vec<u8> {
        let m = self.m() as usize;
        symbols
            .iter()
            .flat_map(|&s| (0..m).map(move |i| ((s >> i) & 1) as u8))
            .collect()
    }
}
