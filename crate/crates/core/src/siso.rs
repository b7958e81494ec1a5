//! Soft-in soft-out decoding of the inner codes.
//!
//! Both decoders compute exact a-posteriori LLRs of the inner code bits
//! under a uniform prior: the block decoder by enumerating the codebook, the
//! convolutional decoder with a log-domain BCJR pass over the unterminated
//! trellis.

use rayon::prelude::*;

use crate::channel::{channel_llr, transmit, trial_rng, ChannelParams};
use crate::codes::{ConvCodeSpec, InnerCodeKind};
use crate::error::{invalid, Result};

/// Floor applied to normalized log-domain state metrics.
const LOG_FLOOR: f64 = -700.0;

#[inline]
fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Exact bitwise MAP decoder for a short block code given as its codebook.
#[derive(Clone, Debug)]
pub struct BlockSiso {
    len: usize,
    /// Codewords as signs `(-1)^c`, row-major.
    signs: Vec<f64>,
}

impl BlockSiso {
    pub fn new(codebook: &[Vec<u8>]) -> Result<Self> {
        let len = codebook.first().map_or(0, |c| c.len());
        if len == 0 {
            return invalid("empty codebook");
        }
        if codebook.iter().any(|c| c.len() != len) {
            return invalid("codewords of unequal length");
        }
        let signs = codebook
            .iter()
            .flat_map(|c| c.iter().map(|&b| if b & 1 == 0 { 1.0 } else { -1.0 }))
            .collect();
        Ok(BlockSiso { len, signs })
    }

    pub fn for_kind(kind: InnerCodeKind) -> Option<Self> {
        kind.block_codebook()
            .map(|book| Self::new(&book).expect("non-empty codebook"))
    }

    pub fn chunk_len(&self) -> usize {
        self.len
    }

    /// LLRs of one chunk: `ln P(c_j = 0 | r) - ln P(c_j = 1 | r)`.
    pub fn decode(&self, r_chunk: &[f64], sigma_sq: f64) -> Result<Vec<f64>> {
        if r_chunk.len() != self.len {
            return invalid(format!(
                "chunk of {} samples for a length-{} code",
                r_chunk.len(),
                self.len
            ));
        }
        let mut out = vec![0.0; self.len];
        self.decode_into(r_chunk, sigma_sq, &mut out);
        Ok(out)
    }

    fn decode_into(&self, r: &[f64], sigma_sq: f64, out: &mut [f64]) {
        let metrics: Vec<f64> = self
            .signs
            .chunks_exact(self.len)
            .map(|s| s.iter().zip(r).map(|(a, b)| a * b).sum::<f64>() / sigma_sq)
            .collect();
        let peak = metrics.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut zero = vec![0.0; self.len];
        let mut one = vec![0.0; self.len];
        for (m, s) in metrics.iter().zip(self.signs.chunks_exact(self.len)) {
            let w = (m - peak).exp();
            for j in 0..self.len {
                if s[j] > 0.0 {
                    zero[j] += w;
                } else {
                    one[j] += w;
                }
            }
        }
        for j in 0..self.len {
            out[j] = zero[j].ln() - one[j].ln();
        }
    }

    /// Decodes a cascade of independent blocks.
    pub fn decode_cascade(&self, r: &[f64], sigma_sq: f64) -> Result<Vec<f64>> {
        if !r.len().is_multiple_of(self.len) {
            return invalid(format!(
                "{} samples do not split into blocks of {}",
                r.len(),
                self.len
            ));
        }
        let mut out = vec![0.0; r.len()];
        for (rc, oc) in r.chunks(self.len).zip(out.chunks_mut(self.len)) {
            self.decode_into(rc, sigma_sq, oc);
        }
        Ok(out)
    }
}

/// Functional form of [`BlockSiso::decode`].
pub fn block_siso(r_chunk: &[f64], codebook: &[Vec<u8>], sigma_sq: f64) -> Result<Vec<f64>> {
    BlockSiso::new(codebook)?.decode(r_chunk, sigma_sq)
}

/// Log-domain BCJR decoder for an unterminated rate-1/2 feedforward code.
#[derive(Clone, Debug)]
pub struct Bcjr {
    states: usize,
    /// `next[2*s + u]`
    next: Vec<usize>,
    /// `out[2*s + u]`
    out: Vec<[u8; 2]>,
}

impl Bcjr {
    pub fn new(spec: ConvCodeSpec) -> Self {
        let states = spec.num_states();
        let mut next = Vec::with_capacity(2 * states);
        let mut out = Vec::with_capacity(2 * states);
        for s in 0..states {
            for u in 0..2u8 {
                let (o, ns) = spec.step(s, u);
                next.push(ns);
                out.push(o);
            }
        }
        Bcjr { states, next, out }
    }

    /// Per-code-bit a-posteriori LLRs. The forward recursion starts in state
    /// zero; the backward recursion starts uniform over all states.
    pub fn decode(&self, r: &[f64], sigma_sq: f64) -> Result<Vec<f64>> {
        if !r.len().is_multiple_of(2) {
            return invalid(format!("odd received length {}", r.len()));
        }
        if r.iter().any(|x| !x.is_finite()) {
            return invalid("non-finite received sample");
        }
        if !(sigma_sq > 0.0) {
            return invalid(format!("noise variance {sigma_sq} must be positive"));
        }
        let sections = r.len() / 2;
        let s_count = self.states;
        // branch metric of output pair (x0, x1) at section t, indexed by 2*x0 + x1
        let gammas: Vec<[f64; 4]> = r
            .chunks_exact(2)
            .map(|p| {
                let a = p[0] / sigma_sq;
                let b = p[1] / sigma_sq;
                [a + b, a - b, -a + b, -a - b]
            })
            .collect();
        let branch = |t: usize, idx: usize| {
            let o = self.out[idx];
            gammas[t][2 * o[0] as usize + o[1] as usize]
        };

        let mut alpha = vec![LOG_FLOOR; (sections + 1) * s_count];
        alpha[0] = 0.0;
        for t in 0..sections {
            let (cur, rest) = alpha.split_at_mut((t + 1) * s_count);
            let cur = &cur[t * s_count..];
            let nxt = &mut rest[..s_count];
            nxt.fill(f64::NEG_INFINITY);
            for s in 0..s_count {
                for u in 0..2 {
                    let idx = 2 * s + u;
                    let ns = self.next[idx];
                    nxt[ns] = log_add(nxt[ns], cur[s] + branch(t, idx));
                }
            }
            normalize(nxt);
        }

        let mut beta = vec![0.0; (sections + 1) * s_count];
        for t in (0..sections).rev() {
            let (head, tail) = beta.split_at_mut((t + 1) * s_count);
            let cur = &mut head[t * s_count..];
            let nxt = &tail[..s_count];
            for s in 0..s_count {
                let a = nxt[self.next[2 * s]] + branch(t, 2 * s);
                let b = nxt[self.next[2 * s + 1]] + branch(t, 2 * s + 1);
                cur[s] = log_add(a, b);
            }
            normalize(cur);
        }

        let mut llr = Vec::with_capacity(r.len());
        for t in 0..sections {
            let mut num = [f64::NEG_INFINITY; 2];
            let mut den = [f64::NEG_INFINITY; 2];
            for s in 0..s_count {
                let a = alpha[t * s_count + s];
                for u in 0..2 {
                    let idx = 2 * s + u;
                    let v = a + branch(t, idx) + beta[(t + 1) * s_count + self.next[idx]];
                    let o = self.out[idx];
                    for bit in 0..2 {
                        if o[bit] == 0 {
                            num[bit] = log_add(num[bit], v);
                        } else {
                            den[bit] = log_add(den[bit], v);
                        }
                    }
                }
            }
            llr.push(num[0] - den[0]);
            llr.push(num[1] - den[1]);
        }
        Ok(llr)
    }
}

fn normalize(v: &mut [f64]) {
    let peak = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for x in v.iter_mut() {
        *x = (*x - peak).max(LOG_FLOOR);
    }
}

/// Functional form of [`Bcjr::decode`].
pub fn bcjr_siso(r: &[f64], spec: ConvCodeSpec, sigma_sq: f64) -> Result<Vec<f64>> {
    Bcjr::new(spec).decode(r, sigma_sq)
}

/// Source of per-code-bit LLRs: the raw channel, or an inner SISO decoder.
#[derive(Clone, Debug)]
pub enum SisoDecoder {
    Uncoded,
    Block(BlockSiso),
    Conv(Bcjr),
}

impl SisoDecoder {
    pub fn new(kind: Option<InnerCodeKind>) -> Self {
        match kind {
            None => SisoDecoder::Uncoded,
            Some(k) => match k.conv_spec() {
                Some(spec) => SisoDecoder::Conv(Bcjr::new(spec)),
                None => SisoDecoder::Block(BlockSiso::for_kind(k).expect("block kind")),
            },
        }
    }

    /// LLR of every code bit of the inner code (length of `r`).
    pub fn llr(&self, r: &[f64], sigma_sq: f64) -> Result<Vec<f64>> {
        match self {
            SisoDecoder::Uncoded => channel_llr(r, sigma_sq),
            SisoDecoder::Block(b) => b.decode_cascade(r, sigma_sq),
            SisoDecoder::Conv(b) => b.decode(r, sigma_sq),
        }
    }
}

/// Sample mean and variance of the code-bit LLRs of a length-`n` inner
/// codeword, conditioned on the all-zero codeword at the given Es/N0.
pub fn estimate_llr_moments(
    kind: Option<InnerCodeKind>,
    es_n0_db: f64,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if trials == 0 {
        return invalid("at least one trial is required");
    }
    let params = ChannelParams::from_esn0(es_n0_db, seed)?;
    let decoder = SisoDecoder::new(kind);
    let zeros = vec![0u8; n];
    // per-trial partial sums are combined in trial order so the result does
    // not depend on the number of workers
    let partial: Vec<(f64, f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let r = transmit(&zeros, &params, &mut trial_rng(seed, t));
            let l = decoder.llr(&r, params.sigma_sq).expect("valid lengths");
            let s: f64 = l.iter().sum();
            let s2: f64 = l.iter().map(|x| x * x).sum();
            (l.len() as f64, s, s2)
        })
        .collect();
    let (count, sum, sum_sq) = partial
        .iter()
        .fold((0.0, 0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let mean = sum / count;
    let var = (sum_sq - count * mean * mean) / (count - 1.0);
    Ok((mean, var))
}
