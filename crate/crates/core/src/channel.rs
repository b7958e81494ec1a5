//! BPSK over AWGN and channel LLRs.
//!
//! Code bit `c` is sent as `(-1)^c`; the noise variance follows from the
//! energy per message bit, `sigma^2 = 1 / (2 R Eb/N0)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bits::Bits;
use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    pub ebn0_db: f64,
    pub rate: f64,
    pub sigma_sq: f64,
    pub seed: u64,
}

impl ChannelParams {
    /// `ebn0_db = +inf` gives a noiseless channel.
    pub fn from_ebn0(ebn0_db: f64, rate: f64, seed: u64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return invalid(format!("rate {rate} outside (0, 1]"));
        }
        if ebn0_db.is_nan() || ebn0_db == f64::NEG_INFINITY {
            return invalid(format!("Eb/N0 of {ebn0_db} dB"));
        }
        let sigma_sq = 1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0));
        Ok(ChannelParams {
            ebn0_db,
            rate,
            sigma_sq,
            seed,
        })
    }

    /// Parameters for a given energy per transmitted symbol (rate 1).
    pub fn from_esn0(es_n0_db: f64, seed: u64) -> Result<Self> {
        Self::from_ebn0(es_n0_db, 1.0, seed)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma_sq.sqrt()
    }

    pub fn is_noiseless(&self) -> bool {
        self.sigma_sq == 0.0
    }

    /// Transmits with the stream for trial 0 of this parameter set's seed.
    pub fn transmit(&self, codeword: &[u8]) -> Vec<f64> {
        transmit(codeword, self, &mut trial_rng(self.seed, 0))
    }
}

/// Independent random stream for trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Derives the seed of a sub-experiment (e.g. one Eb/N0 point) from a
/// campaign seed, using the SplitMix64 finalizer.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `r_i = (-1)^{c_i} + w_i` with `w_i ~ N(0, sigma^2)`.
pub fn transmit(codeword: &[u8], params: &ChannelParams, rng: &mut impl Rng) -> Vec<f64> {
    let sigma = params.sigma();
    codeword
        .iter()
        .map(|&c| {
            let s = if c & 1 == 0 { 1.0 } else { -1.0 };
            if sigma == 0.0 {
                s
            } else {
                let w: f64 = rng.sample(StandardNormal);
                s + sigma * w
            }
        })
        .collect()
}

/// [`transmit`] for a packed codeword of length `n`.
pub fn transmit_bits(
    codeword: &Bits,
    n: usize,
    params: &ChannelParams,
    rng: &mut impl Rng,
) -> Vec<f64> {
    let sigma = params.sigma();
    (0..n)
        .map(|j| {
            let s = if codeword.get(j) { -1.0 } else { 1.0 };
            if sigma == 0.0 {
                s
            } else {
                let w: f64 = rng.sample(StandardNormal);
                s + sigma * w
            }
        })
        .collect()
}

/// Channel LLRs `2 r_i / sigma^2`; positive favours bit 0.
pub fn channel_llr(r: &[f64], sigma_sq: f64) -> Result<Vec<f64>> {
    if !(sigma_sq > 0.0) || !sigma_sq.is_finite() {
        return invalid(format!("noise variance {sigma_sq} must be positive"));
    }
    Ok(r.iter().map(|&x| 2.0 * x / sigma_sq).collect())
}

/// Hard decision: 0 for non-negative values, 1 otherwise.
pub fn hard_decision(values: &[f64]) -> Bits {
    let mut out = Bits::zero();
    for (j, &v) in values.iter().enumerate() {
        if v < 0.0 {
            out.set(j);
        }
    }
    out
}

/// Parses a received vector: finite reals separated by whitespace or
/// commas; `#` starts a comment running to the end of the line.
pub fn parse_samples(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (l, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        let mut column = 1;
        for token in body.split_inclusive([' ', '\t', ',']) {
            let value = token.trim_end_matches([' ', '\t', ',']);
            if !value.is_empty() {
                let x: f64 = value.parse().map_err(|_| Error::Parse {
                    line: l + 1,
                    column,
                    message: format!("`{value}` is not a number"),
                })?;
                if !x.is_finite() {
                    return Err(Error::Parse {
                        line: l + 1,
                        column,
                        message: format!("`{value}` is not finite"),
                    });
                }
                out.push(x);
            }
            column += token.chars().count();
        }
    }
    Ok(out)
}
