//! Most reliable independent positions (MRIP) frames.
//!
//! Positions are sorted by decreasing reliability magnitude; the first `k`
//! positions whose generator columns are linearly independent are moved to
//! the front and the generator matrix is reduced to systematic form on them.
//! The conventional frame takes reliabilities from the received samples, the
//! improved frame from the LLRs of an inner SISO decoder.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::bits::Bits;
use crate::channel::{hard_decision, transmit, trial_rng, ChannelParams};
use crate::codes::{GeneratorMatrix, Scheme};
use crate::error::{invalid, Error, Result};
use crate::siso::SisoDecoder;

/// Where the ordering reliabilities come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameKind {
    /// Magnitudes of the received samples.
    Conventional,
    /// Magnitudes of the inner-code SISO LLRs.
    Improved,
}

impl fmt::Display for FrameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameKind::Conventional => "conventional",
            FrameKind::Improved => "improved",
        })
    }
}

impl FromStr for FrameKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conventional" => Ok(FrameKind::Conventional),
            "improved" => Ok(FrameKind::Improved),
            _ => invalid(format!("unknown frame kind `{s}`")),
        }
    }
}

/// A permuted, systematic view of the code for one received vector.
#[derive(Clone, Debug)]
pub struct MripFrame {
    /// `perm[j]` is the original position placed at frame position `j`.
    pub perm: Vec<usize>,
    /// Systematic generator in frame order; the first `k` columns are `I_k`.
    pub g_sys: GeneratorMatrix,
    /// Received samples in frame order.
    pub r_perm: Vec<f64>,
    /// Reliability magnitudes in frame order.
    pub rel_perm: Vec<f64>,
    /// Hard decision of the reliability source in frame order.
    pub z: Bits,
}

impl MripFrame {
    pub fn k(&self) -> usize {
        self.g_sys.k()
    }

    pub fn n(&self) -> usize {
        self.g_sys.n()
    }

    /// Maps a frame-order word back to original positions.
    pub fn unpermute(&self, word: &Bits) -> Bits {
        let mut out = Bits::zero();
        for j in word.ones() {
            out.set(self.perm[j]);
        }
        out
    }

    /// Maps an original-order word into frame order.
    pub fn permute(&self, word: &Bits) -> Bits {
        let mut out = Bits::zero();
        for (j, &p) in self.perm.iter().enumerate() {
            if word.get(p) {
                out.set(j);
            }
        }
        out
    }
}

/// Per-code precomputation for fast frame construction.
#[derive(Clone, Debug)]
pub struct FrameBuilder {
    g: GeneratorMatrix,
    columns: Vec<u128>,
}

impl FrameBuilder {
    pub fn new(g: GeneratorMatrix) -> Self {
        let columns = (0..g.n()).map(|j| g.column(j)).collect();
        FrameBuilder { g, columns }
    }

    pub fn generator(&self) -> &GeneratorMatrix {
        &self.g
    }

    /// Position order: the MRIP in decreasing reliability, then the remaining
    /// positions in decreasing reliability. Ties keep the lower index first.
    pub fn order(&self, reliability: &[f64]) -> Result<Vec<usize>> {
        let n = self.g.n();
        let k = self.g.k();
        if reliability.len() != n {
            return invalid(format!(
                "{} reliabilities for a length-{n} code",
                reliability.len()
            ));
        }
        if reliability.iter().any(|x| !x.is_finite()) {
            return invalid("non-finite reliability value");
        }
        let mut sorted: Vec<usize> = (0..n).collect();
        sorted.sort_by(|&a, &b| reliability[b].abs().total_cmp(&reliability[a].abs()));

        // greedy independent-column selection with an XOR basis keyed by the
        // highest set bit
        let mut basis = [0u128; 128];
        let mut selected = Vec::with_capacity(k);
        let mut rest = Vec::with_capacity(n - k);
        for &j in &sorted {
            if selected.len() == k {
                rest.push(j);
                continue;
            }
            let mut v = self.columns[j];
            while v != 0 {
                let top = 127 - v.leading_zeros() as usize;
                if basis[top] == 0 {
                    basis[top] = v;
                    break;
                }
                v ^= basis[top];
            }
            if v != 0 {
                selected.push(j);
            } else {
                rest.push(j);
            }
        }
        if selected.len() < k {
            return Err(Error::RankDeficient {
                expected: k,
                found: selected.len(),
            });
        }
        selected.extend(rest);
        Ok(selected)
    }

    /// Builds the frame from a reliability source (`r` itself for the
    /// conventional frame, SISO LLRs for the improved one).
    pub fn build(&self, reliability: &[f64], r: &[f64]) -> Result<MripFrame> {
        let n = self.g.n();
        let k = self.g.k();
        if r.len() != n {
            return invalid(format!("{} samples for a length-{n} code", r.len()));
        }
        let perm = self.order(reliability)?;

        let mut rows: Vec<Bits> = self.g.rows().to_vec();
        for (i, &col) in perm[..k].iter().enumerate() {
            let pivot = (i..k)
                .find(|&p| rows[p].get(col))
                .expect("selected columns are independent");
            rows.swap(i, pivot);
            let pr = rows[i];
            for (t, row) in rows.iter_mut().enumerate() {
                if t != i && row.get(col) {
                    row.xor_assign(&pr);
                }
            }
        }
        let mut position = vec![0usize; n];
        for (j, &p) in perm.iter().enumerate() {
            position[p] = j;
        }
        let sys_rows = rows
            .iter()
            .map(|row| {
                let mut out = Bits::zero();
                for p in row.ones() {
                    out.set(position[p]);
                }
                out
            })
            .collect();
        let g_sys = GeneratorMatrix::new_unchecked(n, sys_rows)?;

        let r_perm: Vec<f64> = perm.iter().map(|&p| r[p]).collect();
        let rel_src: Vec<f64> = perm.iter().map(|&p| reliability[p]).collect();
        let z = hard_decision(&rel_src);
        Ok(MripFrame {
            perm,
            g_sys,
            r_perm,
            rel_perm: rel_src.iter().map(|x| x.abs()).collect(),
            z,
        })
    }
}

/// One-shot frame construction.
pub fn build_frame(reliability: &[f64], r: &[f64], g: &GeneratorMatrix) -> Result<MripFrame> {
    FrameBuilder::new(g.clone()).build(reliability, r)
}

/// Histogram of hard-decision errors among the `k` MRIP bits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MripStats {
    pub trials: u64,
    /// `histogram[j]` counts trials with exactly `j` MRIP errors, `j = 0..=k`.
    pub histogram: Vec<u64>,
}

impl MripStats {
    pub fn new(k: usize) -> Self {
        MripStats {
            trials: 0,
            histogram: vec![0; k + 1],
        }
    }

    pub fn merge(mut self, other: &MripStats) -> Self {
        self.trials += other.trials;
        for (a, b) in self.histogram.iter_mut().zip(&other.histogram) {
            *a += b;
        }
        self
    }

    /// Estimated `P(j | MRIP)`.
    pub fn probability(&self, j: usize) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.histogram.get(j).copied().unwrap_or(0) as f64 / self.trials as f64
    }

    /// `P(errors > lambda) = 1 - sum_{j=0}^{lambda} P(j | MRIP)`, from counts.
    pub fn ccdf(&self, lambda: usize) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        let above: u64 = self.histogram.iter().skip(lambda + 1).sum();
        above as f64 / self.trials as f64
    }
}

/// Monte Carlo estimate of the MRIP error distribution. The all-zero
/// codeword is transmitted (the code and channel are symmetric).
pub fn mrip_error_stats(
    scheme: &Scheme,
    frame: FrameKind,
    ebn0_db: f64,
    trials: u64,
    seed: u64,
) -> Result<MripStats> {
    let g = scheme.generator()?;
    let (k, n) = (g.k(), g.n());
    let decoder = match (frame, scheme.inner()) {
        (FrameKind::Conventional, _) => SisoDecoder::Uncoded,
        (FrameKind::Improved, Some(inner)) => SisoDecoder::new(Some(inner)),
        (FrameKind::Improved, None) => {
            return invalid(format!("scheme {scheme} has no inner code for an improved frame"))
        }
    };
    let params = ChannelParams::from_ebn0(ebn0_db, k as f64 / n as f64, seed)?;
    let builder = FrameBuilder::new(g);
    let zeros = vec![0u8; n];
    let chunk = 4096u64;
    let chunks = trials.div_ceil(chunk);
    let stats = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut local = MripStats::new(k);
            for t in c * chunk..((c + 1) * chunk).min(trials) {
                let r = transmit(&zeros, &params, &mut trial_rng(seed, t));
                let errors = if params.is_noiseless() {
                    0
                } else {
                    let rel = match &decoder {
                        SisoDecoder::Uncoded => r.clone(),
                        d => d.llr(&r, params.sigma_sq).expect("valid lengths"),
                    };
                    let order = builder.order(&rel).expect("full-rank code");
                    order[..k].iter().filter(|&&p| rel[p] < 0.0).count()
                };
                local.histogram[errors] += 1;
                local.trials += 1;
            }
            local
        })
        .reduce(|| MripStats::new(k), |a, b| a.merge(&b));
    Ok(stats)
}

/// Bit error probability of an MRIP position whose ordered LLR has mean
/// `mean` under the consistent-Gaussian model: `erfc(sqrt(mean) / 2) / 2`.
pub fn estimate_mrip_bit_error(mean: f64) -> Result<f64> {
    if !(mean > 0.0) {
        return invalid(format!("ordered LLR mean {mean} must be positive"));
    }
    Ok(0.5 * erfc(mean.sqrt() / 2.0))
}
