//! Monte Carlo campaigns: random message, encode, AWGN, optional inner SISO,
//! MRIP frame, A* decoding, comparison with the transmitted codeword.
//!
//! Each Eb/N0 point gets its own seed derived from the campaign seed, and
//! trial `t` of a point always draws from stream `t` of that seed. Trials run
//! in fixed-size batches and the stop rule is checked between batches, so the
//! statistics do not depend on the number of workers.

mod campaign;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::astar::{astar_decode, DecodeResult, DecoderConfig, Stopping};
use crate::bits::Bits;
use crate::channel::{sub_seed, transmit_bits, trial_rng, ChannelParams};
use crate::codes::{GeneratorMatrix, Scheme};
use crate::error::{invalid, Error, Result};
use crate::mrip::{FrameBuilder, FrameKind};
use crate::siso::SisoDecoder;

pub use campaign::{parse_campaign, results_csv, results_json_lines, ResultRecord, SCHEMA_VERSION};

/// Trials per batch between stop-rule checks.
pub const BATCH_SIZE: u64 = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub name: String,
    pub scheme: Scheme,
    pub frame: FrameKind,
    pub decoder: DecoderConfig,
    pub ebn0_points: Vec<f64>,
    pub max_trials: u64,
    pub max_block_errors: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(scheme: Scheme, frame: FrameKind, decoder: DecoderConfig) -> Self {
        SimConfig {
            name: scheme.to_string(),
            scheme,
            frame,
            decoder,
            ebn0_points: Vec::new(),
            max_trials: 10_000,
            max_block_errors: 200,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_trials == 0 {
            return invalid("max_trials must be at least 1");
        }
        if self.max_block_errors == 0 {
            return invalid("max_block_errors must be at least 1");
        }
        if self.ebn0_points.iter().any(|x| x.is_nan() || *x == f64::NEG_INFINITY) {
            return invalid("Eb/N0 points must be numbers or +inf");
        }
        if self.frame == FrameKind::Improved && self.scheme.inner().is_none() {
            return invalid(format!(
                "scheme {} has no inner code for an improved frame",
                self.scheme
            ));
        }
        self.decoder.validate()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PointStats {
    pub ebn0_db: f64,
    pub trials: u64,
    pub block_errors: u64,
    /// Trials whose decoded codeword has a strictly smaller metric than the
    /// transmitted one.
    pub ml_bound_errors: u64,
    pub certified: u64,
    pub edges_visited: u64,
    pub comparisons: u64,
    pub nodes_dropped: u64,
    pub candidates: u64,
    pub max_stack: u64,
}

impl PointStats {
    pub fn bler(&self) -> f64 {
        ratio(self.block_errors, self.trials)
    }

    pub fn ml_bound(&self) -> f64 {
        ratio(self.ml_bound_errors, self.trials)
    }

    /// Mean visited edges per trial and message bit.
    pub fn edges_per_bit(&self, k: usize) -> f64 {
        self.edges_visited as f64 / (self.trials as f64 * k as f64)
    }

    pub fn comparisons_per_bit(&self, k: usize) -> f64 {
        self.comparisons as f64 / (self.trials as f64 * k as f64)
    }

    /// Real-number operations per message bit: edges plus comparisons.
    pub fn operations_per_bit(&self, k: usize) -> f64 {
        (self.edges_visited + self.comparisons) as f64 / (self.trials as f64 * k as f64)
    }

    fn add(&mut self, t: &TrialOutcome) {
        self.trials += 1;
        self.block_errors += t.block_error as u64;
        self.ml_bound_errors += t.ml_error as u64;
        self.certified += t.result.ml_certified as u64;
        self.edges_visited += t.result.edges_visited;
        self.comparisons += t.result.comparisons;
        self.nodes_dropped += t.result.nodes_dropped;
        self.candidates += t.result.candidates;
        self.max_stack = self.max_stack.max(t.result.max_stack as u64);
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimStats {
    pub config: SimConfig,
    pub k: usize,
    pub n: usize,
    pub points: Vec<PointStats>,
}

/// Shared immutable state of one campaign.
#[derive(Clone, Debug)]
pub struct TrialContext {
    pub g: GeneratorMatrix,
    pub builder: FrameBuilder,
    pub siso: Option<SisoDecoder>,
    pub decoder: DecoderConfig,
}

impl TrialContext {
    pub fn new(scheme: &Scheme, frame: FrameKind, decoder: DecoderConfig) -> Result<Self> {
        let g = scheme.generator()?;
        let siso = match frame {
            FrameKind::Conventional => None,
            FrameKind::Improved => Some(SisoDecoder::new(Some(scheme.inner().ok_or_else(
                || Error::InvalidInput(format!("scheme {scheme} has no inner code")),
            )?))),
        };
        Ok(TrialContext {
            builder: FrameBuilder::new(g.clone()),
            g,
            siso,
            decoder,
        })
    }

    pub fn rate(&self) -> f64 {
        self.g.k() as f64 / self.g.n() as f64
    }
}

#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub transmitted: Bits,
    pub received: Vec<f64>,
    pub result: DecodeResult,
    pub block_error: bool,
    pub ml_error: bool,
}

/// Correlation discrepancy of `word` against the hard decision of `r`, in
/// original position order.
pub fn received_metric(r: &[f64], word: &Bits) -> f64 {
    r.iter()
        .enumerate()
        .filter(|(j, x)| word.get(*j) != (**x < 0.0))
        .map(|(_, x)| x.abs())
        .sum()
}

/// Runs trial `trial` of the point with seed `point_seed`.
pub fn run_trial(
    ctx: &TrialContext,
    params: &ChannelParams,
    point_seed: u64,
    trial: u64,
) -> Result<TrialOutcome> {
    let (k, n) = (ctx.g.k(), ctx.g.n());
    let mut rng = trial_rng(point_seed, trial);
    let msg = rng.random::<u128>() & mask(k);
    let cw = ctx.g.encode_packed(msg);
    let r = transmit_bits(&cw, n, params, &mut rng);
    let reliability = match &ctx.siso {
        Some(siso) if !params.is_noiseless() => siso.llr(&r, params.sigma_sq)?,
        _ => r.clone(),
    };
    let frame = ctx.builder.build(&reliability, &r)?;
    let result = astar_decode(&frame, &ctx.decoder)?;
    let block_error = result.codeword != cw;
    let ml_error = block_error && received_metric(&r, &result.codeword) < received_metric(&r, &cw);
    Ok(TrialOutcome {
        transmitted: cw,
        received: r,
        result,
        block_error,
        ml_error,
    })
}

fn mask(k: usize) -> u128 {
    if k >= 128 {
        u128::MAX
    } else {
        (1u128 << k) - 1
    }
}

/// Seed of the `index`-th Eb/N0 point of a campaign.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    sub_seed(seed, index as u64)
}

/// Runs every Eb/N0 point of `config`.
pub fn run_campaign(config: &SimConfig) -> Result<SimStats> {
    run_campaign_with_progress(config, |_, _| {})
}

/// [`run_campaign`] with a callback after each batch, receiving the point
/// index and the statistics so far.
pub fn run_campaign_with_progress(
    config: &SimConfig,
    mut progress: impl FnMut(usize, &PointStats),
) -> Result<SimStats> {
    config.validate()?;
    let ctx = TrialContext::new(&config.scheme, config.frame, config.decoder)?;
    let mut points = Vec::with_capacity(config.ebn0_points.len());
    for (index, &ebn0) in config.ebn0_points.iter().enumerate() {
        let seed = point_seed(config.seed, index);
        let params = ChannelParams::from_ebn0(ebn0, ctx.rate(), seed)?;
        let mut stats = PointStats {
            ebn0_db: ebn0,
            ..PointStats::default()
        };
        while stats.trials < config.max_trials && stats.block_errors < config.max_block_errors {
            let start = stats.trials;
            let end = (start + BATCH_SIZE).min(config.max_trials);
            let outcomes: Vec<TrialOutcome> = (start..end)
                .into_par_iter()
                .map(|t| run_trial(&ctx, &params, seed, t))
                .collect::<Result<_>>()?;
            for o in &outcomes {
                stats.add(o);
            }
            progress(index, &stats);
        }
        points.push(stats);
    }
    Ok(SimStats {
        config: config.clone(),
        k: ctx.g.k(),
        n: ctx.g.n(),
        points,
    })
}

/// Runs `f` on a pool of `workers` threads (all cores when `None`).
pub fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        None => Ok(f()),
        Some(0) => invalid("worker count must be at least 1"),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// The same campaign with the append-bottom stack (capacity
/// `modified_capacity`) and the ordered stack (`ordered_capacity`), on
/// identical seeds. Returns `(modified, ordered)`.
pub fn compare_stacks(
    config: &SimConfig,
    modified_capacity: usize,
    ordered_capacity: usize,
) -> Result<(SimStats, SimStats)> {
    use crate::astar::StackPolicy;
    let mut modified = config.clone();
    modified.decoder.stack_policy = StackPolicy::AppendBottom;
    modified.decoder.stack_capacity = modified_capacity;
    let mut ordered = config.clone();
    ordered.decoder.stack_policy = StackPolicy::Ordered;
    ordered.decoder.stack_capacity = ordered_capacity;
    Ok((run_campaign(&modified)?, run_campaign(&ordered)?))
}

/// Codeword stopping threshold for a scheme, if its minimum distance is known.
pub fn codeword_stopping(scheme: &Scheme) -> Option<Stopping> {
    scheme
        .known_min_distance()
        .map(|d_min| Stopping::CodewordThreshold { d_min })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::astar::{Constraint, StackPolicy};
    use crate::codes::{InnerCodeKind, MembershipTest};

    fn small(frame: FrameKind) -> SimConfig {
        let mut c = SimConfig::new(
            Scheme::block(InnerCodeKind::Block16_8).unwrap(),
            frame,
            DecoderConfig::default(),
        );
        c.ebn0_points = vec![1.0, 3.0];
        c.max_trials = 3000;
        c.max_block_errors = 50;
        c.seed = 7;
        c
    }

    #[test]
    fn noiseless_has_no_errors() {
        let mut c = small(FrameKind::Improved);
        c.ebn0_points = vec![f64::INFINITY];
        c.max_trials = 500;
        let s = run_campaign(&c).unwrap();
        assert_eq!(s.points[0].trials, 500);
        assert_eq!(s.points[0].block_errors, 0);
        assert_eq!(s.points[0].ml_bound_errors, 0);
    }

    #[test]
    fn stop_rule_and_counters() {
        let c = small(FrameKind::Conventional);
        let s = run_campaign(&c).unwrap();
        for p in &s.points {
            assert!(p.block_errors >= 50 || p.trials == 3000);
            assert!(p.trials % BATCH_SIZE == 0 || p.trials == 3000);
            assert!(p.ml_bound_errors <= p.block_errors);
            assert!(p.edges_visited >= p.trials * 8);
            assert!((0.0..=1.0).contains(&p.bler()));
            let ops = p.operations_per_bit(8);
            assert!((ops - p.edges_per_bit(8) - p.comparisons_per_bit(8)).abs() < 1e-12);
        }
        assert!(s.points[0].bler() > s.points[1].bler());
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let c = small(FrameKind::Improved);
        let a = with_workers(Some(1), || run_campaign(&c)).unwrap().unwrap();
        let b = with_workers(Some(3), || run_campaign(&c)).unwrap().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unconstrained_decoder_counts_only_ml_errors() {
        // with an exact ML decoder every block error is an ML error
        let c = small(FrameKind::Conventional);
        let s = run_campaign(&c).unwrap();
        for p in &s.points {
            assert_eq!(p.ml_bound_errors, p.block_errors);
        }
    }

    #[test]
    fn decoded_words_are_codewords() {
        let mut c = small(FrameKind::Improved);
        c.decoder = DecoderConfig {
            lambda: 1,
            constraint: Constraint::PcOut,
            stack_policy: StackPolicy::AppendBottom,
            ..DecoderConfig::default()
        };
        let ctx = TrialContext::new(&c.scheme, c.frame, c.decoder).unwrap();
        let membership = MembershipTest::new(&ctx.g);
        let params = ChannelParams::from_ebn0(1.0, 0.5, 3).unwrap();
        for t in 0..300 {
            let o = run_trial(&ctx, &params, 3, t).unwrap();
            assert!(membership.contains(&o.result.codeword));
            assert!(membership.contains(&o.transmitted));
        }
    }

    #[test]
    fn invalid_configs() {
        let mut c = small(FrameKind::Conventional);
        c.max_trials = 0;
        assert!(run_campaign(&c).is_err());
        let c = SimConfig::new(Scheme::ebch(36), FrameKind::Improved, DecoderConfig::default());
        assert!(c.validate().is_err());
        assert!(with_workers(Some(0), || ()).is_err());
    }
}
