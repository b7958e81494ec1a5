//! Order statistics of Gaussian LLRs.
//!
//! Under the consistent-Gaussian model an LLR is `N(mu, 2 mu)`. Sorting `n`
//! independent samples in decreasing order, the `i`-th one (0-based, `i = 0`
//! the largest) has density
//! `n C(n-1, i) F(l)^(n-1-i) (1 - F(l))^i f(l)`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::channel::{transmit, trial_rng, ChannelParams};
use crate::codes::InnerCodeKind;
use crate::error::{invalid, Error, Result};
use crate::siso::{estimate_llr_moments, SisoDecoder};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LlrModel {
    pub mu: f64,
    pub sigma_sq: f64,
    pub n: usize,
}

impl LlrModel {
    /// Model with mean `mu` and variance `2 mu`.
    pub fn new(mu: f64, n: usize) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return invalid(format!("LLR mean {mu} must be positive"));
        }
        if n == 0 {
            return invalid("sample count of 0");
        }
        Ok(LlrModel {
            mu,
            sigma_sq: 2.0 * mu,
            n,
        })
    }

    /// Model matching an observed LLR variance.
    pub fn from_variance(sigma_sq: f64, n: usize) -> Result<Self> {
        Self::new(sigma_sq / 2.0, n)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma_sq.sqrt()
    }

    pub fn pdf(&self, l: f64) -> f64 {
        let z = (l - self.mu) / self.sigma();
        (-0.5 * z * z).exp() / (self.sigma() * (2.0 * std::f64::consts::PI).sqrt())
    }

    pub fn cdf(&self, l: f64) -> f64 {
        0.5 * erfc(-(l - self.mu) / (self.sigma() * std::f64::consts::SQRT_2))
    }

    /// `1 - cdf`, accurate in the upper tail.
    fn sf(&self, l: f64) -> f64 {
        0.5 * erfc((l - self.mu) / (self.sigma() * std::f64::consts::SQRT_2))
    }
}

fn check_rank(i: usize, model: &LlrModel) -> Result<()> {
    if i >= model.n {
        return invalid(format!("rank {i} out of range for n = {}", model.n));
    }
    Ok(())
}

/// Density of the `i`-th largest of `n` samples, evaluated in log domain.
pub fn ordered_pdf(i: usize, l: f64, model: &LlrModel) -> Result<f64> {
    check_rank(i, model)?;
    Ok(ordered_pdf_unchecked(i, l, model, ln_factor(i, model.n)))
}

/// `ln(n C(n-1, i))`.
fn ln_factor(i: usize, n: usize) -> f64 {
    (n as f64).ln() + ln_gamma(n as f64) - ln_gamma((n - i) as f64) - ln_gamma(i as f64 + 1.0)
}

fn ordered_pdf_unchecked(i: usize, l: f64, model: &LlrModel, ln_c: f64) -> f64 {
    let f = model.pdf(l);
    if f == 0.0 {
        return 0.0;
    }
    let above = model.n - 1 - i;
    let mut log = ln_c + f.ln();
    if above > 0 {
        let cdf = model.cdf(l);
        if cdf == 0.0 {
            return 0.0;
        }
        log += above as f64 * cdf.ln();
    }
    if i > 0 {
        let sf = model.sf(l);
        if sf == 0.0 {
            return 0.0;
        }
        log += i as f64 * sf.ln();
    }
    log.exp()
}

/// `P(L'_i <= l)`, by quadrature of the density from the lower window edge.
pub fn ordered_cdf(i: usize, l: f64, model: &LlrModel) -> Result<f64> {
    check_rank(i, model)?;
    let (lo, hi) = window(model);
    if l <= lo {
        return Ok(0.0);
    }
    let ln_c = ln_factor(i, model.n);
    let mass = integrate_adaptive(
        |x| ordered_pdf_unchecked(i, x, model, ln_c),
        lo,
        l.min(hi),
        1e-9,
    )?;
    Ok(mass.clamp(0.0, 1.0))
}

fn window(model: &LlrModel) -> (f64, f64) {
    let s = model.sigma();
    (model.mu - 12.0 * s, model.mu + 12.0 * s)
}

/// `E[L'_i]` by adaptive quadrature over `mu +- 12 sigma`, relative
/// tolerance 1e-6.
pub fn ordered_mean(i: usize, model: &LlrModel) -> Result<f64> {
    check_rank(i, model)?;
    let (lo, hi) = window(model);
    let ln_c = ln_factor(i, model.n);
    integrate_adaptive(|x| x * ordered_pdf_unchecked(i, x, model, ln_c), lo, hi, 1e-6)
}

/// Total probability mass of the rank-`i` density over the same window.
pub fn ordered_mass(i: usize, model: &LlrModel) -> Result<f64> {
    check_rank(i, model)?;
    let (lo, hi) = window(model);
    let ln_c = ln_factor(i, model.n);
    integrate_adaptive(|x| ordered_pdf_unchecked(i, x, model, ln_c), lo, hi, 1e-9)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod estimate and its difference from the embedded 7-point
/// Gauss rule.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Globally adaptive Gauss-Kronrod integration: the interval with the
/// largest error estimate is bisected until the total estimate drops below
/// `rel_tol * |I|` (with a tiny absolute floor).
pub fn integrate_adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return invalid(format!("bad integration range [{a}, {b}]"));
    }
    const MAX_INTERVALS: usize = 4000;
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let error: f64 = parts.iter().map(|p| p.3).sum();
        if error <= (rel_tol * total.abs()).max(1e-300) {
            return Ok(total);
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::Numeric(format!(
                "quadrature did not converge (estimate {total}, error {error})"
            )));
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(idx, _)| idx)
            .expect("non-empty");
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Name of an LLR source: `uncoded` or an inner code name.
pub fn source_name(kind: Option<InnerCodeKind>) -> &'static str {
    kind.map_or("uncoded", |k| k.name())
}

pub fn parse_source(s: &str) -> Result<Option<InnerCodeKind>> {
    if s == "uncoded" {
        return Ok(None);
    }
    s.parse().map(Some)
}

/// Ordered LLR means of one source, from the model and from simulation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LlrCurve {
    pub kind: String,
    pub llr_mean: f64,
    pub llr_variance: f64,
    /// Model means, `mu` taken as half the simulated variance.
    pub model: Vec<f64>,
    pub monte_carlo: Vec<f64>,
}

/// Sample means of the decreasingly sorted LLRs of a length-`n` all-zero
/// codeword.
pub fn monte_carlo_ordered_means(
    kind: Option<InnerCodeKind>,
    es_n0_db: f64,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    if trials == 0 {
        return invalid("at least one trial is required");
    }
    let params = ChannelParams::from_esn0(es_n0_db, seed)?;
    let decoder = SisoDecoder::new(kind);
    let zeros = vec![0u8; n];
    let chunk = 1024u64;
    let partial: Vec<Vec<f64>> = (0..trials.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut sums = vec![0.0; n];
            for t in c * chunk..((c + 1) * chunk).min(trials) {
                let r = transmit(&zeros, &params, &mut trial_rng(seed, t));
                let mut l = decoder.llr(&r, params.sigma_sq)?;
                l.sort_by(|a, b| b.total_cmp(a));
                for (s, x) in sums.iter_mut().zip(&l) {
                    *s += x;
                }
            }
            Ok(sums)
        })
        .collect::<Result<_>>()?;
    let mut sums = vec![0.0; n];
    for p in &partial {
        for (s, x) in sums.iter_mut().zip(p) {
            *s += x;
        }
    }
    Ok(sums.into_iter().map(|s| s / trials as f64).collect())
}

/// Model and simulated ordered-mean curves for each LLR source.
pub fn predicted_curves(
    kinds: &[Option<InnerCodeKind>],
    es_n0_db: f64,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<Vec<LlrCurve>> {
    kinds
        .iter()
        .map(|&kind| {
            let (mean, variance) = estimate_llr_moments(kind, es_n0_db, n, trials, seed)?;
            let model = LlrModel::from_variance(variance, n)?;
            let means = (0..n)
                .into_par_iter()
                .map(|i| ordered_mean(i, &model))
                .collect::<Result<Vec<f64>>>()?;
            Ok(LlrCurve {
                kind: source_name(kind).to_string(),
                llr_mean: mean,
                llr_variance: variance,
                model: means,
                monte_carlo: monte_carlo_ordered_means(kind, es_n0_db, n, trials, seed)?,
            })
        })
        .collect()
}

/// CSV with one row per (source, rank).
pub fn curves_csv(curves: &[LlrCurve], es_n0_db: f64) -> String {
    let mut out = String::from("# schema_version: 1\n");
    out.push_str("kind,es_n0_db,i,llr_mean,llr_variance,mean_model,mean_monte_carlo\n");
    for c in curves {
        for (i, (m, mc)) in c.model.iter().zip(&c.monte_carlo).enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                c.kind, es_n0_db, i, c.llr_mean, c.llr_variance, m, mc
            )
            .expect("writing to a string");
        }
    }
    out
}
