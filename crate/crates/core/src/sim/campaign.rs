//! Declarative campaign files and result records.
//!
//! A campaign is a TOML document:
//!
//! ```toml
//! schema_version = 1
//!
//! [[run]]
//! name = "ebch36-pcout5"
//! scheme = "ebch36"
//! frame = "conventional"
//! constraint = "pc-out"
//! lambda = 5
//! stack = "append-bottom"
//! stack_capacity = 60000
//! stopping = "codeword"
//! ebn0_db = [2.5, 3.0]
//! max_trials = 2000000
//! seed = 1
//! ```

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{SimConfig, SimStats};
use crate::astar::{Constraint, DecoderConfig, StackPolicy, Stopping};
use crate::codes::Scheme;
use crate::error::{Error, Result};
use crate::mrip::FrameKind;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CampaignFile {
    schema_version: u32,
    #[serde(default)]
    run: Vec<RunEntry>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum StoppingKind {
    None,
    Codeword,
    Alpha,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunEntry {
    name: Option<String>,
    scheme: String,
    #[serde(default = "default_frame")]
    frame: FrameKind,
    #[serde(default = "default_constraint")]
    constraint: Constraint,
    #[serde(default)]
    lambda: usize,
    #[serde(default = "default_stack")]
    stack: StackPolicy,
    stack_capacity: Option<usize>,
    #[serde(default = "default_stopping")]
    stopping: StoppingKind,
    alpha: Option<f64>,
    d_min: Option<usize>,
    ebn0_db: Vec<f64>,
    #[serde(default = "default_max_trials")]
    max_trials: u64,
    #[serde(default = "default_max_block_errors")]
    max_block_errors: u64,
    #[serde(default)]
    seed: u64,
}

fn default_frame() -> FrameKind {
    FrameKind::Conventional
}
fn default_constraint() -> Constraint {
    Constraint::None
}
fn default_stack() -> StackPolicy {
    StackPolicy::Ordered
}
fn default_stopping() -> StoppingKind {
    StoppingKind::None
}
fn default_max_trials() -> u64 {
    100_000
}
fn default_max_block_errors() -> u64 {
    200
}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.chars().rev().take_while(|&c| c != '\n').count() + 1;
    (line, column)
}

/// Parses and validates a campaign file into one [`SimConfig`] per run.
pub fn parse_campaign(text: &str) -> Result<Vec<SimConfig>> {
    let file: CampaignFile = toml::from_str(text).map_err(|e| {
        let (line, column) = e
            .span()
            .map_or((0, 0), |span| line_column(text, span.start));
        Error::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::InvalidInput(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            file.schema_version
        )));
    }
    file.run
        .into_iter()
        .enumerate()
        .map(|(i, entry)| {
            entry
                .into_config()
                .map_err(|e| Error::InvalidInput(format!("run {}: {e}", i + 1)))
        })
        .collect()
}

impl RunEntry {
    fn into_config(self) -> Result<SimConfig> {
        let scheme: Scheme = self.scheme.parse()?;
        let stopping = match self.stopping {
            StoppingKind::None => Stopping::None,
            StoppingKind::Alpha => Stopping::AlphaThreshold {
                alpha: self
                    .alpha
                    .ok_or_else(|| Error::InvalidInput("alpha stopping needs `alpha`".into()))?,
            },
            StoppingKind::Codeword => Stopping::CodewordThreshold {
                d_min: self.d_min.or_else(|| scheme.known_min_distance()).ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "minimum distance of {scheme} unknown; set `d_min`"
                    ))
                })?,
            },
        };
        if self.alpha.is_some() && self.stopping != StoppingKind::Alpha {
            return Err(Error::InvalidInput("`alpha` given without alpha stopping".into()));
        }
        let k = scheme.generator()?.k();
        if self.lambda > k {
            return Err(Error::InvalidInput(format!("lambda {} exceeds k = {k}", self.lambda)));
        }
        let decoder = DecoderConfig {
            lambda: self.lambda,
            constraint: self.constraint,
            stack_policy: self.stack,
            stack_capacity: self.stack_capacity.unwrap_or(usize::MAX),
            stopping,
            pruning: true,
            trace: false,
        };
        let config = SimConfig {
            name: self.name.unwrap_or_else(|| scheme.to_string()),
            scheme,
            frame: self.frame,
            decoder,
            ebn0_points: self.ebn0_db,
            max_trials: self.max_trials,
            max_block_errors: self.max_block_errors,
            seed: self.seed,
        };
        config.validate()?;
        Ok(config)
    }
}

/// One output row: a run's settings and the statistics of one Eb/N0 point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub name: String,
    pub scheme: String,
    pub frame: FrameKind,
    pub constraint: Constraint,
    pub lambda: usize,
    pub stack: StackPolicy,
    pub stack_capacity: Option<usize>,
    pub stopping: String,
    pub seed: u64,
    pub ebn0_db: f64,
    pub trials: u64,
    pub block_errors: u64,
    pub bler: f64,
    pub ml_bound_errors: u64,
    pub ml_bound: f64,
    pub certified: u64,
    pub nodes_dropped: u64,
    pub edges_per_bit: f64,
    pub comparisons_per_bit: f64,
    pub operations_per_bit: f64,
}

fn stopping_label(s: &Stopping) -> String {
    match s {
        Stopping::None => "none".into(),
        Stopping::CodewordThreshold { d_min } => format!("codeword(d_min={d_min})"),
        Stopping::AlphaThreshold { alpha } => format!("alpha({alpha})"),
    }
}

impl ResultRecord {
    pub fn from_stats(stats: &SimStats) -> Vec<ResultRecord> {
        let c = &stats.config;
        stats
            .points
            .iter()
            .map(|p| ResultRecord {
                schema_version: SCHEMA_VERSION,
                name: c.name.clone(),
                scheme: c.scheme.to_string(),
                frame: c.frame,
                constraint: c.decoder.constraint,
                lambda: c.decoder.lambda,
                stack: c.decoder.stack_policy,
                stack_capacity: (c.decoder.stack_capacity != usize::MAX)
                    .then_some(c.decoder.stack_capacity),
                stopping: stopping_label(&c.decoder.stopping),
                seed: c.seed,
                ebn0_db: p.ebn0_db,
                trials: p.trials,
                block_errors: p.block_errors,
                bler: p.bler(),
                ml_bound_errors: p.ml_bound_errors,
                ml_bound: p.ml_bound(),
                certified: p.certified,
                nodes_dropped: p.nodes_dropped,
                edges_per_bit: p.edges_per_bit(stats.k),
                comparisons_per_bit: p.comparisons_per_bit(stats.k),
                operations_per_bit: p.operations_per_bit(stats.k),
            })
            .collect()
    }
}

/// One JSON object per line.
pub fn results_json_lines(records: &[ResultRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

const CSV_HEADER: &str = "name,scheme,frame,constraint,lambda,stack,stack_capacity,stopping,seed,\
ebn0_db,trials,block_errors,bler,ml_bound_errors,ml_bound,certified,nodes_dropped,\
edges_per_bit,comparisons_per_bit,operations_per_bit";

/// CSV with a schema comment line and a header row.
pub fn results_csv(records: &[ResultRecord]) -> String {
    let mut out = format!("# schema_version: {SCHEMA_VERSION}\n{CSV_HEADER}\n");
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{:e},{},{:e},{},{},{},{},{}",
            r.name,
            r.scheme,
            r.frame,
            r.constraint,
            r.lambda,
            r.stack,
            r.stack_capacity.map_or(String::new(), |c| c.to_string()),
            r.stopping,
            r.seed,
            r.ebn0_db,
            r.trials,
            r.block_errors,
            r.bler,
            r.ml_bound_errors,
            r.ml_bound,
            r.certified,
            r.nodes_dropped,
            r.edges_per_bit,
            r.comparisons_per_bit,
            r.operations_per_bit
        )
        .expect("writing to a string");
    }
    out
}
