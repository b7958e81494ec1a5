//! A* priority-first search over the MRIP code tree.
//!
//! The tree has one level per message bit of the systematic frame generator.
//! A node stores which of its message bits deviate from the frame hard
//! decision `z`; a depth-`k` node (goal) is a full codeword obtained by
//! re-encoding. Path metrics are correlation discrepancies against the hard
//! decision of the received samples, so minimizing them is maximum-likelihood
//! decoding. With the conventional frame both hard decisions coincide.
//!
//! Two stack disciplines are provided. [`StackPolicy::Ordered`] keeps the
//! stack sorted by metric and inserts with a binary search.
//! [`StackPolicy::AppendBottom`] puts the `z`-agreeing child on top and
//! appends the other child at the bottom, which visits goals layer by layer
//! in their number of deviations from `z` without any ordering work.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::channel::hard_decision;
use crate::error::{invalid, Error, Result};
use crate::mrip::MripFrame;

/// Path constraint on the number of deviations from `z` among message bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    None,
    /// Nodes with more than `lambda` deviations are deleted.
    Pc,
    /// Nodes reaching `lambda` deviations are completed with `z` directly.
    PcOut,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StackPolicy {
    Ordered,
    AppendBottom,
}

/// Early-termination rule applied whenever a better codeword is found.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Stopping {
    None,
    /// Sufficient ML condition; needs the code's minimum distance (a lower
    /// bound keeps it sound).
    CodewordThreshold { d_min: usize },
    /// `alpha * sum |r|`, codeword independent.
    AlphaThreshold { alpha: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecoderConfig {
    pub lambda: usize,
    pub constraint: Constraint,
    pub stack_policy: StackPolicy,
    /// Maximum number of stored nodes; `usize::MAX` for no limit.
    pub stack_capacity: usize,
    pub stopping: Stopping,
    /// Delete nodes whose metric cannot beat the best goal so far.
    pub pruning: bool,
    /// Record the deviation count of every goal in search order.
    pub trace: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            lambda: 0,
            constraint: Constraint::None,
            stack_policy: StackPolicy::Ordered,
            stack_capacity: usize::MAX,
            stopping: Stopping::None,
            pruning: true,
            trace: false,
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.stack_capacity < 2 {
            return invalid(format!("stack capacity {} below 2", self.stack_capacity));
        }
        match self.stopping {
            Stopping::AlphaThreshold { alpha } if !(0.0..1.0).contains(&alpha) => {
                invalid(format!("alpha {alpha} outside [0, 1)"))
            }
            Stopping::CodewordThreshold { d_min: 0 } => invalid("d_min of 0"),
            _ => Ok(()),
        }
    }
}

/// One goal node as visited by the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalRecord {
    pub deviations: u8,
    /// The last message bit differs from `z`.
    pub last_bit_flipped: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    /// Decoded codeword in original position order.
    pub codeword: Bits,
    /// Correlation discrepancy of the decoded codeword.
    pub metric: f64,
    /// A stopping criterion fired.
    pub ml_certified: bool,
    pub edges_visited: u64,
    pub comparisons: u64,
    pub nodes_dropped: u64,
    /// Goal nodes (complete codewords) evaluated.
    pub candidates: u64,
    pub max_stack: usize,
    pub goal_sequence: Vec<GoalRecord>,
}

/// JSON-friendly view of a [`DecodeResult`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeTrace {
    pub codeword: String,
    pub metric: f64,
    pub ml_certified: bool,
    pub edges_visited: u64,
    pub comparisons: u64,
    pub nodes_dropped: u64,
    pub candidates: u64,
    pub max_stack: usize,
    pub goal_sequence: Vec<GoalRecord>,
}

impl DecodeResult {
    pub fn trace(&self, n: usize) -> DecodeTrace {
        DecodeTrace {
            codeword: (0..n)
                .map(|j| if self.codeword.get(j) { '1' } else { '0' })
                .collect(),
            metric: self.metric,
            ml_certified: self.ml_certified,
            edges_visited: self.edges_visited,
            comparisons: self.comparisons,
            nodes_dropped: self.nodes_dropped,
            candidates: self.candidates,
            max_stack: self.max_stack,
            goal_sequence: self.goal_sequence.clone(),
        }
    }
}

/// `sum_j |r_j| [c_j != z_j]`.
pub fn correlation_discrepancy(r_hat: &[f64], c_hat: &[u8], z_hat: &[u8]) -> Result<f64> {
    if r_hat.len() != c_hat.len() || r_hat.len() != z_hat.len() {
        return invalid("vectors of unequal length");
    }
    Ok(r_hat
        .iter()
        .zip(c_hat.iter().zip(z_hat))
        .filter(|(_, (c, z))| c != z)
        .map(|(r, _)| r.abs())
        .sum())
}

/// Sufficient ML threshold for candidate `c`: with `q = d_min - d_H(c, z)`,
/// the sum of the `q` smallest `|r_j|` over positions where `c` agrees with
/// `z`, or 0 when `q <= 0`.
pub fn ml_threshold_codeword(r_hat: &[f64], c_hat: &[u8], z_hat: &[u8], d_min: usize) -> f64 {
    let diff = Bits::from_bits(c_hat).xor(&Bits::from_bits(z_hat));
    let abs_r: Vec<f64> = r_hat.iter().map(|x| x.abs()).collect();
    threshold_codeword(&diff, &abs_r, d_min)
}

fn threshold_codeword(diff: &Bits, abs_r: &[f64], d_min: usize) -> f64 {
    let distance = diff.count_ones() as usize;
    if distance >= d_min {
        return 0.0;
    }
    let q = d_min - distance;
    let mut agree: Vec<f64> = (0..abs_r.len())
        .filter(|&j| !diff.get(j))
        .map(|j| abs_r[j])
        .collect();
    if q >= agree.len() {
        return agree.iter().sum();
    }
    agree.select_nth_unstable_by(q - 1, f64::total_cmp);
    agree[..q].iter().sum()
}

/// `alpha * sum_j |r_j|`.
pub fn ml_threshold_alpha(r_hat: &[f64], alpha: f64) -> f64 {
    alpha * r_hat.iter().map(|x| x.abs()).sum::<f64>()
}

#[derive(Clone, Copy, Debug)]
struct Node {
    /// Message positions (within the prefix) that deviate from `z`.
    flips: u128,
    metric: f64,
    depth: u8,
    deviations: u8,
}

/// Per-frame quantities shared by the search and the OSD reference.
struct Search<'a> {
    frame: &'a MripFrame,
    config: DecoderConfig,
    k: usize,
    abs_r: Vec<f64>,
    /// Metric increment when message bit `l` follows `z`.
    cost_keep: Vec<f64>,
    /// Metric increment when message bit `l` deviates from `z`.
    cost_flip: Vec<f64>,
    /// `(z_msg * G_sys) xor y`, where `y` is the hard decision of `r`.
    base_diff: Bits,
    y: Bits,
    alpha_threshold: f64,

    best: Option<(Bits, f64)>,
    certified: bool,
    edges: u64,
    comparisons: u64,
    dropped: u64,
    candidates: u64,
    max_stack: usize,
    goals: Vec<GoalRecord>,
}

impl<'a> Search<'a> {
    fn new(frame: &'a MripFrame, config: DecoderConfig) -> Result<Self> {
        config.validate()?;
        let k = frame.k();
        let n = frame.n();
        if k == 0 || n == 0 {
            return invalid("empty code");
        }
        if frame.r_perm.len() != n {
            return invalid("frame vectors do not match the code length");
        }
        let abs_r: Vec<f64> = frame.r_perm.iter().map(|x| x.abs()).collect();
        let y = hard_decision(&frame.r_perm);
        let mut z_msg: u128 = 0;
        for j in 0..k {
            if frame.z.get(j) {
                z_msg |= 1 << j;
            }
        }
        let base_diff = frame.g_sys.encode_packed(z_msg).xor(&y);
        let mut cost_keep = vec![0.0; k];
        let mut cost_flip = vec![0.0; k];
        for l in 0..k {
            if frame.z.get(l) == y.get(l) {
                cost_flip[l] = abs_r[l];
            } else {
                cost_keep[l] = abs_r[l];
            }
        }
        let alpha_threshold = match config.stopping {
            Stopping::AlphaThreshold { alpha } => alpha * abs_r.iter().sum::<f64>(),
            _ => 0.0,
        };
        Ok(Search {
            frame,
            config,
            k,
            abs_r,
            cost_keep,
            cost_flip,
            base_diff,
            y,
            alpha_threshold,
            best: None,
            certified: false,
            edges: 0,
            comparisons: 0,
            dropped: 0,
            candidates: 0,
            max_stack: 0,
            goals: Vec::new(),
        })
    }

    #[inline]
    fn m_best(&self) -> f64 {
        self.best.map_or(f64::INFINITY, |b| b.1)
    }

    /// `metric < M_best`, counted as one comparison once a goal exists.
    #[inline]
    fn beats_best(&mut self, metric: f64) -> bool {
        if !self.config.pruning {
            return true;
        }
        match self.best {
            None => true,
            Some((_, m)) => {
                self.comparisons += 1;
                metric < m
            }
        }
    }

    /// Difference between the codeword with message `z xor flips` and `y`.
    #[inline]
    fn goal_diff(&self, flips: u128) -> Bits {
        let mut diff = self.base_diff;
        let mut f = flips;
        while f != 0 {
            let i = f.trailing_zeros() as usize;
            f &= f - 1;
            diff.xor_assign(self.frame.g_sys.row(i));
        }
        diff
    }

    /// Evaluates a goal; returns true when the search must stop.
    fn visit_goal(&mut self, flips: u128, deviations: usize) -> bool {
        self.candidates += 1;
        if self.config.trace {
            self.goals.push(GoalRecord {
                deviations: deviations as u8,
                last_bit_flipped: flips >> (self.k - 1) & 1 == 1,
            });
        }
        let diff = self.goal_diff(flips);
        let bound = self.m_best();
        if self.best.is_some() {
            self.comparisons += 1;
        }
        // the partial sums are non-decreasing, so stopping once one reaches
        // M_best rejects exactly the goals the full sum would reject
        let mut metric = 0.0;
        for j in diff.ones() {
            metric += self.abs_r[j];
            if metric >= bound {
                return false;
            }
        }
        self.best = Some((diff, metric));
        let threshold = match self.config.stopping {
            Stopping::None => return false,
            Stopping::AlphaThreshold { .. } => self.alpha_threshold,
            Stopping::CodewordThreshold { d_min } => {
                threshold_codeword(&diff, &self.abs_r, d_min)
            }
        };
        if metric <= threshold {
            self.certified = true;
            return true;
        }
        false
    }

    /// Completes `node` with `z` on its remaining message bits.
    fn complete(&mut self, node: Node) -> bool {
        self.edges += (self.k - node.depth as usize) as u64;
        self.visit_goal(node.flips, node.deviations as usize)
    }

    /// Expands a depth-(k-1) node into its two goals.
    fn expand_goals(&mut self, node: Node) -> bool {
        let last = self.k - 1;
        self.edges += 2;
        if self.visit_goal(node.flips, node.deviations as usize) {
            return true;
        }
        let dev = node.deviations as usize + 1;
        if self.config.constraint != Constraint::None && dev > self.config.lambda {
            return false;
        }
        self.visit_goal(node.flips | 1 << last, dev)
    }

    fn child(&self, node: &Node, flip: bool) -> Node {
        let l = node.depth as usize;
        if flip {
            Node {
                flips: node.flips | 1 << l,
                metric: node.metric + self.cost_flip[l],
                depth: node.depth + 1,
                deviations: node.deviations + 1,
            }
        } else {
            Node {
                flips: node.flips,
                metric: node.metric + self.cost_keep[l],
                depth: node.depth + 1,
                deviations: node.deviations,
            }
        }
    }

    fn violates_pc(&self, node: &Node) -> bool {
        self.config.constraint == Constraint::Pc && node.deviations as usize > self.config.lambda
    }

    fn completes_directly(&self, node: &Node) -> bool {
        self.config.constraint == Constraint::PcOut
            && node.deviations as usize == self.config.lambda
    }

    fn run(&mut self) {
        let root = Node {
            flips: 0,
            metric: 0.0,
            depth: 0,
            deviations: 0,
        };
        if self.completes_directly(&root) {
            self.complete(root);
            return;
        }
        match self.config.stack_policy {
            StackPolicy::AppendBottom => self.run_append_bottom(root),
            StackPolicy::Ordered => self.run_ordered(root),
        }
    }

    fn run_append_bottom(&mut self, root: Node) {
        let mut stack: VecDeque<Node> = VecDeque::new();
        stack.push_back(root);
        let capacity = self.config.stack_capacity;
        while let Some(node) = stack.pop_front() {
            if !self.beats_best(node.metric) {
                continue;
            }
            // the z-agreeing child is placed on top and popped at once, so the
            // walk follows z down to the goal level
            let mut cur = node;
            loop {
                if cur.depth as usize == self.k - 1 {
                    if self.expand_goals(cur) {
                        return;
                    }
                    break;
                }
                self.edges += 2;
                let flipped = self.child(&cur, true);
                if !self.violates_pc(&flipped) && self.beats_best(flipped.metric) {
                    if self.completes_directly(&flipped) {
                        if self.complete(flipped) {
                            return;
                        }
                    } else if stack.len() < capacity {
                        stack.push_back(flipped);
                        self.max_stack = self.max_stack.max(stack.len());
                    } else {
                        self.dropped += 1;
                    }
                }
                let kept = self.child(&cur, false);
                if kept.metric > cur.metric && !self.beats_best(kept.metric) {
                    break;
                }
                cur = kept;
            }
        }
    }

    fn run_ordered(&mut self, root: Node) {
        let mut stack: VecDeque<Node> = VecDeque::new();
        stack.push_back(root);
        let capacity = self.config.stack_capacity;
        while let Some(node) = stack.pop_front() {
            if !self.beats_best(node.metric) {
                continue;
            }
            if node.depth as usize == self.k - 1 {
                let before = self.best.map(|b| b.1);
                if self.expand_goals(node) {
                    return;
                }
                let after = self.best.map(|b| b.1);
                if self.config.pruning && after != before {
                    self.truncate_above(&mut stack, after.expect("goal found"));
                }
                continue;
            }
            self.edges += 2;
            let keep = self.child(&node, false);
            let flip = self.child(&node, true);
            // the child whose increment is zero has the parent's metric, which
            // is minimal in the stack, so it goes on top without comparisons
            let (top, other) = if flip.metric < keep.metric {
                (flip, keep)
            } else {
                (keep, flip)
            };
            if !self.violates_pc(&other) && self.beats_best(other.metric) {
                if self.completes_directly(&other) {
                    let before = self.best.map(|b| b.1);
                    if self.complete(other) {
                        return;
                    }
                    let after = self.best.map(|b| b.1);
                    if self.config.pruning && after != before {
                        self.truncate_above(&mut stack, after.expect("goal found"));
                    }
                } else {
                    self.insert_ordered(&mut stack, other, capacity);
                }
            }
            if !self.violates_pc(&top) {
                if self.completes_directly(&top) {
                    if self.beats_best(top.metric) {
                        let before = self.best.map(|b| b.1);
                        if self.complete(top) {
                            return;
                        }
                        let after = self.best.map(|b| b.1);
                        if self.config.pruning && after != before {
                            self.truncate_above(&mut stack, after.expect("goal found"));
                        }
                    }
                } else {
                    if stack.len() >= capacity {
                        stack.pop_back();
                        self.dropped += 1;
                    }
                    stack.push_front(top);
                    self.max_stack = self.max_stack.max(stack.len());
                }
            }
        }
    }

    /// Binary-search insertion into the ascending stack, after equal metrics.
    fn insert_ordered(&mut self, stack: &mut VecDeque<Node>, node: Node, capacity: usize) {
        let (mut lo, mut hi) = (0, stack.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            self.comparisons += 1;
            if stack[mid].metric <= node.metric {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        if stack.len() >= capacity {
            if lo == stack.len() {
                self.dropped += 1;
                return;
            }
            stack.pop_back();
            self.dropped += 1;
        }
        stack.insert(lo, node);
        self.max_stack = self.max_stack.max(stack.len());
    }

    /// Deletes every node whose metric exceeds `m_best`.
    fn truncate_above(&mut self, stack: &mut VecDeque<Node>, m_best: f64) {
        let (mut lo, mut hi) = (0, stack.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            self.comparisons += 1;
            if stack[mid].metric <= m_best {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        stack.truncate(lo);
    }

    fn finish(self) -> Result<DecodeResult> {
        let (diff, metric) = self
            .best
            .ok_or_else(|| Error::InvalidInput("search produced no codeword".into()))?;
        let codeword = self.frame.unpermute(&diff.xor(&self.y));
        Ok(DecodeResult {
            codeword,
            metric,
            ml_certified: self.certified,
            edges_visited: self.edges,
            comparisons: self.comparisons,
            nodes_dropped: self.dropped,
            candidates: self.candidates,
            max_stack: self.max_stack,
            goal_sequence: self.goals,
        })
    }
}

/// A* decoding of the received samples held by `frame`.
pub fn astar_decode(frame: &MripFrame, config: &DecoderConfig) -> Result<DecodeResult> {
    let mut search = Search::new(frame, *config)?;
    if search.k > 128 {
        return invalid("more than 128 message bits");
    }
    search.run();
    search.finish()
}

/// Ordered statistics decoding of order `lambda`: every message pattern
/// within Hamming distance `lambda` of `z` on the MRIP is re-encoded and the
/// codeword of least discrepancy is kept. Patterns are visited by increasing
/// weight.
pub fn osd_decode(frame: &MripFrame, lambda: usize) -> Result<DecodeResult> {
    let config = DecoderConfig {
        pruning: false,
        ..DecoderConfig::default()
    };
    let mut search = Search::new(frame, config)?;
    let k = search.k;
    if lambda > k {
        return invalid(format!("order {lambda} exceeds k = {k}"));
    }
    for weight in 0..=lambda {
        let mut positions: Vec<usize> = (0..weight).collect();
        loop {
            let flips = positions.iter().fold(0u128, |acc, &p| acc | 1 << p);
            search.visit_goal(flips, weight);
            // next combination in lexicographic order
            let mut i = weight;
            let mut advanced = false;
            while i > 0 {
                i -= 1;
                if positions[i] < k - weight + i {
                    positions[i] += 1;
                    for t in i + 1..weight {
                        positions[t] = positions[t - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    search.finish()
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::None => "none",
            Constraint::Pc => "pc",
            Constraint::PcOut => "pc-out",
        })
    }
}

impl FromStr for Constraint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Constraint::None),
            "pc" => Ok(Constraint::Pc),
            "pc-out" => Ok(Constraint::PcOut),
            _ => invalid(format!("unknown constraint `{s}`")),
        }
    }
}

impl fmt::Display for StackPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StackPolicy::Ordered => "ordered",
            StackPolicy::AppendBottom => "append-bottom",
        })
    }
}

impl FromStr for StackPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ordered" => Ok(StackPolicy::Ordered),
            "append-bottom" => Ok(StackPolicy::AppendBottom),
            _ => invalid(format!("unknown stack policy `{s}`")),
        }
    }
}
