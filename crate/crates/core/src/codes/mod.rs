//! Code constructions: extended BCH benchmarks, inner codes and
//! Reed-Solomon concatenations, each exposed as a generator matrix.

mod bch;
mod concat;
mod inner;
mod matrix;

use std::fmt;
use std::str::FromStr;

pub use bch::{bch127_generator_poly, ebch_generator, ebch_min_distance, EBCH_PARAMS};
pub use concat::ConcatSpec;
pub use inner::{ConvCodeSpec, InnerCodeKind, BLOCK168_PARITY};
pub use matrix::{min_distance_bruteforce, GeneratorMatrix, MembershipTest};

use crate::error::{Error, Result};
use crate::gf::RsSpec;

/// A named code from the experiment set.
#[derive(Clone, Debug, PartialEq)]
pub enum Scheme {
    /// Extended BCH (128, k).
    Ebch { k: usize },
    Concat(ConcatSpec),
    /// A single block of one of the short block codes, (8,4,4) or (16,8,5).
    Block(InnerCodeKind),
}

impl Scheme {
    pub fn ebch(k: usize) -> Self {
        Scheme::Ebch { k }
    }

    pub fn block(kind: InnerCodeKind) -> Result<Self> {
        if kind.chunk_len().is_none() {
            return Err(Error::InvalidInput(format!("{kind} is not a block code")));
        }
        Ok(Scheme::Block(kind))
    }

    pub fn concat(outer: RsSpec, inner: InnerCodeKind) -> Result<Self> {
        Ok(Scheme::Concat(ConcatSpec::new(outer, inner)?))
    }

    /// The five (128,36) schemes: eBCH and RS(16,9) with each inner code.
    pub fn all_128_36() -> Vec<Scheme> {
        let mut out = vec![Scheme::ebch(36)];
        for inner in InnerCodeKind::ALL {
            out.push(Scheme::concat(RsSpec::rs16_9(), inner).expect("compatible"));
        }
        out
    }

    pub fn generator(&self) -> Result<GeneratorMatrix> {
        match self {
            Scheme::Ebch { k } => ebch_generator(*k),
            Scheme::Concat(spec) => spec.derive_generator(),
            Scheme::Block(kind) => kind
                .block_generator()
                .ok_or_else(|| Error::InvalidInput(format!("{kind} is not a block code"))),
        }
    }

    /// Code whose SISO decoder supplies improved-frame reliabilities. A
    /// standalone block code is its own inner code.
    pub fn inner(&self) -> Option<InnerCodeKind> {
        match self {
            Scheme::Ebch { .. } => None,
            Scheme::Concat(spec) => Some(spec.inner),
            Scheme::Block(kind) => Some(*kind),
        }
    }

    /// Minimum distance when it is known: the eBCH codes, and RS(16,9)
    /// over the (8,4,4) cascade whose distance is the product 8 x 4.
    pub fn known_min_distance(&self) -> Option<usize> {
        match self {
            Scheme::Ebch { k } => ebch_min_distance(*k),
            Scheme::Concat(spec) if spec.inner == InnerCodeKind::ExtHamming8_4 => {
                Some(spec.outer.min_distance() * 4)
            }
            Scheme::Concat(_) => None,
            Scheme::Block(InnerCodeKind::ExtHamming8_4) => Some(4),
            Scheme::Block(_) => Some(5),
        }
    }
}

fn outer_name(rs: &RsSpec) -> String {
    format!("rs{}_{}", rs.n_out, rs.k_out)
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Ebch { k } => write!(f, "ebch{k}"),
            Scheme::Concat(spec) => write!(f, "{}+{}", outer_name(&spec.outer), spec.inner),
            Scheme::Block(kind) => write!(f, "{kind}"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    /// `ebch22`, `ebch36`, `ebch64`, or `<outer>+<inner>` with outer one of
    /// `rs16_9`, `rs16_6`, `rs26_13` and inner one of `ham8_4`, `blk16_8`,
    /// `conv2_1_4`, `conv2_1_6`. A bare `ham8_4` or `blk16_8` is a single
    /// block code.
    fn from_str(s: &str) -> Result<Self> {
        if let Ok(kind) = s.parse::<InnerCodeKind>() {
            return Scheme::block(kind);
        }
        if let Some(k) = s.strip_prefix("ebch") {
            let k: usize = k
                .parse()
                .map_err(|_| Error::InvalidInput(format!("unknown scheme `{s}`")))?;
            if ebch_min_distance(k).is_none() {
                return Err(Error::InvalidInput(format!("unsupported eBCH dimension {k}")));
            }
            return Ok(Scheme::ebch(k));
        }
        let (outer, inner) = s
            .split_once('+')
            .ok_or_else(|| Error::InvalidInput(format!("unknown scheme `{s}`")))?;
        let outer = match outer {
            "rs16_9" => RsSpec::rs16_9(),
            "rs16_6" => RsSpec::rs16_6(),
            "rs26_13" => RsSpec::rs26_13(),
            other => return Err(Error::InvalidInput(format!("unknown outer code `{other}`"))),
        };
        Scheme::concat(outer, inner.parse()?)
    }
}
