//! Soft-decision decoding of short binary block codes by A* priority-first
//! search over most-reliable-independent-position (MRIP) frames.
//!
//! The crate builds extended BCH benchmarks and Reed-Solomon concatenated
//! codes, runs a one-pass soft-in soft-out decoder on the inner code to obtain
//! a more reliable basis, and searches the resulting code tree with either an
//! ordered stack or an append-to-bottom stack. A Monte Carlo engine measures
//! block error rates, search complexity and basis statistics.

pub mod analysis;
pub mod astar;
pub mod bits;
pub mod channel;
pub mod codes;
pub mod error;
pub mod gf;
pub mod mrip;
pub mod siso;
pub mod sim;

pub use error::{Error, Result};
