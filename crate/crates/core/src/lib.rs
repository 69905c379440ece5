//! Simulator for synchronous message-passing graph algorithms and their
//! round-compressed execution on low-memory MPC machines.
//!
//! The crate is organised around one contract: every algorithm is written
//! once, as a per-node program against the CONGEST-style interface in
//! [`congest`], and can then be executed by
//!
//! * [`congest::run_congest`] — the plain lockstep reference engine, and
//! * [`compression::run_compressed`] — the MPC engine, which batches rounds
//!   into phases, gathers balls of probable senders, and fast-forwards each
//!   node locally.
//!
//! Both engines draw randomness from the same addressable [`randomness::RandomTape`],
//! so for a fixed seed their final node states must agree byte for byte.
//! The test suite leans on that equivalence heavily.

pub mod algorithms;
pub mod compression;
pub mod congest;
pub mod graph;
pub mod harness;
pub mod mpc;
pub mod randomness;
pub mod verify;

/// Dense node identifier, `0..n-1`.
pub type NodeId = u32;

/// 1-based round counter.
pub type Round = u32;

/// Machine-word width in bits for a graph on `n` nodes: `ceil(log2 n)`,
/// clamped below by 1 so degenerate graphs still have a word size.
pub fn word_bits(n: usize) -> u32 {
    if n <= 2 {
        1
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}
