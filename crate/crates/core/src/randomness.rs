//! Deterministic, addressable randomness.
//!
//! Every engine reads coins through a [`RandomTape`]: a pure function from
//! `(master_seed, node, round)` to a dyadic rational in `[0, 1)`. Because a
//! coin is addressed rather than consumed from a stream, an engine that
//! replays round `τ` for node `u` inside a gathered ball sees exactly the
//! value the reference engine saw, which is what makes cross-engine
//! byte-equality possible at all.

use serde::{Deserialize, Serialize};

use crate::{word_bits, NodeId, Round};

/// Default multiplier for the precision: coins carry `2 * ceil(log2 n)` bits.
pub const PRECISION_WORDS: u32 = 2;

/// Smallest number of coin bits we ever use; keeps single-node graphs sane.
const MIN_PRECISION_BITS: u32 = 8;

/// Largest number of coin bits: a numerator must stay exactly representable
/// as an `f64`, so comparisons against probabilities are reproducible.
const MAX_PRECISION_BITS: u32 = 52;

/// Addressable source of per-(node, round) uniform reals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomTape {
    master_seed: u64,
    precision_bits: u32,
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RandomTape {
    /// Tape for a graph on `n` nodes: precision `2 * ceil(log2 n)` bits,
    /// clamped to `[8, 52]`.
    pub fn new(master_seed: u64, n: usize) -> Self {
        let bits = (PRECISION_WORDS * word_bits(n.max(1))).clamp(MIN_PRECISION_BITS, MAX_PRECISION_BITS);
        RandomTape { master_seed, precision_bits: bits }
    }

    pub fn with_precision(master_seed: u64, precision_bits: u32) -> Self {
        let bits = precision_bits.clamp(1, MAX_PRECISION_BITS);
        RandomTape { master_seed, precision_bits: bits }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// Independent tape for a sub-computation (pipeline stage, generator, ...).
    /// Distinct salts give statistically unrelated coin sequences while
    /// remaining a pure function of the master seed.
    pub fn derive(&self, salt: u64) -> RandomTape {
        let seed = mix64(self.master_seed ^ mix64(salt.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
        RandomTape { master_seed: seed, precision_bits: self.precision_bits }
    }

    /// Raw 64-bit hash for `(node, round)`; the top `precision_bits` become
    /// the coin numerator.
    fn hash(&self, node: NodeId, round: Round) -> u64 {
        let mut h = self.master_seed;
        h = mix64(h ^ (u64::from(node).wrapping_add(1)).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        h = mix64(h ^ (u64::from(round).wrapping_add(1)).wrapping_mul(0xd1b5_4a32_d192_ed03));
        h
    }

    /// Numerator of the round real: an integer in `[0, 2^precision_bits)`.
    pub fn round_real_numerator(&self, node: NodeId, round: Round) -> u64 {
        self.hash(node, round) >> (64 - self.precision_bits)
    }

    /// The round real `i / 2^b` as an exact `f64` in `[0, 1)`.
    pub fn round_real(&self, node: NodeId, round: Round) -> f64 {
        let numer = self.round_real_numerator(node, round);
        numer as f64 / (1u64 << self.precision_bits) as f64
    }

    /// Bernoulli event with success probability `p`: true iff the round real
    /// is `<= p`. `p = 0` is strict (never fires); `p >= 1` always fires;
    /// and because the real is monotone in itself, `p <= q` implies
    /// `event(p) => event(q)` on the same address.
    pub fn sample_event(&self, node: NodeId, round: Round, p: f64) -> bool {
        if p <= 0.0 {
            false
        } else if p >= 1.0 {
            true
        } else {
            self.round_real(node, round) <= p
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_address_same_value() {
        let tape = RandomTape::new(1, 1 << 20);
        for node in 0..50u32 {
            for round in 1..50u32 {
                assert_eq!(tape.round_real(node, round), tape.round_real(node, round));
            }
        }
    }

    #[test]
    fn neighbouring_addresses_differ() {
        // (seed=1, u=0, τ=1) vs (seed=1, u=0, τ=2) should look unrelated;
        // equal values only with probability 2^-b.
        let tape = RandomTape::new(1, 1 << 17);
        assert_ne!(tape.round_real(0, 1), tape.round_real(0, 2));
        assert_ne!(tape.round_real(0, 1), tape.round_real(1, 1));

        // Collision count across a million draws should sit near the
        // birthday estimate C(10^6, 2) / 2^b ≈ 29 for b = 34; allow 10x.
        let mut values: Vec<u64> = Vec::with_capacity(1_000_000);
        for node in 0..1000u32 {
            for round in 1..=1000u32 {
                values.push(tape.round_real_numerator(node, round));
            }
        }
        values.sort_unstable();
        let collisions = values.windows(2).filter(|w| w[0] == w[1]).count();
        assert!(collisions < 300, "suspiciously many collisions: {collisions}");
    }

    #[test]
    fn mean_is_one_half() {
        let tape = RandomTape::new(7, 1 << 17);
        let draws = 100_000u32;
        let sum: f64 = (0..draws).map(|i| tape.round_real(i % 1000, 1 + i / 1000)).sum();
        let mean = sum / draws as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn acceptance_fraction_tracks_p() {
        let tape = RandomTape::new(3, 100_000);
        let hits = (0..100_000u32).filter(|&u| tape.sample_event(u, 1, 0.25)).count();
        let frac = hits as f64 / 100_000.0;
        assert!((frac - 0.25).abs() < 0.005, "fraction {frac}");
    }

    #[test]
    fn zero_probability_never_fires() {
        let tape = RandomTape::new(11, 1024);
        assert!((0..2000u32).all(|u| !tape.sample_event(u, 3, 0.0)));
    }

    #[test]
    fn unit_probability_always_fires() {
        let tape = RandomTape::new(11, 1024);
        assert!((0..2000u32).all(|u| tape.sample_event(u, 3, 1.0)));
    }

    #[test]
    fn events_are_monotone_in_p() {
        let tape = RandomTape::new(5, 4096);
        for u in 0..500u32 {
            for r in 1..10u32 {
                let lo = tape.sample_event(u, r, 0.2);
                let hi = tape.sample_event(u, r, 0.6);
                assert!(!lo || hi, "coupling violated at ({u},{r})");
            }
        }
    }

    #[test]
    fn derived_tapes_are_stable_and_distinct() {
        let tape = RandomTape::new(42, 1000);
        assert_eq!(tape.derive(1), tape.derive(1));
        assert_ne!(tape.derive(1), tape.derive(2));
        assert_ne!(tape.derive(1).round_real(0, 1), tape.derive(2).round_real(0, 1));
    }
}
