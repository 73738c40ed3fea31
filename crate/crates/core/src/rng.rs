//! Seeded randomness shared by splitting and GOSS sampling.
//!
//! Everything is driven by SplitMix64 (Steele, Lea & Flood; increment
//! `0x9E3779B97F4A7C15`, finalizer multipliers `0xBF58476D1CE4E5B9` and
//! `0x94D049BB133111EB`). Bounded draws use the multiply-shift reduction
//! `(x * n) >> 64`, and shuffles are Fisher–Yates from the last index down,
//! so a given seed yields the same permutation on every platform.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

pub struct SeededRng(SplitMix64);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng(SplitMix64::seed_from_u64(seed))
    }

    /// Independent stream for `(seed, stream)`, e.g. one per boosting round.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut mix = SplitMix64::seed_from_u64(seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        Self::new(mix.next_u64())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform index in `0..n`. `n` must be nonzero.
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// Moves a uniform sample of `k` items into `items[..k]`.
    pub fn partial_shuffle<T>(&mut self, items: &mut [T], k: usize) {
        let k = k.min(items.len());
        for i in 0..k {
            let j = i + self.below(items.len() - i);
            items.swap(i, j);
        }
    }
}
