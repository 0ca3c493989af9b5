//! Seeded randomness with a documented, portable stream.
//!
//! The generator is SplitMix64 (state increment `0x9E3779B97F4A7C15`, output
//! mix constants `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`), seeded
//! directly with the user seed. Derived draws are defined here so that other
//! implementations can reproduce every generated instance:
//!
//! - `below(n)` is `next_u64() % n`;
//! - `unit()` is `(next_u64() >> 11) * 2^-53`, uniform in `[0, 1)`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

pub struct Rng(SplitMix64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform integer in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        (self.next_u64() % n as u64) as usize
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[-1, 1)`.
    pub fn symmetric(&mut self) -> f64 {
        2.0 * self.unit() - 1.0
    }

    /// Fisher–Yates permutation of `0..n`, drawing `below(i + 1)` for
    /// `i = n-1, ..., 1`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.below(i + 1);
            p.swap(i, j);
        }
        p
    }
}
