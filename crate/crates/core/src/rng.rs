//! Deterministic per-trial random stream.

use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded generator passed explicitly to everything that needs randomness.
///
/// There is no global state: two `Rng`s built from the same seed yield the
/// same stream, and a stream only advances through `&mut self` calls.
#[derive(Debug, Clone)]
pub struct Rng {
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform real in the closed interval `[lo, hi]`.
    pub fn real_in(&mut self, lo: f64, hi: f64) -> f64 {
        if lo == hi {
            return lo;
        }
        self.inner.random_range(lo..=hi)
    }

    /// Uniform real in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn u64_in(&mut self, lo: u64, hi: u64) -> u64 {
        self.inner.random_range(lo..=hi)
    }

    pub fn i64_in(&mut self, lo: i64, hi: i64) -> i64 {
        self.inner.random_range(lo..=hi)
    }

    /// Uniform index in `0..len`. `len` must be non-zero.
    pub fn index(&mut self, len: usize) -> usize {
        self.inner.random_range(0..len)
    }

    pub fn coin(&mut self, p_true: f64) -> bool {
        self.unit() < p_true
    }

    /// Index chosen with probability proportional to `weights[i]`.
    /// Returns `None` when every weight is zero.
    pub fn weighted_index(&mut self, weights: &[u32]) -> Option<usize> {
        let total: u64 = weights.iter().map(|&w| u64::from(w)).sum();
        if total == 0 {
            return None;
        }
        let mut pick = self.u64_in(0, total - 1);
        for (i, &w) in weights.iter().enumerate() {
            let w = u64::from(w);
            if pick < w {
                return Some(i);
            }
            pick -= w;
        }
        unreachable!("pick < total")
    }
}
