//! Seedable random streams for reproducible sessions.
//!
//! Every sampling operation in the crate takes an explicit [`RandomStream`];
//! there is no hidden global randomness. A stream is a ChaCha12 generator
//! plus the base seed it was derived from, so independent sub-streams can be
//! split off by name and index without consuming the parent. Replaying with
//! the same seed reproduces every draw bit for bit.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

/// A named, seedable PRNG handle. Exclusively owned by one session at a time.
#[derive(Debug, Clone)]
pub struct RandomStream {
    base_seed: u64,
    rng: ChaCha12Rng,
}

/// splitmix64 finalizer, used to spread seed/tag/index mixes.
fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn hash_tag(tag: &str) -> u64 {
    // FNV-1a; the tag namespace is tiny and fixed, speed is irrelevant.
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in tag.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

impl RandomStream {
    /// Root stream for a session seed.
    pub fn new(seed: u64) -> Self {
        RandomStream {
            base_seed: seed,
            rng: ChaCha12Rng::seed_from_u64(mix64(seed)),
        }
    }

    /// Independent sub-stream identified by `(tag, index)` relative to the
    /// base seed. Derivation does not consume this stream, so the set of
    /// sub-streams a session uses is independent of draw order.
    pub fn derive(&self, tag: &str, index: u64) -> Self {
        let sub = mix64(self.base_seed ^ hash_tag(tag)) ^ mix64(index.wrapping_mul(0xA076_1D64_78BD_642F));
        RandomStream {
            base_seed: sub,
            rng: ChaCha12Rng::seed_from_u64(mix64(sub)),
        }
    }

    /// Seed this stream was constructed or derived with.
    pub fn base_seed(&self) -> u64 {
        self.base_seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)` with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..n`. `n` must be nonzero; the modulo bias is below
    /// 2^-32 for every `n` used in this crate.
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }

    pub fn bit(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }

    /// Bernoulli draw: true with probability `p`.
    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Sample from a discrete distribution given by `weights` (sum ≈ 1).
    /// Round-off remainders fall into the last bucket.
    pub fn pick_weighted(&mut self, weights: &[f64]) -> usize {
        let x = self.next_f64();
        let mut acc = 0.0;
        for (i, w) in weights.iter().enumerate() {
            acc += w;
            if x < acc {
                return i;
            }
        }
        weights.len() - 1
    }

    /// `k` distinct indices drawn from `0..n`, in random order
    /// (partial Fisher-Yates).
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        debug_assert!(k <= n);
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.index(n - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}
