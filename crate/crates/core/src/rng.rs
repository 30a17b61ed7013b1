//! Seeded random streams.
//!
//! Every stochastic step draws from a [`RngStream`]. The generator is
//! ChaCha8 keyed by a 64-bit seed plus a stream id, so independent pipeline
//! stages (parameter sampling, geometry, flyaways, cropping) never shift each
//! other's draw sequences.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Stream ids of the dataset pipeline stages.
pub mod stream {
    pub const PARAMS: u64 = 0;
    pub const GEOMETRY: u64 = 1;
    pub const FLYAWAYS: u64 = 2;
    pub const CROP: u64 = 3;
}

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Independent stream derived from `seed`; same `(seed, stream)` gives the same sequence.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Standard normal draw (zero mean, unit standard deviation).
    pub fn draw_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn draw_uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in the closed interval `[lo, hi]`.
    pub fn draw_in(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.inner.next_u64() >> 11) as f64 / ((1u64 << 53) - 1) as f64;
        lo + u * (hi - lo)
    }

    /// Uniform integer in the closed interval `[lo, hi]`.
    pub fn draw_int(&mut self, lo: u32, hi: u32) -> u32 {
        debug_assert!(lo <= hi);
        let span = (hi - lo) as u64 + 1;
        let k = (self.draw_uniform() * span as f64) as u64;
        lo + k.min(span - 1) as u32
    }

    /// Uniform index in `0..len`.
    pub fn draw_index(&mut self, len: usize) -> usize {
        debug_assert!(len > 0);
        ((self.draw_uniform() * len as f64) as usize).min(len - 1)
    }
}
