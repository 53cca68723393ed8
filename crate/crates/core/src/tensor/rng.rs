use rand::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

/// Deterministic 64-bit generator (SplitMix64). Identical seeds give identical streams.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: SplitMix64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: SplitMix64::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    pub fn next_unit(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
