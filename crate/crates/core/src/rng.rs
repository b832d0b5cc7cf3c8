//! Seeded random streams.
//!
//! Every run owns its own [`RandomSource`]. Streams for experiment runs are
//! derived from `(base_seed, cell_index, run_index)` through a 64-bit mixer, so
//! no run depends on how many draws another run consumed.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for run `run` of sweep cell `cell`.
pub fn derive_seed(base_seed: u64, cell: u64, run: u64) -> u64 {
    mix64(mix64(mix64(base_seed) ^ cell) ^ run.rotate_left(32))
}

#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    inner: Xoshiro256PlusPlus,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    pub fn for_run(base_seed: u64, cell: u64, run: u64) -> Self {
        Self::new(derive_seed(base_seed, cell, run))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl RngCore for RandomSource {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
