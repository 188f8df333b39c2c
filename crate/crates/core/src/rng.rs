//! Seeded random streams.
//!
//! Every sampler takes an explicit generator. Replica `r` of an experiment
//! with master seed `s` uses `stream(s, r)`, so results never depend on how
//! replicas are scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream seed for replica `index` under master seed `seed`:
/// `mix64(mix64(seed) ^ index)`.
pub fn stream_seed(seed: u64, index: u64) -> u64 {
    mix64(mix64(seed) ^ index)
}

/// Generator for replica `index` under master seed `seed`.
pub fn stream(seed: u64, index: u64) -> SimRng {
    SimRng::seed_from_u64(stream_seed(seed, index))
}

/// Generator for a nested stream, e.g. (seed, n-index, replica).
pub fn stream2(seed: u64, a: u64, b: u64) -> SimRng {
    SimRng::seed_from_u64(mix64(stream_seed(seed, a) ^ mix64(b)))
}
