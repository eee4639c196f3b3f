//! Deterministic derivation of sub-seeds.
//!
//! Every randomized stage (warm-start restarts, fold draws, train/test
//! splits, benchmark conditions) owns a seed derived from the user seed and a
//! fixed stream tag, so independent stages never share RNG state and reruns
//! are bit-reproducible.

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

/// splitmix64 finalizer; decorrelates nearby (seed, stream) pairs.
pub fn mix(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seeded generator for the given (seed, stream) pair.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed, stream))
}
