//! Seed derivation and counter-based uniforms.
//!
//! Every random decision in training is drawn from a stream derived from the
//! user seed, so the stages never perturb each other's sequences.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent random streams used by the training pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Init = 1,
    Windows = 2,
    Negatives = 3,
    Crp = 4,
    Subsample = 5,
    Kmeans = 6,
    Splits = 7,
}

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

#[inline]
pub fn mix(seed: u64, salt: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ salt.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

pub fn derive_seed(seed: u64, stream: Stream, sub: u64) -> u64 {
    mix(mix(seed, stream as u64), sub)
}

pub fn stream_rng(seed: u64, stream: Stream, sub: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, stream, sub))
}

/// Uniform in [0, 1) as a pure function of `(seed, index)`.
#[inline]
pub fn unit_uniform(seed: u64, index: u64) -> f64 {
    (mix(seed, index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
