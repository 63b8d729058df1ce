//! Seed derivation and the sampling primitives used by the simulators.
//!
//! Every Monte Carlo consumer draws from a ChaCha8 generator addressed by a
//! `(seed, stream)` pair; distinct sample indices get distinct streams, so
//! ensembles reproduce bit-for-bit no matter how samples are scheduled across
//! threads.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Derives an independent 64-bit subseed from a master seed and an index.
///
/// SplitMix64 finalizer over the combined pair; the mapping is fixed and
/// platform-independent, so derived seeds can be published and replayed.
#[must_use]
pub fn subseed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// ChaCha8 generator on the given stream of the given seed.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw in [0, 1) with 53-bit resolution.
#[inline]
pub(crate) fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Exponential holding time for the given total rate.
#[inline]
pub(crate) fn exponential(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    debug_assert!(rate > 0.0);
    // 1 - U lies in (0, 1], so the log argument never hits zero.
    -crate::math::ln(1.0 - uniform(rng)) / rate
}
