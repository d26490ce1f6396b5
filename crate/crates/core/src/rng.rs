//! Counter-based randomness.
//!
//! Every random decision is a pure function of `(seed, counters...)`, so the
//! result does not depend on evaluation order or on how work is split
//! between threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash of a seed and two counters.
#[inline]
pub fn counter_hash(seed: u64, a: u64, b: u64) -> u64 {
    let h = mix64(seed.wrapping_add(GOLDEN));
    let h = mix64(h ^ a.wrapping_mul(GOLDEN).wrapping_add(0x632B_E59B_D9B4_E019));
    mix64(h ^ b.wrapping_mul(0xD6E8_FEB8_6659_FD93).wrapping_add(GOLDEN))
}

/// Uniform index in `0..n` derived from `hash` by multiply-shift.
#[inline]
pub fn reduce(hash: u64, n: usize) -> usize {
    ((hash as u128 * n as u128) >> 64) as usize
}

/// Background-model slot overwritten at `pixel` when processing `frame_index`.
#[inline]
pub fn update_slot(seed: u64, frame_index: usize, pixel: usize, samples: usize) -> usize {
    reduce(counter_hash(seed, frame_index as u64, pixel as u64), samples)
}

/// Independent generator for one `(stream, index)` pair, e.g. one frame of a
/// synthetic sequence.
pub fn stream_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(counter_hash(seed, stream, index))
}
