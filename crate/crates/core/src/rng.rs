//! Seeded, splittable random streams.
//!
//! Every stream is ChaCha8 keyed by the 64-bit seed with an explicit stream
//! number, so stream `k` of seed `s` is the same sequence on every machine
//! and independent of how many other streams run concurrently.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Recorded in every report and sample dump.
pub const RNG_ALGORITHM: &str = "chacha8/rand_chacha-0.9/seed_from_u64+stream";

/// Draws per stream when a batch is split for parallel generation.
pub const CHUNK: usize = 4096;

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform integer in `[0, bound)`; `bound` must be positive.
#[inline]
pub fn below(rng: &mut Stream, bound: u128) -> u128 {
    rng.random_range(0..bound)
}

/// Uniform real in `(0, 1]`.
#[inline]
pub fn open_unit(rng: &mut Stream) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Derives a child seed for a named sub-task so that unrelated experiments
/// sharing a master seed do not share streams.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    // FNV-1a over the label, mixed with the seed by splitmix64
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
