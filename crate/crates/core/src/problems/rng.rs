//! Seeded random streams.
//!
//! Every generator draws from ChaCha8 keyed by the instance seed, with a
//! dedicated stream per purpose so the draws of one purpose never shift
//! those of another. Noise uses stream = query index.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const RNG_NAME: &str = "chacha8";
pub const RNG_VERSION: u32 = 1;

pub const STREAM_PAYOFF: u64 = 1 << 62;
pub const STREAM_FTS_CENTERS: u64 = (1 << 62) + 1;
pub const STREAM_FTS_CONSTRAINTS: u64 = (1 << 62) + 2;
/// Free for callers (probes, sampling in tests and tools).
pub const STREAM_AUX: u64 = (1 << 62) + 3;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
