//! Counter-based per-sample random streams.
//!
//! Sample `k` of a run with master seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(derive_seed(s, k))`, where `derive_seed` is a
//! SplitMix64 hash of `s` and `k`. Results therefore never depend on how
//! samples are scheduled across worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SampleRng = ChaCha8Rng;

/// Name recorded in dataset manifests.
pub const RNG_SCHEME: &str = "chacha8(seed_from_u64(splitmix64(master ^ splitmix64(index))))";

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

pub fn sample_rng(master: u64, index: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, index))
}
