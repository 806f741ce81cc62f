//! Seed derivation.
//!
//! Every stochastic decision in the pipelines is keyed by a global seed plus
//! stable record identifiers (page id, revision id, record index), never by
//! the position of a record in a worker's queue. That is what keeps outputs
//! byte-identical regardless of how many threads process them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Per-stage salts so that two stages keyed by the same ids draw independent
/// streams.
pub mod stream {
    pub const PAIR_SAMPLING: u64 = 0x7061_6972;
    pub const CUTTING: u64 = 0x6375_7473;
    pub const SPELLING: u64 = 0x7370_656c;
    pub const IDENTITY: u64 = 0x6964_656e;
    pub const RULES: u64 = 0x7275_6c65;
    pub const RTT_IDENTITY: u64 = 0x7274_7469;
    pub const DEV_SAMPLE: u64 = 0x6465_7673;
}

/// SplitMix64 finaliser.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a sequence of keys into one seed.
pub fn derive_seed(seed: u64, keys: &[u64]) -> u64 {
    keys.iter().fold(mix64(seed), |acc, &k| mix64(acc ^ mix64(k)))
}

pub fn rng_for(seed: u64, keys: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, keys))
}

/// A uniform draw in `[0, 1)` that depends only on `(seed, keys)`.
pub fn unit_draw(seed: u64, keys: &[u64]) -> f64 {
    (derive_seed(seed, keys) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
