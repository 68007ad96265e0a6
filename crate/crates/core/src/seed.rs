//! Deterministic seed derivation.
//!
//! Every random stream in the crate is a pure function of a base seed and a
//! short path of integers (replication, sample size, role, chunk). Nothing
//! depends on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Role tags separating independent streams derived from one replication seed.
pub mod role {
    pub const PRIMARY: u64 = 0x5052_494d;
    pub const AUXILIARY: u64 = 0x4155_5849;
    pub const PROJECTIONS: u64 = 0x5052_4f4a;
    pub const ATOMS: u64 = 0x4154_4f4d;
    pub const CHUNK: u64 = 0x4348_4e4b;
}

/// Concrete generator used everywhere.
pub type StreamRng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable 64-bit mix of two words. Not commutative.
pub fn stable_mix(a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(a) ^ b.rotate_left(17).wrapping_add(0x632b_e59b_d9b4_e019))
}

/// Folds a path of words into `base`.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(base), |acc, &w| stable_mix(acc, w))
}

pub fn rng_from(seed: u64) -> StreamRng {
    StreamRng::seed_from_u64(seed)
}
