//! Seed derivation. Every episode, worker and minibatch shuffle draws from its
//! own ChaCha stream derived from the master seed, so results do not depend on
//! scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic child seed for `(seed, stream, index)`.
pub fn derive(seed: u64, stream: u64, index: u64) -> u64 {
    mix(mix(seed ^ mix(stream)).wrapping_add(index))
}

pub fn rng_from(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Stream tags.
pub mod stream {
    pub const TERRAIN: u64 = 1;
    pub const ACTIONS: u64 = 2;
    pub const SHUFFLE: u64 = 3;
    pub const ITERATION: u64 = 4;
    pub const SENSOR: u64 = 5;
    pub const INIT: u64 = 6;
    pub const EPISODE: u64 = 7;
}
