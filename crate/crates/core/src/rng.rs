//! Seed derivation.
//!
//! Every random stream in a run is derived from one master seed by mixing
//! in a path of integers (stage, generation, population index, ...). A task
//! therefore sees the same stream no matter which thread runs it or in
//! which order tasks are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stage tags used as the first path element below the master seed.
pub mod tag {
    pub const POPULATION: u64 = 1;
    pub const POOL_INIT: u64 = 2;
    pub const TRAIN_EVAL: u64 = 3;
    pub const INFER_EVAL: u64 = 4;
    pub const BREED_TRAIN: u64 = 5;
    pub const BREED_INFER: u64 = 6;
    pub const DATA: u64 = 7;
    pub const BASELINE: u64 = 8;
    pub const SHOTS: u64 = 9;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `path` into `seed`, one element at a time.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn stream(seed: u64, path: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(seed, path))
}
