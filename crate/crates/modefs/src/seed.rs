//! Counter-based sub-seed derivation.
//!
//! Every stage of a run draws randomness from its own `ChaCha8Rng`, seeded by
//! mixing the master seed with fixed stream ids and loop counters. Parallel
//! evaluation therefore cannot perturb results: the rng state handed to each
//! individual is a pure function of (master seed, stage, generation, slot).

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STREAM_SPLIT: u64 = 1;
pub const STREAM_FCM: u64 = 2;
pub const STREAM_INIT: u64 = 3;
pub const STREAM_MSBIU: u64 = 4;
pub const STREAM_FOAGM: u64 = 5;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with an ordered list of counters into one sub-seed.
pub fn sub_seed(master: u64, parts: &[u64]) -> u64 {
    let mut acc = splitmix(master);
    for &p in parts {
        acc = splitmix(acc ^ splitmix(p.wrapping_add(0xA5A5_A5A5_A5A5_A5A5)));
    }
    acc
}

/// Convenience constructor for a stage-local rng.
pub fn sub_rng(master: u64, parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sub_seed(master, parts))
}
