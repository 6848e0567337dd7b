//! Seeded random streams.
//!
//! Every sampling loop in the crate derives an independent ChaCha stream from
//! `(seed, index)`, so results do not depend on iteration order or on how many
//! worker threads rayon uses.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent stream number `index` under the master `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derives a sub-seed for nested sampling (trial `index` of a run under `seed`).
pub fn subseed(seed: u64, index: u64) -> u64 {
    // splitmix64 finaliser over the pair
    let mut z = seed
        ^ index
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
