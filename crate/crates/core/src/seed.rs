//! Seed derivation shared by every stochastic stage.
//!
//! All randomness in the crate flows from a single 64-bit seed. Child streams
//! are derived with [`derive_seed`], a SplitMix64-style finalizer over
//! `(base, index)`, so batch element `i` never depends on elements `< i`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for element `index` of a stream rooted at `base`.
///
/// `derive_seed(b, i) = mix64(b + (i + 1) * GOLDEN_GAMMA)` (wrapping). The
/// `+ 1` keeps index 0 from collapsing onto `mix64(base)`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    mix64(base.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// A ChaCha8 generator for the child stream `(base, index)`.
pub fn stream(base: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, index))
}

/// Stable 64-bit FNV-1a hash of a label, used to name sub-streams by string.
pub fn label_hash(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
