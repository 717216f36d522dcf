// SPDX-License-Identifier: Apache-2.0

//! Deterministic seed derivation.
//!
//! Every random stream in the crate is a `ChaCha8Rng` whose seed is derived
//! from a configured root seed plus the coordinates of the work item, so
//! parallel and serial execution draw identical numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `parts` into `root`.
pub fn derive(root: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix(root), |acc, &p| mix(acc ^ mix(p)))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived_rng(root: u64, parts: &[u64]) -> ChaCha8Rng {
    rng(derive(root, parts))
}
