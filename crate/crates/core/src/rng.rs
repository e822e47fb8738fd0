//! Seed derivation. Every random stream is a pure function of a master seed
//! and a path of indices, so trials can run in any order or in parallel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One step of the splitmix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `master` and a path of indices.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p.wrapping_add(0xA5A5_A5A5))))
}

/// Counter-based generator for `seed`.
pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic values in `[-1, 1)` without touching a generator; used for
/// start vectors of iterative solvers.
pub fn hashed_unit(seed: u64, i: usize) -> f64 {
    let bits = splitmix64(seed ^ splitmix64(i as u64)) >> 11;
    (bits as f64) / ((1u64 << 52) as f64) - 1.0
}

/// Sub-stream tags used by the generators and the harness.
pub mod streams {
    pub const MEMBERSHIP: u64 = 1;
    pub const DEGREES: u64 = 2;
    pub const ADJACENCY: u64 = 3;
    pub const CLUSTERING: u64 = 4;
}
