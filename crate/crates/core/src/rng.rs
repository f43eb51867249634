//! Seed derivation and the deterministic RNG used across the crate.
//!
//! Every stochastic component (bootstrap resampling, feature subsampling,
//! synthetic generation, label availability) draws from a [`ChaCha8Rng`]
//! seeded through [`mix`], so independent components never share a stream
//! and identical seeds reproduce identical results on every platform.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer over `seed ^ (salt * golden_gamma)`.
///
/// Derives a well-spread sub-seed from a base seed and a salt such as a tree
/// index. Plain integer arithmetic, so sub-seeds are stable across platforms
/// and releases.
pub fn mix(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// [`mix`] with a named role ("student", "oracle", ...) as the salt,
/// FNV-1a-hashed so distinct roles get distinct streams.
pub fn mix_str(seed: u64, role: &str) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in role.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    mix(seed, h)
}

/// A ChaCha8 generator seeded with `seed`.
pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal draw via the Box-Muller transform.
///
/// Consumes exactly two uniforms per call, which keeps generator state
/// independent of how callers interleave draws.
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    use rand::Rng;
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1], keeps ln finite
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
