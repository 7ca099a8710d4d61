//! Deterministic seed derivation.
//!
//! Components that run work in parallel must not share one RNG stream, so
//! each unit of work gets its own seed derived from the caller's master seed
//! plus stable integer coordinates (e.g. parent index and a per-run counter).
//! The derivation is a splitmix64 chain: cheap, stateless and well mixed, so
//! neighbouring coordinates do not produce correlated streams.

/// One round of splitmix64.
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a master seed and one stream coordinate.
pub fn derive(seed: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ stream)
}

/// Derive a child seed from a master seed and two stream coordinates.
pub fn derive2(seed: u64, a: u64, b: u64) -> u64 {
    splitmix64(derive(seed, a) ^ b)
}
