//! Deterministic seed derivation.
//!
//! Every random quantity in a sweep is keyed by a counter chain
//! `master seed -> point seed -> trial seed -> (channel, payload, noise)`,
//! so results never depend on worker count or scheduling.

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and a counter index.
pub fn derive(parent: u64, index: u64) -> u64 {
    mix(parent ^ mix(index))
}
