//! Deterministic seed derivation for independent Monte-Carlo streams.

/// SplitMix64 finalizer. Derives a well-mixed child seed from a master
/// seed and an index so that sweep points get statistically independent
/// RNG keys while staying bitwise reproducible.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
