//! Per-trial seeds derived from one master seed.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The `k`-th output of a SplitMix64 stream seeded with `master`. Depends on
/// `(master, k)` only, so trials can be scheduled in any order.
pub fn trial_seed(master: u64, k: u64) -> u64 {
    mix(master.wrapping_add(k.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}
