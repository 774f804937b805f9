//! Per-cell seed derivation.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function. A bijection on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(tag: &str) -> u64 {
    tag.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Seed for one `(tag, algorithm, n, repetition)` cell of a sweep rooted at `master`.
pub fn derive_seed(master: u64, tag: &str, algorithm_id: u64, n: u64, rep: u64) -> u64 {
    [fnv1a(tag), algorithm_id, n, rep]
        .into_iter()
        .fold(mix64(master), |acc, v| {
            mix64(acc ^ mix64(v.wrapping_add(GOLDEN)))
        })
}
