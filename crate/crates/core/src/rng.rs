//! Counter-based pseudo-random draws.
//!
//! Every draw is a pure function of `(seed, key, stream)`, so results do not
//! depend on evaluation order and can be computed in parallel.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable 64-bit FNV-1a hash of a string key.
pub fn hash_str(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Raw 64-bit draw for `(seed, key, stream)`.
pub fn draw_u64(seed: u64, key: u64, stream: u64) -> u64 {
    let a = mix64(seed.wrapping_add(GOLDEN));
    let b = mix64(a ^ key.wrapping_mul(GOLDEN));
    mix64(b ^ stream.wrapping_add(1).wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Uniform draw in `[0, 1)` with 53 bits of precision.
pub fn draw_unit(seed: u64, key: u64, stream: u64) -> f64 {
    (draw_u64(seed, key, stream) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform index in `0..n`. `n` must be non-zero.
pub fn draw_index(seed: u64, key: u64, stream: u64, n: usize) -> usize {
    debug_assert!(n > 0);
    // Multiply-shift avoids the modulo bias of `% n` for small n.
    ((u128::from(draw_u64(seed, key, stream)) * n as u128) >> 64) as usize
}
