/// Derives an independent 64-bit seed from a master seed and a path of tags
/// (splitmix64 finalizer applied per tag).
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut x = master;
    for &t in tags {
        x ^= t.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(x << 6).wrapping_add(x >> 2);
        x = mix(x);
    }
    mix(x)
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
