//! Seed derivation. Training, evaluation, and model-init seeds are drawn
//! from disjoint streams of a master seed so evaluation worlds never
//! coincide with training worlds.

/// Stream tags. Values are arbitrary but fixed; changing one changes
/// every derived seed.
pub const STREAM_TRAIN: u64 = 0x7261_696e;
pub const STREAM_EVAL: u64 = 0x6576_616c;
pub const STREAM_MODEL: u64 = 0x6d6f_6465;
pub const STREAM_ROLLOUT: u64 = 0x726f_6c6c;

/// splitmix64 finalizer; full-period bijective mixer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed for item `index` of `stream` under `master`.
pub fn derive(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ stream.wrapping_mul(0xa076_1d64_78bd_642f)).wrapping_add(index))
}
