//! Seeded random streams.
//!
//! Every stochastic component draws from [`ChaCha8Rng`], whose output stream is
//! specified independently of platform and word size. Sub-streams are derived
//! from a master seed with a SplitMix64 finalizer so that games, playouts,
//! mutations and rollback draws never share state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG used for every seeded stream in the crate.
pub type StreamRng = ChaCha8Rng;

/// Stream tags keep derived seeds for unrelated purposes apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    GameSeed = 0x6761_6d65,
    Search = 0x7365_6172,
    Playout = 0x706c_6179,
    Mutation = 0x6d75_7461,
    Rollback = 0x726f_6c6c,
    Executor = 0x6578_6563,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `master`, a stream tag and a path of indices.
pub fn derive_seed(master: u64, stream: Stream, path: &[u64]) -> u64 {
    let mut h = splitmix64(master ^ splitmix64(stream as u64));
    for &p in path {
        h = splitmix64(h ^ splitmix64(p.wrapping_add(0x632b_e59b_d9b4_e019)));
    }
    h
}

pub fn stream_rng(seed: u64) -> StreamRng {
    StreamRng::seed_from_u64(seed)
}
