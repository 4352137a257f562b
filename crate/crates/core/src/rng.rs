//! Deterministic stream derivation.
//!
//! Every randomized routine in this crate takes a `u64` seed and derives an
//! independent ChaCha8 stream per logical unit of work (one replicate, one
//! grid cell, ...). Streams are keyed by `(master seed, role, indices)` via a
//! splitmix64-style finalizer, so results are bit-reproducible regardless of
//! how work is scheduled across threads, and distinct roles never collide
//! even when they share a master seed.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Role tags keep streams for different purposes disjoint. Values are
/// arbitrary but frozen: changing them changes every seeded result.
pub mod role {
    pub const CALIBRATE: u64 = 0x11;
    pub const POWER: u64 = 0x22;
    pub const RISK_NULL: u64 = 0x33;
    pub const GRID_CELL: u64 = 0x44;
    pub const GRID_CALIBRATE: u64 = 0x55;
    pub const SIGNAL: u64 = 0x66;
    pub const GRAPH: u64 = 0x77;
    pub const SAMPLE_CLI: u64 = 0x88;
    pub const VERIFY: u64 = 0x99;
}

/// splitmix64 finalizer: bijective, avalanching mix of one 64-bit word.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a 64-bit subseed from a master seed, a role tag, and indices.
pub fn derive(master: u64, role: u64, indices: &[u64]) -> u64 {
    let mut state = mix(master ^ mix(role));
    for &ix in indices {
        state = mix(state ^ mix(ix));
    }
    state
}

/// One independent ChaCha8 stream for a given (master, role, index) triple.
pub fn stream(master: u64, role: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(master, role, &[index]))
}

/// Stream keyed by two indices (e.g. a grid cell).
pub fn stream2(master: u64, role: u64, i: u64, j: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(master, role, &[i, j]))
}
