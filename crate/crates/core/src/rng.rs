//! Seeded random substreams.
//!
//! Every source of randomness in a run is a ChaCha8 stream keyed by the
//! per-seed value and a role label (`env`, `rater`, `dataset`,
//! `agent:<name>`). Two agents never share a stream, so enabling or
//! disabling one agent leaves the others' trajectories bit-identical.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The random source type used throughout the crate.
pub type StreamRng = ChaCha8Rng;

/// 64-bit FNV-1a hash of a role label.
pub fn role_hash(role: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in role.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Derives the substream for `(seed, role)`.
pub fn substream(seed: u64, role: &str) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(role_hash(role));
    rng
}

/// Seed of the `index`-th run of an experiment.
pub fn run_seed(base_seed: u64, index: usize) -> u64 {
    base_seed.wrapping_add(index as u64)
}
