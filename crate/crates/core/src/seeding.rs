//! Deterministic seed derivation.
//!
//! Monte Carlo trials must be reproducible and order-independent, so every
//! trial gets its own seed derived from the master seed and a list of tags
//! (trial index, hypothesis, copy budget, ...). The mixing is SplitMix64,
//! which is platform-independent and good enough to decorrelate streams.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash a master seed together with context tags into a derived seed.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut state = splitmix64(master ^ 0x6A09_E667_F3BC_C908);
    for &t in tags {
        state = splitmix64(state ^ splitmix64(t));
    }
    state
}

/// ChaCha12 generator seeded from a derived seed.
pub fn rng_from(master: u64, tags: &[u64]) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(derive_seed(master, tags))
}
