//! Seed derivation and resumable random streams.
//!
//! Every stochastic component draws from its own ChaCha8 stream so that
//! adding evaluation rollouts or changing one consumer never perturbs the
//! others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// splitmix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministically combines a base seed with a purpose tag and an index.
pub fn derive_seed(base: u64, tag: u64, index: u64) -> u64 {
    mix64(mix64(mix64(base) ^ tag) ^ index)
}

/// Purpose tags for [`derive_seed`].
pub mod tag {
    pub const INIT_POLICY: u64 = 1;
    pub const INIT_VALUE: u64 = 2;
    pub const ACTIONS: u64 = 3;
    pub const EPISODES: u64 = 4;
    pub const SHUFFLE: u64 = 5;
    pub const EVAL: u64 = 6;
    pub const EVAL_ACTIONS: u64 = 7;
}

pub fn rng_from(base: u64, tag: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, tag, index))
}

/// Snapshot of a ChaCha8 stream position, enough to resume it bit-exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngState {
    pub seed: [u8; 32],
    pub stream: u64,
    pub word_pos: u128,
}

impl RngState {
    pub fn capture(rng: &ChaCha8Rng) -> Self {
        Self {
            seed: rng.get_seed(),
            stream: rng.get_stream(),
            word_pos: rng.get_word_pos(),
        }
    }

    pub fn restore(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(self.word_pos);
        rng
    }
}
