//! Deterministic random source for training runs.
//!
//! Every stochastic choice the agent makes draws from a single ChaCha8
//! stream seeded from a `u64`, so a run is a pure function of its
//! configuration: same seed, same episodes, same CSV bytes.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used by training; a cheap, portable, seedable stream cipher.
pub type TrainRng = ChaCha8Rng;

/// Builds the training RNG for a given seed.
pub fn seeded_rng(seed: u64) -> TrainRng {
    TrainRng::seed_from_u64(seed)
}
