//! Deterministic RNG streams for Monte Carlo loops.
//!
//! Each trial draws from its own ChaCha stream derived from `(seed, trial)`,
//! so parallel sweeps produce identical results regardless of thread count
//! or chunking.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG for an independent sub-stream (trial, grid point, ...) of a seeded run.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// RNG for a top-level seeded run.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
