//! Splittable, counter-based RNG streams.
//!
//! Every random stage draws from its own ChaCha stream keyed by
//! `(seed, replica, purpose)`, so replicas can run on any number of threads
//! and still produce byte-identical output, and adding draws to one stage
//! never shifts another.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Which pipeline stage a stream feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    DegreeSampling = 0,
    Matching = 1,
    Removal = 2,
    TieBreak = 3,
    Estimator = 4,
    PairSampling = 5,
}

const PURPOSE_COUNT: u64 = 6;

/// Deterministic stream for `(seed, replica, purpose)`.
pub fn stream(seed: u64, replica: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica * PURPOSE_COUNT + purpose as u64);
    rng
}
