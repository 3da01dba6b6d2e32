//! Seeded random streams.
//!
//! All randomness comes from ChaCha8 seeded with the caller's 64-bit seed.
//! Each purpose gets its own ChaCha stream id, so adding draws for one purpose
//! never shifts the values seen by another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub enum Purpose {
    Schema = 1,
    Explanation = 2,
    TrainExamples = 3,
    TestExamples = 4,
    Noise = 5,
    Partition = 6,
    Perturbation = 7,
    ModelInit = 8,
    Subsets = 9,
    Split = 10,
    Dataset = 11,
}

/// Independent generator for `(seed, purpose, round)`.
pub fn substream(seed: u64, purpose: Purpose, round: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 32) | (round & 0xffff_ffff));
    rng
}
