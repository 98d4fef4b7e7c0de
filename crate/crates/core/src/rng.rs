//! Seeded random streams.
//!
//! Every trial owns a handful of independent ChaCha8 streams, addressed by
//! `(master seed, purpose, trial index)`. The trial index selects the ChaCha
//! stream id, so the sequence a trial sees never depends on how many workers
//! run or in what order trials are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// What a stream is used for. Each purpose gets its own key so that, for
/// example, changing the delay model does not shift proposer selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Arrivals = 1,
    Selection = 2,
    Delays = 3,
    PollResponses = 4,
    TieBreak = 5,
    BallsInBins = 6,
}

/// SplitMix64 finaliser, used to spread the master seed over the key space.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream(master_seed: u64, purpose: Purpose, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(master_seed ^ mix(purpose as u64)));
    rng.set_stream(index);
    rng
}

/// Derive a child master seed, e.g. for replicate searches.
pub fn derive_seed(master_seed: u64, salt: u64) -> u64 {
    mix(master_seed.wrapping_add(mix(salt)))
}
