//! Deterministic random substreams.
//!
//! Every random quantity is drawn from a ChaCha8 stream keyed by
//! `(master seed, purpose tag, index)`. Results therefore depend only on the
//! seed and never on how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator type used throughout.
pub type Stream = ChaCha8Rng;

/// Purposes that get their own family of substreams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Tag {
    /// Monte-Carlo profile trials.
    Profile = 1,
    /// Check-encoder trials of the `d_TV^(L)` estimator.
    CheckEncoder = 2,
    /// End-to-end simulation trials.
    Campaign = 3,
    /// Key and message generation.
    Keys = 4,
    /// Encoder local randomness.
    Encoder = 5,
    /// Channel noise.
    Channel = 6,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Opens the substream `(seed, tag, index)`.
pub fn substream(seed: u64, tag: Tag, index: u64) -> Stream {
    let mut key = [0u8; 32];
    let mut state = seed ^ splitmix(tag as u64);
    for chunk in key.chunks_exact_mut(8) {
        state = splitmix(state ^ index);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    Stream::from_seed(key)
}

/// Derives a child seed, e.g. one per sweep point.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    splitmix(seed ^ splitmix(salt.wrapping_add(0x5151)))
}
