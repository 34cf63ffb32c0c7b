//! Strong-secrecy polar coding for degraded broadcast channels.
//!
//! Two schemes are implemented over binary-input degraded broadcast channels:
//!
//! * **NLD-LS** (non-layered decoding, layered secrecy): a single polar block
//!   carries one message per eavesdropper, each protected against every
//!   eavesdropper up to its own level.
//! * **LD-NLS** (layered decoding, non-layered secrecy): superposition coding
//!   with one polar block per layer; receiver `k` decodes layers `1..=k`.
//!
//! Beyond encoding and decoding, the crate builds the index partitions from
//! exact (erasure channel) or Monte-Carlo (symmetric channel) polarization
//! profiles, and evaluates finite-length reliability, leakage and
//! total-variation bounds.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, threading and
//! the command-line tool live in the `polarsec` companion crate. The `std`
//! feature swaps the pure-Rust `exp`/`ln` used by the LLR butterflies for the
//! platform's, which roughly halves Monte-Carlo construction time; results
//! may then differ in the last bits.
//!
//! # Conventions
//!
//! The transform kernel is the involutive `[1 0; 1 1]` with no bit-reversal,
//! so `G_n = G_n^{-1}`. Indices are zero-based in the API; the most
//! significant bit of an index selects the branch of the first polarization
//! level (see [`transform::INDEX_ORDER`]).

#![no_std]
#![forbid(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod bounds;
pub mod campaign;
pub mod channel;
pub mod codec;
pub mod error;
pub mod math;
pub mod oracle;
pub mod partition;
pub mod profile;
pub mod rng;
pub mod sc;
pub mod transform;

pub use channel::{BroadcastChannelSpec, ChannelKind, Conditioning, ObservationChannel, Symbol};
pub use error::{Error, Result};
pub use partition::{CodeParameters, IndexPartition, LayeredPartition, Role, Scheme};
pub use profile::{Metric, PolarizationProfile};
pub use transform::{polar_transform, BitBlock};
