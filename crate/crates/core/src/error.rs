//! Error type shared by every module.

use alloc::string::String;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The operation is only defined for another channel family.
    #[error("unsupported channel: {0}")]
    UnsupportedChannel(String),
    /// The requested configuration (number of layers, conditioning) is not implemented.
    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),
    /// The δ thresholds leave too few indices for the requested rates.
    #[error("infeasible rate: {needed} indices needed, {available} available ({context})")]
    InfeasibleRate {
        /// Indices required by the rate targets.
        needed: usize,
        /// Indices in the candidate set.
        available: usize,
        /// Which layer or set ran short.
        context: String,
    },
    /// The work would exceed a hard resource budget.
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    /// A bound averages over a set that turned out to be empty.
    #[error("undefined bound: {0}")]
    UndefinedBound(String),
}

/// Convenience alias.
pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidArgument(alloc::format!($($arg)*))
    };
}
pub(crate) use invalid;
