//! Companion crate to `polarsec-core`: configuration files, a text
//! container for profiles and partitions, CSV output, multi-threaded
//! Monte-Carlo and campaign drivers, figure presets and the `polarsec`
//! command-line tool.

#![forbid(unsafe_code)]
#![warn(missing_docs)]

pub mod cli;
pub mod config;
pub mod error;
pub mod figures;
pub mod format;
pub mod parallel;
pub mod pipeline;
pub mod report;

pub use error::{CliError, Result};
