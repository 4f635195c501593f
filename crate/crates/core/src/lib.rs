//! Character-level dependency parsing with latent intra-word structure.
//!
//! A word-level dependency tree is read as a forest of character-level trees
//! in which every word forms a single-rooted subtree. The crate provides the
//! chart algorithms that decode and sum over such forests, the training
//! objective built on them, conversions between granularities, evaluation
//! metrics, corpus formats and an exhaustive oracle used for verification.

// Chart and tree code indexes several parallel arrays by position.
#![allow(clippy::needless_range_loop)]

pub mod chart;
pub mod convert;
pub mod error;
pub mod io;
pub mod metrics;
pub mod oracle;
pub mod sample;
pub mod selfcheck;
pub mod synth;
pub mod training;
pub mod types;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
