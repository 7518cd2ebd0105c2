//! Explicit distance bounds between Gibbs measures on `{0,1}^N` and product
//! reference laws, with the simulation and enumeration tools needed to check
//! them.
//!
//! The crate covers the Ising model on a fixed neighbourhood structure and
//! exponential random graph models built from motif injection counts.

pub mod bounds;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod harness;
pub mod meanfield;
pub mod models;
pub mod stats;

pub use error::{Error, Result};
