//! Auto-weighted multi-view clustering (AWMVC).
//!
//! The pipeline factorizes each data view into base matrices over several
//! latent dimensions, fuses the per-dimension coefficient matrices into a
//! row-orthonormal consensus matrix via rotation alignment, and re-weights
//! both stages in closed form on every sweep. Clustering the consensus
//! columns with k-means yields the final assignment.
//!
//! Module map:
//! - [`dataset`]: multi-view containers, on-disk formats, synthetic generator
//! - [`solver`]: the alternating optimizer and its update steps
//! - [`clustering`]: k-means with k-means++ seeding and restarts
//! - [`metrics`]: ACC / NMI / purity / pairwise F-score

pub mod clustering;
pub mod dataset;
pub mod error;
pub mod metrics;
#[doc(hidden)]
pub mod oracles;
pub mod solver;

pub use error::{Error, Result};
