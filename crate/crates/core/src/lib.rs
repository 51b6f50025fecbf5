//! Coreset selection with contributing-dimension-structure (CDS) diversity
//! constraints.
//!
//! Samples are reduced with PCA, each is given a binary signature marking the
//! dimensions that deviate from its group centroid by more than a threshold,
//! and selectors are steered towards covering many distinct signatures, either
//! by partitioning the budget ([`constraints::hard_cds_select`]) or by
//! penalizing same-signature picks inside a greedy objective
//! ([`constraints::soft_craig_select`], [`constraints::soft_graphcut_select`]).

pub mod cds;
pub mod cli;
pub mod constraints;
pub mod data_io;
pub mod error;
pub mod harness;
pub mod pipeline;
pub mod reduce;
pub mod selectors;

pub use error::{Error, Result};
