//! Semi-supervised overlapping community detection.
//!
//! The pipeline trains a clique-aware subgraph encoder under four ordering
//! losses, proposes clique community cores by embedding distance, and grows
//! each core into a community with a learning-free annealing expansion.
//! Predicted covers are scored with bi-matching F1/Jaccard and overlapping
//! NMI.

pub mod annealer;
pub mod bench;
pub mod cli;
pub mod cliques;
pub mod config;
pub mod encoder;
pub mod error;
pub mod graph;
pub mod hyperbolic;
pub mod losses;
pub mod metrics;
pub mod model;
pub mod proposer;
pub mod synth;
pub mod tape;
pub mod tensor;

pub use error::{Error, Result};
