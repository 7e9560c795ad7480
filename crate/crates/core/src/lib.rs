//! Low-dimensional embeddings of gene sequence datasets.
//!
//! Sequences are turned into fixed-width vectors (one-hot, ordinal, or
//! Smith-Waterman distances to a random reference panel), compressed by a
//! fully-connected autoencoder whose encoder half produces the embedding,
//! and compared against a SMACOF multidimensional-scaling baseline using
//! silhouette scores, distance heatmaps and an out-of-sample clustering test.

pub mod alignment;
pub mod autoencoder;
pub mod embedding;
pub mod encoding;
pub mod error;
pub mod evaluation;
pub mod mds;
pub mod pipeline;
pub mod sequences;

mod parallel;

pub use embedding::Embedding;
pub use error::{Error, Result};
