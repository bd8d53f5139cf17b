//! Multi-sense word embeddings for word sense induction.
//!
//! The crate learns several sense vectors per frequent word jointly over a
//! whole corpus (skip-gram with negative sampling plus per-word sense
//! clustering), labels test occurrences of ambiguous words by their nearest
//! sense, and scores the result with the SemEval-2010 WSI metrics.
//!
//! The pipeline is split into modules that mirror its stages:
//!
//! - [`corpus`]: tokenization, vocabulary, subsampling and context windows.
//! - [`vectors`]: word and sense tables, similarity, persistence.
//! - [`sgns`]: the negative-sampling objective and its gradient step.
//! - [`induction`]: the joint training loop with fixed-K and CRP sense assignment.
//! - [`baselines`]: PPMI vectors with CRP labeling, and per-target k-means.
//! - [`wsi`]: test-time context vectors and instance labeling, key files.
//! - [`eval`]: V-Measure, paired F-score, supervised recall, cluster counts.
//! - [`cli`]: the `sense-embed` command line.

pub mod baselines;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod induction;
pub mod rng;
pub mod sgns;
pub mod vectors;
pub mod wsi;

pub use error::{Error, Result};

/// Dense vocabulary index.
pub type WordId = u32;
