//! MatchPyramid: text matching by convolution over a word-similarity image.
//!
//! Two texts are turned into a matching matrix (`M[i][j]` = similarity of
//! word `i` of the first text and word `j` of the second), and a small CNN
//! with dynamic pooling classifies that matrix as matched / not matched.
//!
//! The crate is `no_std` + `alloc`. Everything here is pure computation:
//! tensor layers with exact backward passes, the matching operators, the
//! model, Adagrad training, baselines and metrics, and byte-level codecs for
//! checkpoints and datasets. Filesystem access lives in the `matchpyramid`
//! companion crate. With the `std` feature, training can fan per-example
//! gradient work out over scoped threads.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod baselines;
pub mod checkpoint;
pub mod data;
pub mod embedding;
mod error;
pub mod gradcheck;
pub mod layers;
pub mod matching;
mod math;
pub mod metrics;
pub mod model;
pub mod optim;
pub mod rng;
pub mod synth;
pub mod tensor;
pub mod train;
pub mod vocab;

pub use error::{Error, Result};
pub use tensor::Tensor;
