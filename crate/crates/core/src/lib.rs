//! Fully unsupervised machine-translation evaluation.
//!
//! The crate implements a reference-free MT metric built from three parts
//! that bootstrap each other without parallel data:
//!
//! * a word-level score: Word Mover's Distance between source and
//!   hypothesis embeddings, a fluency term, and an optional comparison with
//!   a pseudo reference ([`scorer::score_wrd`]);
//! * a sentence-level score: cosine between projected pooled sentence
//!   embeddings, the projection trained contrastively ([`sentembed`]);
//! * their weighted ensemble ([`scorer::score_ensemble`]).
//!
//! Pseudo-parallel sentence pairs mined with the metric itself
//! ([`mining`]) drive cross-lingual remapping ([`remap`]) and contrastive
//! training, iterated by [`selflearn`]. [`eval`] measures correlation with
//! human judgments and retrieval precision.

pub mod corpusio;
pub mod error;
pub mod eval;
pub mod langmodel;
pub mod manifest;
pub mod mining;
pub mod remap;
pub mod scorer;
pub mod selflearn;
pub mod sentembed;
pub mod synthetic;
pub mod transport;
pub(crate) mod vecops;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
