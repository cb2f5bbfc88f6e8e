//! Explainable text retrieval backed by a knowledge graph.
//!
//! The pipeline embeds documents into a TF-IDF vector index, optionally
//! expands queries with knowledge-graph labels and descriptions, retrieves
//! candidates by cosine similarity, re-ranks them by query-document entity
//! relatedness, and explains each hit with its most important sentence.

pub mod artifact;
pub mod cli;
pub mod corpus;
pub mod eval;
pub mod error;
pub mod expansion;
pub mod fixtures;
mod io;
pub mod kg;
pub mod linker;
pub mod pipeline;
pub mod rerank;
pub mod retrieval;
pub mod text;

pub use error::{Error, Result};
