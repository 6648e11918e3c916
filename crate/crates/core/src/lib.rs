//! Tree densities in sparse graph classes.
//!
//! Exact image/copy counting for forest patterns, the `alpha_s` exponent
//! that governs how many copies a sparse host can hold, the extremal
//! constructions that attain it, and the extraction machinery that turns an
//! abundance of images into a forbidden-substructure witness.

pub mod clique;
pub mod codec;
pub mod constructions;
pub mod counting;
pub mod error;
pub mod extraction;
pub mod fit;
pub mod forest;
pub mod gen;
pub mod graph;
pub mod models;
pub mod shortcuts;

pub use error::{Error, Result};
pub use forest::Forest;
pub use graph::{Graph, Vertex, VertexSet};
