//! Pseudo-random graph tooling: bitset graphs, motif census, pseudo-randomness
//! certificates, random graph generators and the accompanying numeric checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` rejects NaN too.

pub mod census;
pub mod certifier;
pub mod clique;
pub mod combinatorics;
pub mod diagnostics;
pub mod ergm;
pub mod error;
pub mod exec;
pub mod generators;
pub mod geometric;
pub mod graph;
pub mod io;
pub mod motif;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
pub use graph::{Graph, VertexSet};
