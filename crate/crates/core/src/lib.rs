//! Symbolic coding of geodesics on (p, q, r) triangle orbifolds by
//! two-letter kneading data.

pub mod coding;
pub mod config;
pub mod error;
pub mod export;
pub mod geom;
pub mod group_graph;
pub mod orbits;
pub mod render;
pub mod suite;
pub mod topology;
pub mod words;

pub use config::Tolerances;
pub use error::{Error, Result};
