//! First-passage percolation on Z^d and on cone-like induced subgraphs.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dynamical;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod metric;
pub mod plot;
pub mod randomness;
pub mod runner;
pub mod shape;
pub mod stats;

pub use error::{Error, Result};
