//! Colored (hyper)graph systems, patterns and rainbow copies.

pub mod degree;
pub mod graph;
pub mod io;
pub mod pattern;
pub mod rainbow;

use thiserror::Error;

pub use degree::{min_star_degree, DegreeRule, RuleKind};
pub use graph::{binomial, k_subsets, subsets_of, DirectedKGraph, Edge, GraphSystem, Partition, Sign, Vertex};
pub use pattern::{PatternF, PatternKind};
pub use rainbow::{build_hf, enumerate_rainbow_copies, RainbowCopy, RainbowPacking};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("uniformity must be at least 2, got {0}")]
    BadUniformity(usize),
    #[error("bad partition: {0}")]
    BadPartition(String),
    #[error("bad edge: {0}")]
    BadEdge(String),
    #[error("duplicate edge {0}")]
    DuplicateEdge(String),
    #[error("a graph system needs at least one color")]
    EmptySystem,
    #[error("graph {0} does not share vertex set, uniformity or partition with graph 0")]
    SystemMismatch(usize),
    #[error("bad pattern: {0}")]
    BadPattern(String),
    #[error("degree order {d} must satisfy 1 <= d < k = {k}")]
    DimensionMismatch { d: usize, k: usize },
    #[error("unsupported degree rule: {0}")]
    UnsupportedRule(String),
    #[error("partite rule used on a graph without a partition")]
    NotPartite,
    #[error("expected {expected} colors, got {got}")]
    ColorCount { expected: usize, got: usize },
    #[error("bad color list: {0}")]
    BadColors(String),
    #[error("pattern does not fit host: {0}")]
    PatternMismatch(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
