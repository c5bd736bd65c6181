//! Exact fractional matching machinery: a rational simplex, matching and
//! cover programs, Farkas certificates and k-complexes.

pub mod complex;
pub mod hypergraph;
pub mod matching;
pub mod simplex;

use thiserror::Error;

pub use complex::{
    check_degree_sequence_pfm, clique_complex, degree_sequence, greedy_low_index_edge, greedy_low_index_edge_partite,
    meets_degree_bound, CliqueKind, Complex, ComplexMode, DegreeCheck, GreedyError,
};
pub use hypergraph::{parse_hypergraph, write_hypergraph, Hypergraph};
pub use matching::{
    combine_block_pfms, has_perfect_fractional_matching, lift_block_pfm, max_fractional_matching, min_fractional_cover,
    FarkasCertificate, FractionalSolution, PfmOutcome, SolutionKind,
};
pub use simplex::Q;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("bad edge: {0}")]
    BadEdge(String),
    #[error("hypergraph is not {expected}-uniform (found an edge of size {found})")]
    NonUniform { expected: usize, found: usize },
    #[error("the (f,b)-graph is not in strict mode")]
    NotStrict,
    #[error("expected {expected} block solutions, got {got}")]
    BlockCount { expected: usize, got: usize },
    #[error("bad complex: {0}")]
    BadComplex(String),
    #[error("slice has {got} colors, a clique complex needs {expected}")]
    SliceSize { expected: usize, got: usize },
    #[error("partite mode needs a partition")]
    NotPartite,
    #[error("degree sequence {0:?} meets the bound but the top level has no perfect fractional matching")]
    BoundWithoutPfm(Vec<usize>),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
