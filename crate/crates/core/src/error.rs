use std::path::PathBuf;

use thiserror::Error;

/// Errors produced while reading graphs, queries and reports.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
}

/// Raised when two query sets of different widths are combined.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("query set width mismatch: {left} vs {right}")]
pub struct WidthMismatch {
    pub left: usize,
    pub right: usize,
}

/// Internal-consistency failures. Any of these indicates an engine bug or a
/// caller that violated a documented precondition.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConsistencyError {
    #[error("split step {from} -> {to} is not an edge of the split-graph for queries {queries:?}")]
    InvalidStep { from: u32, to: u32, queries: Vec<usize> },
    #[error("path endpoints do not match query {query}")]
    WrongEndpoints { query: usize },
    #[error("empty augmenting path")]
    EmptyPath,
    #[error("broken nexthop chain for query {query} at vertex {vertex}")]
    BrokenChain { query: usize, vertex: u32 },
    #[error("query {query} has no joint vertex")]
    MissingJoint { query: usize },
    #[error("broken {direction} chain for query {query} at split vertex {vertex}")]
    BrokenSearchChain { query: usize, vertex: u32, direction: &'static str },
}

/// Rejections from the oracles and generators.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UsageError {
    #[error("graph has {n} vertices, oracle is limited to {limit}")]
    OracleGuard { n: usize, limit: usize },
    #[error("paths are not pairwise disjoint: {0}")]
    NotDisjoint(String),
    #[error("no solvable query pairs found down to k = 2")]
    GenerationFailed,
    #[error("{0}")]
    Config(String),
}
