//! Batch k vertex-disjoint paths.
//!
//! Answers many "find k vertex-disjoint paths from s to t" queries over one
//! directed graph at once. Every query's split-graph (its residual graph
//! under the paths found so far) is folded into one merged structure tagged
//! with query-id bit sets, and a single bidirectional BFS per iteration
//! serves all queries, so vertices reached by several queries in the same
//! level are expanded once.
//!
//! Modules:
//! - [`graph`]: the immutable input graph and split-vertex encoding.
//! - [`queryset`] and [`query`]: query ids, query sets and batches.
//! - [`merged`]: the merged split-graph ([`ResultState`]).
//! - [`engines`]: the shared batch engine and the single-query baseline.
//! - [`oracle`]: independent validators and max-flow ground truth.
//! - [`bench`]: workload generation, runs and reports.

pub mod bench;
pub mod engines;
pub mod error;
pub mod graph;
pub mod merged;
pub mod oracle;
pub mod query;
pub mod queryset;
pub mod synth;

pub use engines::{maxflow_single, sharedp_batch, ExplicitSplitGraph, QueryResult, ShareDp};
pub use graph::{Graph, SplitVertexId, VertexId};
pub use merged::{NeighborAnswer, ResultState};
pub use query::{load_queries, Batch, Query};
pub use queryset::QuerySet;
