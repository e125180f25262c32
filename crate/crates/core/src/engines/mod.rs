//! Path-finding engines: the shared batch engine and the per-query baseline.

mod maxflow;
mod search;
mod sharedp;
mod split_graph;

use std::time::Duration;

use crate::graph::VertexId;

pub use maxflow::{maxflow_single, maxflow_single_until};
pub use search::{LevelStats, NoopObserver, Observer, SearchState};
pub use sharedp::{sharedp_batch, ShareDp};
pub use split_graph::ExplicitSplitGraph;

/// Outcome of one query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryResult {
    pub id: usize,
    /// Number of disjoint paths obtained, at most `k`.
    pub found: usize,
    pub paths: Vec<Vec<VertexId>>,
    pub elapsed: Duration,
    pub timed_out: bool,
}
