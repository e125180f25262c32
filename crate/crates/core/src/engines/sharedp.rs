use std::time::Instant;

use super::search::{LevelStats, NoopObserver, Observer, SearchState};
use super::QueryResult;
use crate::error::ConsistencyError;
use crate::graph::{Graph, SplitVertexId};
use crate::merged::ResultState;
use crate::query::Batch;
use crate::queryset::QuerySet;

/// Batch execution over the merged split-graph.
///
/// Each iteration runs one bidirectional BFS shared by every live query,
/// then folds the paths it found into the result sets. Queries that fail to
/// find their next path are retired and keep what they have.
pub struct ShareDp<'g> {
    g: &'g Graph,
    batch: Batch,
    state: ResultState,
    search: SearchState,
    live: QuerySet,
    timed_out: QuerySet,
    iteration: usize,
}

impl<'g> ShareDp<'g> {
    pub fn new(g: &'g Graph, batch: Batch) -> Self {
        let state = ResultState::new(g, &batch);
        let search = SearchState::new(g.vertex_count(), batch.len());
        ShareDp { g, live: batch.all(), timed_out: batch.empty_set(), state, search, batch, iteration: 0 }
    }

    pub fn batch(&self) -> &Batch {
        &self.batch
    }

    pub fn state(&self) -> &ResultState {
        &self.state
    }

    /// Queries still searching for further paths.
    pub fn live(&self) -> &QuerySet {
        &self.live
    }

    pub fn iterations_done(&self) -> usize {
        self.iteration
    }

    pub fn is_finished(&self) -> bool {
        self.iteration >= self.batch.k() || self.live.is_empty()
    }

    /// Finds one more path for every live query. Returns `Ok(false)` when
    /// the deadline passed mid-iteration; the iteration is then discarded
    /// and every live query is marked timed out.
    pub fn step<O: Observer>(&mut self, observer: &mut O, deadline: Option<Instant>) -> Result<bool, ConsistencyError> {
        if self.is_finished() {
            return Ok(true);
        }
        let iteration = self.iteration + 1;
        self.search.seed(&self.batch, &self.live);

        let mut level = 0;
        while !self.search.undone().is_empty() && self.search.queues_nonempty() {
            if deadline.is_some_and(|d| Instant::now() >= d) {
                self.timed_out = self.live.clone();
                self.live = self.batch.empty_set();
                return Ok(false);
            }
            level += 1;
            for backward in [false, true] {
                if self.search.undone().is_empty() {
                    break;
                }
                let mut stats = LevelStats { iteration, backward, level, ..LevelStats::default() };
                self.search.level(self.g, &self.state, backward, &mut stats, observer);
                observer.on_level(&stats);
            }
        }

        // group queries that found the same split path
        let met = self.live.difference(self.search.undone()).expect("same width");
        let mut groups: Vec<(Vec<SplitVertexId>, QuerySet)> = Vec::new();
        let mut index = std::collections::HashMap::new();
        for q in met.iter() {
            let path = self.search.reconstruct_path(&self.batch.query(q))?;
            match index.get(&path) {
                Some(&i) => {
                    let entry: &mut (Vec<SplitVertexId>, QuerySet) = &mut groups[i];
                    entry.1.insert(q);
                }
                None => {
                    index.insert(path.clone(), groups.len());
                    groups.push((path, QuerySet::singleton(self.batch.len(), q)));
                }
            }
        }
        for (path, set) in &groups {
            self.state.apply_augmenting_path(self.g, path, set)?;
        }

        self.live = met;
        self.iteration = iteration;
        Ok(true)
    }

    /// Runs to completion (all `k` iterations, retirement, or the deadline).
    pub fn run<O: Observer>(&mut self, observer: &mut O, deadline: Option<Instant>) -> Result<(), ConsistencyError> {
        while !self.is_finished() {
            if !self.step(observer, deadline)? {
                break;
            }
        }
        Ok(())
    }

    /// Per-query results from the current result sets. `elapsed` is left at
    /// zero for the caller to fill in.
    pub fn results(&self) -> Result<Vec<QueryResult>, ConsistencyError> {
        self.batch
            .queries()
            .iter()
            .map(|q| {
                let paths = self.state.extract_paths(q)?;
                let mut r = QueryResult::empty(q.id);
                r.found = paths.len();
                r.paths = paths;
                r.timed_out = self.timed_out.contains(q.id);
                Ok(r)
            })
            .collect()
    }
}

/// Runs the whole batch; each result's `elapsed` is the batch time divided
/// evenly over the queries.
pub fn sharedp_batch(g: &Graph, batch: &Batch) -> Result<Vec<QueryResult>, ConsistencyError> {
    let start = Instant::now();
    let mut engine = ShareDp::new(g, batch.clone());
    engine.run(&mut NoopObserver, None)?;
    let mut results = engine.results()?;
    let share = start.elapsed() / batch.len().max(1) as u32;
    for r in &mut results {
        r.elapsed = share;
    }
    Ok(results)
}
