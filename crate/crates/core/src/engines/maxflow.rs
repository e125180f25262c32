use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::time::{Duration, Instant};

use super::split_graph::ExplicitSplitGraph;
use super::QueryResult;
use crate::graph::{Graph, SplitVertexId, VertexId};
use crate::query::Query;

/// Single-query baseline: rebuild the explicit split-graph for the current
/// paths, BFS for an augmenting path, fold it into the path set, repeat up
/// to `k` times.
pub fn maxflow_single(g: &Graph, q: &Query, k: usize) -> QueryResult {
    maxflow_single_until(g, q, k, None)
}

/// As [`maxflow_single`], giving up once `deadline` passes. The result then
/// has `timed_out` set and holds the paths found so far.
pub fn maxflow_single_until(g: &Graph, q: &Query, k: usize, deadline: Option<Instant>) -> QueryResult {
    let start = Instant::now();
    let n = g.vertex_count();
    let mut paths: Vec<Vec<VertexId>> = Vec::new();
    let mut timed_out = false;
    for _ in 0..k {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            timed_out = true;
            break;
        }
        let sg = ExplicitSplitGraph::build(g, &paths, q.s, q.t).expect("path set stays disjoint");
        let Some(aug) = bfs_path(&sg, q.s, q.t) else {
            break;
        };
        let steps = aug.windows(2).map(|w| (w[0].proj(n), w[1].proj(n))).filter(|(u, v)| u != v);
        paths = augment(&paths, steps, q.s, q.t);
    }
    QueryResult { id: q.id, found: paths.len(), paths, elapsed: start.elapsed(), timed_out }
}

fn bfs_path(sg: &ExplicitSplitGraph, s: VertexId, t: VertexId) -> Option<Vec<SplitVertexId>> {
    let mut pred = vec![u32::MAX; 2 * sg.vertex_count()];
    let mut queue = VecDeque::from([s]);
    pred[s as usize] = s;
    while let Some(x) = queue.pop_front() {
        for &y in sg.out_neighbors(SplitVertexId(x)) {
            if pred[y as usize] != u32::MAX {
                continue;
            }
            pred[y as usize] = x;
            if y == t {
                let mut path = vec![SplitVertexId(t)];
                let mut cur = t;
                while cur != s {
                    cur = pred[cur as usize];
                    path.push(SplitVertexId(cur));
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(y);
        }
    }
    None
}

/// Symmetric difference of the current path edges with the augmenting
/// steps, decomposed back into s-t paths. Edges not reachable from `s`
/// form cycles and are discarded.
fn augment(
    paths: &[Vec<VertexId>],
    steps: impl Iterator<Item = (VertexId, VertexId)>,
    s: VertexId,
    t: VertexId,
) -> Vec<Vec<VertexId>> {
    let mut edges: BTreeSet<(VertexId, VertexId)> =
        paths.iter().flat_map(|p| p.windows(2).map(|w| (w[0], w[1]))).collect();
    for (u, v) in steps {
        if !edges.remove(&(v, u)) {
            edges.insert((u, v));
        }
    }
    let mut next: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for &(u, v) in &edges {
        next.entry(u).or_default().push(v);
    }
    let firsts = next.get(&s).cloned().unwrap_or_default();
    firsts
        .into_iter()
        .map(|first| {
            let mut path = vec![s, first];
            let mut cur = first;
            while cur != t {
                cur = next[&cur][0];
                path.push(cur);
            }
            path
        })
        .collect()
}

impl QueryResult {
    pub fn elapsed_secs(&self) -> f64 {
        self.elapsed.as_secs_f64()
    }

    pub(crate) fn empty(id: usize) -> Self {
        QueryResult { id, found: 0, paths: Vec::new(), elapsed: Duration::ZERO, timed_out: false }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{crossing, diamond};

    #[test]
    fn diamond_two_paths() {
        let r = maxflow_single(&diamond(), &Query { id: 0, s: 0, t: 3 }, 2);
        assert_eq!(r.found, 2);
        assert_eq!(r.paths, vec![vec![0, 1, 3], vec![0, 2, 3]]);
    }

    #[test]
    fn crossing_requires_cancellation() {
        let r = maxflow_single(&crossing(), &Query { id: 0, s: 0, t: 5 }, 2);
        assert_eq!(r.found, 2);
        assert_eq!(r.paths, vec![vec![0, 1, 4, 5], vec![0, 3, 2, 5]]);
    }

    #[test]
    fn path_graph_has_one() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]);
        let r = maxflow_single(&g, &Query { id: 0, s: 0, t: 2 }, 2);
        assert_eq!(r.found, 1);
        assert!(!r.timed_out);
    }

    #[test]
    fn expired_deadline_stops_immediately() {
        let r = maxflow_single_until(&diamond(), &Query { id: 0, s: 0, t: 3 }, 2, Some(Instant::now()));
        assert!(r.timed_out);
        assert_eq!(r.found, 0);
    }
}
