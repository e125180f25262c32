//! Ground-truth checks that share no code with the engines.

use std::collections::{HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engines::ExplicitSplitGraph;
use crate::error::UsageError;
use crate::graph::{Graph, SplitVertexId, VertexId};
use crate::merged::ResultState;
use crate::query::Batch;
use crate::queryset::QuerySet;

/// Largest graph the flow oracle accepts.
pub const ORACLE_LIMIT: usize = 10_000;

/// Findings of a validation. `ok` holds exactly when `violations` is empty.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct VerifyReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

impl VerifyReport {
    fn from_violations(violations: Vec<String>) -> Self {
        VerifyReport { ok: violations.is_empty(), violations }
    }
}

/// Checks that every path runs from `s` to `t` over edges of `g` without
/// repeating a vertex, and that no two paths share an inner vertex.
pub fn verify_disjoint(g: &Graph, s: VertexId, t: VertexId, paths: &[Vec<VertexId>]) -> VerifyReport {
    let n = g.vertex_count() as VertexId;
    let mut violations = Vec::new();
    let mut owner: std::collections::HashMap<VertexId, usize> = Default::default();
    for (i, path) in paths.iter().enumerate() {
        if path.first() != Some(&s) || path.last() != Some(&t) {
            violations.push(format!("path {i} {path:?}: wrong endpoints, expected {s} -> {t}"));
        }
        if let Some(&bad) = path.iter().find(|&&v| v >= n) {
            violations.push(format!("path {i}: vertex {bad} not in graph"));
            continue;
        }
        let mut seen = HashSet::new();
        for &v in path {
            if !seen.insert(v) {
                violations.push(format!("path {i}: not simple, repeats vertex {v}"));
            }
        }
        for w in path.windows(2) {
            if !g.has_edge(w[0], w[1]) {
                violations.push(format!("path {i}: missing edge {} -> {}", w[0], w[1]));
            }
        }
        if path.len() > 2 {
            for &v in &path[1..path.len() - 1] {
                if v == s || v == t {
                    continue;
                }
                if let Some(&j) = owner.get(&v) {
                    if j != i {
                        violations.push(format!("paths {j} and {i}: shared inner vertex {v}"));
                    }
                } else {
                    owner.insert(v, i);
                }
            }
        }
    }
    VerifyReport::from_violations(violations)
}

#[derive(Clone, Copy)]
struct Arc {
    to: usize,
    cap: u32,
    rev: usize,
    forward: bool,
}

/// Unit-capacity flow network with every vertex split into an entry node
/// `2v` and an exit node `2v + 1`.
struct FlowNetwork {
    adj: Vec<Vec<Arc>>,
}

impl FlowNetwork {
    fn add_arc(&mut self, from: usize, to: usize, cap: u32) {
        let (fi, ti) = (self.adj[from].len(), self.adj[to].len());
        self.adj[from].push(Arc { to, cap, rev: ti, forward: true });
        self.adj[to].push(Arc { to: from, cap: 0, rev: fi, forward: false });
    }

    fn augment(&mut self, source: usize, sink: usize) -> bool {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.adj.len()];
        let mut visited = vec![false; self.adj.len()];
        visited[source] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            if x == sink {
                break;
            }
            for (i, arc) in self.adj[x].iter().enumerate() {
                if arc.cap > 0 && !visited[arc.to] {
                    visited[arc.to] = true;
                    prev[arc.to] = Some((x, i));
                    queue.push_back(arc.to);
                }
            }
        }
        if !visited[sink] {
            return false;
        }
        let mut cur = sink;
        while let Some((x, i)) = prev[cur] {
            let rev = self.adj[x][i].rev;
            self.adj[x][i].cap -= 1;
            self.adj[cur][rev].cap += 1;
            cur = x;
        }
        true
    }
}

/// Up to `cap` vertex-disjoint `s -> t` paths from a max-flow on the
/// vertex-split network.
pub fn max_disjoint_paths(g: &Graph, s: VertexId, t: VertexId, cap: usize) -> Result<Vec<Vec<VertexId>>, UsageError> {
    let n = g.vertex_count();
    if n > ORACLE_LIMIT {
        return Err(UsageError::OracleGuard { n, limit: ORACLE_LIMIT });
    }
    let (s, t) = (s as usize, t as usize);
    let mut net = FlowNetwork { adj: vec![Vec::new(); 2 * n] };
    for v in 0..n {
        if v != s && v != t {
            net.add_arc(2 * v, 2 * v + 1, 1);
        }
    }
    for (u, v) in g.edges() {
        net.add_arc(2 * u as usize + 1, 2 * v as usize, 1);
    }
    let (source, sink) = (2 * s + 1, 2 * t);
    let mut flow = 0;
    while flow < cap && net.augment(source, sink) {
        flow += 1;
    }

    // decompose: every unit leaving the source follows saturated arcs to t
    let mut used: HashSet<(usize, usize)> = HashSet::new();
    let mut paths = Vec::new();
    let saturated = |net: &FlowNetwork, x: usize, i: usize| {
        let a = net.adj[x][i];
        a.forward && a.cap == 0
    };
    for i in 0..net.adj[source].len() {
        if !saturated(&net, source, i) {
            continue;
        }
        let mut path = vec![s as VertexId];
        let mut node = net.adj[source][i].to;
        used.insert((source, i));
        loop {
            let v = node / 2;
            path.push(v as VertexId);
            if v == t {
                break;
            }
            // entry -> exit, then the unique saturated outgoing arc
            let exit = 2 * v + 1;
            let next = (0..net.adj[exit].len())
                .find(|&j| saturated(&net, exit, j) && !used.contains(&(exit, j)))
                .expect("flow conservation");
            used.insert((exit, next));
            node = net.adj[exit][next].to;
        }
        paths.push(path);
    }
    Ok(paths)
}

/// Maximum number of vertex-disjoint `s -> t` paths, capped at `cap`.
pub fn max_disjoint_count(g: &Graph, s: VertexId, t: VertexId, cap: usize) -> Result<usize, UsageError> {
    max_disjoint_paths(g, s, t, cap).map(|p| p.len())
}

/// All simple `s -> t` paths, or `None` once more than `limit` exist.
pub fn simple_paths(g: &Graph, s: VertexId, t: VertexId, limit: usize) -> Option<Vec<Vec<VertexId>>> {
    fn dfs(
        g: &Graph,
        t: VertexId,
        path: &mut Vec<VertexId>,
        on_path: &mut Vec<bool>,
        out: &mut Vec<Vec<VertexId>>,
        limit: usize,
    ) -> bool {
        let v = *path.last().expect("nonempty");
        if v == t {
            out.push(path.clone());
            return out.len() <= limit;
        }
        for &u in g.out_neighbors(v) {
            if on_path[u as usize] {
                continue;
            }
            on_path[u as usize] = true;
            path.push(u);
            let ok = dfs(g, t, path, on_path, out, limit);
            path.pop();
            on_path[u as usize] = false;
            if !ok {
                return false;
            }
        }
        true
    }
    let mut on_path = vec![false; g.vertex_count()];
    on_path[s as usize] = true;
    let mut out = Vec::new();
    dfs(g, t, &mut vec![s], &mut on_path, &mut out, limit).then_some(out)
}

/// Largest pairwise-disjoint subset of all simple paths, by exhaustive
/// search. `None` when there are more than `limit` simple paths.
pub fn exhaustive_disjoint_count(g: &Graph, s: VertexId, t: VertexId, limit: usize) -> Option<usize> {
    let paths = simple_paths(g, s, t, limit)?;
    let inner: Vec<HashSet<VertexId>> = paths.iter().map(|p| p[1..p.len() - 1].iter().copied().collect()).collect();
    let mut best = 0;
    for mask in 0u32..(1 << paths.len()) {
        let chosen: Vec<usize> = (0..paths.len()).filter(|i| mask >> i & 1 == 1).collect();
        if chosen.len() <= best {
            continue;
        }
        // a direct s->t edge has no inner vertices; it is one path only once
        let disjoint =
            chosen.iter().enumerate().all(|(a, &i)| chosen[a + 1..].iter().all(|&j| inner[i].is_disjoint(&inner[j])));
        if disjoint {
            best = chosen.len();
        }
    }
    Some(best)
}

/// Compares merged neighbor derivation with explicit per-query split-graphs
/// on sampled `(v, B)` probes. Also checks that `nexthops` and `prehops`
/// mirror each other.
pub fn neighbor_oracle_check(g: &Graph, st: &ResultState, batch: &Batch, samples: usize, seed: u64) -> VerifyReport {
    let n = g.vertex_count();
    let width = batch.len();
    let mut violations = Vec::new();
    if n == 0 || width == 0 {
        return VerifyReport::from_violations(violations);
    }

    for u in 0..n as VertexId {
        for v in st.nexthop_vertices(u) {
            if st.nexthops(u, v) != st.prehops(v, u) {
                violations.push(format!("nexthops[{u},{v}] != prehops[{v},{u}]"));
            }
        }
        for v in st.prehop_vertices(u) {
            if st.prehops(u, v) != st.nexthops(v, u) {
                violations.push(format!("prehops[{u},{v}] != nexthops[{v},{u}]"));
            }
        }
    }

    let mut split_graphs = Vec::with_capacity(width);
    let mut hot: Vec<u32> = Vec::new();
    for q in batch.queries() {
        let paths = match st.extract_paths(q) {
            Ok(p) => p,
            Err(e) => {
                violations.push(format!("query {}: {e}", q.id));
                Vec::new()
            }
        };
        for p in &paths {
            for &v in p {
                hot.push(v);
                hot.push(v + n as u32);
            }
        }
        match ExplicitSplitGraph::build(g, &paths, q.s, q.t) {
            Ok(sg) => split_graphs.push(Some(sg)),
            Err(e) => {
                violations.push(format!("query {}: {e}", q.id));
                split_graphs.push(None);
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let v = if !hot.is_empty() && rng.gen_bool(0.5) {
            hot[rng.gen_range(0..hot.len())]
        } else {
            rng.gen_range(0..2 * n as u32)
        };
        let v = SplitVertexId(v);
        let mut b = QuerySet::empty(width);
        while b.is_empty() {
            for q in 0..width {
                if rng.gen_bool(0.5) {
                    b.insert(q);
                }
            }
        }
        let outs = st.get_out_neighbors(g, v, &b);
        let ins = st.get_in_neighbors(g, v, &b);
        for q in b.iter() {
            let Some(sg) = &split_graphs[q] else { continue };
            let (want_out, want_in): (Vec<u32>, Vec<u32>) = if sg.contains(v) {
                (sg.out_neighbors(v).to_vec(), sg.in_neighbors(v).to_vec())
            } else {
                (Vec::new(), Vec::new())
            };
            let got_out: Vec<u32> = outs.entries.iter().filter(|e| e.1.contains(q)).map(|e| e.0.raw()).collect();
            let got_in: Vec<u32> = ins.entries.iter().filter(|e| e.1.contains(q)).map(|e| e.0.raw()).collect();
            if got_out != want_out {
                violations.push(format!(
                    "query {q}, vertex {}: out-neighbors {got_out:?}, split-graph has {want_out:?}",
                    v.raw()
                ));
            }
            if got_in != want_in {
                violations.push(format!(
                    "query {q}, vertex {}: in-neighbors {got_in:?}, split-graph has {want_in:?}",
                    v.raw()
                ));
            }
        }
    }
    VerifyReport::from_violations(violations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{crossing, diamond};

    #[test]
    fn verify_accepts_disjoint_pair() {
        let r = verify_disjoint(&diamond(), 0, 3, &[vec![0, 1, 3], vec![0, 2, 3]]);
        assert!(r.ok, "{:?}", r.violations);
    }

    #[test]
    fn verify_flags_shared_inner_vertex() {
        let r = verify_disjoint(&diamond(), 0, 3, &[vec![0, 1, 3], vec![0, 1, 3]]);
        assert!(!r.ok);
        assert!(r.violations.iter().any(|v| v.contains("shared inner vertex 1")));
    }

    #[test]
    fn verify_flags_wrong_endpoint() {
        let r = verify_disjoint(&diamond(), 0, 3, &[vec![0, 2], vec![0, 1, 3]]);
        assert!(!r.ok);
        assert!(r.violations.iter().any(|v| v.contains("wrong endpoints")));
    }

    #[test]
    fn verify_flags_missing_edge_and_repeat() {
        let r = verify_disjoint(&diamond(), 0, 3, &[vec![0, 3], vec![0, 1, 0, 1, 3]]);
        assert!(r.violations.iter().any(|v| v.contains("missing edge 0 -> 3")));
        assert!(r.violations.iter().any(|v| v.contains("not simple")));
    }

    #[test]
    fn counts_small_graphs() {
        assert_eq!(max_disjoint_count(&diamond(), 0, 3, 10).unwrap(), 2);
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]);
        assert_eq!(max_disjoint_count(&path, 0, 2, 10).unwrap(), 1);
        assert_eq!(max_disjoint_count(&crossing(), 0, 5, 10).unwrap(), 2);
        assert_eq!(max_disjoint_count(&crossing(), 1, 5, 10).unwrap(), 2);
        assert_eq!(max_disjoint_count(&diamond(), 0, 3, 1).unwrap(), 1);
    }

    #[test]
    fn exhaustive_agrees_on_fixtures() {
        assert_eq!(exhaustive_disjoint_count(&diamond(), 0, 3, 12), Some(2));
        assert_eq!(simple_paths(&crossing(), 0, 5, 12).unwrap().len(), 3);
        assert_eq!(exhaustive_disjoint_count(&crossing(), 0, 5, 12), Some(2));
        assert_eq!(exhaustive_disjoint_count(&crossing(), 0, 5, 2), None);
    }

    #[test]
    fn flow_paths_verify() {
        let g = crossing();
        let paths = max_disjoint_paths(&g, 0, 5, 5).unwrap();
        assert_eq!(paths.len(), 2);
        assert!(verify_disjoint(&g, 0, 5, &paths).ok);
    }

    #[test]
    fn direct_edge_counts_once() {
        let g = Graph::from_edges(3, [(0, 2), (0, 1), (1, 2)]);
        assert_eq!(max_disjoint_count(&g, 0, 2, 5).unwrap(), 2);
        assert_eq!(exhaustive_disjoint_count(&g, 0, 2, 12), Some(2));
    }

    #[test]
    fn guard_rejects_large_graphs() {
        let g = Graph::from_edges(ORACLE_LIMIT + 1, [(0, 1)]);
        assert!(matches!(max_disjoint_count(&g, 0, 1, 1), Err(UsageError::OracleGuard { .. })));
    }

    #[test]
    fn neighbor_check_on_states() {
        let g = crossing();
        let batch = Batch::new(2, [(0, 5), (1, 5)]);
        let empty = ResultState::new(&g, &batch);
        assert!(neighbor_oracle_check(&g, &empty, &batch, 200, 1).ok);

        let mid = ResultState::from_paths(&g, &batch, &[vec![vec![0, 1, 2, 5]], vec![vec![1, 4, 5]]]);
        let r = neighbor_oracle_check(&g, &mid, &batch, 500, 2);
        assert!(r.ok, "{:?}", r.violations);

        let mut bad = ResultState::from_paths(&g, &batch, &[vec![vec![0, 1, 2, 5]], vec![]]);
        bad.inject_prehop(2, 3, 0);
        let r = neighbor_oracle_check(&g, &bad, &batch, 500, 3);
        assert!(!r.ok);
    }
}
