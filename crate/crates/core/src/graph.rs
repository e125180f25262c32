//! Immutable directed graph and the split-space vertex encoding.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::LoadError;

/// Dense vertex id in `0..n`.
pub type VertexId = u32;

/// A vertex of a split-graph, encoded against the original vertex count `n`.
///
/// `raw < n` is the plain vertex `raw`, which doubles as its out-copy when the
/// vertex is split. `raw >= n` is the in-copy of `raw - n`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SplitVertexId(pub u32);

impl SplitVertexId {
    pub fn plain(v: VertexId) -> Self {
        SplitVertexId(v)
    }

    pub fn in_copy(v: VertexId, n: usize) -> Self {
        SplitVertexId(v + n as u32)
    }

    pub fn raw(self) -> u32 {
        self.0
    }

    pub fn is_in_copy(self, n: usize) -> bool {
        self.0 as usize >= n
    }

    /// The original vertex this split vertex stands for.
    pub fn proj(self, n: usize) -> VertexId {
        if self.is_in_copy(n) {
            self.0 - n as u32
        } else {
            self.0
        }
    }
}

impl fmt::Debug for SplitVertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Directed graph with sorted adjacency in both directions (CSR layout).
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    out_offsets: Vec<usize>,
    out_targets: Vec<VertexId>,
    in_offsets: Vec<usize>,
    in_sources: Vec<VertexId>,
}

impl Graph {
    /// Builds a graph on `n` vertices, dropping self-loops and duplicate
    /// edges. Panics if an endpoint is `>= n`.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Self {
        let mut list: Vec<(VertexId, VertexId)> = edges
            .into_iter()
            .inspect(|&(u, v)| assert!((u as usize) < n && (v as usize) < n, "edge {u}->{v} outside 0..{n}"))
            .filter(|(u, v)| u != v)
            .collect();
        list.sort_unstable();
        list.dedup();

        let (out_offsets, out_targets) = csr(n, list.iter().copied());
        let mut reversed: Vec<(VertexId, VertexId)> = list.iter().map(|&(u, v)| (v, u)).collect();
        reversed.sort_unstable();
        let (in_offsets, in_sources) = csr(n, reversed.into_iter());

        Graph { n, out_offsets, out_targets, in_offsets, in_sources }
    }

    /// Parses an edge list. Vertex count is one more than the largest id.
    pub fn parse(text: &str, undirected: bool) -> Result<Self, LoadError> {
        let mut edges = Vec::new();
        let mut max_id: Option<VertexId> = None;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let Some((u, v)) = parse_pair(line, line_no)? else {
                continue;
            };
            max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
            edges.push((u, v));
            if undirected {
                edges.push((v, u));
            }
        }
        let n = max_id.map_or(0, |m| m as usize + 1);
        Ok(Graph::from_edges(n, edges))
    }

    pub fn load(path: impl AsRef<Path>, undirected: bool) -> Result<Self, LoadError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })?;
        Graph::parse(&text, undirected)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn out_neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    pub fn in_neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_neighbors(v).len()
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.in_neighbors(v).len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.out_neighbors(u).binary_search(&v).is_ok()
    }

    /// All edges in ascending `(u, v)` order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.n as VertexId).flat_map(move |u| self.out_neighbors(u).iter().map(move |&v| (u, v)))
    }

    pub fn write_edge_list(&self, mut out: impl Write) -> std::io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph").field("n", &self.n).field("m", &self.edge_count()).finish()
    }
}

fn csr(n: usize, sorted: impl Iterator<Item = (VertexId, VertexId)>) -> (Vec<usize>, Vec<VertexId>) {
    let mut offsets = vec![0usize; n + 1];
    let mut targets = Vec::new();
    for (u, v) in sorted {
        offsets[u as usize + 1] += 1;
        targets.push(v);
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    (offsets, targets)
}

/// Parses one `"u v"` line. Blank and `#` lines yield `None`.
pub(crate) fn parse_pair(line: &str, line_no: usize) -> Result<Option<(u32, u32)>, LoadError> {
    let trimmed = line.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    let mut fields = trimmed.split_whitespace();
    let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
        return Err(LoadError::Parse { line: line_no, message: format!("expected two vertex ids, got {trimmed:?}") });
    };
    let parse = |field: &str| {
        field
            .parse::<u32>()
            .map_err(|_| LoadError::Parse { line: line_no, message: format!("invalid vertex id {field:?}") })
    };
    Ok(Some((parse(a)?, parse(b)?)))
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::Graph;

    /// `0->1, 0->2, 1->3, 2->3`
    pub fn diamond() -> Graph {
        Graph::from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
    }

    /// `s=0, t=5`: `0->1, 1->2, 2->5, 0->3, 3->2, 1->4, 4->5`
    pub fn crossing() -> Graph {
        Graph::from_edges(6, [(0, 1), (1, 2), (2, 5), (0, 3), (3, 2), (1, 4), (4, 5)])
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::fixtures::diamond;
    use super::*;

    #[test]
    fn duplicates_dropped() {
        let g = Graph::parse("0 1\n1 2\n0 1", false).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.out_neighbors(0), &[1]);
        assert_eq!(g.out_neighbors(1), &[2]);
        assert!(g.out_neighbors(2).is_empty());
    }

    #[test]
    fn self_loops_dropped() {
        let g = Graph::parse("0 0\n0 1", false).unwrap();
        assert_eq!(g.out_neighbors(0), &[1]);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn undirected_inserts_both_directions() {
        let g = Graph::parse("0 1", true).unwrap();
        assert_eq!(g.out_neighbors(0), &[1]);
        assert_eq!(g.out_neighbors(1), &[0]);
    }

    #[test]
    fn comments_and_gaps() {
        let g = Graph::parse("# header\n\n5 2\n", false).unwrap();
        assert_eq!(g.vertex_count(), 6);
        assert!(g.out_neighbors(0).is_empty());
        assert_eq!(g.in_neighbors(2), &[5]);
    }

    #[test]
    fn malformed_lines_name_the_line() {
        match Graph::parse("0 1\n1 -2\n", false) {
            Err(LoadError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match Graph::parse("0 1\n\n3\n", false) {
            Err(LoadError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn diamond_neighbors() {
        let g = diamond();
        assert_eq!(g.out_neighbors(0), &[1, 2]);
        assert!(g.out_neighbors(3).is_empty());
        assert_eq!(g.in_neighbors(3), &[1, 2]);
    }

    #[test]
    fn split_projection() {
        let n = 7;
        for v in 0..n as u32 {
            assert_eq!(SplitVertexId::plain(v).proj(n), v);
            assert_eq!(SplitVertexId::in_copy(v, n).proj(n), v);
            assert!(SplitVertexId::in_copy(v, n).is_in_copy(n));
            assert!(!SplitVertexId::plain(v).is_in_copy(n));
        }
    }

    proptest! {
        #[test]
        fn edge_list_round_trip(raw in proptest::collection::btree_set((0u32..20, 0u32..20), 0..60)) {
            let edges: Vec<_> = raw.into_iter().filter(|(u, v)| u != v).collect();
            let text: String = edges.iter().map(|(u, v)| format!("{u} {v}\n")).collect();
            let g = Graph::parse(&text, false).unwrap();
            let mut out = Vec::new();
            g.write_edge_list(&mut out).unwrap();
            prop_assert_eq!(String::from_utf8(out).unwrap(), text);
            for (u, v) in g.edges() {
                prop_assert!(g.in_neighbors(v).contains(&u));
            }
            let in_total: usize = (0..g.vertex_count() as u32).map(|v| g.in_degree(v)).sum();
            prop_assert_eq!(in_total, g.edge_count());
        }
    }
}
