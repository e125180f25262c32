use std::cell::OnceCell;

use crate::error::UsageError;
use crate::graph::{Graph, SplitVertexId, VertexId};

/// The split-graph of one query for a fixed set of disjoint paths, built
/// literally: path edges reversed, inner vertices split into an in-copy
/// and an out-copy joined by `out -> in`, other edges rerouted so they enter
/// in-copies and leave out-copies. Uses the same id encoding as the merged
/// state (`v` is the plain vertex or out-copy, `v + n` the in-copy).
#[derive(Clone, Debug)]
pub struct ExplicitSplitGraph {
    n: usize,
    inner: Vec<bool>,
    out_offsets: Vec<u32>,
    out_targets: Vec<u32>,
    // transposed lazily; the flow search only walks forward
    incoming: OnceCell<(Vec<u32>, Vec<u32>)>,
}

/// Compressed adjacency from an edge list over `rows` nodes, each row
/// sorted and deduplicated.
fn csr(rows: usize, edges: &[(u32, u32)]) -> (Vec<u32>, Vec<u32>) {
    let mut offsets = vec![0u32; rows + 1];
    for &(x, _) in edges {
        offsets[x as usize + 1] += 1;
    }
    for i in 0..rows {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut targets = vec![0u32; edges.len()];
    for &(x, y) in edges {
        targets[fill[x as usize] as usize] = y;
        fill[x as usize] += 1;
    }
    // sort and dedup each row in place, then compact
    let mut write = 0usize;
    let mut start = 0usize;
    for i in 0..rows {
        let end = offsets[i + 1] as usize;
        targets[start..end].sort_unstable();
        let row_start = write;
        for j in start..end {
            if write == row_start || targets[write - 1] != targets[j] {
                targets[write] = targets[j];
                write += 1;
            }
        }
        offsets[i] = row_start as u32;
        start = end;
    }
    offsets[rows] = write as u32;
    targets.truncate(write);
    (offsets, targets)
}

impl ExplicitSplitGraph {
    pub fn build(g: &Graph, paths: &[Vec<VertexId>], s: VertexId, t: VertexId) -> Result<Self, UsageError> {
        let n = g.vertex_count();
        let mut inner = vec![false; n];
        // successor on a path; s has several and keeps them in `s_next`
        let mut path_next = vec![u32::MAX; n];
        let mut s_next = Vec::new();
        for path in paths {
            if path.first() != Some(&s) || path.last() != Some(&t) || path.len() < 2 {
                return Err(UsageError::NotDisjoint(format!("path {path:?} does not run from {s} to {t}")));
            }
            for w in path.windows(2) {
                if !g.has_edge(w[0], w[1]) {
                    return Err(UsageError::NotDisjoint(format!("edge {}->{} not in graph", w[0], w[1])));
                }
                if w[0] == s {
                    if s_next.contains(&w[1]) {
                        return Err(UsageError::NotDisjoint(format!("edge {}->{} repeated", w[0], w[1])));
                    }
                    s_next.push(w[1]);
                } else {
                    path_next[w[0] as usize] = w[1];
                }
            }
            for &v in &path[1..path.len() - 1] {
                if v == s || v == t || inner[v as usize] {
                    return Err(UsageError::NotDisjoint(format!("vertex {v} repeated")));
                }
                inner[v as usize] = true;
            }
        }

        // path predecessor of every vertex after s; reversed edges leave
        // the in-copy (or t itself) towards it
        let mut path_prev = vec![u32::MAX; n];
        let mut t_prev = Vec::new();
        for path in paths {
            for w in path.windows(2) {
                if w[1] == t {
                    t_prev.push(w[0]);
                } else {
                    path_prev[w[1] as usize] = w[0];
                }
            }
        }
        let on_path = |x: VertexId, y: VertexId| {
            if x == s {
                s_next.contains(&y)
            } else {
                path_next[x as usize] == y
            }
        };

        let nu = n as u32;
        let mut out_offsets = Vec::with_capacity(2 * n + 1);
        let mut out_targets = Vec::with_capacity(g.edge_count() + n);
        out_offsets.push(0);
        for x in 0..nu {
            let start = out_targets.len();
            let outs = g.out_neighbors(x);
            // plain targets then in-copies; each run is ascending already
            for &y in outs {
                if !inner[y as usize] && !on_path(x, y) {
                    out_targets.push(y);
                }
            }
            for &y in outs {
                if inner[y as usize] && !on_path(x, y) {
                    out_targets.push(y + nu);
                }
            }
            if inner[x as usize] {
                out_targets.push(x + nu);
            }
            if x == t {
                out_targets.extend_from_slice(&t_prev);
            }
            if x == t || inner[x as usize] {
                let row = &mut out_targets[start..];
                row.sort_unstable();
                let mut keep = 0;
                for i in 0..row.len() {
                    if keep == 0 || row[keep - 1] != row[i] {
                        row[keep] = row[i];
                        keep += 1;
                    }
                }
                out_targets.truncate(start + keep);
            }
            out_offsets.push(out_targets.len() as u32);
        }
        for v in 0..n {
            if inner[v] {
                out_targets.push(path_prev[v]);
            }
            out_offsets.push(out_targets.len() as u32);
        }
        Ok(ExplicitSplitGraph { n, inner, out_offsets, out_targets, incoming: OnceCell::new() })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Whether the split vertex is a node of this split-graph (in-copies
    /// exist only for inner vertices).
    pub fn contains(&self, v: SplitVertexId) -> bool {
        let raw = v.raw() as usize;
        raw < self.n || (raw < 2 * self.n && self.inner[raw - self.n])
    }

    pub fn out_neighbors(&self, v: SplitVertexId) -> &[u32] {
        let i = v.raw() as usize;
        &self.out_targets[self.out_offsets[i] as usize..self.out_offsets[i + 1] as usize]
    }

    pub fn in_neighbors(&self, v: SplitVertexId) -> &[u32] {
        let (offsets, sources) = self.incoming.get_or_init(|| {
            let reversed: Vec<(u32, u32)> = self.edges().into_iter().map(|(x, y)| (y, x)).collect();
            csr(2 * self.n, &reversed)
        });
        let i = v.raw() as usize;
        &sources[offsets[i] as usize..offsets[i + 1] as usize]
    }

    /// All edges, ascending.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        (0..2 * self.n as u32).flat_map(|x| self.out_neighbors(SplitVertexId(x)).iter().map(move |&y| (x, y))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::diamond;

    #[test]
    fn empty_path_set_is_the_graph() {
        let g = diamond();
        let sg = ExplicitSplitGraph::build(&g, &[], 0, 3).unwrap();
        assert_eq!(sg.edges(), g.edges().collect::<Vec<_>>());
    }

    #[test]
    fn diamond_with_one_path() {
        let g = diamond();
        let sg = ExplicitSplitGraph::build(&g, &[vec![0, 1, 3]], 0, 3).unwrap();
        // 1_in = 5
        assert_eq!(sg.edges(), vec![(0, 2), (1, 5), (2, 3), (3, 1), (5, 0)]);
        assert!(sg.contains(SplitVertexId(5)));
        assert!(!sg.contains(SplitVertexId(6)));
    }

    #[test]
    fn rejects_overlapping_paths() {
        let g = diamond();
        assert!(ExplicitSplitGraph::build(&g, &[vec![0, 1, 3], vec![0, 1, 3]], 0, 3).is_err());
        assert!(ExplicitSplitGraph::build(&g, &[vec![0, 3]], 0, 3).is_err());
    }
}
