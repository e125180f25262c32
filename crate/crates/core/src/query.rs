//! kDP queries and batches.

use std::fs;
use std::path::Path;

use crate::error::LoadError;
use crate::graph::{parse_pair, Graph, VertexId};
use crate::queryset::QuerySet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Query {
    pub id: usize,
    pub s: VertexId,
    pub t: VertexId,
}

/// A set of queries sharing one `k`. Ids are dense and follow insertion order;
/// repeated `(s, t)` pairs are distinct queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Batch {
    queries: Vec<Query>,
    k: usize,
}

impl Batch {
    /// Panics when `k == 0` or a pair has `s == t`. Use [`Batch::validated`]
    /// for untrusted input.
    pub fn new(k: usize, pairs: impl IntoIterator<Item = (VertexId, VertexId)>) -> Self {
        assert!(k >= 1, "k must be positive");
        let queries = pairs
            .into_iter()
            .enumerate()
            .map(|(id, (s, t))| {
                assert_ne!(s, t, "query {id} has s == t");
                Query { id, s, t }
            })
            .collect();
        Batch { queries, k }
    }

    /// Checks every pair against `g`; errors name the 1-based pair index.
    pub fn validated(g: &Graph, k: usize, pairs: &[(VertexId, VertexId)]) -> Result<Self, LoadError> {
        for (i, &(s, t)) in pairs.iter().enumerate() {
            check_pair(g, s, t, i + 1)?;
        }
        if k == 0 {
            return Err(LoadError::Invalid { line: 0, message: "k must be at least 1".into() });
        }
        Ok(Batch::new(k, pairs.iter().copied()))
    }

    pub fn queries(&self) -> &[Query] {
        &self.queries
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn query(&self, id: usize) -> Query {
        self.queries[id]
    }

    pub fn empty_set(&self) -> QuerySet {
        QuerySet::empty(self.len())
    }

    pub fn all(&self) -> QuerySet {
        QuerySet::full(self.len())
    }

    /// The first `len` queries as a new batch.
    pub fn prefix(&self, len: usize) -> Batch {
        self.slice(0, len)
    }

    /// Queries `start..start+len`, renumbered from zero.
    pub fn slice(&self, start: usize, len: usize) -> Batch {
        let end = (start + len).min(self.len());
        Batch::new(self.k, self.queries[start.min(end)..end].iter().map(|q| (q.s, q.t)))
    }

    pub fn with_k(&self, k: usize) -> Batch {
        Batch::new(k, self.pairs())
    }

    pub fn pairs(&self) -> Vec<(VertexId, VertexId)> {
        self.queries.iter().map(|q| (q.s, q.t)).collect()
    }
}

fn check_pair(g: &Graph, s: VertexId, t: VertexId, line: usize) -> Result<(), LoadError> {
    let n = g.vertex_count();
    if s == t {
        return Err(LoadError::Invalid { line, message: format!("source and target are both {s}") });
    }
    if s as usize >= n || t as usize >= n {
        return Err(LoadError::Invalid {
            line,
            message: format!("vertex id out of range for graph with {n} vertices"),
        });
    }
    Ok(())
}

/// Parses `"s t"` lines; ids are assigned in file order.
pub fn parse_queries(text: &str, g: &Graph) -> Result<Vec<(VertexId, VertexId)>, LoadError> {
    let mut pairs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if let Some((s, t)) = parse_pair(line, idx + 1)? {
            check_pair(g, s, t, idx + 1)?;
            pairs.push((s, t));
        }
    }
    Ok(pairs)
}

pub fn load_queries(path: impl AsRef<Path>, g: &Graph, k: usize) -> Result<Batch, LoadError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })?;
    let pairs = parse_queries(&text, g)?;
    Batch::validated(g, k, &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::diamond;

    #[test]
    fn duplicate_pairs_are_distinct_queries() {
        let g = diamond();
        let pairs = parse_queries("0 3\n0 3", &g).unwrap();
        let b = Batch::validated(&g, 2, &pairs).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b.query(0), Query { id: 0, s: 0, t: 3 });
        assert_eq!(b.query(1), Query { id: 1, s: 0, t: 3 });
    }

    #[test]
    fn rejects_equal_endpoints() {
        match parse_queries("0 0", &diamond()) {
            Err(LoadError::Invalid { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_out_of_range() {
        match parse_queries("# c\n0 99", &diamond()) {
            Err(LoadError::Invalid { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn slices_renumber() {
        let b = Batch::new(2, [(0, 3), (1, 3), (2, 3)]);
        let tail = b.slice(1, 5);
        assert_eq!(tail.len(), 2);
        assert_eq!(tail.query(0), Query { id: 0, s: 1, t: 3 });
        assert_eq!(b.prefix(1).pairs(), vec![(0, 3)]);
    }
}
