//! Seeded synthetic graphs for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, VertexId};

/// Directed G(n, p) without self-loops.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        for v in 0..n as VertexId {
            if u != v && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Random DAG: edges only from lower to higher ids, each with probability `p`.
pub fn dag(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        for v in u + 1..n as VertexId {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Preferential-attachment graph: each new vertex links to `per_vertex`
/// distinct earlier vertices chosen proportionally to degree. Every link is
/// stored in both directions, so the edge count is about
/// `2 * n * per_vertex`.
pub fn preferential_attachment(n: usize, per_vertex: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let core = per_vertex + 1;
    let mut edges = Vec::with_capacity(2 * n * per_vertex);
    // endpoint multiset: sampling from it is degree-proportional
    let mut ends: Vec<VertexId> = Vec::with_capacity(2 * n * per_vertex);
    for u in 0..core.min(n) as VertexId {
        for v in 0..u {
            edges.push((u, v));
            edges.push((v, u));
            ends.push(u);
            ends.push(v);
        }
    }
    let mut picked = Vec::with_capacity(per_vertex);
    for u in core as VertexId..n as VertexId {
        picked.clear();
        while picked.len() < per_vertex {
            let v = *ends.choose(&mut rng).expect("core is nonempty");
            if !picked.contains(&v) {
                picked.push(v);
            }
        }
        for &v in &picked {
            edges.push((u, v));
            edges.push((v, u));
            ends.push(u);
            ends.push(v);
        }
    }
    Graph::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generators_are_deterministic() {
        assert_eq!(gnp(20, 0.2, 3), gnp(20, 0.2, 3));
        assert_eq!(dag(20, 0.2, 3), dag(20, 0.2, 3));
        let a = preferential_attachment(200, 3, 9);
        assert_eq!(a, preferential_attachment(200, 3, 9));
        assert!(a.edges().all(|(u, v)| u < 200 && v < 200 && a.has_edge(v, u)));
    }

    #[test]
    fn dag_edges_point_upward() {
        assert!(dag(30, 0.3, 1).edges().all(|(u, v)| u < v));
    }

    #[test]
    fn attachment_size() {
        let g = preferential_attachment(1000, 5, 1);
        let m = g.edge_count();
        assert!((9000..=10_100).contains(&m), "m = {m}");
    }
}
