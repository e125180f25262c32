//! The merged split-graph, kept implicitly as per-query result sets.
//!
//! For every query `q` the current disjoint paths are stored edge by edge:
//! `nexthops[u][v]` holds the queries whose paths use `u -> v` and
//! `prehops[v][u]` mirrors it. Together with the per-vertex sets `is_pinner`,
//! `is_s` and `is_t` this is enough to derive the split-graph neighbors of any
//! split vertex for any subset of queries at once, without materializing a
//! split-graph per query.

use std::collections::HashSet;

use crate::error::ConsistencyError;
use crate::graph::{Graph, SplitVertexId, VertexId};
use crate::query::{Batch, Query};
use crate::queryset::{words, QuerySet, SetTable};

type HopList = Vec<(VertexId, QuerySet)>;

/// Neighbor entries `(split vertex, queries)` in ascending split id order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct NeighborAnswer {
    pub entries: Vec<(SplitVertexId, QuerySet)>,
}

/// Reusable output buffer for the allocation-free neighbor derivation used
/// by the search loops.
pub(crate) struct NeighborBuf {
    stride: usize,
    ids: Vec<u32>,
    data: Vec<u64>,
    later_ids: Vec<u32>,
    later_data: Vec<u64>,
}

impl NeighborBuf {
    pub fn new(width: usize) -> Self {
        NeighborBuf {
            stride: crate::queryset::words_for(width),
            ids: Vec::new(),
            data: Vec::new(),
            later_ids: Vec::new(),
            later_data: Vec::new(),
        }
    }

    /// Empties the buffer; following rows hold `stride` words each.
    fn clear(&mut self, stride: usize) {
        self.stride = stride;
        self.ids.clear();
        self.data.clear();
        self.later_ids.clear();
        self.later_data.clear();
    }

    /// Appends a row built by `fill`; dropped again if it ends up empty.
    #[inline]
    fn push(&mut self, id: u32, fill: impl FnOnce(&mut [u64])) {
        push_row(&mut self.ids, &mut self.data, self.stride, id, fill);
    }

    #[inline]
    fn push_later(&mut self, id: u32, fill: impl FnOnce(&mut [u64])) {
        push_row(&mut self.later_ids, &mut self.later_data, self.stride, id, fill);
    }

    /// Moves the deferred in-copy rows behind the plain rows. Both runs are
    /// already sorted and every in-copy id exceeds every plain id.
    fn finish(&mut self) {
        self.ids.append(&mut self.later_ids);
        self.data.append(&mut self.later_data);
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    #[inline]
    pub fn get(&self, i: usize) -> (u32, &[u64]) {
        (self.ids[i], &self.data[i * self.stride..(i + 1) * self.stride])
    }

    fn to_answer(&self, width: usize) -> NeighborAnswer {
        NeighborAnswer {
            entries: (0..self.len())
                .map(|i| {
                    let (id, row) = self.get(i);
                    (SplitVertexId(id), QuerySet::from_words(width, row))
                })
                .collect(),
        }
    }
}

#[inline]
fn push_row(ids: &mut Vec<u32>, data: &mut Vec<u64>, stride: usize, id: u32, fill: impl FnOnce(&mut [u64])) {
    let start = data.len();
    data.resize(start + stride, 0);
    fill(&mut data[start..]);
    if words::is_empty(&data[start..]) {
        data.truncate(start);
    } else if ids.last() == Some(&id) {
        // same target reached twice (possible only around t); merge rows
        let (prev, cur) = data.split_at_mut(start);
        words::or_into(&mut prev[start - stride..], cur);
        data.truncate(start);
    } else {
        ids.push(id);
    }
}

#[inline]
fn find(list: &HopList, key: VertexId) -> Option<&QuerySet> {
    list.binary_search_by_key(&key, |e| e.0).ok().map(|i| &list[i].1)
}

fn entry_mut(list: &mut HopList, key: VertexId, width: usize) -> &mut QuerySet {
    let i = match list.binary_search_by_key(&key, |e| e.0) {
        Ok(i) => i,
        Err(i) => {
            list.insert(i, (key, QuerySet::empty(width)));
            i
        }
    };
    &mut list[i].1
}

fn prune(list: &mut HopList, key: VertexId) {
    if let Ok(i) = list.binary_search_by_key(&key, |e| e.0) {
        if list[i].1.is_empty() {
            list.remove(i);
        }
    }
}

/// Current result sets of every query in a batch.
pub struct ResultState {
    n: usize,
    width: usize,
    nexthops: Vec<HopList>,
    prehops: Vec<HopList>,
    is_pinner: SetTable,
    is_s: SetTable,
    is_t: SetTable,
    endpoints: Vec<(VertexId, VertexId)>,
    edge_counts: Vec<usize>,
}

impl ResultState {
    /// Empty result sets; `is_s` / `is_t` filled from the batch.
    pub fn new(g: &Graph, batch: &Batch) -> Self {
        let n = g.vertex_count();
        let width = batch.len();
        let mut is_s = SetTable::new(n, width);
        let mut is_t = SetTable::new(n, width);
        for q in batch.queries() {
            is_s.row_mut(q.s as usize)[q.id / 64] |= 1 << (q.id % 64);
            is_t.row_mut(q.t as usize)[q.id / 64] |= 1 << (q.id % 64);
        }
        ResultState {
            n,
            width,
            nexthops: vec![Vec::new(); n],
            prehops: vec![Vec::new(); n],
            is_pinner: SetTable::new(n, width),
            is_s,
            is_t,
            endpoints: batch.queries().iter().map(|q| (q.s, q.t)).collect(),
            edge_counts: vec![0; width],
        }
    }

    /// A state holding the given disjoint paths, one list per query id.
    /// Paths are inserted edge by edge, so they must already be disjoint.
    pub fn from_paths(g: &Graph, batch: &Batch, paths: &[Vec<Vec<VertexId>>]) -> Self {
        let mut st = ResultState::new(g, batch);
        for (q, list) in paths.iter().enumerate() {
            for path in list {
                for w in path.windows(2) {
                    let set = QuerySet::singleton(st.width, q);
                    st.add_edge(w[0], w[1], &set);
                }
            }
        }
        let all: Vec<VertexId> = (0..st.n as VertexId).collect();
        st.refresh_pinner(&all, &QuerySet::full(st.width));
        st
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn nexthops(&self, u: VertexId, v: VertexId) -> QuerySet {
        find(&self.nexthops[u as usize], v).cloned().unwrap_or_else(|| QuerySet::empty(self.width))
    }

    pub fn prehops(&self, u: VertexId, v: VertexId) -> QuerySet {
        find(&self.prehops[u as usize], v).cloned().unwrap_or_else(|| QuerySet::empty(self.width))
    }

    /// Vertices `v` with a nonempty `nexthops[u][v]`, ascending.
    pub fn nexthop_vertices(&self, u: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.nexthops[u as usize].iter().map(|e| e.0)
    }

    /// Vertices `v` with a nonempty `prehops[u][v]`, ascending.
    pub fn prehop_vertices(&self, u: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.prehops[u as usize].iter().map(|e| e.0)
    }

    pub fn is_pinner(&self, v: VertexId) -> QuerySet {
        QuerySet::from_words(self.width, self.is_pinner.row(v as usize))
    }

    pub fn is_s(&self, v: VertexId) -> QuerySet {
        QuerySet::from_words(self.width, self.is_s.row(v as usize))
    }

    pub fn is_t(&self, v: VertexId) -> QuerySet {
        QuerySet::from_words(self.width, self.is_t.row(v as usize))
    }

    /// The edges currently recorded for query `q`, ascending.
    pub fn query_edges(&self, q: usize) -> Vec<(VertexId, VertexId)> {
        let mut edges = Vec::new();
        for (u, list) in self.nexthops.iter().enumerate() {
            for (v, set) in list {
                if set.contains(q) {
                    edges.push((u as VertexId, *v));
                }
            }
        }
        edges
    }

    /// Out-neighbors of split vertex `v` for the queries in `b`.
    pub fn get_out_neighbors(&self, g: &Graph, v: SplitVertexId, b: &QuerySet) -> NeighborAnswer {
        let mut buf = NeighborBuf::new(self.width);
        self.out_neighbors_into(g, v.raw(), b.words(), 0, &mut buf);
        buf.to_answer(self.width)
    }

    /// In-neighbors of split vertex `v` for the queries in `b`.
    pub fn get_in_neighbors(&self, g: &Graph, v: SplitVertexId, b: &QuerySet) -> NeighborAnswer {
        let mut buf = NeighborBuf::new(self.width);
        self.in_neighbors_into(g, v.raw(), b.words(), 0, &mut buf);
        buf.to_answer(self.width)
    }

    pub(crate) fn out_neighbors_into(&self, g: &Graph, v: u32, b: &[u64], lo: usize, buf: &mut NeighborBuf) {
        buf.clear(b.len());
        let hi = lo + b.len();
        let n = self.n as u32;
        if v >= n {
            // in-copy: only the reversed path edge back to the prehop
            let p = (v - n) as usize;
            let pin = &self.is_pinner.row(p)[lo..hi];
            for (u, set) in &self.prehops[p] {
                buf.push(*u, |dst| {
                    dst.copy_from_slice(b);
                    words::and_into(dst, pin);
                    words::and_into(dst, &set.words()[lo..hi]);
                });
            }
            return;
        }

        let p = v as usize;
        let nh = &self.nexthops[p];
        // t's own reversed path edges; a query never searches past its target
        // but the split-graph still has them
        let t_rows = &self.is_t.row(p)[lo..hi];
        let reversed: &[(VertexId, QuerySet)] = if words::intersects(b, t_rows) { &self.prehops[p] } else { &[] };

        let outs = g.out_neighbors(v);
        let (mut oi, mut ni, mut ri) = (0, 0, 0);
        while oi < outs.len() || ri < reversed.len() {
            let next_out = outs.get(oi).copied().unwrap_or(u32::MAX);
            let next_rev = reversed.get(ri).map_or(u32::MAX, |e| e.0);
            let u = next_out.min(next_rev);
            let from_out = next_out == u;
            let rev_set = if next_rev == u {
                ri += 1;
                Some(&reversed[ri - 1].1)
            } else {
                None
            };

            if from_out {
                oi += 1;
                while ni < nh.len() && nh[ni].0 < u {
                    ni += 1;
                }
                let saturated = nh.get(ni).filter(|e| e.0 == u).map(|e| &e.1.words()[lo..hi]);
                let pin_u = self.is_pinner.get(u as usize).map(|r| &r[lo..hi]);
                if let Some(pin_u) = pin_u {
                    buf.push_later(u + n, |dst| {
                        dst.copy_from_slice(b);
                        if let Some(s) = saturated {
                            words::andnot_into(dst, s);
                        }
                        words::and_into(dst, pin_u);
                    });
                }
                buf.push(u, |dst| {
                    dst.copy_from_slice(b);
                    if let Some(s) = saturated {
                        words::andnot_into(dst, s);
                    }
                    if let Some(pin_u) = pin_u {
                        words::andnot_into(dst, pin_u);
                    }
                    if let Some(r) = rev_set {
                        let base = dst.to_vec();
                        reversed_into(dst, &base, b, t_rows, &r.words()[lo..hi]);
                    }
                });
            } else if let Some(r) = rev_set {
                buf.push(u, |dst| reversed_into(dst, &vec![0; dst.len()], b, t_rows, &r.words()[lo..hi]));
            }
        }

        // internal edge out-copy -> in-copy, placed in id order among the
        // deferred in-copy rows
        let own = v + n;
        let pin_v = &self.is_pinner.row(p)[lo..hi];
        let pos = buf.later_ids.partition_point(|&id| id < own);
        if words::intersects(b, pin_v) {
            let stride = buf.stride;
            let mut row = b.to_vec();
            words::and_into(&mut row, pin_v);
            buf.later_ids.insert(pos, own);
            let at = pos * stride;
            buf.later_data.splice(at..at, row);
        }
        buf.finish();
    }

    pub(crate) fn in_neighbors_into(&self, g: &Graph, v: u32, b: &[u64], lo: usize, buf: &mut NeighborBuf) {
        buf.clear(b.len());
        let hi = lo + b.len();
        let n = self.n as u32;
        if v >= n {
            // in-copy: non-path in-edges plus the internal edge from the out-copy
            let p = v - n;
            let pin = &self.is_pinner.row(p as usize)[lo..hi];
            if !words::intersects(b, pin) {
                return;
            }
            let ph = &self.prehops[p as usize];
            let ins = g.in_neighbors(p);
            let mut pi = 0;
            let mut own_done = false;
            for &x in ins {
                if !own_done && p < x {
                    own_done = true;
                    push_own(buf, p, b, pin);
                }
                while pi < ph.len() && ph[pi].0 < x {
                    pi += 1;
                }
                let path_edge = ph.get(pi).filter(|e| e.0 == x).map(|e| &e.1.words()[lo..hi]);
                buf.push(x, |dst| {
                    dst.copy_from_slice(b);
                    words::and_into(dst, pin);
                    if let Some(s) = path_edge {
                        words::andnot_into(dst, s);
                    }
                });
            }
            if !own_done {
                push_own(buf, p, b, pin);
            }
            return;
        }

        let p = v as usize;
        let pin_p = &self.is_pinner.row(p)[lo..hi];
        let ph = &self.prehops[p];
        let nh = &self.nexthops[p];
        let ins = g.in_neighbors(v);
        let (mut xi, mut yi, mut pi) = (0, 0, 0);
        while xi < ins.len() || yi < nh.len() {
            let next_in = ins.get(xi).copied().unwrap_or(u32::MAX);
            let next_nh = nh.get(yi).map_or(u32::MAX, |e| e.0);
            let u = next_in.min(next_nh);
            let from_in = next_in == u;
            let path_out = if next_nh == u {
                yi += 1;
                Some(&nh[yi - 1].1.words()[lo..hi])
            } else {
                None
            };
            if from_in {
                xi += 1;
            }
            let pin_u = &self.is_pinner.row(u as usize)[lo..hi];
            if let Some(out_set) = path_out {
                // reversed path edge p -> u arrives from u's in-copy (or u if unsplit)
                buf.push_later(u + n, |dst| {
                    dst.copy_from_slice(b);
                    words::and_into(dst, out_set);
                    words::and_into(dst, pin_u);
                });
            }
            let path_in = if from_in {
                while pi < ph.len() && ph[pi].0 < u {
                    pi += 1;
                }
                ph.get(pi).filter(|e| e.0 == u).map(|e| &e.1.words()[lo..hi])
            } else {
                None
            };
            buf.push(u, |dst| {
                if from_in {
                    // non-path edge u -> p, only where p is not an out-copy
                    dst.copy_from_slice(b);
                    words::andnot_into(dst, pin_p);
                    if let Some(s) = path_in {
                        words::andnot_into(dst, s);
                    }
                }
                if let Some(out_set) = path_out {
                    for ((d, &bw), (&ow, &pw)) in dst.iter_mut().zip(b).zip(out_set.iter().zip(pin_u)) {
                        *d |= bw & ow & !pw;
                    }
                }
            });
        }
        buf.finish();
    }

    /// Queries of `b` for which `x -> y` is an edge of their split-graph.
    ///
    /// Evaluated straight from the edge classification rather than through
    /// the neighbor derivation, so the two can check each other.
    pub fn split_edge_queries(&self, g: &Graph, x: SplitVertexId, y: SplitVertexId, b: &QuerySet) -> QuerySet {
        let n = self.n;
        let (px, py) = (x.proj(n), y.proj(n));
        let mut out = b.clone();
        let w = out.words_mut();
        match (x.is_in_copy(n), y.is_in_copy(n)) {
            (true, false) if px != py => {
                // reversed path edge py -> px, leaving px's in-copy
                words::and_into(w, self.is_pinner.row(px as usize));
                match find(&self.prehops[px as usize], py) {
                    Some(s) => words::and_into(w, s.words()),
                    None => w.fill(0),
                }
            }
            (false, true) if px == py => words::and_into(w, self.is_pinner.row(px as usize)),
            (false, true) => {
                if !g.has_edge(px, py) {
                    w.fill(0);
                }
                if let Some(s) = find(&self.nexthops[px as usize], py) {
                    words::andnot_into(w, s.words());
                }
                words::and_into(w, self.is_pinner.row(py as usize));
            }
            (false, false) if px != py => {
                let mut forward = b.clone();
                let fw = forward.words_mut();
                if !g.has_edge(px, py) {
                    fw.fill(0);
                }
                if let Some(s) = find(&self.nexthops[px as usize], py) {
                    words::andnot_into(fw, s.words());
                }
                words::andnot_into(fw, self.is_pinner.row(py as usize));
                // t's reversed path edges
                words::and_into(w, self.is_t.row(px as usize));
                match find(&self.prehops[px as usize], py) {
                    Some(s) => words::and_into(w, s.words()),
                    None => w.fill(0),
                }
                words::or_into(w, fw);
            }
            _ => w.fill(0),
        }
        out
    }

    /// Applies an augmenting path found for the queries in `b`.
    ///
    /// Each step `u -> v` between distinct original vertices either cancels
    /// an existing path edge `v -> u` or records `u -> v`, per query. Steps
    /// inside one split vertex are skipped. Flow cycles left behind by the
    /// cancellation are removed so that each query's edges stay a union of
    /// disjoint s-t paths. Nothing is modified when the path is not valid
    /// for every query in `b`.
    pub fn apply_augmenting_path(
        &mut self,
        g: &Graph,
        path: &[SplitVertexId],
        b: &QuerySet,
    ) -> Result<(), ConsistencyError> {
        let n = self.n;
        let (first, last) = match (path.first(), path.last()) {
            (Some(f), Some(l)) => (*f, *l),
            _ => return Err(ConsistencyError::EmptyPath),
        };
        for q in b.iter() {
            let (s, t) = self.endpoints[q];
            if first != SplitVertexId::plain(s) || last != SplitVertexId::plain(t) {
                return Err(ConsistencyError::WrongEndpoints { query: q });
            }
        }
        for step in path.windows(2) {
            let ok = self.split_edge_queries(g, step[0], step[1], b);
            if ok != *b {
                return Err(ConsistencyError::InvalidStep {
                    from: step[0].raw(),
                    to: step[1].raw(),
                    queries: b.difference(&ok).expect("same width").iter().collect(),
                });
            }
        }

        let mut touched = Vec::with_capacity(path.len());
        let mut cancelled = QuerySet::empty(self.width);
        let mut added = Vec::new();
        for step in path.windows(2) {
            let (u, v) = (step[0].proj(n), step[1].proj(n));
            if u == v {
                continue;
            }
            let cancel = self.add_edge(u, v, b);
            cancelled.union_with(&cancel).expect("same width");
            added.push((u, v, b.difference(&cancel).expect("same width")));
            touched.push(u);
            touched.push(v);
        }
        self.refresh_pinner(&touched, b);

        for q in cancelled.iter() {
            self.remove_cycles(q, &added)?;
        }
        Ok(())
    }

    /// Records `u -> v` for `b`, cancelling the reverse edge where present.
    /// Returns the cancelled queries.
    fn add_edge(&mut self, u: VertexId, v: VertexId, b: &QuerySet) -> QuerySet {
        let width = self.width;
        let (ui, vi) = (u as usize, v as usize);

        let cancel = match find(&self.prehops[ui], v) {
            Some(s) => s.intersection(b).expect("same width"),
            None => QuerySet::empty(width),
        };
        let fresh = b.difference(&cancel).expect("same width");

        if !cancel.is_empty() {
            entry_mut(&mut self.prehops[ui], v, width).subtract(&cancel).expect("same width");
            prune(&mut self.prehops[ui], v);
            entry_mut(&mut self.nexthops[vi], u, width).subtract(&cancel).expect("same width");
            prune(&mut self.nexthops[vi], u);
        }
        if !fresh.is_empty() {
            entry_mut(&mut self.prehops[vi], u, width).union_with(&fresh).expect("same width");
            entry_mut(&mut self.nexthops[ui], v, width).union_with(&fresh).expect("same width");
        }
        for q in fresh.iter() {
            self.edge_counts[q] += 1;
        }
        for q in cancel.iter() {
            self.edge_counts[q] -= 1;
        }
        cancel
    }

    fn remove_edge(&mut self, u: VertexId, v: VertexId, q: usize) {
        let width = self.width;
        entry_mut(&mut self.nexthops[u as usize], v, width).remove(q);
        prune(&mut self.nexthops[u as usize], v);
        entry_mut(&mut self.prehops[v as usize], u, width).remove(q);
        prune(&mut self.prehops[v as usize], u);
        self.edge_counts[q] -= 1;
    }

    /// Recomputes the `is_pinner` bits of the queries in `b` at `vertices`;
    /// other queries' bits are left alone.
    fn refresh_pinner(&mut self, vertices: &[VertexId], b: &QuerySet) {
        let bw = b.words();
        let Some(lo) = bw.iter().position(|&w| w != 0) else {
            return;
        };
        let hi = bw.iter().rposition(|&w| w != 0).map_or(lo, |i| i + 1);
        let mut row = vec![0u64; hi - lo];
        for &v in vertices {
            let v = v as usize;
            row.fill(0);
            for (_, set) in &self.nexthops[v] {
                words::or_into(&mut row, &set.words()[lo..hi]);
            }
            words::andnot_into(&mut row, &self.is_s.row(v)[lo..hi]);
            words::andnot_into(&mut row, &self.is_t.row(v)[lo..hi]);
            let pin = &mut self.is_pinner.row_mut(v)[lo..hi];
            for ((p, &r), &m) in pin.iter_mut().zip(&row).zip(&bw[lo..hi]) {
                *p = (*p & !m) | (r & m);
            }
        }
    }

    fn next_hop(&self, q: usize, v: VertexId) -> Result<VertexId, ConsistencyError> {
        let mut hops = self.nexthops[v as usize].iter().filter(|e| e.1.contains(q));
        match (hops.next(), hops.next()) {
            (Some(e), None) => Ok(e.0),
            _ => Err(ConsistencyError::BrokenChain { query: q, vertex: v }),
        }
    }

    /// Drops any cycle of `q`'s edges that is not reachable from its source.
    /// A new cycle must contain one of the edges just added.
    fn remove_cycles(&mut self, q: usize, added: &[(VertexId, VertexId, QuerySet)]) -> Result<(), ConsistencyError> {
        let (s, t) = self.endpoints[q];
        let mut on_paths = HashSet::new();
        let mut walked = 0;
        let starts: Vec<VertexId> = self.nexthops[s as usize].iter().filter(|e| e.1.contains(q)).map(|e| e.0).collect();
        for first in starts {
            walked += 1;
            let mut cur = first;
            while cur != t {
                if walked > 2 * self.n || !on_paths.insert(cur) {
                    return Err(ConsistencyError::BrokenChain { query: q, vertex: cur });
                }
                cur = self.next_hop(q, cur)?;
                walked += 1;
            }
        }
        if walked == self.edge_counts[q] {
            return Ok(());
        }

        let mut touched = Vec::new();
        for (u, _, set) in added {
            if !set.contains(q) || on_paths.contains(u) || *u == s {
                continue;
            }
            // still present and off every path: follow the cycle back to u
            let mut cur = *u;
            while let Ok(next) = self.next_hop(q, cur) {
                self.remove_edge(cur, next, q);
                touched.push(cur);
                cur = next;
                if cur == *u {
                    break;
                }
            }
        }
        self.refresh_pinner(&touched, &QuerySet::singleton(self.width, q));
        if walked != self.edge_counts[q] {
            return Err(ConsistencyError::BrokenChain { query: q, vertex: s });
        }
        Ok(())
    }

    /// The disjoint paths currently held for query `q`, ordered by first hop.
    pub fn extract_paths(&self, q: &Query) -> Result<Vec<Vec<VertexId>>, ConsistencyError> {
        let mut paths = Vec::new();
        for (first, set) in &self.nexthops[q.s as usize] {
            if !set.contains(q.id) {
                continue;
            }
            let mut path = vec![q.s, *first];
            let mut cur = *first;
            while cur != q.t {
                if path.len() > self.n {
                    return Err(ConsistencyError::BrokenChain { query: q.id, vertex: cur });
                }
                cur = self.next_hop(q.id, cur)?;
                path.push(cur);
            }
            paths.push(path);
        }
        Ok(paths)
    }

    /// Number of paths currently held for query `q`.
    pub fn path_count(&self, q: &Query) -> usize {
        self.nexthops[q.s as usize].iter().filter(|e| e.1.contains(q.id)).count()
    }

    /// Adds `q` to `prehops[u][v]` without touching anything else. Only for
    /// exercising the consistency checks.
    #[doc(hidden)]
    pub fn inject_prehop(&mut self, u: VertexId, v: VertexId, q: usize) {
        entry_mut(&mut self.prehops[u as usize], v, self.width).insert(q);
    }
}

#[inline]
fn reversed_into(dst: &mut [u64], base: &[u64], b: &[u64], t_rows: &[u64], set: &[u64]) {
    for (i, d) in dst.iter_mut().enumerate() {
        *d = base[i] | (b[i] & t_rows[i] & set[i]);
    }
}

#[inline]
fn push_own(buf: &mut NeighborBuf, p: u32, b: &[u64], pin: &[u64]) {
    buf.push(p, |dst| {
        dst.copy_from_slice(b);
        words::and_into(dst, pin);
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{crossing, diamond};

    fn qs(width: usize, ids: &[usize]) -> QuerySet {
        QuerySet::from_ids(width, ids.iter().copied())
    }

    fn sv(raw: u32) -> SplitVertexId {
        SplitVertexId(raw)
    }

    fn entries(a: &NeighborAnswer) -> Vec<(u32, Vec<usize>)> {
        a.entries.iter().map(|(v, s)| (v.raw(), s.iter().collect())).collect()
    }

    #[test]
    fn init_marks_endpoints() {
        let g = diamond();
        let st = ResultState::new(&g, &Batch::new(2, [(0, 3)]));
        assert_eq!(st.is_s(0), qs(1, &[0]));
        assert_eq!(st.is_t(3), qs(1, &[0]));
        for v in 0..4 {
            assert!(st.is_pinner(v).is_empty());
            assert_eq!(st.nexthop_vertices(v).count(), 0);
        }
        assert!(st.is_s(3).is_empty());

        let shared = ResultState::new(&g, &Batch::new(2, [(0, 3), (0, 2)]));
        assert_eq!(shared.is_s(0), qs(2, &[0, 1]));

        let empty = ResultState::new(&g, &Batch::new(2, []));
        assert_eq!(empty.width(), 0);
        assert!(empty.is_s(0).is_empty());
    }

    fn diamond_with_q0_path() -> (Graph, ResultState) {
        let g = diamond();
        let batch = Batch::new(2, [(0, 3), (0, 3)]);
        let st = ResultState::from_paths(&g, &batch, &[vec![vec![0, 1, 3]], vec![]]);
        (g, st)
    }

    #[test]
    fn out_neighbors_on_empty_state_follow_graph() {
        let g = diamond();
        let st = ResultState::new(&g, &Batch::new(2, [(0, 3), (0, 3)]));
        let a = st.get_out_neighbors(&g, sv(0), &qs(2, &[0, 1]));
        assert_eq!(entries(&a), vec![(1, vec![0, 1]), (2, vec![0, 1])]);
    }

    #[test]
    fn out_neighbors_with_recorded_path() {
        let (g, st) = diamond_with_q0_path();
        assert_eq!(st.nexthops(0, 1), qs(2, &[0]));
        assert_eq!(st.is_pinner(1), qs(2, &[0]));
        let a = st.get_out_neighbors(&g, sv(0), &qs(2, &[0, 1]));
        assert_eq!(entries(&a), vec![(1, vec![1]), (2, vec![0, 1])]);
        // 1's in-copy leads back to its prehop
        let a = st.get_out_neighbors(&g, sv(1 + 4), &qs(2, &[0]));
        assert_eq!(entries(&a), vec![(0, vec![0])]);
    }

    #[test]
    fn in_neighbors_mirror() {
        let g = diamond();
        let st = ResultState::new(&g, &Batch::new(2, [(0, 3)]));
        let a = st.get_in_neighbors(&g, sv(3), &qs(1, &[0]));
        assert_eq!(entries(&a), vec![(1, vec![0]), (2, vec![0])]);

        let (g, st) = diamond_with_q0_path();
        let a = st.get_in_neighbors(&g, sv(3), &qs(2, &[0]));
        assert_eq!(entries(&a), vec![(2, vec![0])]);
        let a = st.get_in_neighbors(&g, sv(1), &qs(2, &[0]));
        assert_eq!(entries(&a), vec![(3, vec![0])]);
    }

    #[test]
    fn apply_on_empty_state_inserts() {
        let g = diamond();
        let batch = Batch::new(2, [(0, 3)]);
        let mut st = ResultState::new(&g, &batch);
        st.apply_augmenting_path(&g, &[sv(0), sv(1), sv(3)], &qs(1, &[0])).unwrap();
        assert_eq!(st.nexthops(0, 1), qs(1, &[0]));
        assert_eq!(st.nexthops(1, 3), qs(1, &[0]));
        assert_eq!(st.prehops(3, 1), qs(1, &[0]));
        assert_eq!(st.is_pinner(1), qs(1, &[0]));
        assert!(st.is_pinner(0).is_empty());
    }

    #[test]
    fn crossing_augmentation_cancels_shared_edge() {
        let g = crossing();
        let n = 6;
        let batch = Batch::new(2, [(0, 5), (0, 5)]);
        let mut st = ResultState::new(&g, &batch);
        let q0 = qs(2, &[0]);
        st.apply_augmenting_path(&g, &[sv(0), sv(1), sv(2), sv(5)], &q0).unwrap();
        let aug = [sv(0), sv(3), sv(2 + n), sv(1), sv(4), sv(5)];

        // 2 is not split for q1, so its split-graph has no 2_in at all
        let err = st.apply_augmenting_path(&g, &aug, &qs(2, &[0, 1])).unwrap_err();
        assert_eq!(err, ConsistencyError::InvalidStep { from: 3, to: 2 + n, queries: vec![1] });
        // and the reversed step 2_in -> 1 on its own is rejected for q1 too
        let q1_only = st.split_edge_queries(&g, sv(2 + n), sv(1), &qs(2, &[0, 1]));
        assert_eq!(q1_only, q0);
        assert_eq!(st.query_edges(0), vec![(0, 1), (1, 2), (2, 5)]);

        st.apply_augmenting_path(&g, &aug, &q0).unwrap();
        assert_eq!(st.query_edges(0), vec![(0, 1), (0, 3), (1, 4), (2, 5), (3, 2), (4, 5)]);
        let q = batch.query(0);
        assert_eq!(st.extract_paths(&q).unwrap(), vec![vec![0, 1, 4, 5], vec![0, 3, 2, 5]]);
        for v in 0..6u32 {
            for u in 0..6u32 {
                assert_eq!(st.nexthops(u, v), st.prehops(v, u));
            }
        }
        assert_eq!(st.is_pinner(1), q0);
        assert_eq!(st.is_pinner(2), q0);
    }

    #[test]
    fn extract_reports_broken_chain() {
        let g = diamond();
        let batch = Batch::new(2, [(0, 3)]);
        // 0 -> 1 with nothing after 1
        let st = ResultState::from_paths(&g, &batch, &[vec![vec![0, 1]]]);
        assert_eq!(
            st.extract_paths(&batch.query(0)).unwrap_err(),
            ConsistencyError::BrokenChain { query: 0, vertex: 1 }
        );
    }

    #[test]
    fn extract_diamond_and_single() {
        let g = diamond();
        let batch = Batch::new(2, [(0, 3)]);
        let st = ResultState::from_paths(&g, &batch, &[vec![vec![0, 2, 3], vec![0, 1, 3]]]);
        assert_eq!(st.extract_paths(&batch.query(0)).unwrap(), vec![vec![0, 1, 3], vec![0, 2, 3]]);
        let st = ResultState::from_paths(&g, &batch, &[vec![vec![0, 2, 3]]]);
        assert_eq!(st.extract_paths(&batch.query(0)).unwrap(), vec![vec![0, 2, 3]]);
    }

    #[test]
    fn wrong_endpoints_rejected() {
        let g = diamond();
        let batch = Batch::new(2, [(0, 3)]);
        let mut st = ResultState::new(&g, &batch);
        assert_eq!(
            st.apply_augmenting_path(&g, &[sv(0), sv(1)], &qs(1, &[0])),
            Err(ConsistencyError::WrongEndpoints { query: 0 })
        );
        assert_eq!(st.apply_augmenting_path(&g, &[], &qs(1, &[0])), Err(ConsistencyError::EmptyPath));
    }
}
