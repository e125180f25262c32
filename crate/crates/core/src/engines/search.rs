//! Per-iteration state of the shared bidirectional BFS.

use crate::error::ConsistencyError;
use crate::graph::{Graph, SplitVertexId};
use crate::merged::{NeighborBuf, ResultState};
use crate::query::{Batch, Query};
use crate::queryset::{words, QuerySet, SetTable};

/// Counters for one BFS level in one direction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LevelStats {
    pub iteration: usize,
    pub backward: bool,
    pub level: usize,
    /// Frontier entries expanded (each split vertex at most once per level).
    pub expanded: usize,
    /// Expanded entries carrying two or more queries.
    pub shared: usize,
    /// Sum of query-set sizes over expanded entries.
    pub query_visits: usize,
    /// Words combined by set unions while expanding.
    pub words_ored: usize,
}

impl LevelStats {
    /// Fraction of expanded vertices whose expansion served more than one
    /// query.
    pub fn share_ratio(&self) -> f64 {
        if self.expanded == 0 {
            0.0
        } else {
            self.shared as f64 / self.expanded as f64
        }
    }
}

/// Instrumentation hook for the batch engine.
pub trait Observer {
    fn on_level(&mut self, _stats: &LevelStats) {}

    /// Return true to receive [`Observer::on_expand`] calls.
    fn wants_expansions(&self) -> bool {
        false
    }

    /// Called for every frontier entry expanded, with its query set after
    /// finished queries are removed.
    fn on_expand(&mut self, _stats: &LevelStats, _v: SplitVertexId, _queries: &QuerySet) {}
}

pub struct NoopObserver;

impl Observer for NoopObserver {}

impl<F: FnMut(&LevelStats)> Observer for F {
    fn on_level(&mut self, stats: &LevelStats) {
        self(stats)
    }
}

/// A BFS queue kept as an append-only list of `(vertex, word span)`
/// entries. A vertex reached several times holds several entries; they are
/// merged when the level is expanded, so each vertex is still expanded
/// once per level.
pub(crate) struct Frontier {
    entries: Vec<Entry>,
    data: Vec<u64>,
    // `v << 32 | entry index`, sorted when the level starts
    order: Vec<u64>,
}

#[derive(Clone, Copy)]
struct Entry {
    v: u32,
    lo: u32,
    at: u32,
    len: u32,
}

impl Frontier {
    fn new() -> Self {
        Frontier { entries: Vec::new(), data: Vec::new(), order: Vec::new() }
    }

    /// Queues `v` for the queries in `row`, whose first word is word `lo`
    /// of the full set.
    fn add(&mut self, v: u32, lo: usize, row: &[u64]) {
        self.entries.push(Entry { v, lo: lo as u32, at: self.data.len() as u32, len: row.len() as u32 });
        self.data.extend_from_slice(row);
    }

    fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The merged set queued for `v`.
    fn row(&self, v: u32, width: usize) -> QuerySet {
        let mut out = QuerySet::empty(width);
        for e in self.entries.iter().filter(|e| e.v == v) {
            let lo = e.lo as usize;
            let at = e.at as usize;
            words::or_into(&mut out.words_mut()[lo..lo + e.len as usize], &self.data[at..at + e.len as usize]);
        }
        out
    }

    fn clear(&mut self) {
        self.entries.clear();
        self.data.clear();
        self.order.clear();
    }
}

/// `claims[u]` lists `(v, D)` meaning `v` claimed `u` for the queries `D`;
/// stored as linked entries in one arena. Each entry keeps only the words
/// of `D` between its first and last nonzero word.
pub(crate) struct ClaimMap {
    heads: Vec<u32>,
    touched: Vec<u32>,
    links: Vec<Claim>,
    data: Vec<u64>,
}

struct Claim {
    by: u32,
    next: u32,
    lo: u32,
    at: u32,
    len: u32,
}

const NONE: u32 = u32::MAX;

impl ClaimMap {
    fn new(rows: usize) -> Self {
        ClaimMap { heads: vec![NONE; rows], touched: Vec::new(), links: Vec::new(), data: Vec::new() }
    }

    /// Records the claim for the queries in `d`, whose first word is word
    /// `lo` of the full set.
    fn claim(&mut self, u: u32, v: u32, lo: usize, d: &[u64]) {
        let head = self.heads[u as usize];
        if head == NONE {
            self.touched.push(u);
        }
        self.heads[u as usize] = self.links.len() as u32;
        self.links.push(Claim { by: v, next: head, lo: lo as u32, at: self.data.len() as u32, len: d.len() as u32 });
        self.data.extend_from_slice(d);
    }

    fn entries(&self, u: u32) -> impl Iterator<Item = (&Claim, &[u64])> {
        let mut cur = self.heads[u as usize];
        std::iter::from_fn(move || {
            if cur == NONE {
                return None;
            }
            let c = &self.links[cur as usize];
            cur = c.next;
            Some((c, &self.data[c.at as usize..(c.at + c.len) as usize]))
        })
    }

    /// The vertex that claimed `u` for query `q`; lowest id if several.
    fn find(&self, u: u32, q: usize) -> Option<u32> {
        let word = q / 64;
        let mut best: Option<u32> = None;
        for (c, row) in self.entries(u) {
            let lo = c.lo as usize;
            if (lo..lo + row.len()).contains(&word) && words::contains(row, q - lo * 64) {
                debug_assert!(best.is_none_or(|b| b == c.by), "two claims for query {q} at {u}");
                best = Some(best.map_or(c.by, |b| b.min(c.by)));
            }
        }
        best
    }

    fn get(&self, u: u32, v: u32, width: usize) -> QuerySet {
        let mut out = QuerySet::empty(width);
        for (c, row) in self.entries(u) {
            if c.by == v {
                let lo = c.lo as usize;
                words::or_into(&mut out.words_mut()[lo..lo + row.len()], row);
            }
        }
        out
    }

    fn clear(&mut self) {
        for &u in &self.touched {
            self.heads[u as usize] = NONE;
        }
        self.touched.clear();
        self.links.clear();
        self.data.clear();
    }
}

/// Forward and backward BFS structures for one iteration, all tagged with
/// query sets: seen marks, current and next queues, predecessor and
/// successor claims, meeting points and the set of unfinished queries.
pub struct SearchState {
    n: usize,
    width: usize,
    /// Forward and backward seen marks in one row per split vertex, word
    /// `w` of each side stored at `2w` (forward) and `2w + 1` (backward) so
    /// that the checks of one expansion hit a single cache line.
    seen: SetTable,
    pub(crate) s_queue: Frontier,
    pub(crate) s_next: Frontier,
    pub(crate) t_queue: Frontier,
    pub(crate) t_next: Frontier,
    pred: ClaimMap,
    succ: ClaimMap,
    joint: Vec<Option<u32>>,
    undone: QuerySet,
    buf: NeighborBuf,
    scratch: Vec<u64>,
    spare: Vec<u64>,
    row: Vec<u64>,
}

impl SearchState {
    pub fn new(n: usize, width: usize) -> Self {
        let rows = 2 * n;
        SearchState {
            n,
            width,
            seen: SetTable::with_stride(rows, 2 * crate::queryset::words_for(width)),
            s_queue: Frontier::new(),
            s_next: Frontier::new(),
            t_queue: Frontier::new(),
            t_next: Frontier::new(),
            pred: ClaimMap::new(rows),
            succ: ClaimMap::new(rows),
            joint: vec![None; width],
            undone: QuerySet::empty(width),
            buf: NeighborBuf::new(width),
            scratch: vec![0; crate::queryset::words_for(width)],
            spare: vec![0; 2 * crate::queryset::words_for(width)],
            row: vec![0; crate::queryset::words_for(width)],
        }
    }

    /// Clears everything and seeds both searches for the `live` queries.
    pub fn seed(&mut self, batch: &Batch, live: &QuerySet) {
        self.seen.clear();
        for f in [&mut self.s_queue, &mut self.s_next, &mut self.t_queue, &mut self.t_next] {
            f.clear();
        }
        self.pred.clear();
        self.succ.clear();
        self.joint.iter_mut().for_each(|j| *j = None);
        self.undone = live.clone();

        let single = |q: usize, width: usize| QuerySet::singleton(width, q);
        for q in live.iter() {
            let Query { s, t, .. } = batch.query(q);
            let one = single(q, self.width);
            self.mark(s, false, q);
            self.s_queue.add(s, 0, one.words());
            self.mark(t, true, q);
            self.t_queue.add(t, 0, one.words());
        }
    }

    pub fn undone(&self) -> &QuerySet {
        &self.undone
    }

    fn seen_side(&self, v: u32, backward: bool) -> QuerySet {
        let row = self.seen.row(v as usize);
        let mut out = QuerySet::empty(self.width);
        for (w, dst) in out.words_mut().iter_mut().enumerate() {
            *dst = row[2 * w + backward as usize];
        }
        out
    }

    fn mark(&mut self, v: u32, backward: bool, q: usize) {
        self.seen.row_mut(v as usize)[2 * (q / 64) + backward as usize] |= 1 << (q % 64);
    }

    pub fn s_seen(&self, v: SplitVertexId) -> QuerySet {
        self.seen_side(v.raw(), false)
    }

    pub fn t_seen(&self, v: SplitVertexId) -> QuerySet {
        self.seen_side(v.raw(), true)
    }

    pub fn pred(&self, u: SplitVertexId, v: SplitVertexId) -> QuerySet {
        self.pred.get(u.raw(), v.raw(), self.width)
    }

    pub fn succ(&self, u: SplitVertexId, v: SplitVertexId) -> QuerySet {
        self.succ.get(u.raw(), v.raw(), self.width)
    }

    pub fn s_next(&self, v: SplitVertexId) -> QuerySet {
        self.s_next.row(v.raw(), self.width)
    }

    pub fn t_next(&self, v: SplitVertexId) -> QuerySet {
        self.t_next.row(v.raw(), self.width)
    }

    /// The split vertex where query `q` met, if it has.
    pub fn joint(&self, q: usize) -> Option<SplitVertexId> {
        self.joint[q].map(SplitVertexId)
    }

    /// Marks `q` as already seen by the backward search at `v`.
    pub fn mark_t_seen(&mut self, v: SplitVertexId, q: usize) {
        self.mark(v.raw(), true, q);
    }

    /// Marks `q` as already seen by the forward search at `v`.
    pub fn mark_s_seen(&mut self, v: SplitVertexId, q: usize) {
        self.mark(v.raw(), false, q);
    }

    /// Expands frontier entry `(v, b)` of the forward search.
    pub fn forward_expand(&mut self, g: &Graph, st: &ResultState, v: SplitVertexId, b: &QuerySet) {
        let mut stats = LevelStats::default();
        self.expand(g, st, v.raw(), b.words(), false, &mut stats, &mut NoopObserver);
    }

    /// Expands frontier entry `(v, b)` of the backward search.
    pub fn backward_expand(&mut self, g: &Graph, st: &ResultState, v: SplitVertexId, b: &QuerySet) {
        let mut stats = LevelStats::default();
        self.expand(g, st, v.raw(), b.words(), true, &mut stats, &mut NoopObserver);
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn expand<O: Observer>(
        &mut self,
        g: &Graph,
        st: &ResultState,
        v: u32,
        b: &[u64],
        backward: bool,
        stats: &mut LevelStats,
        observer: &mut O,
    ) {
        // queries that already met this iteration are skipped
        self.scratch.copy_from_slice(b);
        words::and_into(&mut self.scratch, self.undone.words());
        if words::is_empty(&self.scratch) {
            return;
        }
        let members = words::count(&self.scratch);
        stats.expanded += 1;
        stats.query_visits += members;
        if members >= 2 {
            stats.shared += 1;
        }
        if observer.wants_expansions() {
            observer.on_expand(stats, SplitVertexId(v), &QuerySet::from_words(self.width, &self.scratch));
        }

        // every derived row is a subset of the entry's set, so only the
        // words where it is nonzero need touching
        let lo = self.scratch.iter().position(|&w| w != 0).unwrap_or(0);
        let hi = self.scratch.iter().rposition(|&w| w != 0).map_or(lo, |i| i + 1);
        let b = &self.scratch[lo..hi];
        if backward {
            st.in_neighbors_into(g, v, b, lo, &mut self.buf);
        } else {
            st.out_neighbors_into(g, v, b, lo, &mut self.buf);
        }

        let span = hi - lo;
        let side = backward as usize;
        let (d, meet) = self.spare.split_at_mut(span);
        let meet = &mut meet[..span];
        for i in 0..self.buf.len() {
            let (u, row) = self.buf.get(i);
            let (claims, next) =
                if backward { (&mut self.succ, &mut self.t_next) } else { (&mut self.pred, &mut self.s_next) };
            d.copy_from_slice(row);
            if let Some(marks) = self.seen.get(u as usize) {
                for (j, dw) in d.iter_mut().enumerate() {
                    *dw &= !marks[2 * (lo + j) + side];
                }
                if words::is_empty(d) {
                    continue;
                }
            }
            // mark and test for a meeting in the same pass
            let marks = self.seen.row_mut(u as usize);
            let undone = &self.undone.words()[lo..hi];
            let mut met = false;
            for j in 0..span {
                let at = 2 * (lo + j);
                marks[at + side] |= d[j];
                meet[j] = d[j] & marks[at + 1 - side] & undone[j];
                met |= meet[j] != 0;
            }
            claims.claim(u, v, lo, d);
            if met {
                for q in words::members(meet) {
                    self.joint[lo * 64 + q] = Some(u);
                }
                words::andnot_into(&mut self.undone.words_mut()[lo..hi], meet);
                words::andnot_into(d, meet);
            }
            if !words::is_empty(d) {
                next.add(u, lo, d);
            }
            stats.words_ored += 3 * span;
        }
    }

    /// Runs one full level of one direction: every queued entry in
    /// ascending split id, then the next queue becomes current.
    pub(crate) fn level<O: Observer>(
        &mut self,
        g: &Graph,
        st: &ResultState,
        backward: bool,
        stats: &mut LevelStats,
        observer: &mut O,
    ) {
        let mut queue =
            std::mem::replace(if backward { &mut self.t_queue } else { &mut self.s_queue }, Frontier::new());
        queue.order.clear();
        queue.order.extend(queue.entries.iter().enumerate().map(|(i, e)| (e.v as u64) << 32 | i as u64));
        queue.order.sort_unstable();
        let mut row = std::mem::take(&mut self.row);
        let mut i = 0;
        while i < queue.order.len() {
            let v = (queue.order[i] >> 32) as u32;
            let (mut lo, mut hi) = (usize::MAX, 0);
            while i < queue.order.len() && (queue.order[i] >> 32) as u32 == v {
                let e = queue.entries[queue.order[i] as u32 as usize];
                let (elo, at, len) = (e.lo as usize, e.at as usize, e.len as usize);
                words::or_into(&mut row[elo..elo + len], &queue.data[at..at + len]);
                lo = lo.min(elo);
                hi = hi.max(elo + len);
                i += 1;
            }
            self.expand(g, st, v, &row, backward, stats, observer);
            row[lo..hi].fill(0);
        }
        self.row = row;
        queue.clear();
        if backward {
            self.t_queue = std::mem::replace(&mut self.t_next, queue);
        } else {
            self.s_queue = std::mem::replace(&mut self.s_next, queue);
        }
    }

    pub(crate) fn queues_nonempty(&self) -> bool {
        !self.s_queue.is_empty() && !self.t_queue.is_empty()
    }

    /// The split-space path of a query that met: predecessor claims back to
    /// its source, successor claims forward to its target.
    pub fn reconstruct_path(&self, q: &Query) -> Result<Vec<SplitVertexId>, ConsistencyError> {
        let joint = self.joint[q.id].ok_or(ConsistencyError::MissingJoint { query: q.id })?;
        let limit = 2 * self.n + 1;
        let mut back = vec![joint];
        let mut cur = joint;
        while cur != q.s {
            cur = self.pred.find(cur, q.id).ok_or(ConsistencyError::BrokenSearchChain {
                query: q.id,
                vertex: cur,
                direction: "predecessor",
            })?;
            back.push(cur);
            if back.len() > limit {
                return Err(ConsistencyError::BrokenSearchChain { query: q.id, vertex: cur, direction: "predecessor" });
            }
        }
        back.reverse();
        let mut cur = joint;
        while cur != q.t {
            cur = self.succ.find(cur, q.id).ok_or(ConsistencyError::BrokenSearchChain {
                query: q.id,
                vertex: cur,
                direction: "successor",
            })?;
            back.push(cur);
            if back.len() > 2 * limit {
                return Err(ConsistencyError::BrokenSearchChain { query: q.id, vertex: cur, direction: "successor" });
            }
        }
        Ok(back.into_iter().map(SplitVertexId).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::diamond;

    fn sv(raw: u32) -> SplitVertexId {
        SplitVertexId(raw)
    }

    fn setup(pairs: &[(u32, u32)]) -> (Graph, Batch, ResultState, SearchState) {
        let g = diamond();
        let batch = Batch::new(2, pairs.iter().copied());
        let st = ResultState::new(&g, &batch);
        let mut ss = SearchState::new(g.vertex_count(), batch.len());
        ss.seed(&batch, &batch.all());
        (g, batch, st, ss)
    }

    #[test]
    fn forward_marks_and_claims() {
        let (g, batch, st, mut ss) = setup(&[(0, 3)]);
        ss.forward_expand(&g, &st, sv(0), &batch.all());
        let q0 = QuerySet::singleton(1, 0);
        assert_eq!(ss.s_seen(sv(1)), q0);
        assert_eq!(ss.s_seen(sv(2)), q0);
        assert_eq!(ss.pred(sv(1), sv(0)), q0);
        assert_eq!(ss.pred(sv(2), sv(0)), q0);
        assert_eq!(ss.s_next(sv(1)), q0);
        assert!(ss.undone().contains(0));
    }

    #[test]
    fn forward_meet_finishes_query() {
        let (g, batch, st, mut ss) = setup(&[(0, 3)]);
        ss.mark_t_seen(sv(1), 0);
        ss.forward_expand(&g, &st, sv(0), &batch.all());
        assert_eq!(ss.joint(0), Some(sv(1)));
        assert!(ss.undone().is_empty());
        assert!(ss.s_next(sv(1)).is_empty());
    }

    #[test]
    fn first_claim_wins() {
        // both queries reach 3 in the same level; 1 is expanded before 2
        let g = diamond();
        let batch = Batch::new(2, [(0, 2), (0, 2)]);
        let st = ResultState::new(&g, &batch);
        let mut ss = SearchState::new(4, 2);
        let all = batch.all();
        ss.seed(&batch, &all);
        ss.forward_expand(&g, &st, sv(1), &all);
        ss.forward_expand(&g, &st, sv(2), &all);
        assert_eq!(ss.pred(sv(3), sv(1)), all);
        assert!(ss.pred(sv(3), sv(2)).is_empty());
        assert_eq!(ss.s_next(sv(3)), all);
    }

    #[test]
    fn backward_mirror() {
        let (g, batch, st, mut ss) = setup(&[(0, 3)]);
        ss.backward_expand(&g, &st, sv(3), &batch.all());
        let q0 = QuerySet::singleton(1, 0);
        assert_eq!(ss.t_seen(sv(1)), q0);
        assert_eq!(ss.succ(sv(2), sv(3)), q0);
        assert_eq!(ss.t_next(sv(2)), q0);

        let (g, batch, st, mut ss) = setup(&[(0, 3)]);
        ss.mark_s_seen(sv(2), 0);
        ss.backward_expand(&g, &st, sv(3), &batch.all());
        // 1 is reached first and is not forward-seen; 2 is
        assert_eq!(ss.joint(0), Some(sv(2)));
        assert!(ss.undone().is_empty());
    }

    #[test]
    fn reconstruct_after_meet() {
        let (g, batch, st, mut ss) = setup(&[(0, 3)]);
        let all = batch.all();
        ss.forward_expand(&g, &st, sv(0), &all);
        ss.backward_expand(&g, &st, sv(3), &all);
        assert_eq!(ss.joint(0), Some(sv(1)));
        assert_eq!(ss.reconstruct_path(&batch.query(0)).unwrap(), vec![sv(0), sv(1), sv(3)]);
    }

    #[test]
    fn meet_at_target() {
        let (g, batch, st, mut ss) = setup(&[(1, 3)]);
        ss.forward_expand(&g, &st, sv(1), &batch.all());
        assert_eq!(ss.joint(0), Some(sv(3)));
        assert_eq!(ss.reconstruct_path(&batch.query(0)).unwrap(), vec![sv(1), sv(3)]);
    }

    #[test]
    fn missing_joint_is_an_error() {
        let (_, batch, _, ss) = setup(&[(0, 3)]);
        assert_eq!(ss.reconstruct_path(&batch.query(0)).unwrap_err(), ConsistencyError::MissingJoint { query: 0 });
    }
}
