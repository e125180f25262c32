//! Fixed-width query-id bit sets.
//!
//! Every shared structure in the batch engine is tagged with a set of query
//! ids. Sets are sized once per batch and combined word by word. The hot
//! loops work directly on `&[u64]` rows through the helpers in [`words`];
//! [`QuerySet`] is the owned value type, and [`SetTable`] stores one row per
//! vertex in a flat buffer.

use std::fmt;

use crate::error::WidthMismatch;

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(width: usize) -> usize {
    width.div_ceil(WORD_BITS)
}

/// Word-level helpers over equally sized rows.
pub(crate) mod words {
    #[inline]
    pub fn is_empty(a: &[u64]) -> bool {
        a.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn or_into(dst: &mut [u64], src: &[u64]) {
        for (d, s) in dst.iter_mut().zip(src) {
            *d |= *s;
        }
    }

    #[inline]
    pub fn and_into(dst: &mut [u64], src: &[u64]) {
        for (d, s) in dst.iter_mut().zip(src) {
            *d &= *s;
        }
    }

    #[inline]
    pub fn andnot_into(dst: &mut [u64], src: &[u64]) {
        for (d, s) in dst.iter_mut().zip(src) {
            *d &= !*s;
        }
    }

    #[inline]
    pub fn intersects(a: &[u64], b: &[u64]) -> bool {
        a.iter().zip(b).any(|(x, y)| x & y != 0)
    }

    #[inline]
    pub fn contains(a: &[u64], id: usize) -> bool {
        a[id / 64] >> (id % 64) & 1 == 1
    }

    #[inline]
    pub fn count(a: &[u64]) -> usize {
        a.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Ascending member ids.
    pub fn members(a: &[u64]) -> impl Iterator<Item = usize> + '_ {
        a.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * 64 + bit)
            })
        })
    }
}

/// A set of query ids drawn from `0..width`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuerySet {
    width: usize,
    bits: Vec<u64>,
}

impl QuerySet {
    pub fn empty(width: usize) -> Self {
        QuerySet { width, bits: vec![0; words_for(width)] }
    }

    pub fn full(width: usize) -> Self {
        let mut set = Self::empty(width);
        for id in 0..width {
            set.insert(id);
        }
        set
    }

    pub fn singleton(width: usize, id: usize) -> Self {
        let mut set = Self::empty(width);
        set.insert(id);
        set
    }

    /// Panics if an id is outside `0..width`.
    pub fn from_ids(width: usize, ids: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(width);
        for id in ids {
            set.insert(id);
        }
        set
    }

    pub(crate) fn from_words(width: usize, src: &[u64]) -> Self {
        debug_assert_eq!(src.len(), words_for(width));
        QuerySet { width, bits: src.to_vec() }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.bits
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.bits
    }

    pub fn insert(&mut self, id: usize) {
        assert!(id < self.width, "query id {id} outside width {}", self.width);
        self.bits[id / WORD_BITS] |= 1 << (id % WORD_BITS);
    }

    pub fn remove(&mut self, id: usize) {
        if id < self.width {
            self.bits[id / WORD_BITS] &= !(1 << (id % WORD_BITS));
        }
    }

    pub fn contains(&self, id: usize) -> bool {
        id < self.width && words::contains(&self.bits, id)
    }

    pub fn is_empty(&self) -> bool {
        words::is_empty(&self.bits)
    }

    pub fn len(&self) -> usize {
        words::count(&self.bits)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        words::members(&self.bits)
    }

    fn check(&self, other: &QuerySet) -> Result<(), WidthMismatch> {
        if self.width == other.width {
            Ok(())
        } else {
            Err(WidthMismatch { left: self.width, right: other.width })
        }
    }

    pub fn union(&self, other: &QuerySet) -> Result<QuerySet, WidthMismatch> {
        self.check(other)?;
        let mut out = self.clone();
        words::or_into(&mut out.bits, &other.bits);
        Ok(out)
    }

    pub fn intersection(&self, other: &QuerySet) -> Result<QuerySet, WidthMismatch> {
        self.check(other)?;
        let mut out = self.clone();
        words::and_into(&mut out.bits, &other.bits);
        Ok(out)
    }

    pub fn difference(&self, other: &QuerySet) -> Result<QuerySet, WidthMismatch> {
        self.check(other)?;
        let mut out = self.clone();
        words::andnot_into(&mut out.bits, &other.bits);
        Ok(out)
    }

    pub fn union_with(&mut self, other: &QuerySet) -> Result<(), WidthMismatch> {
        self.check(other)?;
        words::or_into(&mut self.bits, &other.bits);
        Ok(())
    }

    pub fn intersect_with(&mut self, other: &QuerySet) -> Result<(), WidthMismatch> {
        self.check(other)?;
        words::and_into(&mut self.bits, &other.bits);
        Ok(())
    }

    pub fn subtract(&mut self, other: &QuerySet) -> Result<(), WidthMismatch> {
        self.check(other)?;
        words::andnot_into(&mut self.bits, &other.bits);
        Ok(())
    }
}

impl fmt::Debug for QuerySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// One query-set row per index in a flat buffer.
///
/// Rows carry an epoch stamp; [`SetTable::clear`] only bumps the epoch and
/// a stale row is zeroed on its next write, so clearing costs nothing per
/// row and reads of stale rows never touch the buffer.
pub(crate) struct SetTable {
    stride: usize,
    data: Vec<u64>,
    stamp: Vec<u32>,
    epoch: u32,
    zero: Vec<u64>,
}

impl SetTable {
    pub fn new(rows: usize, width: usize) -> Self {
        Self::with_stride(rows, words_for(width))
    }

    /// A table whose rows are `stride` words long.
    pub fn with_stride(rows: usize, stride: usize) -> Self {
        let data = vec![0u64; rows * stride];
        SetTable { stride, data, stamp: vec![0; rows], epoch: 1, zero: vec![0; stride] }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        self.get(i).unwrap_or(&self.zero)
    }

    /// The row, or `None` if it was not written since the last clear (it is
    /// then all zero). Checking costs one stamp read instead of a row read.
    #[inline]
    pub fn get(&self, i: usize) -> Option<&[u64]> {
        (self.stamp[i] == self.epoch).then(|| &self.data[i * self.stride..(i + 1) * self.stride])
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        let row = &mut self.data[i * self.stride..(i + 1) * self.stride];
        if self.stamp[i] != self.epoch {
            self.stamp[i] = self.epoch;
            row.fill(0);
        }
        row
    }

    pub fn clear(&mut self) {
        if self.epoch == u32::MAX {
            self.stamp.fill(0);
            self.epoch = 0;
        }
        self.epoch += 1;
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use proptest::prelude::*;

    use super::*;

    fn set(ids: &[usize]) -> QuerySet {
        QuerySet::from_ids(4, ids.iter().copied())
    }

    #[test]
    fn union_intersect_subtract() {
        assert_eq!(set(&[0, 2]).union(&set(&[1])).unwrap(), set(&[0, 1, 2]));
        assert_eq!(set(&[0, 2]).intersection(&set(&[2, 3])).unwrap(), set(&[2]));
        let d = set(&[0, 2]).difference(&set(&[0, 2])).unwrap();
        assert!(d.is_empty());
        assert_eq!(d, set(&[]));
    }

    #[test]
    fn width_mismatch_is_reported() {
        let a = QuerySet::empty(3);
        let b = QuerySet::empty(65);
        assert_eq!(a.union(&b).unwrap_err(), WidthMismatch { left: 3, right: 65 });
    }

    #[test]
    fn iteration_is_ascending_across_words() {
        let s = QuerySet::from_ids(200, [150, 3, 64, 63, 199]);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![3, 63, 64, 150, 199]);
        assert_eq!(s.len(), 5);
    }

    #[test]
    fn table_clear_resets_rows_lazily() {
        let mut t = SetTable::new(4, 70);
        t.row_mut(2)[1] = 5;
        t.row_mut(0)[0] = 1;
        assert!(t.get(1).is_none());
        assert_eq!(t.get(2).unwrap()[1], 5);
        t.clear();
        assert!(t.get(2).is_none());
        assert!(words::is_empty(t.row(2)));
        assert!(words::is_empty(t.row_mut(2)));
    }

    fn model(width: usize) -> impl Strategy<Value = BTreeSet<usize>> {
        proptest::collection::btree_set(0..width, 0..width)
    }

    proptest! {
        #[test]
        fn matches_integer_set_model(a in model(130), b in model(130), c in model(130)) {
            let qa = QuerySet::from_ids(130, a.iter().copied());
            let qb = QuerySet::from_ids(130, b.iter().copied());
            let qc = QuerySet::from_ids(130, c.iter().copied());
            let to_vec = |s: &QuerySet| s.iter().collect::<Vec<_>>();

            prop_assert_eq!(to_vec(&qa.union(&qb).unwrap()), a.union(&b).copied().collect::<Vec<_>>());
            prop_assert_eq!(to_vec(&qa.intersection(&qb).unwrap()), a.intersection(&b).copied().collect::<Vec<_>>());
            prop_assert_eq!(to_vec(&qa.difference(&qb).unwrap()), a.difference(&b).copied().collect::<Vec<_>>());

            // distributivity and De Morgan relative to the full set
            let lhs = qa.intersection(&qb.union(&qc).unwrap()).unwrap();
            let rhs = qa.intersection(&qb).unwrap().union(&qa.intersection(&qc).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            let full = QuerySet::full(130);
            let not_union = full.difference(&qa.union(&qb).unwrap()).unwrap();
            let and_nots = full.difference(&qa).unwrap().intersection(&full.difference(&qb).unwrap()).unwrap();
            prop_assert_eq!(not_union, and_nots);
            prop_assert_eq!(qa.len(), a.len());
        }
    }
}
