//! Sorted column-label tuples and their Cartesian products.
//!
//! Labels are 1-based: label `i` names column `p_i` of the controllability
//! matrix. A [`TupleSet`] is a contiguous label range together with a tuple
//! arity; block `k` of a system with `r` inputs owns labels
//! `r*k + 1 ..= r*(k + 1)`.
//!
//! Enumeration is streaming. The hot loops use the lending `advance` methods
//! that expose the current tuple as a slice without allocating; the
//! `Iterator` impls yield owned [`IndexTuple`]s for everything else.

use crate::error::{Error, Result};

/// A strictly increasing tuple of 1-based column labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexTuple(Vec<usize>);

impl IndexTuple {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.first() == Some(&0) {
            return Err(Error::ContractViolation("labels are 1-based".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::ContractViolation(format!(
                "tuple {indices:?} is not strictly increasing"
            )));
        }
        Ok(IndexTuple(indices))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}

/// All `arity`-tuples drawn in sorted order from a contiguous label range.
///
/// A negative arity denotes the empty set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TupleSet {
    first: usize,
    size: usize,
    arity: isize,
}

impl TupleSet {
    /// `Θ^arity_{lo,hi}` for input width `r`: labels `r*lo + 1 ..= r*(hi + 1)`.
    /// An inverted block range (`hi < lo`) has no labels.
    pub fn theta(arity: isize, lo_block: usize, hi_block: isize, r: usize) -> Self {
        let first = r * lo_block + 1;
        let end = (hi_block + 1).max(0) as usize * r;
        TupleSet {
            first,
            size: (end + 1).saturating_sub(first),
            arity,
        }
    }

    /// `Ω^arity_m`: tuples over labels `1..=m`.
    pub fn omega(arity: usize, m: usize) -> Self {
        TupleSet {
            first: 1,
            size: m,
            arity: arity as isize,
        }
    }

    /// Tuples over labels `first .. first + size`.
    pub fn range(arity: isize, first: usize, size: usize) -> Self {
        assert!(first >= 1, "labels are 1-based");
        TupleSet { first, size, arity }
    }

    pub fn arity(&self) -> isize {
        self.arity
    }

    pub fn first_label(&self) -> usize {
        self.first
    }

    /// Number of labels in the range.
    pub fn universe_size(&self) -> usize {
        self.size
    }

    /// Label range as `first..end` (exclusive end).
    pub fn labels(&self) -> std::ops::Range<usize> {
        self.first..self.first + self.size
    }

    pub fn count(&self) -> u64 {
        if self.arity < 0 {
            0
        } else {
            binomial(self.size as u64, self.arity as u64)
        }
    }

    pub fn enumerate(&self) -> Combinations {
        Combinations::new(*self)
    }

    /// Splits a nonempty-arity set by leading label.
    ///
    /// Each entry is `(leading label, set of the remaining arity-1 labels)`;
    /// prefixing the label to every tuple of its set reproduces `self` in
    /// order.
    pub fn split_by_leading(&self) -> Vec<(usize, TupleSet)> {
        if self.arity <= 0 || self.arity as usize > self.size {
            return Vec::new();
        }
        let k = self.arity as usize;
        let last_lead = self.first + self.size - k;
        (self.first..=last_lead)
            .map(|lead| {
                let rest_first = lead + 1;
                let rest_size = self.first + self.size - rest_first;
                (lead, TupleSet::range(self.arity - 1, rest_first, rest_size))
            })
            .collect()
    }
}

/// Lexicographic stream over one [`TupleSet`].
#[derive(Debug, Clone)]
pub struct Combinations {
    set: TupleSet,
    current: Vec<usize>,
    state: State,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Fresh,
    Running,
    Done,
}

impl Combinations {
    fn new(set: TupleSet) -> Self {
        let empty = set.arity < 0 || set.arity as usize > set.size;
        let current = if empty {
            Vec::new()
        } else {
            (0..set.arity as usize).map(|i| set.first + i).collect()
        };
        Combinations {
            set,
            current,
            state: if empty { State::Done } else { State::Fresh },
        }
    }

    /// Moves to the next tuple and exposes it.
    pub fn advance(&mut self) -> Option<&[usize]> {
        match self.state {
            State::Done => return None,
            State::Fresh => {
                self.state = State::Running;
                return Some(&self.current);
            }
            State::Running => {}
        }
        let k = self.current.len();
        let end = self.set.first + self.set.size;
        // rightmost position that can still move
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.current[i] < end - (k - i) {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                return Some(&self.current);
            }
        }
        self.state = State::Done;
        None
    }

    /// Rewinds to the first tuple.
    pub fn reset(&mut self) {
        *self = Combinations::new(self.set);
    }
}

impl Iterator for Combinations {
    type Item = IndexTuple;

    fn next(&mut self) -> Option<IndexTuple> {
        self.advance().map(|t| IndexTuple(t.to_vec()))
    }
}

/// Cartesian product of tuple sets with increasing, disjoint label ranges;
/// each item is the concatenation of one tuple from every part.
#[derive(Debug, Clone)]
pub struct CrossProduct {
    parts: Vec<Combinations>,
    offsets: Vec<usize>,
    buf: Vec<usize>,
    started: bool,
    done: bool,
}

/// Builds the product stream, rejecting overlapping or out-of-order parts.
pub fn cross(parts: &[TupleSet]) -> Result<CrossProduct> {
    let mut prev_end = 0usize;
    let mut prev_first = 0usize;
    for p in parts {
        if p.size == 0 {
            continue;
        }
        if p.first < prev_end || p.first < prev_first {
            return Err(Error::ContractViolation(format!(
                "label range {:?} overlaps or precedes an earlier part ending at {}",
                p.labels(),
                prev_end.saturating_sub(1)
            )));
        }
        prev_first = p.first;
        prev_end = p.first + p.size;
    }
    let mut offsets = Vec::with_capacity(parts.len());
    let mut total = 0usize;
    let mut done = false;
    for p in parts {
        offsets.push(total);
        if p.arity < 0 || p.arity as usize > p.size {
            done = true;
        } else {
            total += p.arity as usize;
        }
    }
    Ok(CrossProduct {
        parts: parts.iter().map(TupleSet::enumerate).collect(),
        offsets,
        buf: vec![0; total],
        started: false,
        done,
    })
}

impl CrossProduct {
    /// Total number of tuples the stream yields.
    pub fn len_hint(&self) -> u64 {
        if self.done && !self.started {
            return 0;
        }
        self.parts
            .iter()
            .map(|c| c.set.count())
            .fold(1u64, |a, b| a.saturating_mul(b))
    }

    pub fn advance(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            for (idx, part) in self.parts.iter_mut().enumerate() {
                let t = part.advance().expect("nonempty part");
                let off = self.offsets[idx];
                self.buf[off..off + t.len()].copy_from_slice(t);
            }
            return Some(&self.buf);
        }
        // odometer: bump the last part, carrying leftwards
        let mut idx = self.parts.len();
        while idx > 0 {
            idx -= 1;
            if let Some(t) = self.parts[idx].advance() {
                let off = self.offsets[idx];
                self.buf[off..off + t.len()].copy_from_slice(t);
                for j in idx + 1..self.parts.len() {
                    self.parts[j].reset();
                    let t = self.parts[j].advance().expect("nonempty part");
                    let off = self.offsets[j];
                    self.buf[off..off + t.len()].copy_from_slice(t);
                }
                return Some(&self.buf);
            }
        }
        self.done = true;
        None
    }
}

impl Iterator for CrossProduct {
    type Item = IndexTuple;

    fn next(&mut self) -> Option<IndexTuple> {
        self.advance().map(|t| IndexTuple(t.to_vec()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuples<I: Iterator<Item = IndexTuple>>(it: I) -> Vec<Vec<usize>> {
        it.map(|t| t.as_slice().to_vec()).collect()
    }

    #[test]
    fn omega_pairs_of_three() {
        let got = tuples(TupleSet::omega(2, 3).enumerate());
        assert_eq!(got, vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn theta_single_block() {
        let got = tuples(TupleSet::theta(1, 0, 0, 1).enumerate());
        assert_eq!(got, vec![vec![1]]);
        let got = tuples(TupleSet::theta(2, 1, 2, 2).enumerate());
        assert_eq!(got.len(), 6);
        assert_eq!(got[0], vec![3, 4]);
        assert_eq!(got[5], vec![5, 6]);
    }

    #[test]
    fn degenerate_sets() {
        assert_eq!(
            tuples(TupleSet::omega(0, 4).enumerate()),
            vec![Vec::<usize>::new()]
        );
        assert!(tuples(TupleSet::omega(5, 4).enumerate()).is_empty());
        assert!(tuples(TupleSet::theta(-1, 0, 3, 1).enumerate()).is_empty());
        // inverted block range
        let s = TupleSet::theta(1, 1, 0, 1);
        assert_eq!(s.universe_size(), 0);
        assert!(tuples(s.enumerate()).is_empty());
        assert_eq!(tuples(TupleSet::theta(0, 1, -1, 1).enumerate()).len(), 1);
    }

    #[test]
    fn omega_count_table_scale() {
        let s = TupleSet::omega(3, 100);
        assert_eq!(s.count(), 161_700);
        assert_eq!(s.enumerate().count(), 161_700);
    }

    #[test]
    fn cross_basic() {
        let parts = [TupleSet::theta(1, 0, 0, 1), TupleSet::theta(1, 2, 2, 1)];
        assert_eq!(tuples(cross(&parts).unwrap()), vec![vec![1, 3]]);
    }

    #[test]
    fn cross_negative_arity_is_empty() {
        let parts = [
            TupleSet::theta(1, 0, 0, 1),
            TupleSet::theta(-1, 1, 3, 1),
            TupleSet::theta(1, 4, 4, 1),
        ];
        let mut c = cross(&parts).unwrap();
        assert_eq!(c.len_hint(), 0);
        assert!(c.advance().is_none());
    }

    #[test]
    fn cross_middle_count() {
        // n = 3, r = 1, N = 10
        let n = 3isize;
        let big_n = 10usize;
        let parts = [
            TupleSet::theta(1, 0, 0, 1),
            TupleSet::theta(n - 2, 1, big_n as isize - 2, 1),
            TupleSet::theta(1, big_n - 1, big_n as isize - 1, 1),
        ];
        let got = tuples(cross(&parts).unwrap());
        assert_eq!(got.len(), 8);
        assert!(got.iter().all(|t| t[0] == 1 && t[2] == 10));
    }

    #[test]
    fn cross_rejects_overlap() {
        let parts = [TupleSet::theta(1, 0, 1, 1), TupleSet::theta(1, 1, 2, 1)];
        assert!(matches!(cross(&parts), Err(Error::ContractViolation(_))));
    }

    #[test]
    fn cross_order_is_lexicographic() {
        let parts = [TupleSet::theta(1, 0, 1, 1), TupleSet::theta(2, 2, 4, 1)];
        let got = tuples(cross(&parts).unwrap());
        let mut sorted = got.clone();
        sorted.sort();
        assert_eq!(got, sorted);
        assert_eq!(got.len(), 2 * 3);
    }

    #[test]
    fn split_by_leading_reassembles() {
        let s = TupleSet::omega(3, 7);
        let mut rebuilt = Vec::new();
        for (lead, rest) in s.split_by_leading() {
            for t in rest.enumerate() {
                let mut v = vec![lead];
                v.extend_from_slice(t.as_slice());
                rebuilt.push(v);
            }
        }
        assert_eq!(rebuilt, tuples(s.enumerate()));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(100, 4), 3_921_225);
        assert_eq!(binomial(1600, 0), 1);
    }

    #[test]
    fn index_tuple_validation() {
        assert!(IndexTuple::new(vec![1, 3, 4]).is_ok());
        assert!(IndexTuple::new(vec![1, 1]).is_err());
        assert!(IndexTuple::new(vec![0, 1]).is_err());
    }
}
