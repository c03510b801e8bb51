//! Index-tuple enumeration for worklist closures.
//!
//! A fixpoint that processes list element `e` only against combinations
//! whose largest index **is** `e` touches every combination exactly once
//! across the whole run. `FrontierTuples` enumerates those combinations
//! directly — all k-tuples over `{0..=e}` containing `e` — grouped by the
//! first position where `e` occurs, instead of filtering the full
//! `(e+1)^k` cube.

pub(crate) struct FrontierTuples {
    k: usize,
    e: usize,
    first: usize,
    idx: Vec<usize>,
    fresh: bool,
    done: bool,
}

impl FrontierTuples {
    pub(crate) fn new(k: usize, e: usize) -> Self {
        let mut idx = vec![0; k];
        if k > 0 {
            idx[0] = e;
        }
        FrontierTuples {
            k,
            e,
            first: 0,
            idx,
            fresh: true,
            done: k == 0,
        }
    }

    /// The next tuple, or `None` when exhausted. Positions before `first`
    /// range over `0..e`, position `first` is pinned to `e`, positions after
    /// range over `0..=e`.
    pub(crate) fn next(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if self.fresh {
            self.fresh = false;
            return Some(&self.idx);
        }
        let (k, e) = (self.k, self.e);
        let mut p = k;
        while p > 0 {
            p -= 1;
            if p == self.first {
                continue;
            }
            let base = if p < self.first { e } else { e + 1 };
            if self.idx[p] + 1 < base {
                self.idx[p] += 1;
                for q in p + 1..k {
                    if q != self.first {
                        self.idx[q] = 0;
                    }
                }
                return Some(&self.idx);
            }
        }
        // move `first` one position right; its prefix then needs values < e
        self.first += 1;
        if self.first >= k || self.e == 0 {
            self.done = true;
            return None;
        }
        self.idx.iter_mut().for_each(|v| *v = 0);
        self.idx[self.first] = e;
        Some(&self.idx)
    }
}
