//! Finite universes `{0, 1, ..., m-1}` and row-major tuple indexing.
//!
//! An `n`-ary operation table over a universe of size `m` is a flat vector
//! of `m^n` values, indexed by reading the argument tuple as an `n`-digit
//! base-`m` numeral (first argument most significant). All modules share
//! this convention, so the indexing lives here.

use std::fmt;

use crate::error::Error;
use crate::Result;

/// Largest allowed universe; elements must fit in a `u8`.
pub const MAX_UNIVERSE: usize = 256;

/// The carrier set `{0, 1, ..., size-1}`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Universe {
    size: usize,
}

impl Universe {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || size > MAX_UNIVERSE {
            return Err(Error::invalid(format!(
                "universe size must be between 1 and {MAX_UNIVERSE}, got {size}"
            )));
        }
        Ok(Universe { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// The largest element, `size - 1`.
    pub fn max_element(&self) -> u8 {
        (self.size - 1) as u8
    }

    pub fn contains(&self, x: u8) -> bool {
        (x as usize) < self.size
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> {
        (0..self.size).map(|x| x as u8)
    }

    /// `size^arity` if it fits in a `usize`.
    pub fn point_count(&self, arity: usize) -> Option<usize> {
        let mut acc: usize = 1;
        for _ in 0..arity {
            acc = acc.checked_mul(self.size)?;
        }
        Some(acc)
    }

    /// Row-major index of an argument tuple: the tuple read as a base-`m`
    /// numeral, first coordinate most significant.
    ///
    /// # Examples
    ///
    /// ```
    /// use clonelab_core::Universe;
    /// let u = Universe::new(3).unwrap();
    /// assert_eq!(u.row_index(&[1, 2]), 5);
    /// ```
    pub fn row_index(&self, args: &[u8]) -> usize {
        debug_assert!(args.iter().all(|&x| self.contains(x)));
        args.iter()
            .fold(0usize, |acc, &x| acc * self.size + x as usize)
    }

    /// Inverse of [`Universe::row_index`] at a given arity.
    pub fn tuple_at(&self, arity: usize, mut index: usize) -> Vec<u8> {
        let mut out = vec![0u8; arity];
        for slot in out.iter_mut().rev() {
            *slot = (index % self.size) as u8;
            index /= self.size;
        }
        debug_assert_eq!(index, 0, "index out of range for arity {arity}");
        out
    }

    /// Advance a tuple to its row-major successor; `false` on wrap-around.
    /// Useful in hot loops that reuse one buffer instead of allocating.
    pub fn advance(&self, tuple: &mut [u8]) -> bool {
        for slot in tuple.iter_mut().rev() {
            if (*slot as usize) + 1 < self.size {
                *slot += 1;
                return true;
            }
            *slot = 0;
        }
        false
    }

    /// All `arity`-tuples over the universe, in row-major order.
    pub fn tuples(&self, arity: usize) -> Tuples {
        Tuples {
            universe: *self,
            current: vec![0; arity],
            done: false,
        }
    }
}

impl fmt::Display for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{0..{}}}", self.size - 1)
    }
}

/// Row-major iterator over all tuples of a fixed arity.
pub struct Tuples {
    universe: Universe,
    current: Vec<u8>,
    done: bool,
}

impl Iterator for Tuples {
    type Item = Vec<u8>;

    fn next(&mut self) -> Option<Vec<u8>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        self.done = !self.universe.advance(&mut self.current);
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_sizes() {
        assert!(Universe::new(0).is_err());
        assert!(Universe::new(MAX_UNIVERSE + 1).is_err());
        assert!(Universe::new(1).is_ok());
        assert!(Universe::new(MAX_UNIVERSE).is_ok());
    }

    #[test]
    fn row_major_order_is_lexicographic() {
        let u = Universe::new(3).unwrap();
        let all: Vec<Vec<u8>> = u.tuples(2).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[5], vec![1, 2]);
        assert_eq!(all[8], vec![2, 2]);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }

    #[test]
    fn index_round_trip() {
        let u = Universe::new(4).unwrap();
        for (i, t) in u.tuples(3).enumerate() {
            assert_eq!(u.row_index(&t), i);
            assert_eq!(u.tuple_at(3, i), t);
        }
    }

    #[test]
    fn zero_arity_has_one_empty_tuple() {
        let u = Universe::new(5).unwrap();
        let all: Vec<Vec<u8>> = u.tuples(0).collect();
        assert_eq!(all, vec![Vec::<u8>::new()]);
        assert_eq!(u.point_count(0), Some(1));
    }

    #[test]
    fn point_count_overflow_is_none() {
        let u = Universe::new(MAX_UNIVERSE).unwrap();
        assert!(u.point_count(9).is_none());
        assert_eq!(u.point_count(2), Some(65536));
    }
}
