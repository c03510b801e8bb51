//! Finitary relations over a universe and the preservation check that
//! underlies the Pol-Inv connection.

use std::collections::BTreeSet;

use crate::error::Error;
use crate::operation::Operation;
use crate::universe::Universe;
use crate::Result;

/// A finite relation: a set of tuples of one arity over a universe.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Relation {
    universe: Universe,
    arity: usize,
    tuples: BTreeSet<Vec<u8>>,
}

impl Relation {
    pub fn new(
        universe: Universe,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<u8>>,
    ) -> Result<Self> {
        if arity == 0 {
            return Err(Error::invalid("relation arity must be at least 1"));
        }
        let tuples: BTreeSet<Vec<u8>> = tuples.into_iter().collect();
        for t in &tuples {
            if t.len() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    found: t.len(),
                });
            }
            if let Some(&v) = t.iter().find(|&&v| !universe.contains(v)) {
                return Err(Error::invalid(format!(
                    "tuple entry {v} outside universe {universe}"
                )));
            }
        }
        Ok(Relation {
            universe,
            arity,
            tuples,
        })
    }

    /// A subset of the universe viewed as a unary relation.
    pub fn unary(universe: Universe, elements: impl IntoIterator<Item = u8>) -> Result<Self> {
        Relation::new(universe, 1, elements.into_iter().map(|x| vec![x]))
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &BTreeSet<Vec<u8>> {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[u8]) -> bool {
        self.tuples.contains(tuple)
    }
}

/// Does `f` preserve `rho`? Checked by brute force: for every choice of
/// `arity(f)` tuples from `rho`, the componentwise image must lie in `rho`.
///
/// # Examples
///
/// ```
/// use clonelab_core::{preserves, Operation, OpTable, Relation, Universe};
/// let u = Universe::new(2).unwrap();
/// let and = Operation::Table(OpTable::new(u, 2, vec![0, 0, 0, 1]).unwrap());
/// let leq = Relation::new(u, 2, [vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
/// assert!(preserves(&and, &leq).unwrap());
/// ```
pub fn preserves(f: &Operation, rho: &Relation) -> Result<bool> {
    let table = f.tabulate(rho.universe())?;
    let n = table.arity();
    let rows: Vec<&Vec<u8>> = rho.tuples().iter().collect();
    if rows.is_empty() {
        return Ok(true);
    }
    let mut choice = vec![0usize; n];
    let mut image = vec![0u8; rho.arity()];
    loop {
        for (j, slot) in image.iter_mut().enumerate() {
            let mut row = 0usize;
            for &c in &choice {
                row = row * rho.universe().size() + rows[c][j] as usize;
            }
            *slot = table.entries()[row];
        }
        if !rho.contains(&image) {
            return Ok(false);
        }
        // advance the choice odometer over rho's tuples
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(true);
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < rows.len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operation::OpTable;

    fn u(m: usize) -> Universe {
        Universe::new(m).unwrap()
    }

    fn min3() -> Operation {
        let mut entries = Vec::new();
        for x in 0..3u8 {
            for y in 0..3u8 {
                entries.push(x.min(y));
            }
        }
        Operation::Table(OpTable::new(u(3), 2, entries).unwrap())
    }

    #[test]
    fn min_preserves_the_successor_graph() {
        // min commutes with x ↦ x+1 on both tuples, so all four images stay
        // inside {(0,1),(1,2)}: this relation is closed under min.
        let rho = Relation::new(u(3), 2, [vec![0, 1], vec![1, 2]]).unwrap();
        assert!(preserves(&min3(), &rho).unwrap());
    }

    #[test]
    fn min_breaks_the_cyclic_successor_graph() {
        // min((0,1),(2,0)) = (0,0), which the cycle does not contain.
        let rho = Relation::new(u(3), 2, [vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap();
        assert!(!preserves(&min3(), &rho).unwrap());
    }

    #[test]
    fn everything_preserves_the_empty_relation() {
        let rho = Relation::new(u(3), 2, []).unwrap();
        assert!(preserves(&min3(), &rho).unwrap());
    }

    #[test]
    fn projections_preserve_everything() {
        let rho = Relation::new(u(3), 2, [vec![0, 2], vec![1, 1], vec![2, 0]]).unwrap();
        for k in 1..=2 {
            let p = Operation::projection(2, k).unwrap();
            assert!(preserves(&p, &rho).unwrap());
        }
    }

    #[test]
    fn translation_preserves_subgroup_iff_shift_in_it() {
        use crate::group::GroupWindow;
        let w = GroupWindow::whole(crate::group::AbelianGroup::cyclic(12).unwrap()).unwrap();
        let h = Relation::unary(w.universe(), [0u8, 3, 6, 9]).unwrap();
        for a in 0..12i64 {
            let f = Operation::translation(w.clone(), &[a]).unwrap();
            let expected = a % 3 == 0; // a + H ⊆ H iff a ∈ H
            assert_eq!(preserves(&f, &h).unwrap(), expected, "shift {a}");
        }
    }

    #[test]
    fn relation_validation() {
        assert!(Relation::new(u(2), 2, [vec![0, 1, 1]]).is_err());
        assert!(Relation::new(u(2), 2, [vec![0, 2]]).is_err());
        assert!(Relation::new(u(2), 0, []).is_err());
    }
}
