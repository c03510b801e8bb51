//! Finitely generated abelian groups `ℤ^r ⊕ ℤ_{m₁} ⊕ … ⊕ ℤ_{m_t}` given by a
//! rank and a list of torsion moduli, finite windows into them, and closure
//! of subsemigroups and subgroups.
//!
//! Elements are integer vectors of length `rank + torsion.len()`, free
//! coordinates first, torsion coordinates always reduced into `[0, mᵢ)`.
//! A [`GroupWindow`] fixes a bound per free coordinate and encodes the
//! resulting finite box as a [`Universe`] in mixed-radix order (coordinate 0
//! most significant), so translations can act on ordinary operation tables.

use std::collections::BTreeSet;

use crate::error::Error;
use crate::universe::{Universe, MAX_UNIVERSE};
use crate::Result;

/// An element, as a coordinate vector of length `rank + torsion.len()`.
pub type GroupElement = Vec<i64>;

/// Presentation of a finitely generated abelian group.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AbelianGroup {
    rank: usize,
    torsion: Vec<i64>,
}

impl AbelianGroup {
    pub fn new(rank: usize, torsion: Vec<i64>) -> Result<Self> {
        if let Some(&m) = torsion.iter().find(|&&m| m < 2) {
            return Err(Error::invalid(format!(
                "torsion modulus must be at least 2, got {m}"
            )));
        }
        if rank + torsion.len() == 0 {
            return Err(Error::invalid(
                "group needs at least one coordinate (rank 0 with no torsion is the trivial group)",
            ));
        }
        Ok(AbelianGroup { rank, torsion })
    }

    /// The integers `ℤ`.
    pub fn integers() -> Self {
        AbelianGroup {
            rank: 1,
            torsion: Vec::new(),
        }
    }

    /// The cyclic group `ℤ_n`.
    pub fn cyclic(n: i64) -> Result<Self> {
        AbelianGroup::new(0, vec![n])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &[i64] {
        &self.torsion
    }

    /// Number of coordinates of an element vector.
    pub fn dims(&self) -> usize {
        self.rank + self.torsion.len()
    }

    pub fn zero(&self) -> GroupElement {
        vec![0; self.dims()]
    }

    /// Build an element from raw coordinates, reducing torsion coordinates.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.dims() {
            return Err(Error::ArityMismatch {
                expected: self.dims(),
                found: coords.len(),
            });
        }
        let mut v = coords.to_vec();
        self.reduce(&mut v);
        Ok(v)
    }

    fn reduce(&self, v: &mut GroupElement) {
        for (slot, &m) in v[self.rank..].iter_mut().zip(&self.torsion) {
            *slot = slot.rem_euclid(m);
        }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        debug_assert_eq!(a.len(), self.dims());
        debug_assert_eq!(b.len(), self.dims());
        let mut out: GroupElement = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.reduce(&mut out);
        out
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        let mut out: GroupElement = a.iter().map(|x| -x).collect();
        self.reduce(&mut out);
        out
    }
}

impl std::fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for m in &self.torsion {
            parts.push(format!("Z_{m}"));
        }
        write!(f, "{}", parts.join(" x "))
    }
}

/// A finite box inside a group: every free coordinate restricted to
/// `[0, bound)`, torsion coordinates unrestricted (they are finite already).
/// The box is enumerated in mixed-radix order and exposed as a [`Universe`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupWindow {
    group: AbelianGroup,
    free_bounds: Vec<i64>,
}

impl GroupWindow {
    pub fn new(group: AbelianGroup, free_bounds: Vec<i64>) -> Result<Self> {
        if free_bounds.len() != group.rank() {
            return Err(Error::invalid(format!(
                "need one bound per free coordinate: rank is {}, got {} bounds",
                group.rank(),
                free_bounds.len()
            )));
        }
        if let Some(&b) = free_bounds.iter().find(|&&b| b < 1) {
            return Err(Error::invalid(format!(
                "window bounds must be at least 1, got {b}"
            )));
        }
        let mut total: i64 = 1;
        for radix in free_bounds.iter().chain(group.torsion()) {
            total = total.saturating_mul(*radix);
        }
        if total > MAX_UNIVERSE as i64 {
            return Err(Error::invalid(format!(
                "window holds {total} elements, more than the maximum universe size {MAX_UNIVERSE}"
            )));
        }
        Ok(GroupWindow { group, free_bounds })
    }

    /// The window `{0..m-1}` of the integers.
    pub fn z_window(m: usize) -> Result<Self> {
        GroupWindow::new(AbelianGroup::integers(), vec![m as i64])
    }

    /// The whole of a finite (torsion-only) group as its own window.
    pub fn whole(group: AbelianGroup) -> Result<Self> {
        if group.rank() != 0 {
            return Err(Error::invalid(
                "only a torsion group fits in a window whole; give bounds for free coordinates",
            ));
        }
        GroupWindow::new(group, Vec::new())
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn free_bounds(&self) -> &[i64] {
        &self.free_bounds
    }

    fn radixes(&self) -> impl Iterator<Item = i64> + '_ {
        self.free_bounds
            .iter()
            .chain(self.group.torsion())
            .copied()
    }

    pub fn universe(&self) -> Universe {
        let total: i64 = self.radixes().product();
        Universe::new(total as usize).expect("window size validated at construction")
    }

    /// Mixed-radix code of an element, or `None` if a free coordinate is
    /// outside its bound.
    pub fn encode(&self, e: &GroupElement) -> Option<u8> {
        if e.len() != self.group.dims() {
            return None;
        }
        let mut acc: i64 = 0;
        for (&coord, radix) in e.iter().zip(self.radixes()) {
            if coord < 0 || coord >= radix {
                return None;
            }
            acc = acc * radix + coord;
        }
        Some(acc as u8)
    }

    /// Inverse of [`GroupWindow::encode`].
    pub fn decode(&self, x: u8) -> GroupElement {
        let mut rest = x as i64;
        let radixes: Vec<i64> = self.radixes().collect();
        let mut out = vec![0i64; radixes.len()];
        for (slot, &radix) in out.iter_mut().zip(&radixes).rev() {
            *slot = rest % radix;
            rest /= radix;
        }
        debug_assert_eq!(rest, 0, "code out of range for this window");
        out
    }
}

/// Result of a closure that may have been cut off by its budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemigroupClosure {
    pub elements: BTreeSet<GroupElement>,
    /// True when the closure stabilized; false when the budget cut it short.
    pub complete: bool,
}

/// The subsemigroup of `(G, +)` generated by a nonempty seed set: all finite
/// sums of seed elements.
///
/// Elements are found smallest-first (rounds of single-seed increments,
/// each round sorted), so a budget cut keeps the lexicographically least
/// `budget` many elements found so far and sets `complete = false` instead
/// of failing.
///
/// # Examples
///
/// ```
/// use clonelab_core::group::{subsemigroup, AbelianGroup};
/// let z6 = AbelianGroup::cyclic(6).unwrap();
/// let s = subsemigroup(&z6, &[vec![2]], 100).unwrap();
/// assert!(s.complete);
/// assert_eq!(s.elements.len(), 3); // {0, 2, 4}
/// ```
pub fn subsemigroup(
    group: &AbelianGroup,
    seed: &[GroupElement],
    budget: usize,
) -> Result<SemigroupClosure> {
    if seed.is_empty() {
        return Err(Error::invalid("subsemigroup needs a nonempty seed set"));
    }
    let seeds: Vec<GroupElement> = seed
        .iter()
        .map(|s| group.element(s))
        .collect::<Result<_>>()?;
    let mut elements: BTreeSet<GroupElement> = BTreeSet::new();
    let mut frontier: Vec<GroupElement> = Vec::new();
    for s in &seeds {
        if elements.len() >= budget {
            return Ok(SemigroupClosure {
                elements,
                complete: false,
            });
        }
        if elements.insert(s.clone()) {
            frontier.push(s.clone());
        }
    }
    while !frontier.is_empty() {
        let mut fresh: BTreeSet<GroupElement> = BTreeSet::new();
        for x in &frontier {
            for s in &seeds {
                let y = group.add(x, s);
                if !elements.contains(&y) {
                    fresh.insert(y);
                }
            }
        }
        frontier.clear();
        for y in fresh {
            if elements.len() >= budget {
                return Ok(SemigroupClosure {
                    elements,
                    complete: false,
                });
            }
            elements.insert(y.clone());
            frontier.push(y);
        }
    }
    Ok(SemigroupClosure {
        elements,
        complete: true,
    })
}

/// A subgroup given by generators; membership is decided by closure inside
/// a coordinate box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupHandle {
    group: AbelianGroup,
    generators: Vec<GroupElement>,
}

impl SubgroupHandle {
    pub fn new(group: AbelianGroup, generators: Vec<GroupElement>) -> Result<Self> {
        let generators = generators
            .iter()
            .map(|g| group.element(g))
            .collect::<Result<_>>()?;
        Ok(SubgroupHandle { group, generators })
    }

    /// The trivial subgroup `{0}`.
    pub fn trivial(group: AbelianGroup) -> Self {
        SubgroupHandle {
            group,
            generators: Vec::new(),
        }
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    fn coord_magnitude(&self) -> i64 {
        self.generators
            .iter()
            .flat_map(|g| g.iter().map(|c| c.abs()))
            .max()
            .unwrap_or(0)
    }

    /// All subgroup elements whose free coordinates stay within
    /// `[-coord_bound, coord_bound]`, by closure under adding `±generator`
    /// (padded internally by the generators' own magnitude so walks may
    /// overshoot the box slightly).
    ///
    /// `complete` means the closure stabilized inside the padded box within
    /// budget; torsion-only groups are enumerated exactly.
    pub fn closure(&self, coord_bound: i64, budget: usize) -> SemigroupClosure {
        let pad = coord_bound + self.coord_magnitude();
        let rank = self.group.rank();
        let inside = |e: &GroupElement| e[..rank].iter().all(|c| c.abs() <= pad);
        let mut steps: Vec<GroupElement> = Vec::new();
        for g in &self.generators {
            steps.push(g.clone());
            steps.push(self.group.neg(g));
        }
        let mut elements: BTreeSet<GroupElement> = BTreeSet::new();
        elements.insert(self.group.zero());
        let mut frontier: Vec<GroupElement> = vec![self.group.zero()];
        while !frontier.is_empty() {
            let mut fresh: BTreeSet<GroupElement> = BTreeSet::new();
            for x in &frontier {
                for s in &steps {
                    let y = self.group.add(x, s);
                    if inside(&y) && !elements.contains(&y) {
                        fresh.insert(y);
                    }
                }
            }
            frontier.clear();
            for y in fresh {
                if elements.len() >= budget {
                    return SemigroupClosure {
                        elements,
                        complete: false,
                    };
                }
                elements.insert(y.clone());
                frontier.push(y);
            }
        }
        SemigroupClosure {
            elements,
            complete: true,
        }
    }

    /// Membership test by closure. The box is derived from the element and
    /// the generators; a budget cut that did not reach the element is
    /// reported as `BudgetExceeded` rather than guessed.
    pub fn contains(&self, e: &GroupElement, budget: usize) -> Result<bool> {
        let e = self.group.element(e)?;
        let magnitude = e
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or(0)
            .max(self.coord_magnitude());
        let closure = self.closure(2 * magnitude + 2, budget);
        if closure.elements.contains(&e) {
            Ok(true)
        } else if closure.complete {
            Ok(false)
        } else {
            Err(Error::BudgetExceeded { budget })
        }
    }

    /// The subgroup's trace on a window, as window codes.
    pub fn encoded_elements(&self, window: &GroupWindow, budget: usize) -> Result<BTreeSet<u8>> {
        let bound = window
            .free_bounds()
            .iter()
            .copied()
            .max()
            .unwrap_or(0)
            .max(self.coord_magnitude());
        let closure = self.closure(bound, budget);
        if !closure.complete {
            return Err(Error::BudgetExceeded { budget });
        }
        Ok(closure
            .elements
            .iter()
            .filter_map(|e| window.encode(e))
            .collect())
    }
}
