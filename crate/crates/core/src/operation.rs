//! Finitary operations: explicit row-major tables and symbolic families
//! (projections, translations, indicators, constants, patched operations,
//! composition trees).
//!
//! Symbolic operations carry window-independent semantics: evaluation either
//! returns the exact value or fails with `ValueEscapesWindow`, never clamps.
//! Canonical equality of operations is equality of tabulations over the
//! active universe, not syntax; see [`Operation::equal_on`].

use std::collections::BTreeSet;

use crate::error::Error;
use crate::group::{GroupElement, GroupWindow};
use crate::universe::Universe;
use crate::Result;

/// An explicit operation table: `entries[u.row_index(args)]` is the value at
/// `args`, tuples enumerated in row-major lexicographic order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct OpTable {
    universe: Universe,
    arity: usize,
    entries: Vec<u8>,
}

impl OpTable {
    pub fn new(universe: Universe, arity: usize, entries: Vec<u8>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::invalid("arity must be at least 1"));
        }
        let expected = universe
            .point_count(arity)
            .ok_or_else(|| Error::invalid("table too large to index"))?;
        if entries.len() != expected {
            return Err(Error::invalid(format!(
                "table over {universe} at arity {arity} needs {expected} entries, got {}",
                entries.len()
            )));
        }
        if let Some(&v) = entries.iter().find(|&&v| !universe.contains(v)) {
            return Err(Error::invalid(format!(
                "table value {v} outside universe {universe}"
            )));
        }
        Ok(OpTable {
            universe,
            arity,
            entries,
        })
    }

    /// The table of the k-th n-ary projection (k is 1-based).
    pub fn projection(universe: Universe, arity: usize, index: usize) -> Result<Self> {
        if arity == 0 || index == 0 || index > arity {
            return Err(Error::invalid(format!(
                "projection index {index} out of range for arity {arity}"
            )));
        }
        let len = universe
            .point_count(arity)
            .ok_or_else(|| Error::invalid("table too large to index"))?;
        let m = universe.size();
        let stride = universe
            .point_count(arity - index)
            .expect("smaller power of an indexable size");
        let entries = (0..len).map(|i| ((i / stride) % m) as u8).collect();
        Ok(OpTable {
            universe,
            arity,
            entries,
        })
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<u8> {
        self.entries
    }

    pub fn evaluate(&self, args: &[u8]) -> Result<u8> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: args.len(),
            });
        }
        if args.iter().any(|&x| !self.universe.contains(x)) {
            return Err(Error::ValueEscapesWindow {
                args: args.to_vec(),
            });
        }
        Ok(self.entries[self.universe.row_index(args)])
    }

    /// True when the value never depends on the given coordinate (0-based).
    pub fn is_fictitious(&self, coord: usize) -> bool {
        assert!(coord < self.arity, "coordinate out of range");
        let m = self.universe.size();
        let stride = self
            .universe
            .point_count(self.arity - 1 - coord)
            .expect("stride of a valid table");
        self.entries.iter().enumerate().all(|(i, &v)| {
            let digit = (i / stride) % m;
            v == self.entries[i - digit * stride]
        })
    }

    /// Delete one coordinate by fixing it to 0 (meaningful when the
    /// coordinate is fictitious). Fails on unary tables.
    pub fn without_coordinate(&self, coord: usize) -> Result<OpTable> {
        if self.arity < 2 {
            return Err(Error::invalid("cannot delete the only coordinate"));
        }
        assert!(coord < self.arity, "coordinate out of range");
        let mut entries = Vec::with_capacity(self.entries.len() / self.universe.size());
        let mut args = vec![0u8; self.arity - 1];
        loop {
            let mut full = args.to_vec();
            full.insert(coord, 0);
            entries.push(self.entries[self.universe.row_index(&full)]);
            if !self.universe.advance(&mut args) {
                break;
            }
        }
        OpTable::new(self.universe, self.arity - 1, entries)
    }

    /// Delete fictitious coordinates until none is left or the table is
    /// unary. A wholly constant table ends as a unary constant.
    pub fn essential_core(&self) -> OpTable {
        let mut t = self.clone();
        while t.arity > 1 {
            match (0..t.arity).find(|&i| t.is_fictitious(i)) {
                Some(i) => {
                    t = t
                        .without_coordinate(i)
                        .expect("arity checked above to be at least 2");
                }
                None => break,
            }
        }
        t
    }

    /// The list of coordinates the value actually depends on.
    pub fn essential_coordinates(&self) -> Vec<usize> {
        (0..self.arity).filter(|&i| !self.is_fictitious(i)).collect()
    }
}

/// A symbolic translation `x ↦ shift + x` over a group window.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Translation {
    window: GroupWindow,
    shift: GroupElement,
}

impl Translation {
    pub fn new(window: GroupWindow, shift: &[i64]) -> Result<Self> {
        let shift = window.group().element(shift)?;
        Ok(Translation { window, shift })
    }

    pub fn window(&self) -> &GroupWindow {
        &self.window
    }

    pub fn shift(&self) -> &GroupElement {
        &self.shift
    }

    fn apply(&self, x: u8) -> Result<u8> {
        if !self.window.universe().contains(x) {
            return Err(Error::ValueEscapesWindow { args: vec![x] });
        }
        let moved = self.window.group().add(&self.window.decode(x), &self.shift);
        self.window
            .encode(&moved)
            .ok_or(Error::ValueEscapesWindow { args: vec![x] })
    }
}

/// An operation: an explicit table or a symbolic construction.
#[derive(Clone, Debug)]
pub enum Operation {
    Table(OpTable),
    /// The k-th of n arguments, `index` 1-based.
    Projection { arity: usize, index: usize },
    /// `x ↦ shift + x` over a group window.
    Translation(Translation),
    /// `x ↦ inside` when `x ∈ on`, else `outside`.
    Indicator {
        on: BTreeSet<u8>,
        inside: u8,
        outside: u8,
    },
    Constant { arity: usize, value: u8 },
    /// `(x, y) ↦ y` when every x-coordinate lies in `on`, else `inner(x)`.
    Patch {
        inner: Box<Operation>,
        on: BTreeSet<u8>,
    },
    Composed {
        outer: Box<Operation>,
        inners: Vec<Operation>,
    },
}

impl From<OpTable> for Operation {
    fn from(t: OpTable) -> Self {
        Operation::Table(t)
    }
}

impl Operation {
    pub fn projection(arity: usize, index: usize) -> Result<Self> {
        if arity == 0 || index == 0 || index > arity {
            return Err(Error::invalid(format!(
                "projection index {index} out of range for arity {arity}"
            )));
        }
        Ok(Operation::Projection { arity, index })
    }

    pub fn translation(window: GroupWindow, shift: &[i64]) -> Result<Self> {
        Ok(Operation::Translation(Translation::new(window, shift)?))
    }

    pub fn indicator(on: impl IntoIterator<Item = u8>, inside: u8, outside: u8) -> Result<Self> {
        let on: BTreeSet<u8> = on.into_iter().collect();
        if on.is_empty() {
            return Err(Error::invalid("indicator set must be nonempty"));
        }
        Ok(Operation::Indicator {
            on,
            inside,
            outside,
        })
    }

    pub fn constant(arity: usize, value: u8) -> Result<Self> {
        if arity == 0 {
            return Err(Error::invalid("arity must be at least 1"));
        }
        Ok(Operation::Constant { arity, value })
    }

    /// The patched operation `s(x₁..x_m, y)`: the last-coordinate projection
    /// on `on^m × u`, the inner operation elsewhere.
    pub fn patch(inner: Operation, on: impl IntoIterator<Item = u8>) -> Self {
        Operation::Patch {
            inner: Box::new(inner),
            on: on.into_iter().collect(),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Operation::Table(t) => t.arity(),
            Operation::Projection { arity, .. } => *arity,
            Operation::Translation(_) => 1,
            Operation::Indicator { .. } => 1,
            Operation::Constant { arity, .. } => *arity,
            Operation::Patch { inner, .. } => inner.arity() + 1,
            Operation::Composed { inners, .. } => inners[0].arity(),
        }
    }

    /// Evaluate at an argument tuple.
    ///
    /// # Examples
    ///
    /// ```
    /// use clonelab_core::Operation;
    /// let p = Operation::projection(3, 2).unwrap();
    /// assert_eq!(p.evaluate(&[4, 7, 1]).unwrap(), 7);
    /// ```
    pub fn evaluate(&self, args: &[u8]) -> Result<u8> {
        if args.len() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: args.len(),
            });
        }
        match self {
            Operation::Table(t) => t.evaluate(args),
            Operation::Projection { index, .. } => Ok(args[index - 1]),
            Operation::Translation(t) => t.apply(args[0]),
            Operation::Indicator {
                on,
                inside,
                outside,
            } => Ok(if on.contains(&args[0]) {
                *inside
            } else {
                *outside
            }),
            Operation::Constant { value, .. } => Ok(*value),
            Operation::Patch { inner, on } => {
                let (x, y) = args.split_at(inner.arity());
                if x.iter().all(|v| on.contains(v)) {
                    Ok(y[0])
                } else {
                    inner.evaluate(x)
                }
            }
            Operation::Composed { outer, inners } => {
                let mid: Vec<u8> = inners
                    .iter()
                    .map(|g| g.evaluate(args))
                    .collect::<Result<_>>()?;
                outer.evaluate(&mid)
            }
        }
    }

    /// The full table over a universe; fails with `ValueEscapesWindow` at
    /// the first argument tuple whose value (or evaluation) leaves it.
    pub fn tabulate(&self, u: Universe) -> Result<OpTable> {
        if let Operation::Table(t) = self {
            if t.universe() == u {
                return Ok(t.clone());
            }
        }
        let arity = self.arity();
        let len = u
            .point_count(arity)
            .ok_or_else(|| Error::invalid("table too large to index"))?;
        let mut entries = Vec::with_capacity(len);
        let mut args = vec![0u8; arity];
        loop {
            let v = self.evaluate(&args)?;
            if !u.contains(v) {
                return Err(Error::ValueEscapesWindow { args: args.clone() });
            }
            entries.push(v);
            if !u.advance(&mut args) {
                break;
            }
        }
        OpTable::new(u, arity, entries)
    }

    /// Extensional equality over a universe.
    pub fn equal_on(&self, other: &Operation, u: Universe) -> Result<bool> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: other.arity(),
            });
        }
        Ok(self.tabulate(u)? == other.tabulate(u)?)
    }
}

/// Compose an outer operation with inner operations of one shared arity.
///
/// When everything is an explicit table over one universe the result is the
/// composed table; otherwise a symbolic composition node. The inner count
/// must equal the outer arity.
///
/// # Examples
///
/// ```
/// use clonelab_core::{compose, Operation, OpTable, Universe};
/// let u = Universe::new(2).unwrap();
/// let not = Operation::Table(OpTable::new(u, 1, vec![1, 0]).unwrap());
/// let first = Operation::Table(OpTable::projection(u, 2, 1).unwrap());
/// let t = compose(&not, &[first]).unwrap().tabulate(u).unwrap();
/// assert_eq!(t.entries(), &[1, 1, 0, 0]);
/// ```
pub fn compose(outer: &Operation, inners: &[Operation]) -> Result<Operation> {
    if inners.len() != outer.arity() {
        return Err(Error::ArityMismatch {
            expected: outer.arity(),
            found: inners.len(),
        });
    }
    let arity = inners[0].arity();
    if let Some(bad) = inners.iter().find(|g| g.arity() != arity) {
        return Err(Error::ArityMismatch {
            expected: arity,
            found: bad.arity(),
        });
    }
    let all_tables = std::iter::once(outer)
        .chain(inners)
        .all(|op| matches!(op, Operation::Table(_)));
    if all_tables {
        let Operation::Table(f) = outer else {
            unreachable!()
        };
        let u = f.universe();
        let tables: Vec<&OpTable> = inners
            .iter()
            .map(|g| match g {
                Operation::Table(t) => t,
                _ => unreachable!(),
            })
            .collect();
        if tables.iter().any(|t| t.universe() != u) {
            return Err(Error::UniverseMismatch);
        }
        let m = u.size();
        let len = tables[0].entries().len();
        let mut entries = Vec::with_capacity(len);
        for i in 0..len {
            let mut row = 0usize;
            for t in &tables {
                row = row * m + t.entries()[i] as usize;
            }
            entries.push(f.entries()[row]);
        }
        return Ok(Operation::Table(OpTable::new(u, arity, entries)?));
    }
    Ok(Operation::Composed {
        outer: Box::new(outer.clone()),
        inners: inners.to_vec(),
    })
}

/// Do two operations of one arity agree on every tuple of a finite domain?
pub fn agree_on(f: &Operation, g: &Operation, domain: &[Vec<u8>]) -> Result<bool> {
    if f.arity() != g.arity() {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            found: g.arity(),
        });
    }
    for t in domain {
        if t.len() != f.arity() {
            return Err(Error::ArityMismatch {
                expected: f.arity(),
                found: t.len(),
            });
        }
        if f.evaluate(t)? != g.evaluate(t)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Webb's operation `(x, y) ↦ max(x, y) + 1 mod m`, a single generator of
/// all operations on any finite universe (NOR when m = 2).
pub fn webb(u: Universe) -> OpTable {
    let m = u.size();
    let mut entries = Vec::with_capacity(m * m);
    for x in 0..m {
        for y in 0..m {
            entries.push(((x.max(y) + 1) % m) as u8);
        }
    }
    OpTable::new(u, 2, entries).expect("construction stays inside the universe")
}
