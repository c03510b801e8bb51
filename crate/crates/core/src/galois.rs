//! Clone fragments, the Pol-Inv Galois connection, and local-closure
//! membership by interpolation on finite domains.
//!
//! A clone's n-ary *fragment* is the set of its n-ary members. Fragments
//! are generated by a worklist fixpoint: seed with the n projections, then
//! keep applying every generator to tuples of known members. `pol`
//! enumerates a fragment from the relational side by backtracking over
//! table entries; `inv_generate` closes a seed relation under the
//! generators; [`free_fragment_check`] cross-checks the two closures
//! against each other.

use std::collections::{BTreeSet, HashSet};

use crate::error::Error;
use crate::frontier::FrontierTuples;
use crate::operation::{OpTable, Operation};
use crate::relation::Relation;
use crate::universe::Universe;
use crate::Result;

/// The n-ary members of a clone over a universe, as canonical row-major
/// entry vectors in sorted order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FragmentSet {
    universe: Universe,
    arity: usize,
    tables: BTreeSet<Vec<u8>>,
    complete: bool,
}

impl FragmentSet {
    fn from_parts(
        universe: Universe,
        arity: usize,
        tables: impl IntoIterator<Item = Vec<u8>>,
        complete: bool,
    ) -> Self {
        FragmentSet {
            universe,
            arity,
            tables: tables.into_iter().collect(),
            complete,
        }
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// True when the fixpoint closed (always the case for results returned
    /// without a budget error).
    pub fn complete(&self) -> bool {
        self.complete
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn entry_vectors(&self) -> impl Iterator<Item = &Vec<u8>> {
        self.tables.iter()
    }

    pub fn contains_entries(&self, entries: &[u8]) -> bool {
        self.tables.contains(entries)
    }

    pub fn contains(&self, op: &Operation) -> Result<bool> {
        if op.arity() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: op.arity(),
            });
        }
        let t = op.tabulate(self.universe)?;
        Ok(self.contains_entries(t.entries()))
    }

    pub fn to_tables(&self) -> Vec<OpTable> {
        self.tables
            .iter()
            .map(|e| {
                OpTable::new(self.universe, self.arity, e.clone())
                    .expect("stored vectors are valid tables")
            })
            .collect()
    }

    /// Arity-wise intersection (the meet of clones, one arity at a time).
    pub fn intersect(&self, other: &FragmentSet) -> Result<FragmentSet> {
        if self.universe != other.universe {
            return Err(Error::UniverseMismatch);
        }
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: other.arity,
            });
        }
        Ok(FragmentSet {
            universe: self.universe,
            arity: self.arity,
            tables: self.tables.intersection(&other.tables).cloned().collect(),
            complete: self.complete && other.complete,
        })
    }

    pub fn same_tables(&self, other: &FragmentSet) -> bool {
        self.universe == other.universe && self.arity == other.arity && self.tables == other.tables
    }

    /// True when the fragment holds every table of its arity.
    pub fn is_full(&self) -> bool {
        matches!(total_tables(self.universe, self.arity), Some(t) if t == self.tables.len())
    }
}

/// `m^(m^n)` if it fits a `usize`: the number of n-ary tables over size m.
pub fn total_tables(u: Universe, arity: usize) -> Option<usize> {
    let len = u.point_count(arity)?;
    let mut acc: usize = 1;
    for _ in 0..len {
        acc = acc.checked_mul(u.size())?;
    }
    Some(acc)
}

/// Membership index for entry vectors: a bitset over base-m codes when the
/// code space is small, a hash set otherwise.
enum MemberIndex {
    Codes { m: usize, bits: Vec<u64> },
    Hashed(HashSet<Vec<u8>>),
}

const CODE_LIMIT: usize = 1 << 26;

impl MemberIndex {
    fn new(m: usize, code_space: Option<usize>) -> Self {
        match code_space {
            Some(total) if total <= CODE_LIMIT => MemberIndex::Codes {
                m,
                bits: vec![0u64; total.div_ceil(64)],
            },
            _ => MemberIndex::Hashed(HashSet::new()),
        }
    }

    fn code(m: usize, v: &[u8]) -> usize {
        v.iter().fold(0usize, |acc, &x| acc * m + x as usize)
    }

    fn contains(&self, v: &[u8]) -> bool {
        match self {
            MemberIndex::Codes { m, bits } => {
                let c = Self::code(*m, v);
                bits[c / 64] & (1 << (c % 64)) != 0
            }
            MemberIndex::Hashed(set) => set.contains(v),
        }
    }

    /// Insert; returns false when already present.
    fn insert(&mut self, v: &[u8]) -> bool {
        match self {
            MemberIndex::Codes { m, bits } => {
                let c = Self::code(*m, v);
                let mask = 1u64 << (c % 64);
                let fresh = bits[c / 64] & mask == 0;
                bits[c / 64] |= mask;
                fresh
            }
            MemberIndex::Hashed(set) => set.insert(v.to_vec()),
        }
    }
}

fn decode_entries(mut code: usize, m: usize, len: usize) -> Vec<u8> {
    let mut v = vec![0u8; len];
    for slot in v.iter_mut().rev() {
        *slot = (code % m) as u8;
        code /= m;
    }
    v
}

/// Close `list` under componentwise application of the generators: process
/// each element against every generator, drawing argument combinations from
/// the elements seen so far (combinations that involve the element being
/// processed, so nothing is visited twice). `saturation` is a size at which
/// the set is known to be closed — the count of all tables, or a ceiling
/// the caller can vouch for — and reaching it ends the sweep at once.
///
/// When the code space fits the bitset index, results are probed as packed
/// codes and only genuinely new vectors are materialized; this is the hot
/// loop of every closure in the crate.
fn close_entry_vectors(
    gens: &[OpTable],
    m: usize,
    len: usize,
    index: &mut MemberIndex,
    list: &mut Vec<Vec<u8>>,
    saturation: Option<usize>,
    budget: usize,
) -> Result<()> {
    let mut filled = saturation == Some(list.len());
    let mut scratch = vec![0u8; len];
    let mut e = 0;
    while e < list.len() && !filled {
        'generators: for f in gens {
            let fe = f.entries();
            let k = f.arity();
            let mut tuples = FrontierTuples::new(k, e);
            match index {
                MemberIndex::Codes { bits, .. } => {
                    while let Some(idxs) = tuples.next() {
                        let code = if k == 2 {
                            let a = &list[idxs[0]];
                            let b = &list[idxs[1]];
                            a.iter().zip(b.iter()).fold(0usize, |acc, (&x, &y)| {
                                acc * m + fe[x as usize * m + y as usize] as usize
                            })
                        } else {
                            let mut code = 0usize;
                            for i in 0..len {
                                let mut row = 0usize;
                                for &j in idxs {
                                    row = row * m + list[j][i] as usize;
                                }
                                code = code * m + fe[row] as usize;
                            }
                            code
                        };
                        let mask = 1u64 << (code % 64);
                        let slot = &mut bits[code / 64];
                        if *slot & mask == 0 {
                            *slot |= mask;
                            if list.len() >= budget {
                                return Err(Error::BudgetExceeded { budget });
                            }
                            list.push(decode_entries(code, m, len));
                            if saturation == Some(list.len()) {
                                filled = true;
                                break 'generators;
                            }
                        }
                    }
                }
                MemberIndex::Hashed(set) => {
                    while let Some(idxs) = tuples.next() {
                        for (i, slot) in scratch.iter_mut().enumerate() {
                            let mut row = 0usize;
                            for &j in idxs {
                                row = row * m + list[j][i] as usize;
                            }
                            *slot = fe[row];
                        }
                        if !set.contains(scratch.as_slice()) {
                            if list.len() >= budget {
                                return Err(Error::BudgetExceeded { budget });
                            }
                            set.insert(scratch.clone());
                            list.push(scratch.clone());
                            if saturation == Some(list.len()) {
                                filled = true;
                                break 'generators;
                            }
                        }
                    }
                }
            }
        }
        e += 1;
    }
    Ok(())
}

/// The exact n-ary fragment of the clone generated by `generators` over `u`.
///
/// Least fixpoint from the n projections: repeatedly tabulate
/// `f(h₁, …, h_k)` for every generator `f` and every k-tuple of current
/// members. Flattening terms so a generator is always outermost makes this
/// complete. Fails with `BudgetExceeded` when the fragment would grow past
/// `budget` tables.
///
/// # Examples
///
/// ```
/// use clonelab_core::galois::clone_fragment;
/// use clonelab_core::{Operation, OpTable, Universe};
/// let u = Universe::new(2).unwrap();
/// let not = Operation::Table(OpTable::new(u, 1, vec![1, 0]).unwrap());
/// let frag = clone_fragment(&[not], 1, u, 1000).unwrap();
/// assert_eq!(frag.len(), 2); // identity and negation
/// ```
pub fn clone_fragment(
    generators: &[Operation],
    arity: usize,
    u: Universe,
    budget: usize,
) -> Result<FragmentSet> {
    clone_fragment_capped(generators, arity, u, budget, None)
}

/// `clone_fragment` with a saturation ceiling: the caller promises the
/// closure cannot exceed `ceiling` tables (because the generators all lie in
/// a known clone of that fragment size), so reaching it means the fixpoint
/// is done. An unsound ceiling would silently truncate the closure; keep
/// this crate-private.
pub(crate) fn clone_fragment_capped(
    generators: &[Operation],
    arity: usize,
    u: Universe,
    budget: usize,
    ceiling: Option<usize>,
) -> Result<FragmentSet> {
    if arity == 0 {
        return Err(Error::invalid("arity must be at least 1"));
    }
    let len = u
        .point_count(arity)
        .ok_or(Error::BudgetExceeded { budget })?;
    let m = u.size();
    // the index must span the whole code space; the ceiling only moves the
    // saturation point the fixpoint is allowed to stop at
    let code_space = total_tables(u, arity);
    let saturation = ceiling.or(code_space);
    let gens: Vec<OpTable> = generators
        .iter()
        .map(|g| g.tabulate(u))
        .collect::<Result<_>>()?;

    let mut index = MemberIndex::new(m, code_space);
    let mut list: Vec<Vec<u8>> = Vec::new();
    for k in 1..=arity {
        let p = OpTable::projection(u, arity, k)?.into_entries();
        if index.insert(&p) {
            list.push(p);
        }
    }
    close_entry_vectors(&gens, m, len, &mut index, &mut list, saturation, budget)?;
    Ok(FragmentSet::from_parts(u, arity, list, true))
}

/// All n-ary tables over `u` preserving every relation in `relations`,
/// found by depth-first search over row-major table entries: a constraint
/// (one choice of argument rows from a relation) is checked as soon as its
/// last table cell is filled, pruning the subtree on violation.
pub fn pol(
    relations: &[Relation],
    arity: usize,
    u: Universe,
    budget: usize,
) -> Result<FragmentSet> {
    if arity == 0 {
        return Err(Error::invalid("arity must be at least 1"));
    }
    if relations.iter().any(|r| r.universe() != u) {
        return Err(Error::UniverseMismatch);
    }
    let len = u
        .point_count(arity)
        .ok_or(Error::BudgetExceeded { budget })?;
    let m = u.size();

    // One constraint per choice of `arity` rows of a relation: `cells[j]`
    // is the table index fed by column j, and the image tuple must lie in
    // the relation. Grouped by the largest cell so the DFS checks each
    // constraint exactly when it becomes decidable.
    struct Constraint {
        cells: Vec<usize>,
        relation: usize,
    }
    let mut buckets: Vec<Vec<Constraint>> = (0..len).map(|_| Vec::new()).collect();
    let mut constraint_count = 0usize;
    for (ri, rho) in relations.iter().enumerate() {
        let rows: Vec<&Vec<u8>> = rho.tuples().iter().collect();
        if rows.is_empty() {
            continue;
        }
        let mut choice = vec![0usize; arity];
        loop {
            constraint_count += 1;
            if constraint_count > budget {
                return Err(Error::BudgetExceeded { budget });
            }
            let mut cells = Vec::with_capacity(rho.arity());
            for j in 0..rho.arity() {
                let mut row = 0usize;
                for &c in &choice {
                    row = row * m + rows[c][j] as usize;
                }
                cells.push(row);
            }
            let max_cell = *cells.iter().max().expect("relation arity is positive");
            buckets[max_cell].push(Constraint { cells, relation: ri });
            let mut pos = arity;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                choice[pos] += 1;
                if choice[pos] < rows.len() {
                    break;
                }
                choice[pos] = 0;
            }
            if choice.iter().all(|&c| c == 0) {
                break;
            }
        }
    }

    struct Search<'a> {
        m: usize,
        len: usize,
        budget: usize,
        buckets: &'a [Vec<Constraint>],
        relations: &'a [Relation],
        entries: Vec<u8>,
        image: Vec<u8>,
        found: Vec<Vec<u8>>,
    }
    impl Search<'_> {
        fn admissible(&mut self, pos: usize) -> bool {
            let buckets = self.buckets;
            let relations = self.relations;
            for c in &buckets[pos] {
                self.image.clear();
                for &cell in &c.cells {
                    self.image.push(self.entries[cell]);
                }
                if !relations[c.relation].contains(&self.image) {
                    return false;
                }
            }
            true
        }
        fn fill(&mut self, pos: usize) -> Result<()> {
            if pos == self.len {
                if self.found.len() >= self.budget {
                    return Err(Error::BudgetExceeded {
                        budget: self.budget,
                    });
                }
                self.found.push(self.entries.clone());
                return Ok(());
            }
            for v in 0..self.m {
                self.entries[pos] = v as u8;
                if self.admissible(pos) {
                    self.fill(pos + 1)?;
                }
            }
            Ok(())
        }
    }

    let max_rel_arity = relations.iter().map(|r| r.arity()).max().unwrap_or(1);
    let mut search = Search {
        m,
        len,
        budget,
        buckets: &buckets,
        relations,
        entries: vec![0u8; len],
        image: Vec::with_capacity(max_rel_arity),
        found: Vec::new(),
    };
    search.fill(0)?;
    Ok(FragmentSet::from_parts(u, arity, search.found, true))
}

/// The least relation containing `seed` and invariant under every
/// generator: closure of the tuple set under componentwise application.
/// Closing under the generators alone suffices — compositions act
/// componentwise through them.
pub fn inv_generate(generators: &[Operation], seed: &Relation, budget: usize) -> Result<Relation> {
    let u = seed.universe();
    let m = u.size();
    let q = seed.arity();
    let gens: Vec<OpTable> = generators
        .iter()
        .map(|g| g.tabulate(u))
        .collect::<Result<_>>()?;
    let full = u.point_count(q);

    let mut index = MemberIndex::new(m, full);
    let mut list: Vec<Vec<u8>> = Vec::new();
    for t in seed.tuples() {
        if index.insert(t) {
            list.push(t.clone());
        }
    }
    close_entry_vectors(&gens, m, q, &mut index, &mut list, full, budget)?;
    Relation::new(u, q, list)
}

/// The restrictions to a finite domain of every n-ary member of the clone
/// generated by `generators`: value vectors parallel to the (sorted) domain.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RestrictionSet {
    universe: Universe,
    op_arity: usize,
    domain: Vec<Vec<u8>>,
    maps: BTreeSet<Vec<u8>>,
    complete: bool,
}

impl RestrictionSet {
    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn op_arity(&self) -> usize {
        self.op_arity
    }

    /// The domain in canonical (sorted) order; maps index against it.
    pub fn domain(&self) -> &[Vec<u8>] {
        &self.domain
    }

    pub fn maps(&self) -> &BTreeSet<Vec<u8>> {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn complete(&self) -> bool {
        self.complete
    }

    pub fn contains_map(&self, values: &[u8]) -> bool {
        self.maps.contains(values)
    }

    /// The restriction of an operation to this set's domain.
    pub fn restrict(&self, g: &Operation) -> Result<Vec<u8>> {
        if g.arity() != self.op_arity {
            return Err(Error::ArityMismatch {
                expected: self.op_arity,
                found: g.arity(),
            });
        }
        self.domain.iter().map(|t| g.evaluate(t)).collect()
    }
}

/// Compute the restrictions to `domain` of all members of the generated
/// clone, as a fixpoint over value vectors seeded with the restricted
/// projections.
///
/// Generators are applied pointwise, so symbolic operations that escape the
/// window somewhere on the domain's closure simply contribute nothing
/// there: an application is skipped at the first escaping point. Over a
/// window of the integers this is what makes translation clones behave like
/// the infinite picture (see the crate tests).
pub fn restriction_fragment(
    generators: &[Operation],
    domain: &[Vec<u8>],
    u: Universe,
    budget: usize,
) -> Result<RestrictionSet> {
    if domain.is_empty() {
        return Err(Error::invalid("interpolation domain must be nonempty"));
    }
    let op_arity = domain[0].len();
    if op_arity == 0 {
        return Err(Error::invalid("domain tuples must have positive arity"));
    }
    let domain: Vec<Vec<u8>> = domain
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    for t in &domain {
        if t.len() != op_arity {
            return Err(Error::ArityMismatch {
                expected: op_arity,
                found: t.len(),
            });
        }
        if let Some(&v) = t.iter().find(|&&v| !u.contains(v)) {
            return Err(Error::invalid(format!(
                "domain entry {v} outside universe {u}"
            )));
        }
    }
    let m = u.size();
    let points = domain.len();
    let full = u.point_count(points);

    // a generator application is either a table lookup or, when the
    // operation cannot be tabulated over u (translations near the window
    // edge), a pointwise evaluation that may opt out
    enum Applier<'a> {
        Table(OpTable),
        Pointwise(&'a Operation),
    }
    let mut gens: Vec<(usize, Applier)> = Vec::new();
    for g in generators {
        match g.tabulate(u) {
            Ok(t) => gens.push((g.arity(), Applier::Table(t))),
            Err(Error::ValueEscapesWindow { .. }) => gens.push((g.arity(), Applier::Pointwise(g))),
            Err(other) => return Err(other),
        }
    }

    let mut index = MemberIndex::new(m, full);
    let mut list: Vec<Vec<u8>> = Vec::new();
    for k in 0..op_arity {
        let p: Vec<u8> = domain.iter().map(|t| t[k]).collect();
        if index.insert(&p) {
            list.push(p);
        }
    }
    let mut filled = full == Some(list.len());
    let mut scratch = vec![0u8; points];
    let mut args = Vec::new();
    let mut e = 0;
    while e < list.len() && !filled {
        'generators: for (k, applier) in &gens {
            let mut tuples = FrontierTuples::new(*k, e);
            'applications: while let Some(idxs) = tuples.next() {
                for i in 0..points {
                    let value = match applier {
                        Applier::Table(t) => {
                            let mut row = 0usize;
                            for &j in idxs {
                                row = row * m + list[j][i] as usize;
                            }
                            t.entries()[row]
                        }
                        Applier::Pointwise(g) => {
                            args.clear();
                            args.extend(idxs.iter().map(|&j| list[j][i]));
                            match g.evaluate(&args) {
                                Ok(v) if u.contains(v) => v,
                                Ok(_) | Err(Error::ValueEscapesWindow { .. }) => {
                                    continue 'applications;
                                }
                                Err(other) => return Err(other),
                            }
                        }
                    };
                    scratch[i] = value;
                }
                if !index.contains(&scratch) {
                    if list.len() >= budget {
                        return Err(Error::BudgetExceeded { budget });
                    }
                    index.insert(&scratch);
                    list.push(scratch.clone());
                    if full == Some(list.len()) {
                        filled = true;
                        break 'generators;
                    }
                }
            }
        }
        e += 1;
    }
    Ok(RestrictionSet {
        universe: u,
        op_arity,
        domain,
        maps: list.into_iter().collect(),
        complete: true,
    })
}

/// Verdict of an interpolation-based membership test: refutations are
/// certified, confirmations hold only relative to the domains tested.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LocalVerdict {
    /// `g`'s restriction to this domain (sorted order) is interpolated by
    /// no clone member.
    No {
        domain_index: usize,
        domain: Vec<Vec<u8>>,
        restriction: Vec<u8>,
    },
    /// Every listed domain was interpolated.
    YesUpTo { domains_tested: usize },
}

impl LocalVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, LocalVerdict::YesUpTo { .. })
    }
}

/// Interpolation membership of `g` in the clone generated by `generators`:
/// `No` with a witness domain as soon as some listed domain cannot be
/// matched, `YesUpTo` otherwise.
pub fn local_member(
    g: &Operation,
    generators: &[Operation],
    domains: &[Vec<Vec<u8>>],
    u: Universe,
    budget: usize,
) -> Result<LocalVerdict> {
    for (i, domain) in domains.iter().enumerate() {
        let restrictions = restriction_fragment(generators, domain, u, budget)?;
        let target = restrictions.restrict(g)?;
        if !restrictions.contains_map(&target) {
            return Ok(LocalVerdict::No {
                domain_index: i,
                domain: restrictions.domain().to_vec(),
                restriction: target,
            });
        }
    }
    Ok(LocalVerdict::YesUpTo {
        domains_tested: domains.len(),
    })
}

/// Cross-check the two closure routes at one arity: generate the invariant
/// relation of the n coordinate tuples of `u^n` (the relation whose rows
/// are tables of clone members), and compare its rows against the directly
/// computed fragment.
pub fn free_fragment_check(
    generators: &[Operation],
    arity: usize,
    u: Universe,
    budget: usize,
) -> Result<bool> {
    if arity == 0 {
        return Err(Error::invalid("arity must be at least 1"));
    }
    let len = u
        .point_count(arity)
        .ok_or(Error::BudgetExceeded { budget })?;
    if len > budget {
        return Err(Error::BudgetExceeded { budget });
    }
    let mut seed = Vec::with_capacity(arity);
    for k in 1..=arity {
        seed.push(OpTable::projection(u, arity, k)?.into_entries());
    }
    let gamma = inv_generate(generators, &Relation::new(u, len, seed)?, budget)?;
    let fragment = clone_fragment(generators, arity, u, budget)?;
    Ok(gamma.tuples() == &fragment.tables)
}
