//! Clone handles compared arity-by-arity: inclusion tests, joins, meets of
//! fragments, antichain certification against a reference top or bottom,
//! covering probes above a fixed base clone, and DOT export of the
//! resulting order diagrams.
//!
//! A handle names a clone by generators; every question about it is asked
//! through its n-ary fragments, so all answers are exact for the arities
//! inspected and silent about larger ones.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::Error;
use crate::galois::{clone_fragment, clone_fragment_capped, pol, FragmentSet};
use crate::operation::{webb, OpTable, Operation};
use crate::relation::Relation;
use crate::sampling;
use crate::universe::Universe;
use crate::{Result, DEFAULT_BUDGET};

/// A clone presented by generators, with cached fragments per arity.
pub struct CloneHandle {
    label: String,
    universe: Universe,
    generators: Vec<Operation>,
    budget: usize,
    cache: Mutex<BTreeMap<usize, Arc<FragmentSet>>>,
}

impl Clone for CloneHandle {
    fn clone(&self) -> Self {
        CloneHandle {
            label: self.label.clone(),
            universe: self.universe,
            generators: self.generators.clone(),
            budget: self.budget,
            cache: Mutex::new(self.cache.lock().expect("cache lock").clone()),
        }
    }
}

impl fmt::Debug for CloneHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CloneHandle")
            .field("label", &self.label)
            .field("universe", &self.universe)
            .field("generators", &self.generators.len())
            .field("budget", &self.budget)
            .finish()
    }
}

impl CloneHandle {
    pub fn new(
        label: impl Into<String>,
        universe: Universe,
        generators: Vec<Operation>,
    ) -> CloneHandle {
        CloneHandle {
            label: label.into(),
            universe,
            generators,
            budget: DEFAULT_BUDGET,
            cache: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn with_budget(mut self, budget: usize) -> CloneHandle {
        self.budget = budget;
        self
    }

    /// The clone of projections, the bottom of the lattice.
    pub fn projections_only(universe: Universe) -> CloneHandle {
        CloneHandle::new("projections", universe, Vec::new())
    }

    /// The clone of all operations, the top of the lattice, presented by a
    /// single binary generator.
    pub fn all_operations(universe: Universe) -> CloneHandle {
        CloneHandle::new(
            "all operations",
            universe,
            vec![Operation::Table(webb(universe))],
        )
    }

    /// The clone of all operations preserving each relation, presented by a
    /// small generating subset of its fragments up to `cap`. The fragments
    /// are computed outright and then sieved greedily: a table is kept as a
    /// generator only when the tables kept so far fail to reproduce it. The
    /// handle generates exactly the clone the full fragment list would, but
    /// joins and covering probes against it stay tractable.
    pub fn pol_handle(
        label: impl Into<String>,
        universe: Universe,
        relations: &[Relation],
        cap: usize,
        budget: usize,
    ) -> Result<CloneHandle> {
        use rand::seq::SliceRandom;
        let mut order = sampling::rng(0x706f6c);
        let mut seeds: Vec<Operation> = Vec::new();
        for arity in 1..=cap {
            let fragment = pol(relations, arity, universe, budget)?;
            // the seeds all preserve the relations, so their closure can
            // never leave the fragment: its size is a sound ceiling
            let ceiling = Some(fragment.len());
            let mut closure =
                clone_fragment_capped(&seeds, arity, universe, budget, ceiling)?;
            // scan in a fixed shuffled order: sorted order fronts the weak
            // constant-like tables and the sieve collects far more seeds
            let mut candidates = fragment.to_tables();
            candidates.shuffle(&mut order);
            for table in candidates {
                if !closure.contains_entries(table.entries()) {
                    seeds.push(Operation::Table(table));
                    closure =
                        clone_fragment_capped(&seeds, arity, universe, budget, ceiling)?;
                }
            }
        }
        Ok(CloneHandle::new(label, universe, seeds).with_budget(budget))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn generators(&self) -> &[Operation] {
        &self.generators
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// The n-ary fragment, computed once and cached.
    pub fn fragment(&self, arity: usize) -> Result<Arc<FragmentSet>> {
        if let Some(f) = self.cache.lock().expect("cache lock").get(&arity) {
            return Ok(Arc::clone(f));
        }
        let fresh = Arc::new(clone_fragment(
            &self.generators,
            arity,
            self.universe,
            self.budget,
        )?);
        self.cache
            .lock()
            .expect("cache lock")
            .entry(arity)
            .or_insert_with(|| Arc::clone(&fresh));
        Ok(fresh)
    }

    /// Exact membership of an operation in the fragment of its arity.
    pub fn contains(&self, f: &Operation) -> Result<bool> {
        let fragment = self.fragment(f.arity())?;
        fragment.contains(f)
    }
}

fn same_universe(c: &CloneHandle, d: &CloneHandle) -> Result<()> {
    if c.universe() != d.universe() {
        return Err(Error::UniverseMismatch);
    }
    Ok(())
}

/// Is C ≤ D as witnessed by generators up to `cap`? Exact when every
/// generator of C has arity at most `cap`; generators above the cap make
/// the comparison partial, so they are rejected loudly.
pub fn leq(c: &CloneHandle, d: &CloneHandle, cap: usize) -> Result<bool> {
    same_universe(c, d)?;
    if let Some(g) = c.generators().iter().find(|g| g.arity() > cap) {
        return Err(Error::invalid(format!(
            "generator of arity {} exceeds comparison cap {cap}",
            g.arity()
        )));
    }
    for g in c.generators() {
        if !d.contains(g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Do two handles present the same clone, as far as fragments up to `cap`
/// can tell?
pub fn same_fragments(c: &CloneHandle, d: &CloneHandle, cap: usize) -> Result<bool> {
    same_universe(c, d)?;
    for arity in 1..=cap {
        if !fragments_match(c, d, arity)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn fragments_match(c: &CloneHandle, d: &CloneHandle, arity: usize) -> Result<bool> {
    let a = c.fragment(arity)?;
    let b = d.fragment(arity)?;
    Ok(a.same_tables(&b))
}

/// The join: the clone generated by both generator lists together.
pub fn join(c: &CloneHandle, d: &CloneHandle) -> Result<CloneHandle> {
    same_universe(c, d)?;
    let mut generators = c.generators().to_vec();
    generators.extend(d.generators().iter().cloned());
    Ok(
        CloneHandle::new(format!("({} ∨ {})", c.label(), d.label()), c.universe(), generators)
            .with_budget(c.budget().max(d.budget())),
    )
}

/// The meet, fragment by fragment: the n-ary part of an intersection of
/// clones is exactly the intersection of the n-ary fragments, so the meet
/// is returned as fragments for arities 1..=cap rather than by generators.
pub fn meet_fragments(c: &CloneHandle, d: &CloneHandle, cap: usize) -> Result<Vec<FragmentSet>> {
    same_universe(c, d)?;
    let mut out = Vec::with_capacity(cap);
    for arity in 1..=cap {
        let a = c.fragment(arity)?;
        let b = d.fragment(arity)?;
        out.push(a.intersect(&b)?);
    }
    Ok(out)
}

/// Which extreme an antichain certification compares against.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AntichainMode {
    /// Every pairwise join must equal the reference handle.
    JoinTop,
    /// Every pairwise meet must equal the reference handle.
    MeetBottom,
}

/// One pair that failed certification, with the first arity telling them
/// apart.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct AntichainFailure {
    pub left: usize,
    pub right: usize,
    pub arity: usize,
}

/// The outcome of [`antichain_check`].
#[derive(Clone, Debug)]
pub struct AntichainReport {
    pub mode: AntichainMode,
    pub cap: usize,
    pub pairs_checked: usize,
    pub failures: Vec<AntichainFailure>,
}

impl AntichainReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Certify a family pairwise: in `JoinTop` mode every join of two distinct
/// members must match the reference on all fragments up to `cap`; in
/// `MeetBottom` mode every meet must. Failures record the first arity where
/// a pair misses.
pub fn antichain_check(
    handles: &[CloneHandle],
    cap: usize,
    mode: AntichainMode,
    reference: &CloneHandle,
) -> Result<AntichainReport> {
    for h in handles {
        same_universe(h, reference)?;
    }
    let mut failures = Vec::new();
    let mut pairs_checked = 0;
    for i in 0..handles.len() {
        for j in (i + 1)..handles.len() {
            pairs_checked += 1;
            let miss = match mode {
                AntichainMode::JoinTop => {
                    let joined = join(&handles[i], &handles[j])?;
                    first_fragment_difference(&joined, reference, cap)?
                }
                AntichainMode::MeetBottom => {
                    let meets = meet_fragments(&handles[i], &handles[j], cap)?;
                    let mut miss = None;
                    for (k, m) in meets.iter().enumerate() {
                        let reference_fragment = reference.fragment(k + 1)?;
                        if !m.same_tables(&reference_fragment) {
                            miss = Some(k + 1);
                            break;
                        }
                    }
                    miss
                }
            };
            if let Some(arity) = miss {
                failures.push(AntichainFailure {
                    left: i,
                    right: j,
                    arity,
                });
            }
        }
    }
    Ok(AntichainReport {
        mode,
        cap,
        pairs_checked,
        failures,
    })
}

fn first_fragment_difference(
    c: &CloneHandle,
    d: &CloneHandle,
    cap: usize,
) -> Result<Option<usize>> {
    for arity in 1..=cap {
        if !fragments_match(c, d, arity)? {
            return Ok(Some(arity));
        }
    }
    Ok(None)
}

/// The outcome of [`covering_check`].
#[derive(Clone, Debug)]
pub struct CoveringReport {
    /// How many non-member samples were requested.
    pub requested: usize,
    /// How many non-member samples were actually tested.
    pub tested: usize,
    /// Samples discarded because they already lay in the base clone.
    pub skipped: usize,
    /// Sampled tables whose adjunction failed to generate everything.
    pub failures: Vec<OpTable>,
}

impl CoveringReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty() && self.tested == self.requested
    }
}

/// Probe whether the clone of operations preserving a block sits directly
/// below the top: sample random tables outside it and check that adjoining
/// any one of them generates all operations on every fragment up to `cap`.
/// A passing report is evidence bounded by `trials` and `cap`, not a proof.
pub fn covering_check(
    block: &[u8],
    cap: usize,
    universe: Universe,
    trials: usize,
    seed: u64,
    budget: usize,
) -> Result<CoveringReport> {
    let sorted = validate_block(block, universe)?;
    if cap == 0 {
        return Err(Error::invalid("cap must be at least 1"));
    }
    let relation = Relation::unary(universe, sorted.iter().copied())?;
    let base = CloneHandle::pol_handle(
        "preserving the block",
        universe,
        std::slice::from_ref(&relation),
        cap,
        budget,
    )?;
    let mut rng = sampling::rng(seed);
    let mut report = CoveringReport {
        requested: trials,
        tested: 0,
        skipped: 0,
        failures: Vec::new(),
    };
    let attempt_cap = trials.saturating_mul(50).saturating_add(100);
    let mut attempts = 0;
    while report.tested < trials && attempts < attempt_cap {
        attempts += 1;
        let arity = (rng_range(&mut rng, cap)) + 1;
        let table = sampling::random_table(universe, arity, &mut rng);
        if maps_block_into_itself(&table, &sorted) {
            report.skipped += 1;
            continue;
        }
        report.tested += 1;
        let mut generators = base.generators().to_vec();
        generators.push(Operation::Table(table.clone()));
        let mut filled = true;
        for n in 1..=cap {
            let fragment = clone_fragment(&generators, n, universe, budget)?;
            if !fragment.is_full() {
                filled = false;
                break;
            }
        }
        if !filled {
            report.failures.push(table);
        }
    }
    Ok(report)
}

fn rng_range(rng: &mut impl rand::Rng, bound: usize) -> usize {
    rng.gen_range(0..bound)
}

fn validate_block(block: &[u8], universe: Universe) -> Result<Vec<u8>> {
    let sorted: Vec<u8> = block
        .iter()
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    if sorted.is_empty() {
        return Err(Error::invalid("block must be nonempty"));
    }
    if let Some(&bad) = sorted.iter().find(|&&x| !universe.contains(x)) {
        return Err(Error::invalid(format!("block element {bad} outside the universe")));
    }
    if sorted.len() == universe.size() {
        return Err(Error::invalid("block must be a proper subset of the universe"));
    }
    Ok(sorted)
}

fn maps_block_into_itself(table: &OpTable, block: &[u8]) -> bool {
    let arity = table.arity();
    let mut args = vec![block[0]; arity];
    let mut idx = vec![0usize; arity];
    loop {
        let value = table.evaluate(&args).expect("block lies in the universe");
        if !block.contains(&value) {
            return false;
        }
        let mut pos = arity;
        loop {
            if pos == 0 {
                return true;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < block.len() {
                args[pos] = block[idx[pos]];
                break;
            }
            idx[pos] = 0;
            args[pos] = block[0];
        }
    }
}

/// All strict and non-strict inclusions among the handles: pairs `(i, j)`
/// with `i ≠ j` and handle `i` included in handle `j` up to `cap`.
pub fn compute_order(handles: &[CloneHandle], cap: usize) -> Result<Vec<(usize, usize)>> {
    let mut order = Vec::new();
    for i in 0..handles.len() {
        for j in 0..handles.len() {
            if i != j && leq(&handles[i], &handles[j], cap)? {
                order.push((i, j));
            }
        }
    }
    Ok(order)
}

/// Render the Hasse diagram of a computed order as a DOT digraph, edges
/// pointing upward. Mutually included handles (equal clones under the cap)
/// get no edge; covers are the strict inclusions with nothing strictly
/// between.
pub fn export_dot(handles: &[CloneHandle], order: &[(usize, usize)]) -> String {
    let n = handles.len();
    let mut below = vec![vec![false; n]; n];
    for &(i, j) in order {
        below[i][j] = true;
    }
    let strict = |i: usize, j: usize| below[i][j] && !below[j][i];
    let mut out = String::from("digraph clones {\n  rankdir=BT;\n  node [shape=box];\n");
    for (i, h) in handles.iter().enumerate() {
        let label = h.label().replace('\\', "\\\\").replace('"', "\\\"");
        out.push_str(&format!("  n{i} [label=\"{label}\"];\n"));
    }
    for i in 0..n {
        for j in 0..n {
            if strict(i, j) && !(0..n).any(|k| strict(i, k) && strict(k, j)) {
                out.push_str(&format!("  n{i} -> n{j};\n"));
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(m: usize) -> Universe {
        Universe::new(m).unwrap()
    }

    fn table_op(m: usize, arity: usize, entries: &[u8]) -> Operation {
        Operation::Table(OpTable::new(u(m), arity, entries.to_vec()).unwrap())
    }

    fn meet_op() -> Operation {
        table_op(2, 2, &[0, 0, 0, 1])
    }

    fn join_op() -> Operation {
        table_op(2, 2, &[0, 1, 1, 1])
    }

    fn not_op() -> Operation {
        table_op(2, 1, &[1, 0])
    }

    #[test]
    fn leq_is_reflexive_on_generated_handles() {
        let c = CloneHandle::new("meet", u(2), vec![meet_op()]);
        assert!(leq(&c, &c, 2).unwrap());
    }

    #[test]
    fn projections_sit_below_everything() {
        let bottom = CloneHandle::projections_only(u(2));
        for h in [
            CloneHandle::new("meet", u(2), vec![meet_op()]),
            CloneHandle::all_operations(u(2)),
            CloneHandle::projections_only(u(2)),
        ] {
            assert!(leq(&bottom, &h, 2).unwrap());
        }
    }

    #[test]
    fn meet_clone_sits_strictly_below_meet_join_clone() {
        let small = CloneHandle::new("meet", u(2), vec![meet_op()]);
        let large = CloneHandle::new("meet+join", u(2), vec![meet_op(), join_op()]);
        assert!(leq(&small, &large, 2).unwrap());
        assert!(!leq(&large, &small, 2).unwrap());
    }

    #[test]
    fn leq_rejects_generators_above_the_cap() {
        let c = CloneHandle::new("meet", u(2), vec![meet_op()]);
        let d = CloneHandle::all_operations(u(2));
        assert!(matches!(leq(&c, &d, 1), Err(Error::Invalid(_))));
    }

    #[test]
    fn join_handle_contains_both_sides() {
        let a = CloneHandle::new("meet", u(2), vec![meet_op()]);
        let b = CloneHandle::new("join", u(2), vec![join_op()]);
        let j = join(&a, &b).unwrap();
        assert_eq!(j.label(), "(meet ∨ join)");
        assert!(leq(&a, &j, 2).unwrap());
        assert!(leq(&b, &j, 2).unwrap());
    }

    #[test]
    fn join_with_negation_generates_everything_binary() {
        // meet plus negation is functionally complete on two elements
        let a = CloneHandle::new("meet", u(2), vec![meet_op()]);
        let b = CloneHandle::new("not", u(2), vec![not_op()]);
        let j = join(&a, &b).unwrap();
        assert!(same_fragments(&j, &CloneHandle::all_operations(u(2)), 2).unwrap());
    }

    #[test]
    fn meet_fragments_are_intersections() {
        let a = CloneHandle::new("meet", u(2), vec![meet_op()]);
        let b = CloneHandle::new("join", u(2), vec![join_op()]);
        let meets = meet_fragments(&a, &b, 2).unwrap();
        // unary: only the identity projection on either side
        assert_eq!(meets[0].len(), 1);
        // binary: exactly the two projections survive the intersection
        assert_eq!(meets[1].len(), 2);
        for t in meets[1].to_tables() {
            let op = Operation::Table(t);
            assert!(a.fragment(2).unwrap().contains(&op).unwrap());
            assert!(b.fragment(2).unwrap().contains(&op).unwrap());
        }
    }

    #[test]
    fn antichain_check_accepts_a_single_handle_vacuously() {
        let handles = vec![CloneHandle::new("meet", u(2), vec![meet_op()])];
        let top = CloneHandle::all_operations(u(2));
        let report = antichain_check(&handles, 2, AntichainMode::JoinTop, &top).unwrap();
        assert!(report.pass());
        assert_eq!(report.pairs_checked, 0);
    }

    #[test]
    fn antichain_join_failure_is_reported_with_arity() {
        // meet and join together generate only monotone operations, so
        // their join misses the top already at arity 1
        let handles = vec![
            CloneHandle::new("meet", u(2), vec![meet_op()]),
            CloneHandle::new("join", u(2), vec![join_op()]),
        ];
        let top = CloneHandle::all_operations(u(2));
        let report = antichain_check(&handles, 2, AntichainMode::JoinTop, &top).unwrap();
        assert!(!report.pass());
        assert_eq!(
            report.failures,
            vec![AntichainFailure {
                left: 0,
                right: 1,
                arity: 1
            }]
        );
    }

    #[test]
    fn antichain_meet_of_comparable_handles_fails() {
        let handles = vec![
            CloneHandle::new("meet", u(2), vec![meet_op()]),
            CloneHandle::new("meet+join", u(2), vec![meet_op(), join_op()]),
        ];
        let bottom = CloneHandle::projections_only(u(2));
        let report = antichain_check(&handles, 2, AntichainMode::MeetBottom, &bottom).unwrap();
        assert!(!report.pass());
        assert_eq!(report.failures[0].arity, 2);
    }

    #[test]
    fn covering_check_on_two_elements_passes() {
        // every operation outside the block-preserving clone completes it:
        // on two elements, preserving {0} pins down a coatom
        let report = covering_check(&[0], 2, u(2), 8, 0, 1_000_000).unwrap();
        assert!(report.pass(), "failures: {:?}", report.failures);
        assert_eq!(report.tested, 8);
    }

    #[test]
    fn covering_check_rejects_improper_blocks() {
        assert!(covering_check(&[0, 1], 2, u(2), 2, 0, 1_000).is_err());
        assert!(covering_check(&[], 2, u(2), 2, 0, 1_000).is_err());
        assert!(covering_check(&[5], 2, u(2), 2, 0, 1_000).is_err());
    }

    #[test]
    fn compute_order_and_dot_for_a_chain() {
        let handles = vec![
            CloneHandle::projections_only(u(2)),
            CloneHandle::new("meet", u(2), vec![meet_op()]),
            CloneHandle::all_operations(u(2)),
        ];
        let order = compute_order(&handles, 2).unwrap();
        assert!(order.contains(&(0, 1)));
        assert!(order.contains(&(1, 2)));
        assert!(order.contains(&(0, 2)));
        assert!(!order.contains(&(2, 1)));
        let dot = export_dot(&handles, &order);
        // transitive reduction keeps the two covering edges only
        assert!(dot.contains("n0 -> n1;"));
        assert!(dot.contains("n1 -> n2;"));
        assert!(!dot.contains("n0 -> n2;"));
        assert!(dot.starts_with("digraph clones {"));
    }

    #[test]
    fn dot_output_escapes_quotes_in_labels() {
        let handles = vec![CloneHandle::new("say \"hi\"", u(2), vec![])];
        let dot = export_dot(&handles, &[]);
        assert!(dot.contains("label=\"say \\\"hi\\\"\""));
    }

    #[test]
    fn equal_handles_get_no_hasse_edge() {
        let a = CloneHandle::new("a", u(2), vec![meet_op()]);
        let b = CloneHandle::new("b", u(2), vec![meet_op()]);
        let handles = vec![a, b];
        let order = compute_order(&handles, 2).unwrap();
        assert!(order.contains(&(0, 1)) && order.contains(&(1, 0)));
        let dot = export_dot(&handles, &order);
        assert!(!dot.contains("->"));
    }
}
