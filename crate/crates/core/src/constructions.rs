//! Concrete families of operations and membership tests built from them:
//! the bounded and growth witness families with their interpolants,
//! translation clones over finitely generated abelian groups, embeddings
//! of a clone on a block of the universe, and indicator clones.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Error;
use crate::galois::{clone_fragment, FragmentSet};
use crate::group::{GroupWindow, SubgroupHandle};
use crate::operation::{OpTable, Operation};
use crate::partial::PartialOperation;
use crate::universe::Universe;
use crate::Result;

/// The two witness families, indexed by a threshold element `a`.
///
/// * `Bounded`: operations whose values never exceed `a`.
/// * `Growth`: operations that return at least the largest argument
///   whenever that largest argument reaches `a`.
///
/// Both families are closed under composition with projections and under
/// substitution within themselves, and both are unions over all finite
/// domains of what their members do there — which is what makes them
/// useful as interpolation targets.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WitnessFamily {
    Bounded,
    Growth,
}

impl fmt::Display for WitnessFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessFamily::Bounded => write!(f, "bounded"),
            WitnessFamily::Growth => write!(f, "growth"),
        }
    }
}

/// Exhaustive membership of a (total) operation in a witness family at a
/// threshold, checked over every argument tuple of the universe.
pub fn family_member(
    f: &Operation,
    threshold: u8,
    family: WitnessFamily,
    u: Universe,
) -> Result<bool> {
    if !u.contains(threshold) {
        return Err(Error::invalid(format!(
            "threshold {threshold} outside the universe {u}"
        )));
    }
    for args in u.tuples(f.arity()) {
        let value = f.evaluate(&args)?;
        if !u.contains(value) {
            return Err(Error::ValueEscapesWindow { args });
        }
        let ok = match family {
            WitnessFamily::Bounded => value <= threshold,
            WitnessFamily::Growth => {
                let top = args.iter().copied().max().unwrap_or(0);
                top < threshold || value >= top
            }
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A family member agreeing with some operation on a finite domain.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Interpolant {
    pub threshold: u8,
    pub witness: OpTable,
}

/// Interpolate an arbitrary operation on a finite domain from inside a
/// witness family: pick the least workable threshold and fill the rest of
/// the table with the family's default values (`0` for the bounded family,
/// the largest argument for the growth family).
///
/// For the growth family the threshold must exceed every coordinate seen in
/// the domain; when that pushes it past the top of the universe, the
/// universe is simply too small to interpolate this domain and the error
/// says by how much.
pub fn interpolant(
    g: &Operation,
    domain: &[Vec<u8>],
    family: WitnessFamily,
    u: Universe,
) -> Result<Interpolant> {
    if domain.is_empty() {
        return Err(Error::invalid("interpolation domain must be nonempty"));
    }
    let arity = g.arity();
    let mut graph: BTreeMap<Vec<u8>, u8> = BTreeMap::new();
    for t in domain {
        if t.len() != arity {
            return Err(Error::ArityMismatch {
                expected: arity,
                found: t.len(),
            });
        }
        if let Some(&bad) = t.iter().find(|&&x| !u.contains(x)) {
            return Err(Error::invalid(format!(
                "domain coordinate {bad} outside the universe {u}"
            )));
        }
        let value = g.evaluate(t)?;
        if !u.contains(value) {
            return Err(Error::ValueEscapesWindow { args: t.clone() });
        }
        graph.insert(t.clone(), value);
    }
    let threshold = match family {
        WitnessFamily::Bounded => graph.values().copied().max().expect("domain is nonempty"),
        WitnessFamily::Growth => {
            let top_coord = graph
                .keys()
                .flat_map(|t| t.iter().copied())
                .max()
                .expect("domain is nonempty");
            let required = top_coord as i64 + 1;
            if required > u.max_element() as i64 {
                return Err(Error::WindowTooSmall {
                    required,
                    max: u.max_element(),
                });
            }
            required as u8
        }
    };
    let mut entries = Vec::with_capacity(u.point_count(arity).ok_or_else(|| {
        Error::invalid("argument space too large to tabulate an interpolant")
    })?);
    for t in u.tuples(arity) {
        let value = match graph.get(&t) {
            Some(&v) => v,
            None => match family {
                WitnessFamily::Bounded => 0,
                WitnessFamily::Growth => t.iter().copied().max().unwrap_or(0),
            },
        };
        entries.push(value);
    }
    Ok(Interpolant {
        threshold,
        witness: OpTable::new(u, arity, entries)?,
    })
}

fn canonical_carrier(carrier: &[u8], u: Universe) -> Result<Vec<u8>> {
    let sorted: Vec<u8> = carrier
        .iter()
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    if sorted.is_empty() {
        return Err(Error::invalid("carrier must be nonempty"));
    }
    if let Some(&bad) = sorted.iter().find(|&&x| !u.contains(x)) {
        return Err(Error::invalid(format!(
            "carrier element {bad} outside the universe {u}"
        )));
    }
    Ok(sorted)
}

/// If `g` maps every tuple over the carrier back into the carrier, return
/// its restriction re-indexed as a table over a universe of the carrier's
/// size (carrier elements in sorted order become `0, 1, …`); otherwise
/// `None`.
pub fn restriction_to_carrier(
    g: &Operation,
    carrier: &[u8],
    u: Universe,
) -> Result<Option<OpTable>> {
    let carrier = canonical_carrier(carrier, u)?;
    let sub = Universe::new(carrier.len())?;
    let arity = g.arity();
    let points = sub
        .point_count(arity)
        .ok_or_else(|| Error::invalid("carrier power too large to tabulate"))?;
    let mut entries = Vec::with_capacity(points);
    let mut idx = vec![0usize; arity];
    let mut args = vec![carrier[0]; arity];
    loop {
        let value = g.evaluate(&args)?;
        match carrier.binary_search(&value) {
            Ok(pos) => entries.push(pos as u8),
            Err(_) => return Ok(None),
        }
        let mut pos = arity;
        loop {
            if pos == 0 {
                let table = OpTable::new(sub, arity, entries)?;
                return Ok(Some(table));
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < carrier.len() {
                args[pos] = carrier[idx[pos]];
                break;
            }
            idx[pos] = 0;
            args[pos] = carrier[0];
        }
    }
}

/// Membership in the embedded copy of a clone living on a carrier: `g`
/// belongs iff it maps carrier tuples into the carrier and its re-indexed
/// restriction satisfies the membership oracle for the small clone.
pub fn finite_embed_member<F>(
    g: &Operation,
    carrier: &[u8],
    u: Universe,
    mut membership: F,
) -> Result<bool>
where
    F: FnMut(&OpTable) -> Result<bool>,
{
    match restriction_to_carrier(g, carrier, u)? {
        None => Ok(false),
        Some(table) => membership(&table),
    }
}

/// Membership in the clone of operations preserving a block as a unary
/// relation: does `g` map every tuple over the carrier into the carrier?
pub fn unary_pol_member(g: &Operation, carrier: &[u8], u: Universe) -> Result<bool> {
    Ok(restriction_to_carrier(g, carrier, u)?.is_some())
}

/// The n-ary fragment of the clone generated by a single indicator
/// operation: the unary map sending the block to `inside` and everything
/// else to `outside`. The block must avoid both distinguished elements, so
/// that the indicator composed with itself is the constant `outside`.
pub fn indicator_clone_fragments(
    block: &[u8],
    inside: u8,
    outside: u8,
    u: Universe,
    arity: usize,
    budget: usize,
) -> Result<FragmentSet> {
    if inside == outside {
        return Err(Error::invalid(
            "indicator values inside and outside must differ",
        ));
    }
    if !u.contains(inside) || !u.contains(outside) {
        return Err(Error::invalid("indicator values must lie in the universe"));
    }
    let block = canonical_carrier(block, u)?;
    if block.contains(&inside) || block.contains(&outside) {
        return Err(Error::invalid(
            "the block must avoid both indicator values",
        ));
    }
    let generator = Operation::indicator(block.iter().copied(), inside, outside)?;
    clone_fragment(&[generator], arity, u, budget)
}

/// Restrict the translation by `shift` to a finite set of window codes.
pub fn translation_restriction(
    window: &GroupWindow,
    shift: &[i64],
    domain: &[u8],
) -> Result<PartialOperation> {
    let f = Operation::translation(window.clone(), shift)?;
    let pairs = domain
        .iter()
        .map(|&x| Ok((vec![x], f.evaluate(&[x])?)))
        .collect::<Result<Vec<_>>>()?;
    PartialOperation::new(1, pairs)
}

/// Is this unary partial operation (over window codes) the restriction of a
/// translation by some element of the subgroup? True exactly when every
/// defined pair exhibits one and the same difference and that difference is
/// a member of the subgroup. The empty operation is a restriction of the
/// identity translation, so it always belongs.
pub fn translation_clone_member(
    p: &PartialOperation,
    subgroup: &SubgroupHandle,
    window: &GroupWindow,
    budget: usize,
) -> Result<bool> {
    if p.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            found: p.arity(),
        });
    }
    let u = window.universe();
    let group = window.group();
    let mut shift = None;
    for (t, v) in p.pairs() {
        if !u.contains(t[0]) || !u.contains(v) {
            return Err(Error::invalid(format!(
                "partial operation uses codes outside the window universe {u}"
            )));
        }
        let from = window.decode(t[0]);
        let to = window.decode(v);
        let diff = group.add(&to, &group.neg(&from));
        match &shift {
            None => shift = Some(diff),
            Some(s) if *s != diff => return Ok(false),
            _ => {}
        }
    }
    match shift {
        None => Ok(true),
        Some(s) => subgroup.contains(&s, budget),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::AbelianGroup;

    fn u(m: usize) -> Universe {
        Universe::new(m).unwrap()
    }

    fn table(m: usize, arity: usize, entries: &[u8]) -> OpTable {
        OpTable::new(u(m), arity, entries.to_vec()).unwrap()
    }

    fn max_op(m: usize) -> Operation {
        let uni = u(m);
        let entries = uni
            .tuples(2)
            .map(|t| t.iter().copied().max().unwrap())
            .collect();
        Operation::Table(OpTable::new(uni, 2, entries).unwrap())
    }

    #[test]
    fn identity_grows_at_every_threshold() {
        let id = Operation::projection(1, 1).unwrap();
        for a in 0..10 {
            assert!(family_member(&id, a, WitnessFamily::Growth, u(10)).unwrap());
        }
    }

    #[test]
    fn constant_zero_is_bounded_everywhere_and_grows_nowhere() {
        let zero = Operation::constant(1, 0).unwrap();
        for a in 0..10 {
            assert!(family_member(&zero, a, WitnessFamily::Bounded, u(10)).unwrap());
            assert!(!family_member(&zero, a, WitnessFamily::Growth, u(10)).unwrap());
        }
    }

    #[test]
    fn binary_max_grows_at_every_threshold() {
        for a in 0..10 {
            assert!(family_member(&max_op(10), a, WitnessFamily::Growth, u(10)).unwrap());
        }
        // but it is bounded only by the top element
        assert!(!family_member(&max_op(10), 8, WitnessFamily::Bounded, u(10)).unwrap());
        assert!(family_member(&max_op(10), 9, WitnessFamily::Bounded, u(10)).unwrap());
    }

    #[test]
    fn bounded_family_is_monotone_in_the_threshold() {
        let f = Operation::Table(table(6, 1, &[3, 0, 2, 1, 3, 2]));
        assert!(!family_member(&f, 2, WitnessFamily::Bounded, u(6)).unwrap());
        for a in 3..6 {
            assert!(family_member(&f, a, WitnessFamily::Bounded, u(6)).unwrap());
        }
    }

    #[test]
    fn family_member_rejects_thresholds_outside_the_universe() {
        let id = Operation::projection(1, 1).unwrap();
        assert!(family_member(&id, 10, WitnessFamily::Growth, u(10)).is_err());
    }

    #[test]
    fn bounded_interpolant_of_the_successor_at_a_point() {
        let successor = Operation::Table(table(4, 1, &[1, 2, 3, 3]));
        let got = interpolant(&successor, &[vec![2]], WitnessFamily::Bounded, u(4)).unwrap();
        assert_eq!(got.threshold, 3);
        assert_eq!(got.witness.entries(), &[0, 0, 3, 0]);
        assert!(family_member(
            &Operation::Table(got.witness.clone()),
            got.threshold,
            WitnessFamily::Bounded,
            u(4)
        )
        .unwrap());
    }

    #[test]
    fn growth_interpolant_of_constant_zero_at_a_point() {
        let zero = Operation::constant(1, 0).unwrap();
        let got = interpolant(&zero, &[vec![1]], WitnessFamily::Growth, u(4)).unwrap();
        assert_eq!(got.threshold, 2);
        assert_eq!(got.witness.entries(), &[0, 0, 2, 3]);
        assert!(family_member(
            &Operation::Table(got.witness.clone()),
            got.threshold,
            WitnessFamily::Growth,
            u(4)
        )
        .unwrap());
    }

    #[test]
    fn interpolants_agree_with_the_target_on_the_domain() {
        let f = Operation::Table(table(5, 2, &{
            let mut e = Vec::new();
            for t in u(5).tuples(2) {
                e.push((t[0] * 2 + t[1]) % 5);
            }
            e
        }));
        let domain = [vec![0, 3], vec![1, 1], vec![2, 0]];
        for family in [WitnessFamily::Bounded, WitnessFamily::Growth] {
            let got = interpolant(&f, &domain, family, u(5)).unwrap();
            for t in &domain {
                assert_eq!(got.witness.evaluate(t).unwrap(), f.evaluate(t).unwrap());
            }
            assert!(family_member(
                &Operation::Table(got.witness.clone()),
                got.threshold,
                family,
                u(5)
            )
            .unwrap());
        }
    }

    #[test]
    fn growth_interpolation_failse_loudly_when_the_universe_tops_out() {
        let zero = Operation::constant(1, 0).unwrap();
        let err = interpolant(&zero, &[vec![9]], WitnessFamily::Growth, u(10)).unwrap_err();
        assert!(matches!(
            err,
            Error::WindowTooSmall {
                required: 10,
                max: 9
            }
        ));
    }

    #[test]
    fn restriction_reindexes_the_carrier() {
        // max on {1, 2} inside {0, 1, 2}, re-indexed to a two-point universe
        let got = restriction_to_carrier(&max_op(3), &[1, 2], u(3))
            .unwrap()
            .unwrap();
        assert_eq!(got.universe(), u(2));
        assert_eq!(got.entries(), &[0, 1, 1, 1]);
    }

    #[test]
    fn escaping_the_carrier_means_no_membership() {
        let two = Operation::constant(2, 2).unwrap();
        assert_eq!(restriction_to_carrier(&two, &[0, 1], u(3)).unwrap(), None);
        // the oracle must not be consulted for an escaping operation
        let verdict = finite_embed_member(&two, &[0, 1], u(3), |_| {
            panic!("oracle consulted for an escaping operation")
        })
        .unwrap();
        assert!(!verdict);
    }

    #[test]
    fn projections_embed_as_projections() {
        let p = Operation::projection(2, 1).unwrap();
        let got = restriction_to_carrier(&p, &[0, 2], u(3)).unwrap().unwrap();
        assert_eq!(got, OpTable::projection(u(2), 2, 1).unwrap());
        assert!(finite_embed_member(&p, &[0, 2], u(3), |_| Ok(true)).unwrap());
    }

    #[test]
    fn embedded_membership_consults_the_restriction() {
        // monotone oracle over the two-point carrier
        let monotone = |t: &OpTable| -> Result<bool> {
            let uni = t.universe();
            for a in uni.tuples(t.arity()) {
                for b in uni.tuples(t.arity()) {
                    if a.iter().zip(&b).all(|(x, y)| x <= y)
                        && t.evaluate(&a)? > t.evaluate(&b)?
                    {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        };
        assert!(finite_embed_member(&max_op(3), &[0, 1], u(3), monotone).unwrap());
        // negation-like swap on the carrier is not monotone
        let swap = Operation::Table(table(3, 1, &[1, 0, 2]));
        assert!(!finite_embed_member(&swap, &[0, 1], u(3), monotone).unwrap());
    }

    #[test]
    fn unary_pol_membership_is_about_mapping_the_block_into_itself() {
        assert!(unary_pol_member(&max_op(3), &[0, 1], u(3)).unwrap());
        assert!(
            !unary_pol_member(&Operation::constant(1, 2).unwrap(), &[0, 1], u(3)).unwrap()
        );
        assert!(unary_pol_member(&Operation::projection(3, 2).unwrap(), &[0, 1], u(3)).unwrap());
    }

    #[test]
    fn patched_operations_fix_the_block_and_copy_elsewhere() {
        let f = max_op(3);
        let s = Operation::patch(f.clone(), [0, 1]);
        assert_eq!(s.arity(), 3);
        // on block tuples the last argument wins
        assert_eq!(s.evaluate(&[0, 1, 2]).unwrap(), 2);
        // off the block the inner operation answers
        assert_eq!(s.evaluate(&[2, 1, 0]).unwrap(), 2);
        // composing back with the inner operation restores it
        for t in u(3).tuples(2) {
            let y = f.evaluate(&t).unwrap();
            let args = [t[0], t[1], y];
            assert_eq!(s.evaluate(&args).unwrap(), y);
        }
    }

    #[test]
    fn patching_erases_disagreements_off_the_block() {
        // f' agrees with max on {0,1}² but is scrambled elsewhere
        let f = max_op(3);
        let f_prime = Operation::Table(table(3, 2, &[0, 1, 2, 1, 1, 0, 0, 2, 1]));
        let s = Operation::patch(f.clone(), [0, 1]);
        for t in u(3).tuples(2) {
            let y = f_prime.evaluate(&t).unwrap();
            let args = [t[0], t[1], y];
            let expect = f.evaluate(&t).unwrap();
            if t.iter().all(|&x| x <= 1) {
                // on the block the patch returns the (agreeing) last argument
                assert_eq!(s.evaluate(&args).unwrap(), y);
                assert_eq!(y, expect);
            } else {
                assert_eq!(s.evaluate(&args).unwrap(), expect);
            }
        }
    }

    #[test]
    fn indicator_clone_unary_fragment_is_three_maps() {
        // over {0,…,4}: block {2,3}, inside 1, outside 0
        let fragment = indicator_clone_fragments(&[2, 3], 1, 0, u(5), 1, 10_000).unwrap();
        assert_eq!(fragment.len(), 3);
        // the identity, the indicator, and the constant outside value
        assert!(fragment.contains_entries(&[0, 1, 2, 3, 4]));
        assert!(fragment.contains_entries(&[0, 0, 1, 1, 0]));
        assert!(fragment.contains_entries(&[0, 0, 0, 0, 0]));
    }

    #[test]
    fn indicator_composed_with_itself_is_the_constant() {
        let f = Operation::indicator([2, 3], 1, 0).unwrap();
        let ff = crate::operation::compose(&f, std::slice::from_ref(&f)).unwrap();
        for x in 0..5 {
            assert_eq!(ff.evaluate(&[x]).unwrap(), 0);
        }
    }

    #[test]
    fn indicator_validation_is_strict() {
        assert!(indicator_clone_fragments(&[2], 1, 1, u(5), 1, 100).is_err());
        assert!(indicator_clone_fragments(&[1, 2], 1, 0, u(5), 1, 100).is_err());
        assert!(indicator_clone_fragments(&[], 1, 0, u(5), 1, 100).is_err());
        assert!(indicator_clone_fragments(&[9], 1, 0, u(5), 1, 100).is_err());
    }

    #[test]
    fn translation_restrictions_recognize_their_subgroup() {
        // inside Z_12, the subgroup generated by 3
        let g = AbelianGroup::cyclic(12).unwrap();
        let window = GroupWindow::whole(g.clone()).unwrap();
        let h = SubgroupHandle::new(g, vec![vec![3]]).unwrap();
        for a in 0..12i64 {
            let p = translation_restriction(&window, &[a], &[0, 5, 11]).unwrap();
            let verdict = translation_clone_member(&p, &h, &window, 10_000).unwrap();
            assert_eq!(verdict, a % 3 == 0, "shift {a}");
        }
    }

    #[test]
    fn inconsistent_differences_are_not_translations() {
        let g = AbelianGroup::cyclic(12).unwrap();
        let window = GroupWindow::whole(g.clone()).unwrap();
        let h = SubgroupHandle::new(g, vec![vec![1]]).unwrap();
        let p = PartialOperation::new(1, [(vec![0], 3), (vec![1], 5)]).unwrap();
        assert!(!translation_clone_member(&p, &h, &window, 10_000).unwrap());
    }

    #[test]
    fn the_empty_partial_operation_is_vacuously_a_translation() {
        let g = AbelianGroup::cyclic(12).unwrap();
        let window = GroupWindow::whole(g.clone()).unwrap();
        let h = SubgroupHandle::trivial(g);
        let p = PartialOperation::empty(1);
        assert!(translation_clone_member(&p, &h, &window, 10_000).unwrap());
    }

    #[test]
    fn translation_membership_checks_the_subgroup_not_just_consistency() {
        // a consistent difference of 2 inside the trivial subgroup fails
        let g = AbelianGroup::cyclic(12).unwrap();
        let window = GroupWindow::whole(g.clone()).unwrap();
        let h = SubgroupHandle::trivial(g);
        let p = PartialOperation::new(1, [(vec![0], 2), (vec![4], 6)]).unwrap();
        assert!(!translation_clone_member(&p, &h, &window, 10_000).unwrap());
    }
}
