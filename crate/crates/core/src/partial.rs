//! Partial operations with finite domains, partial clone closure, and the
//! restriction map σ sending a clone to the partial clone of all
//! restrictions of its members to finite domains (truncated here to a
//! listed family of domains).

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Error;
use crate::frontier::FrontierTuples;
use crate::lattice::{join, CloneHandle};
use crate::operation::OpTable;
use crate::Result;

/// A partial operation: a finite domain of n-tuples and a value for each.
/// Canonical form keeps the domain sorted, so equality, ordering and
/// hashing are equality of graphs; all empty partial operations of one
/// arity collapse to a single canonical element.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PartialOperation {
    arity: usize,
    domain: Vec<Vec<u8>>,
    values: Vec<u8>,
}

impl PartialOperation {
    pub fn new(arity: usize, pairs: impl IntoIterator<Item = (Vec<u8>, u8)>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::invalid("arity must be at least 1"));
        }
        let mut graph: BTreeMap<Vec<u8>, u8> = BTreeMap::new();
        for (t, v) in pairs {
            if t.len() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    found: t.len(),
                });
            }
            match graph.insert(t, v) {
                Some(old) if old != v => {
                    return Err(Error::invalid(format!(
                        "conflicting values {old} and {v} on one domain tuple"
                    )));
                }
                _ => {}
            }
        }
        let (domain, values) = graph.into_iter().unzip();
        Ok(PartialOperation {
            arity,
            domain,
            values,
        })
    }

    /// The canonical empty partial operation of an arity.
    pub fn empty(arity: usize) -> Self {
        assert!(arity >= 1, "arity must be at least 1");
        PartialOperation {
            arity,
            domain: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Restrict a total table to a domain.
    pub fn restriction_of(table: &OpTable, domain: &[Vec<u8>]) -> Result<Self> {
        let pairs = domain
            .iter()
            .map(|t| Ok((t.clone(), table.evaluate(t)?)))
            .collect::<Result<Vec<_>>>()?;
        PartialOperation::new(table.arity(), pairs)
    }

    /// The k-th n-ary projection restricted to a domain (k is 1-based).
    pub fn projection(arity: usize, index: usize, domain: &[Vec<u8>]) -> Result<Self> {
        if index == 0 || index > arity {
            return Err(Error::invalid(format!(
                "projection index {index} out of range for arity {arity}"
            )));
        }
        PartialOperation::new(
            arity,
            domain.iter().map(|t| (t.clone(), t[index - 1])),
        )
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// The domain in sorted order.
    pub fn domain(&self) -> &[Vec<u8>] {
        &self.domain
    }

    /// Values parallel to [`PartialOperation::domain`].
    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Vec<u8>, u8)> {
        self.domain.iter().zip(self.values.iter().copied())
    }

    pub fn value_at(&self, args: &[u8]) -> Option<u8> {
        self.domain
            .binary_search_by(|t| t.as_slice().cmp(args))
            .ok()
            .map(|i| self.values[i])
    }

    /// Is this the restriction of the given total table to its own domain?
    pub fn extended_by(&self, table: &OpTable) -> Result<bool> {
        if table.arity() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: table.arity(),
            });
        }
        for (t, v) in self.pairs() {
            if table.evaluate(t)? != v {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn compose_refs(f: &PartialOperation, gs: &[&PartialOperation]) -> Result<PartialOperation> {
    if gs.len() != f.arity() {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            found: gs.len(),
        });
    }
    let inner_arity = gs[0].arity();
    if let Some(bad) = gs.iter().find(|g| g.arity() != inner_arity) {
        return Err(Error::ArityMismatch {
            expected: inner_arity,
            found: bad.arity(),
        });
    }
    let mut pairs = Vec::new();
    let mut image = Vec::with_capacity(gs.len());
    'tuples: for x in gs[0].domain() {
        image.clear();
        for g in gs {
            match g.value_at(x) {
                Some(v) => image.push(v),
                None => continue 'tuples,
            }
        }
        if let Some(v) = f.value_at(&image) {
            pairs.push((x.clone(), v));
        }
    }
    PartialOperation::new(inner_arity, pairs)
}

/// Compose partial operations: defined where all inner operations are and
/// their image tuple lies in the outer domain. The domain may come out
/// empty; that is a legitimate partial operation.
///
/// # Examples
///
/// ```
/// use clonelab_core::partial::{partial_compose, PartialOperation};
/// let on_12 = PartialOperation::new(1, [(vec![1], 1), (vec![2], 2)]).unwrap();
/// let on_01 = PartialOperation::new(1, [(vec![0], 0), (vec![1], 1)]).unwrap();
/// let c = partial_compose(&on_12, &[on_01]).unwrap();
/// assert_eq!(c.domain(), &[vec![1]]);
/// ```
pub fn partial_compose(f: &PartialOperation, gs: &[PartialOperation]) -> Result<PartialOperation> {
    let refs: Vec<&PartialOperation> = gs.iter().collect();
    compose_refs(f, &refs)
}

/// A partial clone: generators plus the set reached by composition closure,
/// with projection restrictions adjoined on every domain that occurs.
#[derive(Clone, Debug)]
pub struct PartialCloneHandle {
    generators: Vec<PartialOperation>,
    members: BTreeSet<PartialOperation>,
    closed: bool,
}

impl PartialCloneHandle {
    pub fn generators(&self) -> &[PartialOperation] {
        &self.generators
    }

    pub fn members(&self) -> &BTreeSet<PartialOperation> {
        &self.members
    }

    /// False for plain σ-truncations, which are not composition-closed.
    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: &PartialOperation) -> bool {
        self.members.contains(p)
    }

    /// The members living on exactly the given domain (canonicalized).
    pub fn members_on(&self, domain: &[Vec<u8>]) -> BTreeSet<PartialOperation> {
        let canonical: Vec<Vec<u8>> = domain
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        self.members
            .iter()
            .filter(|p| p.domain() == canonical.as_slice())
            .cloned()
            .collect()
    }
}

struct ClosureState {
    list: Vec<PartialOperation>,
    seen: BTreeSet<PartialOperation>,
    domains: BTreeSet<(usize, Vec<Vec<u8>>)>,
    budget: usize,
}

impl ClosureState {
    fn admit(&mut self, p: PartialOperation) -> Result<()> {
        if self.seen.contains(&p) {
            return Ok(());
        }
        if self.seen.len() >= self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }
        let domain_key = (p.arity(), p.domain().to_vec());
        self.seen.insert(p.clone());
        self.list.push(p);
        if self.domains.insert(domain_key.clone()) {
            // a new domain: adjoin the restricted projections on it
            let (arity, domain) = domain_key;
            for k in 1..=arity {
                let proj = PartialOperation::projection(arity, k, &domain)?;
                if !self.seen.contains(&proj) {
                    if self.seen.len() >= self.budget {
                        return Err(Error::BudgetExceeded {
                            budget: self.budget,
                        });
                    }
                    self.seen.insert(proj.clone());
                    self.list.push(proj);
                }
            }
        }
        Ok(())
    }
}

/// Close a generator list under partial composition, adjoining projection
/// restrictions on every domain that occurs among generators and their
/// compositions. Deterministic worklist order.
pub fn partial_closure(
    generators: &[PartialOperation],
    budget: usize,
) -> Result<PartialCloneHandle> {
    let mut state = ClosureState {
        list: Vec::new(),
        seen: BTreeSet::new(),
        domains: BTreeSet::new(),
        budget,
    };
    for g in generators {
        state.admit(g.clone())?;
    }
    let mut e = 0;
    while e < state.list.len() {
        // the e-th member as outer operation, inners anywhere up to e
        let outer = state.list[e].clone();
        let k = outer.arity();
        let mut choice = vec![0usize; k];
        loop {
            let composed = {
                let inner_arity = state.list[choice[0]].arity();
                if choice[1..]
                    .iter()
                    .all(|&j| state.list[j].arity() == inner_arity)
                {
                    let refs: Vec<&PartialOperation> =
                        choice.iter().map(|&j| &state.list[j]).collect();
                    Some(compose_refs(&outer, &refs)?)
                } else {
                    None
                }
            };
            if let Some(c) = composed {
                state.admit(c)?;
            }
            let mut pos = k;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                choice[pos] += 1;
                if choice[pos] <= e {
                    break;
                }
                choice[pos] = 0;
            }
            if choice.iter().all(|&c| c == 0) {
                break;
            }
        }
        // the e-th member as an inner: earlier outers, inner tuples that
        // must reach index e (combinations without e were done earlier)
        for fi in 0..e {
            let outer = state.list[fi].clone();
            let k = outer.arity();
            let mut tuples = FrontierTuples::new(k, e);
            while let Some(idxs) = tuples.next() {
                let composed = {
                    let inner_arity = state.list[idxs[0]].arity();
                    if idxs[1..]
                        .iter()
                        .all(|&j| state.list[j].arity() == inner_arity)
                    {
                        let refs: Vec<&PartialOperation> =
                            idxs.iter().map(|&j| &state.list[j]).collect();
                        Some(compose_refs(&outer, &refs)?)
                    } else {
                        None
                    }
                };
                if let Some(c) = composed {
                    state.admit(c)?;
                }
            }
        }
        e += 1;
    }
    Ok(PartialCloneHandle {
        generators: generators.to_vec(),
        members: state.seen,
        closed: true,
    })
}

/// σ truncated to listed domains: every restriction of a fragment member of
/// the clone to each domain. The result is a plain set of partial
/// operations (`closed() == false`): a truncation is not composition-closed.
pub fn restrict_clone(
    clone: &CloneHandle,
    domains: &[Vec<Vec<u8>>],
) -> Result<PartialCloneHandle> {
    let mut members: BTreeSet<PartialOperation> = BTreeSet::new();
    for domain in domains {
        members.extend(restrictions_on(clone, domain)?);
    }
    Ok(PartialCloneHandle {
        generators: members.iter().cloned().collect(),
        members,
        closed: false,
    })
}

fn domain_arity(domain: &[Vec<u8>]) -> Result<usize> {
    let arity = domain
        .first()
        .ok_or_else(|| Error::invalid("domains must be nonempty"))?
        .len();
    if arity == 0 {
        return Err(Error::invalid("domain tuples must have positive arity"));
    }
    if let Some(bad) = domain.iter().find(|t| t.len() != arity) {
        return Err(Error::ArityMismatch {
            expected: arity,
            found: bad.len(),
        });
    }
    Ok(arity)
}

fn restrictions_on(clone: &CloneHandle, domain: &[Vec<u8>]) -> Result<BTreeSet<PartialOperation>> {
    let arity = domain_arity(domain)?;
    let fragment = clone.fragment(arity)?;
    fragment
        .to_tables()
        .iter()
        .map(|t| PartialOperation::restriction_of(t, domain))
        .collect()
}

/// Outcome of probing two clones through their σ-truncations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Separation {
    /// A restriction of a member of one clone matched by no member of the
    /// other; `from_first` says which side it came from.
    Separated {
        witness: PartialOperation,
        from_first: bool,
        domain_index: usize,
    },
    /// Equal restrictions on every listed domain.
    NotSeparated,
}

/// Search the listed domains for a partial operation separating σ(C) from
/// σ(D); the first witness in sorted order is returned.
pub fn separate(
    c: &CloneHandle,
    d: &CloneHandle,
    domains: &[Vec<Vec<u8>>],
) -> Result<Separation> {
    for (i, domain) in domains.iter().enumerate() {
        let rc = restrictions_on(c, domain)?;
        let rd = restrictions_on(d, domain)?;
        if let Some(w) = rc.difference(&rd).next() {
            return Ok(Separation::Separated {
                witness: w.clone(),
                from_first: true,
                domain_index: i,
            });
        }
        if let Some(w) = rd.difference(&rc).next() {
            return Ok(Separation::Separated {
                witness: w.clone(),
                from_first: false,
                domain_index: i,
            });
        }
    }
    Ok(Separation::NotSeparated)
}

/// Does σ preserve the join at this truncation? Compares the composition
/// closure of σ(C) ∪ σ(D) against σ(C ∨ D) on every listed domain.
///
/// The comparison is honest only relative to the listed domains: the
/// closure routes compositions through listed domains, so a family that
/// omits the full cube of the universe can make the left side fall short.
pub fn sigma_join_check(
    c: &CloneHandle,
    d: &CloneHandle,
    domains: &[Vec<Vec<u8>>],
    budget: usize,
) -> Result<bool> {
    let sc = restrict_clone(c, domains)?;
    let sd = restrict_clone(d, domains)?;
    let mut gens: Vec<PartialOperation> = sc.members().iter().cloned().collect();
    gens.extend(sd.members().iter().cloned());
    let closure = partial_closure(&gens, budget)?;
    let joined = join(c, d)?;
    let sj = restrict_clone(&joined, domains)?;
    for domain in domains {
        let left = closure.members_on(domain);
        let right = sj.members_on(domain);
        if left != right {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Does every member of the closure of σ(C) extend to a total member of
/// C's fragment of its arity? Returns the first counterexample, or `None`
/// when the property holds.
pub fn extension_property(
    clone: &CloneHandle,
    domains: &[Vec<Vec<u8>>],
    budget: usize,
) -> Result<Option<PartialOperation>> {
    let sigma = restrict_clone(clone, domains)?;
    let closure = partial_closure(sigma.generators(), budget)?;
    for p in closure.members() {
        let fragment = clone.fragment(p.arity())?;
        let mut extended = false;
        for t in fragment.to_tables() {
            if p.extended_by(&t)? {
                extended = true;
                break;
            }
        }
        if !extended {
            return Ok(Some(p.clone()));
        }
    }
    Ok(None)
}
