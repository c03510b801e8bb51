//! Seeded random generation of tables and domains. Everything is driven by
//! an explicit ChaCha8 generator so runs are reproducible from a `u64` seed
//! alone, across platforms.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operation::OpTable;
use crate::universe::Universe;

/// The project-wide deterministic generator.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly random n-ary table.
pub fn random_table(u: Universe, arity: usize, rng: &mut impl Rng) -> OpTable {
    let points = u
        .point_count(arity)
        .expect("point count must fit in usize for sampling");
    let m = u.size() as u8;
    let entries = (0..points).map(|_| rng.gen_range(0..m)).collect();
    OpTable::new(u, arity, entries).expect("freshly sampled table is valid")
}

/// A random table whose values all stay at or below `bound`.
pub fn random_bounded_table(u: Universe, arity: usize, bound: u8, rng: &mut impl Rng) -> OpTable {
    assert!(u.contains(bound), "bound must lie in the universe");
    let points = u.point_count(arity).expect("point count must fit in usize");
    let entries = (0..points).map(|_| rng.gen_range(0..=bound)).collect();
    OpTable::new(u, arity, entries).expect("freshly sampled table is valid")
}

/// A random table with the growth property at `threshold`: whenever the
/// largest argument reaches the threshold, the value is at least that
/// largest argument.
pub fn random_growth_table(
    u: Universe,
    arity: usize,
    threshold: u8,
    rng: &mut impl Rng,
) -> OpTable {
    let m = u.size() as u8;
    let mut entries = Vec::with_capacity(u.point_count(arity).expect("point count fits"));
    for t in u.tuples(arity) {
        let top = t.iter().copied().max().unwrap_or(0);
        let value = if top >= threshold {
            rng.gen_range(top..m)
        } else {
            rng.gen_range(0..m)
        };
        entries.push(value);
    }
    OpTable::new(u, arity, entries).expect("freshly sampled table is valid")
}

/// A random sorted domain of distinct n-tuples with coordinates at most
/// `max_coord`. Asks for `len` tuples but clamps to the number available.
pub fn random_domain(
    u: Universe,
    arity: usize,
    len: usize,
    max_coord: u8,
    rng: &mut impl Rng,
) -> Vec<Vec<u8>> {
    assert!(u.contains(max_coord), "max_coord must lie in the universe");
    let available = ((max_coord as usize) + 1)
        .checked_pow(arity as u32)
        .unwrap_or(usize::MAX);
    let want = len.min(available);
    let mut set: BTreeSet<Vec<u8>> = BTreeSet::new();
    while set.len() < want {
        let t: Vec<u8> = (0..arity).map(|_| rng.gen_range(0..=max_coord)).collect();
        set.insert(t);
    }
    set.into_iter().collect()
}

/// A copy of `base` re-randomized outside the block: entries at argument
/// tuples lying entirely inside `block` are kept, all others are replaced
/// by fresh random values.
pub fn random_table_agreeing_on(
    base: &OpTable,
    block: &[u8],
    rng: &mut impl Rng,
) -> OpTable {
    let u = base.universe();
    let m = u.size() as u8;
    let mut entries = base.entries().to_vec();
    for (i, t) in u.tuples(base.arity()).enumerate() {
        if !t.iter().all(|x| block.contains(x)) {
            entries[i] = rng.gen_range(0..m);
        }
    }
    OpTable::new(u, base.arity(), entries).expect("re-randomized table is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(m: usize) -> Universe {
        Universe::new(m).unwrap()
    }

    #[test]
    fn same_seed_same_tables() {
        let mut a = rng(42);
        let mut b = rng(42);
        for _ in 0..5 {
            assert_eq!(random_table(u(5), 2, &mut a), random_table(u(5), 2, &mut b));
        }
    }

    #[test]
    fn bounded_tables_respect_the_bound() {
        let mut r = rng(7);
        for _ in 0..20 {
            let t = random_bounded_table(u(10), 2, 3, &mut r);
            assert!(t.entries().iter().all(|&v| v <= 3));
        }
    }

    #[test]
    fn growth_tables_grow_past_the_threshold() {
        let mut r = rng(7);
        let uni = u(10);
        for _ in 0..20 {
            let t = random_growth_table(uni, 2, 3, &mut r);
            for args in uni.tuples(2) {
                let top = *args.iter().max().unwrap();
                if top >= 3 {
                    assert!(t.evaluate(&args).unwrap() >= top);
                }
            }
        }
    }

    #[test]
    fn domains_are_sorted_distinct_and_bounded() {
        let mut r = rng(3);
        let d = random_domain(u(10), 2, 6, 8, &mut r);
        assert_eq!(d.len(), 6);
        assert!(d.windows(2).all(|w| w[0] < w[1]));
        assert!(d.iter().flatten().all(|&x| x <= 8));
    }

    #[test]
    fn domain_request_clamps_to_available_tuples() {
        let mut r = rng(3);
        let d = random_domain(u(10), 1, 50, 2, &mut r);
        assert_eq!(d, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn agreeing_tables_agree_exactly_on_the_block() {
        let mut r = rng(9);
        let base = random_table(u(4), 2, &mut r);
        let other = random_table_agreeing_on(&base, &[1, 2], &mut r);
        for args in u(4).tuples(2) {
            if args.iter().all(|&x| x == 1 || x == 2) {
                assert_eq!(base.evaluate(&args), other.evaluate(&args));
            }
        }
    }
}
