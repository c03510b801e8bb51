//! The built-in check batteries behind `clonelab check KIND`. Each runner
//! returns a deterministic report; anything randomized draws from a ChaCha
//! generator seeded by the `--seed` flag.

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::Rng;
use serde_json::json;

use clonelab_core::constructions::{
    family_member, interpolant, restriction_to_carrier, translation_clone_member, WitnessFamily,
};
use clonelab_core::galois::free_fragment_check;
use clonelab_core::group::{AbelianGroup, GroupWindow, SubgroupHandle};
use clonelab_core::lattice::{
    antichain_check, compute_order, covering_check, export_dot, join, leq, meet_fragments,
    same_fragments, AntichainMode, CloneHandle,
};
use clonelab_core::operation::webb;
use clonelab_core::partial::{
    extension_property, separate, sigma_join_check, PartialOperation, Separation,
};
use clonelab_core::sampling;
use clonelab_core::{compose, Error, OpTable, Operation, Relation, Universe};

use crate::report::{table_json, CheckItem, CheckReport};

/// Everything a check runner may need; flags and directive arguments both
/// land here.
pub struct Settings {
    pub seed: u64,
    pub budget: usize,
    pub trials: Option<usize>,
    pub arity: Option<usize>,
    pub gens: Option<Vec<(String, Operation)>>,
    pub dot: Option<PathBuf>,
}

impl Settings {
    pub fn plain(seed: u64, budget: usize) -> Settings {
        Settings {
            seed,
            budget,
            trials: None,
            arity: None,
            gens: None,
            dot: None,
        }
    }
}

pub const CHECK_KINDS: [&str; 8] = [
    "pol-inv",
    "compactness-witness",
    "finite-embed",
    "translation-lattice",
    "antichain-join",
    "antichain-meet",
    "sigma-join",
    "covering",
];

/// Dispatch a check by kind name.
pub fn run_check(kind: &str, settings: &Settings) -> Result<CheckReport, Error> {
    match kind {
        "pol-inv" => check_pol_inv(settings),
        "compactness-witness" => check_compactness_witness(settings),
        "finite-embed" => check_finite_embed(settings),
        "translation-lattice" => check_translation_lattice(settings),
        "antichain-join" => check_antichain_join(settings),
        "antichain-meet" => check_antichain_meet(settings),
        "sigma-join" => check_sigma_join(settings),
        "covering" => check_covering(settings),
        other => Err(Error::invalid(format!(
            "unknown check kind `{other}` (expected one of {})",
            CHECK_KINDS.join(", ")
        ))),
    }
}

fn u(m: usize) -> Universe {
    Universe::new(m).expect("small universe")
}

fn ops(tables: &[OpTable]) -> Vec<Operation> {
    tables.iter().cloned().map(Operation::Table).collect()
}

fn write_dot(
    items: &mut Vec<CheckItem>,
    path: &PathBuf,
    handles: &[CloneHandle],
    cap: usize,
) -> Result<(), Error> {
    let order = compute_order(handles, cap)?;
    let dot = export_dot(handles, &order);
    match std::fs::write(path, dot) {
        Ok(()) => items.push(
            CheckItem::pass("diagram written").with_detail(path.display().to_string()),
        ),
        Err(e) => items.push(
            CheckItem::fail("diagram written")
                .with_detail(format!("{}: {e}", path.display())),
        ),
    }
    Ok(())
}

/// The two closure routes agree: directly for supplied generators, or for
/// seeded random generator sets over universes of size 2 and 3.
fn check_pol_inv(settings: &Settings) -> Result<CheckReport, Error> {
    let mut items = Vec::new();
    let cap = settings.arity.unwrap_or(2);
    if let Some(gens) = &settings.gens {
        let operations: Vec<Operation> = gens.iter().map(|(_, g)| g.clone()).collect();
        let m = operations
            .iter()
            .find_map(|g| match g {
                Operation::Table(t) => Some(t.universe()),
                _ => None,
            })
            .ok_or_else(|| Error::invalid("pol-inv needs table generators"))?;
        let names: Vec<&str> = gens.iter().map(|(n, _)| n.as_str()).collect();
        for n in 1..=cap {
            let ok = free_fragment_check(&operations, n, m, settings.budget)?;
            items.push(
                CheckItem::of(format!("closure routes agree at arity {n}"), ok)
                    .with_detail(format!("generators {}", names.join(","))),
            );
        }
        return Ok(CheckReport::new("check pol-inv", None, items));
    }
    let sets = settings.trials.unwrap_or(25);
    let mut rng = sampling::rng(settings.seed);
    for i in 1..=sets {
        let m = 2 + (i % 2); // alternate between the two universe sizes
        let count = 1 + (i % 2);
        let mut gens = Vec::new();
        let mut arities = Vec::new();
        for _ in 0..count {
            let arity = if i % 3 == 0 { 1 } else { 2 };
            arities.push(arity);
            gens.push(Operation::Table(sampling::random_table(
                u(m),
                arity,
                &mut rng,
            )));
        }
        let mut ok = true;
        for n in 1..=2 {
            ok &= free_fragment_check(&gens, n, u(m), settings.budget)?;
        }
        items.push(
            CheckItem::of(format!("random set {i}"), ok).with_detail(format!(
                "universe size {m}, generator arities {arities:?}"
            )),
        );
    }
    Ok(CheckReport::new(
        "check pol-inv",
        Some(settings.seed),
        items,
    ))
}

/// Bounded/growth family behavior over the window {0..9} at threshold 3:
/// composition closure, interpolation, and the non-membership shadows.
fn check_compactness_witness(settings: &Settings) -> Result<CheckReport, Error> {
    let window = u(10);
    let threshold = 3u8;
    let trials = settings.trials.unwrap_or(200);
    let mut rng = sampling::rng(settings.seed);
    let mut items = Vec::new();

    // (a) compositions of bounded members stay bounded
    let mut failures = Vec::new();
    for _ in 0..trials {
        let f = sampling::random_bounded_table(window, 2, threshold, &mut rng);
        let g = sampling::random_bounded_table(window, 2, threshold, &mut rng);
        let h = sampling::random_bounded_table(window, 2, threshold, &mut rng);
        let composed = compose(
            &Operation::Table(f.clone()),
            &[Operation::Table(g), Operation::Table(h)],
        )?;
        if !family_member(&composed, threshold, WitnessFamily::Bounded, window)? {
            failures.push(table_json(&f));
        }
    }
    items.push(finish(
        "bounded members compose to bounded members",
        trials,
        failures,
    ));

    // (b) essential cores of growth compositions stay in the growth family
    let mut failures = Vec::new();
    for _ in 0..trials {
        let f = sampling::random_growth_table(window, 2, threshold, &mut rng);
        let mut inners = Vec::new();
        for slot in 0..2 {
            // mix in projections: they create fictitious coordinates,
            // which is exactly what taking the essential core repairs
            let roll: u8 = rng.gen_range(0..3);
            if roll == 0 {
                inners.push(Operation::projection(2, slot % 2 + 1)?);
            } else {
                inners.push(Operation::Table(sampling::random_growth_table(
                    window, 2, threshold, &mut rng,
                )));
            }
        }
        let composed = compose(&Operation::Table(f), &inners)?.tabulate(window)?;
        let core = composed.essential_core();
        if !family_member(
            &Operation::Table(core.clone()),
            threshold,
            WitnessFamily::Growth,
            window,
        )? {
            failures.push(table_json(&core));
        }
    }
    items.push(finish(
        "growth compositions have growth essential cores",
        trials,
        failures,
    ));

    // (c) interpolants land in their family and agree on the domain
    let interpolation_trials = settings.trials.map(|t| t.div_ceil(4)).unwrap_or(50);
    let mut failures = Vec::new();
    for _ in 0..interpolation_trials {
        let g = sampling::random_table(window, 2, &mut rng);
        let size = rng.gen_range(1..=5);
        // keep coordinates below the window top so the growth family has room
        let domain = sampling::random_domain(window, 2, size, 8, &mut rng);
        let target = Operation::Table(g.clone());
        for family in [WitnessFamily::Bounded, WitnessFamily::Growth] {
            let got = interpolant(&target, &domain, family, window)?;
            let member = family_member(
                &Operation::Table(got.witness.clone()),
                got.threshold,
                family,
                window,
            )?;
            let agrees = domain
                .iter()
                .map(|t| Ok(got.witness.evaluate(t)? == g.evaluate(t)?))
                .collect::<Result<Vec<_>, Error>>()?
                .into_iter()
                .all(|b| b);
            if !member || !agrees {
                failures.push(json!({
                    "family": family.to_string(),
                    "domain": domain,
                    "witness": table_json(&got.witness),
                }));
            }
        }
    }
    items.push(finish(
        "interpolants belong to their family and agree on the domain",
        interpolation_trials,
        failures,
    ));

    // (d) the non-membership shadows: a planted large value breaks
    // boundedness, and a low-range table breaks growth
    let mut failures = Vec::new();
    for _ in 0..trials {
        let mut spiked = sampling::random_bounded_table(window, 2, threshold, &mut rng)
            .entries()
            .to_vec();
        let at = rng.gen_range(0..spiked.len());
        spiked[at] = rng.gen_range(threshold + 1..10);
        let spiked = OpTable::new(window, 2, spiked)?;
        if family_member(
            &Operation::Table(spiked.clone()),
            threshold,
            WitnessFamily::Bounded,
            window,
        )? {
            failures.push(table_json(&spiked));
        }
        let low_bound = rng.gen_range(0..threshold);
        let low = sampling::random_bounded_table(window, 2, low_bound, &mut rng);
        if family_member(
            &Operation::Table(low.clone()),
            threshold,
            WitnessFamily::Growth,
            window,
        )? {
            failures.push(table_json(&low));
        }
    }
    items.push(finish(
        "values above the bound / below the growth line are rejected",
        trials,
        failures,
    ));

    Ok(CheckReport::new(
        "check compactness-witness",
        Some(settings.seed),
        items,
    ))
}

fn finish(name: &str, trials: usize, failures: Vec<serde_json::Value>) -> CheckItem {
    let item = CheckItem::of(name, failures.is_empty()).with_detail(format!("{trials} trials"));
    if failures.is_empty() {
        item
    } else {
        item.with_certificate(json!(failures))
    }
}

/// The boolean two-element clones embedded on the block {0,1} inside
/// {0,1,2}: the embedding preserves order, separates distinct clones, and
/// the patching identity holds on sampled pairs.
fn check_finite_embed(settings: &Settings) -> Result<CheckReport, Error> {
    let big = u(3);
    let block = [0u8, 1];
    let two = u(2);
    let meet = OpTable::new(two, 2, vec![0, 0, 0, 1])?;
    let or = OpTable::new(two, 2, vec![0, 1, 1, 1])?;
    let c0 = OpTable::new(two, 1, vec![0, 0])?;
    let c1 = OpTable::new(two, 1, vec![1, 1])?;
    let clones = [
        ("all", CloneHandle::new("all", two, ops(&[webb(two)]))),
        (
            "monotone",
            CloneHandle::new("monotone", two, ops(&[meet.clone(), or, c0, c1])),
        ),
        ("meet", CloneHandle::new("meet", two, ops(&[meet]))),
    ];
    let mut items = Vec::new();

    // enumerate every operation over {0,1,2} of arities 1 and 2 and sort it
    // into the embedded copies
    let mut embedded: Vec<[BTreeSet<Vec<u8>>; 2]> = vec![Default::default(); clones.len()];
    for arity in 1..=2usize {
        let points = 3usize.pow(arity as u32);
        let mut entries = vec![0u8; points];
        loop {
            let table = OpTable::new(big, arity, entries.clone())?;
            if let Some(restriction) =
                restriction_to_carrier(&Operation::Table(table.clone()), &block, big)?
            {
                for (i, (_, clone)) in clones.iter().enumerate() {
                    if clone
                        .fragment(arity)?
                        .contains_entries(restriction.entries())
                    {
                        embedded[i][arity - 1].insert(entries.clone());
                    }
                }
            }
            let mut pos = points;
            let mut done = true;
            while pos > 0 {
                pos -= 1;
                entries[pos] += 1;
                if entries[pos] < 3 {
                    done = false;
                    break;
                }
                entries[pos] = 0;
            }
            if done {
                break;
            }
        }
    }

    // order preservation: meet ⊆ monotone ⊆ all, strictly, at both arities
    for arity in 1..=2usize {
        let all = &embedded[0][arity - 1];
        let monotone = &embedded[1][arity - 1];
        let meet_only = &embedded[2][arity - 1];
        let ordered = meet_only.is_subset(monotone) && monotone.is_subset(all);
        items.push(
            CheckItem::of(
                format!("embedding preserves the clone order at arity {arity}"),
                ordered,
            )
            .with_detail(format!(
                "sizes {} <= {} <= {}",
                meet_only.len(),
                monotone.len(),
                all.len()
            )),
        );
    }

    // injectivity: a separating operation for each pair of distinct clones
    for i in 0..clones.len() {
        for j in (i + 1)..clones.len() {
            let mut witness = None;
            for arity in (1..=2usize).rev() {
                if let Some(w) = embedded[i][arity - 1]
                    .difference(&embedded[j][arity - 1])
                    .next()
                {
                    witness = Some((arity, w.clone()));
                    break;
                }
            }
            match witness {
                Some((arity, w)) => items.push(
                    CheckItem::pass(format!(
                        "embedded copies of {} and {} are separated",
                        clones[i].0, clones[j].0
                    ))
                    .with_detail(format!("arity {arity} witness {w:?}")),
                ),
                None => items.push(CheckItem::fail(format!(
                    "embedded copies of {} and {} are separated",
                    clones[i].0, clones[j].0
                ))),
            }
        }
    }

    // the majority operation, extended arbitrarily off the block, embeds
    // into the monotone clone
    let mut rng = sampling::rng(settings.seed);
    let mut majority_entries = Vec::with_capacity(27);
    for t in big.tuples(3) {
        if t.iter().all(|&x| x <= 1) {
            let ones = t.iter().filter(|&&x| x == 1).count();
            majority_entries.push(if ones >= 2 { 1 } else { 0 });
        } else {
            majority_entries.push(rng.gen_range(0..3));
        }
    }
    let majority = Operation::Table(OpTable::new(big, 3, majority_entries)?);
    let majority_restriction = restriction_to_carrier(&majority, &block, big)?
        .ok_or_else(|| Error::invalid("majority must stay on the block"))?;
    let monotone_ternary = clones[1].1.fragment(3)?;
    items.push(CheckItem::of(
        "an extended majority operation lands in the embedded monotone clone",
        monotone_ternary.contains_entries(majority_restriction.entries()),
    ));

    // patching: for pairs agreeing on the block square, the patched
    // operation erases the disagreement everywhere
    let pairs = settings.trials.unwrap_or(20);
    let mut failures = Vec::new();
    for _ in 0..pairs {
        let f = sampling::random_table(big, 2, &mut rng);
        let f_prime = sampling::random_table_agreeing_on(&f, &block, &mut rng);
        let patched = Operation::patch(Operation::Table(f.clone()), block);
        for t in big.tuples(2) {
            let args = [t[0], t[1], f_prime.evaluate(&t)?];
            if patched.evaluate(&args)? != f.evaluate(&t)? {
                failures.push(json!({
                    "f": table_json(&f),
                    "f_prime": table_json(&f_prime),
                    "at": t,
                }));
                break;
            }
        }
    }
    items.push(finish(
        "patched operations recover the original from any agreeing partner",
        pairs,
        failures,
    ));

    Ok(CheckReport::new(
        "check finite-embed",
        Some(settings.seed),
        items,
    ))
}

/// Clones of translations over the cyclic group of order 12: their order,
/// meets, and joins mirror the subgroup lattice exactly, and two-point
/// partial operations are recognized as translations precisely when they
/// should be.
fn check_translation_lattice(settings: &Settings) -> Result<CheckReport, Error> {
    let group = AbelianGroup::cyclic(12)?;
    let window = GroupWindow::whole(group.clone())?;
    let divisors = [1i64, 2, 3, 4, 6, 12];
    let handles: Vec<CloneHandle> = divisors
        .iter()
        .map(|&d| {
            Ok(CloneHandle::new(
                format!("translations by <{d}>"),
                window.universe(),
                vec![Operation::translation(window.clone(), &[d])?],
            )
            .with_budget(settings.budget))
        })
        .collect::<Result<_, Error>>()?;
    let mut items = Vec::new();

    // order agrees with divisibility on every ordered pair
    let mut order_ok = true;
    let mut order_detail = String::new();
    for (i, &d) in divisors.iter().enumerate() {
        for (j, &e) in divisors.iter().enumerate() {
            let included = leq(&handles[i], &handles[j], 1)?;
            let divides = d % e == 0;
            if included != divides {
                order_ok = false;
                order_detail = format!("<{d}> vs <{e}>: got {included}, expected {divides}");
            }
        }
    }
    let mut item = CheckItem::of(
        "inclusion of translation clones mirrors subgroup inclusion",
        order_ok,
    )
    .with_detail(format!("{} ordered pairs", divisors.len() * divisors.len()));
    if !order_ok {
        item = item.with_detail(order_detail);
    }
    items.push(item);

    // meets and joins land on the lcm/gcd subgroups
    let handle_of = |d: i64| -> usize {
        divisors.iter().position(|&x| x == d).expect("a divisor")
    };
    let mut meet_ok = true;
    let mut join_ok = true;
    for i in 0..divisors.len() {
        for j in (i + 1)..divisors.len() {
            let (d, e) = (divisors[i], divisors[j]);
            let lcm = (d * e / gcd(d, e)).min(12);
            let meets = meet_fragments(&handles[i], &handles[j], 1)?;
            let expected_meet = handles[handle_of(lcm)].fragment(1)?;
            meet_ok &= meets[0].same_tables(&expected_meet);
            let joined = join(&handles[i], &handles[j])?;
            join_ok &= same_fragments(&joined, &handles[handle_of(gcd(d, e))], 1)?;
        }
    }
    items.push(
        CheckItem::of("pairwise meets land on the lcm subgroup", meet_ok)
            .with_detail("15 pairs"),
    );
    items.push(
        CheckItem::of("pairwise joins land on the gcd subgroup", join_ok)
            .with_detail("15 pairs"),
    );

    // recognition sweep: every two-point unary partial function is accepted
    // exactly when both points shift by one and the same subgroup element
    let mut sweep_ok = true;
    let mut accepted = 0usize;
    let mut expected_accepted = 0usize;
    let mut counterexample = None;
    for &d in &divisors {
        let subgroup = SubgroupHandle::new(group.clone(), vec![vec![d]])?;
        for x in 0u8..12 {
            for y in (x + 1)..12 {
                for v0 in 0u8..12 {
                    for v1 in 0u8..12 {
                        let p = PartialOperation::new(
                            1,
                            [(vec![x], v0), (vec![y], v1)],
                        )?;
                        let got = translation_clone_member(&p, &subgroup, &window, settings.budget)?;
                        let shift0 = (12 + v0 as i64 - x as i64) % 12;
                        let shift1 = (12 + v1 as i64 - y as i64) % 12;
                        let expected = shift0 == shift1 && shift0 % d == 0;
                        if got {
                            accepted += 1;
                        }
                        if expected {
                            expected_accepted += 1;
                        }
                        if got != expected && counterexample.is_none() {
                            sweep_ok = false;
                            counterexample = Some(json!({
                                "subgroup": format!("<{d}>"),
                                "domain": [x, y],
                                "values": [v0, v1],
                                "got": got,
                            }));
                        }
                    }
                }
            }
        }
    }
    let mut item = CheckItem::of(
        "two-point partial functions are recognized exactly",
        sweep_ok,
    )
    .with_detail(format!(
        "6 subgroups x 66 domains x 144 assignments, {accepted} accepted (expected {expected_accepted})"
    ));
    if let Some(c) = counterexample {
        item = item.with_certificate(c);
    }
    items.push(item);

    if let Some(path) = &settings.dot {
        write_dot(&mut items, path, &handles, 1)?;
    }

    Ok(CheckReport::new("check translation-lattice", None, items))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The three block-preserving clones over {0,1,2} form an antichain whose
/// pairwise joins already generate everything (up to the tested arity cap).
fn check_antichain_join(settings: &Settings) -> Result<CheckReport, Error> {
    let universe = u(3);
    let cap = settings.arity.unwrap_or(2);
    let blocks: [&[u8]; 3] = [&[0], &[1], &[0, 1]];
    let mut handles = Vec::new();
    for block in blocks {
        let relation = Relation::unary(universe, block.iter().copied())?;
        handles.push(CloneHandle::pol_handle(
            format!("preserving {block:?}"),
            universe,
            std::slice::from_ref(&relation),
            cap,
            settings.budget,
        )?);
    }
    let top = CloneHandle::all_operations(universe).with_budget(settings.budget);
    let mut items = Vec::new();

    let mut distinct = true;
    for i in 0..handles.len() {
        for j in (i + 1)..handles.len() {
            distinct &= !same_fragments(&handles[i], &handles[j], cap)?;
        }
    }
    items.push(CheckItem::of(
        "the three block clones are pairwise distinct",
        distinct,
    ));

    let report = antichain_check(&handles, cap, AntichainMode::JoinTop, &top)?;
    let mut item = CheckItem::of(
        "every pairwise join generates all operations",
        report.pass(),
    )
    .with_detail(format!(
        "{} pairs at arity cap {cap}",
        report.pairs_checked
    ));
    if !report.pass() {
        item = item.with_certificate(json!(report
            .failures
            .iter()
            .map(|f| json!({"left": f.left, "right": f.right, "arity": f.arity}))
            .collect::<Vec<_>>()));
    }
    items.push(item);

    if let Some(path) = &settings.dot {
        let mut with_top = handles;
        with_top.push(top);
        write_dot(&mut items, path, &with_top, cap)?;
    }

    Ok(CheckReport::new("check antichain-join", None, items))
}

/// Indicator clones for the nonempty blocks inside {2,3,4} over {0..4}:
/// unary fragments are exactly three maps, and all pairwise meets collapse
/// to the clone of the constant.
fn check_antichain_meet(settings: &Settings) -> Result<CheckReport, Error> {
    let universe = u(5);
    let cap = settings.arity.unwrap_or(2);
    let (inside, outside) = (0u8, 1u8);
    let blocks: Vec<Vec<u8>> = (1u8..8)
        .map(|mask| {
            [2u8, 3, 4]
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &x)| x)
                .collect()
        })
        .collect();
    let handles: Vec<CloneHandle> = blocks
        .iter()
        .map(|b| {
            Ok(CloneHandle::new(
                format!("indicator of {b:?}"),
                universe,
                vec![Operation::indicator(b.iter().copied(), inside, outside)?],
            )
            .with_budget(settings.budget))
        })
        .collect::<Result<_, Error>>()?;

    let mut items = Vec::new();

    // unary fragments: the identity, the indicator, and the constant
    let mut exact = true;
    let mut detail = String::new();
    for (b, handle) in blocks.iter().zip(&handles) {
        let fragment = handle.fragment(1)?;
        let mut expected: BTreeSet<Vec<u8>> = BTreeSet::new();
        expected.insert((0u8..5).collect());
        expected.insert(
            (0u8..5)
                .map(|x| if b.contains(&x) { inside } else { outside })
                .collect(),
        );
        expected.insert(vec![outside; 5]);
        let got: BTreeSet<Vec<u8>> = fragment.entry_vectors().cloned().collect();
        if got != expected {
            exact = false;
            detail = format!("block {b:?} produced {got:?}");
        }
    }
    let mut item = CheckItem::of(
        "unary fragments are exactly {identity, indicator, constant}",
        exact,
    )
    .with_detail(format!("{} blocks", blocks.len()));
    if !exact {
        item = item.with_detail(detail);
    }
    items.push(item);

    // pairwise meets collapse to the clone of the constant map
    let bottom = CloneHandle::new(
        "constant clone",
        universe,
        vec![Operation::constant(1, outside)?],
    )
    .with_budget(settings.budget);
    let report = antichain_check(&handles, cap, AntichainMode::MeetBottom, &bottom)?;
    let mut item = CheckItem::of(
        "every pairwise meet is the clone of the constant",
        report.pass(),
    )
    .with_detail(format!(
        "{} pairs at arity cap {cap}",
        report.pairs_checked
    ));
    if !report.pass() {
        item = item.with_certificate(json!(report
            .failures
            .iter()
            .map(|f| json!({"left": f.left, "right": f.right, "arity": f.arity}))
            .collect::<Vec<_>>()));
    }
    items.push(item);

    if let Some(path) = &settings.dot {
        let mut with_bottom = handles;
        with_bottom.push(bottom);
        write_dot(&mut items, path, &with_bottom, cap)?;
    }

    Ok(CheckReport::new("check antichain-meet", None, items))
}

/// The restriction map to finite domains over {0,1}: it separates five
/// distinct clones, sends the lattice join of the meet/join clones to the
/// join of the images, and every restricted composite extends to a total
/// member.
fn check_sigma_join(settings: &Settings) -> Result<CheckReport, Error> {
    let two = u(2);
    let meet = OpTable::new(two, 2, vec![0, 0, 0, 1])?;
    let or = OpTable::new(two, 2, vec![0, 1, 1, 1])?;
    let not = OpTable::new(two, 1, vec![1, 0])?;
    let majority = OpTable::new(two, 3, vec![0, 0, 0, 1, 0, 1, 1, 1])?;
    let clones = [
        ("projections", CloneHandle::projections_only(two)),
        ("meet", CloneHandle::new("meet", two, ops(&[meet.clone()]))),
        ("join", CloneHandle::new("join", two, ops(&[or.clone()]))),
        ("not", CloneHandle::new("not", two, ops(&[not]))),
        (
            "majority",
            CloneHandle::new("majority", two, ops(&[majority])),
        ),
    ];

    // all nonempty binary domains, plus the unary ones and one ternary
    // domain that can tell the majority clone from the projections
    let binary_tuples: Vec<Vec<u8>> = two.tuples(2).collect();
    let mut binary_domains: Vec<Vec<Vec<u8>>> = Vec::new();
    for mask in 1u32..(1 << binary_tuples.len()) {
        binary_domains.push(
            binary_tuples
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, t)| t.clone())
                .collect(),
        );
    }
    let mut separating_domains = binary_domains.clone();
    separating_domains.push(vec![vec![0]]);
    separating_domains.push(vec![vec![1]]);
    separating_domains.push(vec![vec![0], vec![1]]);
    separating_domains.push(vec![
        vec![0, 0, 1],
        vec![0, 1, 0],
        vec![1, 0, 0],
        vec![1, 1, 1],
    ]);

    let mut items = Vec::new();
    for i in 0..clones.len() {
        for j in (i + 1)..clones.len() {
            let verdict = separate(&clones[i].1, &clones[j].1, &separating_domains)?;
            match verdict {
                Separation::Separated {
                    witness,
                    from_first,
                    domain_index,
                } => {
                    let side = if from_first { clones[i].0 } else { clones[j].0 };
                    items.push(
                        CheckItem::pass(format!(
                            "{} and {} restrict differently",
                            clones[i].0, clones[j].0
                        ))
                        .with_detail(format!(
                            "witness from {side} on domain {domain_index}: {:?} -> {:?}",
                            witness.domain(),
                            witness.values()
                        )),
                    );
                }
                Separation::NotSeparated => items.push(CheckItem::fail(format!(
                    "{} and {} restrict differently",
                    clones[i].0, clones[j].0
                ))),
            }
        }
    }

    let joined_ok = sigma_join_check(&clones[1].1, &clones[2].1, &binary_domains, settings.budget)?;
    items.push(
        CheckItem::of(
            "restriction of the meet/join lattice join equals the join of restrictions",
            joined_ok,
        )
        .with_detail(format!("{} domains", binary_domains.len())),
    );

    for (name, clone) in [&clones[1], &clones[2]] {
        match extension_property(clone, &binary_domains, settings.budget)? {
            None => items.push(CheckItem::pass(format!(
                "every restricted composite of {name} extends to a total member"
            ))),
            Some(p) => items.push(
                CheckItem::fail(format!(
                    "every restricted composite of {name} extends to a total member"
                ))
                .with_certificate(json!({
                    "domain": p.domain(),
                    "values": p.values(),
                })),
            ),
        }
    }

    Ok(CheckReport::new("check sigma-join", None, items))
}

/// Random operations outside the block-preserving clone over {0,1,2} all
/// complete it to everything: sampled evidence that nothing sits strictly
/// between that clone and the top.
fn check_covering(settings: &Settings) -> Result<CheckReport, Error> {
    let universe = u(3);
    let cap = settings.arity.unwrap_or(2);
    let trials = settings.trials.unwrap_or(50);
    let report = covering_check(
        &[0, 1],
        cap,
        universe,
        trials,
        settings.seed,
        settings.budget,
    )?;
    let mut items = Vec::new();
    items.push(
        CheckItem::of(
            "the requested number of outside operations was tested",
            report.tested == report.requested,
        )
        .with_detail(format!(
            "{} tested, {} skipped as members",
            report.tested, report.skipped
        )),
    );
    let mut item = CheckItem::of(
        "every sampled outside operation generates everything",
        report.failures.is_empty(),
    )
    .with_detail(format!("arity cap {cap}"));
    if !report.failures.is_empty() {
        item = item.with_certificate(json!(report
            .failures
            .iter()
            .map(table_json)
            .collect::<Vec<_>>()));
    }
    items.push(item);
    Ok(CheckReport::new(
        "check covering",
        Some(settings.seed),
        items,
    ))
}
