//! Seeded generators of pocsets, actions, admissible relations and
//! resolutions, plus brute-force oracles to check the library against.

use std::path::PathBuf;
use std::sync::Arc;

use cubefold::fold::descend_action;
use cubefold::pocset::PocsetError;
use cubefold::{
    quotient_pocset, validate_action, validate_pocset, EquivalenceRelation, GroupAction, HalfspaceId, Permutation,
    Pocset, PocsetMap, RawPocset, ResolutionState,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Directory holding the shipped fixture files.
pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

pub fn fixture(name: &str) -> String {
    let path = fixtures_dir().join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn try_add(raw: &RawPocset, lo: &str, hi: &str) -> Option<RawPocset> {
    let next = raw.clone().le(lo, hi);
    match validate_pocset(&next) {
        Ok(_) => Some(next),
        Err(PocsetError::OrderCycle { .. } | PocsetError::ComparableWithComplement { .. }) => None,
        Err(e) => panic!("generator built a malformed pocset: {e}"),
    }
}

/// `hyperplanes` pairs named `h{i}`/`nh{i}` with order relations added at
/// random, each kept only if the result is still a pocset. `attempts`
/// controls density.
pub fn random_pocset(rng: &mut impl Rng, hyperplanes: usize, attempts: usize) -> Arc<Pocset> {
    let names: Vec<[String; 2]> = (0..hyperplanes).map(|i| [format!("h{i}"), format!("nh{i}")]).collect();
    let mut raw = RawPocset::new();
    for [a, b] in &names {
        raw = raw.pair(a, b);
    }
    if hyperplanes >= 2 {
        for _ in 0..attempts {
            let i = rng.gen_range(0..hyperplanes);
            let mut j = rng.gen_range(0..hyperplanes - 1);
            if j >= i {
                j += 1;
            }
            let lo = &names[i][rng.gen_range(0..2)];
            let hi = &names[j][rng.gen_range(0..2)];
            if let Some(next) = try_add(&raw, lo, hi) {
                raw = next;
            }
        }
    }
    Arc::new(validate_pocset(&raw).expect("kept relations validate"))
}

/// A pocset with `copies` shifted copies of `per_copy` hyperplanes, named
/// `h{i}c{j}`, and the cyclic shift `s` as its action. Relations are added
/// in whole shift orbits, so the shift is an automorphism; it moves every
/// hyperplane when `copies > 1`, so it has no inversions.
pub fn cyclic_pocset(
    rng: &mut impl Rng,
    copies: usize,
    per_copy: usize,
    attempts: usize,
) -> (Arc<Pocset>, GroupAction) {
    let name = |side: usize, i: usize, c: usize| {
        let c = c % copies;
        if side == 0 {
            format!("h{i}c{c}")
        } else {
            format!("nh{i}c{c}")
        }
    };
    let mut raw = RawPocset::new();
    for c in 0..copies {
        for i in 0..per_copy {
            raw = raw.pair(&name(0, i, c), &name(1, i, c));
        }
    }
    for _ in 0..attempts {
        let (i, j) = (rng.gen_range(0..per_copy), rng.gen_range(0..per_copy));
        let d = rng.gen_range(0..copies);
        if i == j && d == 0 {
            continue;
        }
        let (si, sj) = (rng.gen_range(0..2), rng.gen_range(0..2));
        let mut next = raw.clone();
        for c in 0..copies {
            next = next.le(&name(si, i, c), &name(sj, j, c + d));
        }
        if validate_pocset(&next).is_ok() {
            raw = next;
        }
    }
    let p = Arc::new(validate_pocset(&raw).expect("kept relations validate"));
    let images: Vec<usize> = p
        .halfspaces()
        .map(|h| {
            let n = p.name(h);
            let (head, c) = n.rsplit_once('c').expect("copy suffix");
            let c: usize = c.parse().expect("copy index");
            p.halfspace(&format!("{head}c{}", (c + 1) % copies)).expect("shifted name").0
        })
        .collect();
    let shift = Permutation::from_images(images).expect("shift is a bijection");
    let action = validate_action(p.clone(), vec![("s".to_owned(), shift)]).expect("shift is an inversion-free automorphism");
    (p, action)
}

/// Every choice of one side per hyperplane that is upward closed, found by
/// brute force over all orientations. Each is sorted by hyperplane id.
pub fn naive_ultrafilters(p: &Pocset) -> Vec<Vec<HalfspaceId>> {
    let n = p.num_hyperplanes();
    assert!(n <= 20, "brute force over {n} hyperplanes");
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let chosen: Vec<HalfspaceId> = p
            .hyperplanes()
            .map(|h| h.sides()[((mask >> h.0) & 1) as usize])
            .collect();
        let upward = chosen
            .iter()
            .all(|&x| chosen.iter().all(|&y| !p.lt(x, y.star())));
        if upward {
            out.push(chosen);
        }
    }
    out.sort();
    out
}

/// Majority vote per hyperplane.
pub fn majority(u: &[HalfspaceId], v: &[HalfspaceId], w: &[HalfspaceId]) -> Vec<HalfspaceId> {
    u.iter()
        .zip(v)
        .zip(w)
        .map(|((&a, &b), &c)| if a == b || a == c { a } else { b })
        .collect()
}

/// Relation generated by `pairs` random pairs of halfspaces on distinct
/// hyperplanes, closed under the action; `None` when it is not admissible
/// or its quotient picks up an inversion.
pub fn random_invariant_relation(rng: &mut impl Rng, action: &GroupAction, pairs: usize) -> Option<EquivalenceRelation> {
    let p = action.pocset();
    let n = p.num_halfspaces();
    if p.num_hyperplanes() < 2 {
        return None;
    }
    let mut seeds = Vec::new();
    for _ in 0..pairs {
        let a = HalfspaceId(rng.gen_range(0..n));
        let b = HalfspaceId(rng.gen_range(0..n));
        if a.hyperplane() == b.hyperplane() {
            continue;
        }
        for g in action.elements() {
            seeds.push((g.apply(a), g.apply(b)));
        }
    }
    let rel = EquivalenceRelation::generated_by(p.clone(), &seeds);
    if !rel.check_admissible().admissible() {
        return None;
    }
    let q = quotient_pocset(&rel).ok()?;
    descend_action(action, &q).ok()?;
    Some(rel)
}

/// Retries until an admissible relation with at least one nontrivial class
/// turns up, or gives up after `tries`.
pub fn admissible_relation(rng: &mut impl Rng, action: &GroupAction, pairs: usize, tries: usize) -> Option<EquivalenceRelation> {
    (0..tries).find_map(|_| {
        random_invariant_relation(rng, action, pairs).filter(|r| r.num_classes() < r.pocset().num_halfspaces())
    })
}

/// The projection onto a random admissible quotient, with the descended
/// action on the target. With `copies == 1` the group is trivial.
pub fn random_resolution(rng: &mut impl Rng, copies: usize, per_copy: usize) -> Option<ResolutionState> {
    let attempts = rng.gen_range(0..=3 * per_copy * copies.max(1));
    let action = if copies <= 1 {
        GroupAction::trivial(random_pocset(rng, per_copy, attempts))
    } else {
        cyclic_pocset(rng, copies, per_copy, attempts).1
    };
    let pairs = rng.gen_range(1..=2);
    let rel = admissible_relation(rng, &action, pairs, 20)?;
    let q = quotient_pocset(&rel).ok()?;
    let target = descend_action(&action, &q).ok()?;
    let f: PocsetMap = q.projection_map();
    ResolutionState::new(action, f, target).ok()
}

/// `count` resolutions cycling through trivial, order-two and order-four
/// groups, drawn from `seed`.
pub fn resolution_corpus(seed: u64, count: usize) -> Vec<ResolutionState> {
    let mut rng = rng(seed);
    let shapes = [(1usize, 6usize), (2, 3), (4, 2)];
    let mut out = Vec::with_capacity(count);
    let mut k = 0;
    while out.len() < count {
        let (copies, per) = shapes[k % shapes.len()];
        let per = rng.gen_range(per.saturating_sub(1).max(1)..=per);
        if let Some(st) = random_resolution(&mut rng, copies, per) {
            out.push(st);
            k += 1;
        }
    }
    out
}

/// The first resolution drawn from `seed`, with the shape picked by the seed.
pub fn resolution_from_seed(seed: u64) -> ResolutionState {
    let mut r = rng(seed);
    let shapes = [(1usize, 5usize), (2, 3), (4, 2)];
    let (copies, per) = shapes[(seed % 3) as usize];
    loop {
        if let Some(st) = random_resolution(&mut r, copies, per) {
            return st;
        }
    }
}

/// `st` followed by the inclusion of its target into the target plus one
/// extra hyperplane `zfree`, transverse to everything and fixed by the
/// action. The result is a resolution that is no longer onto.
pub fn widen_target(st: &ResolutionState) -> ResolutionState {
    let t = st.map().codomain();
    let mut raw = RawPocset::new();
    for h in t.hyperplanes() {
        let [a, b] = h.sides();
        raw = raw.pair(t.name(a), t.name(b));
    }
    raw = raw.pair("zfree", "nzfree");
    for (x, y) in t.covers() {
        raw = raw.le(t.name(x), t.name(y));
    }
    let wide = Arc::new(validate_pocset(&raw).expect("widened target"));
    let by_name = |h: HalfspaceId| wide.halfspace(t.name(h)).expect("same names");
    let entries: Vec<_> = t.halfspaces().map(|h| (h, by_name(h))).collect();
    let inclusion = PocsetMap::from_partial(t.clone(), wide.clone(), &entries).expect("inclusion");
    let gens = st
        .target_action()
        .generators()
        .iter()
        .map(|(name, g)| {
            let images = wide
                .halfspaces()
                .map(|h| match t.halfspace(wide.name(h)) {
                    Some(old) => by_name(g.apply(old)).0,
                    None => h.0,
                })
                .collect();
            (name.clone(), Permutation::from_images(images).expect("bijection"))
        })
        .collect();
    let action = validate_action(wide, gens).expect("extended action");
    let f = st.map().then(&inclusion).expect("composable");
    ResolutionState::new(st.action().clone(), f, action).expect("widened map is a resolution")
}

/// Random sample of `count` index triples, or all of them when fewer.
pub fn triples(rng: &mut impl Rng, n: usize, count: usize) -> Vec<[usize; 3]> {
    if n.pow(3) <= count {
        let mut all = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    all.push([i, j, k]);
                }
            }
        }
        return all;
    }
    (0..count)
        .map(|_| [rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)])
        .collect()
}

pub fn shuffled<T: Clone>(rng: &mut impl Rng, items: &[T]) -> Vec<T> {
    let mut v = items.to_vec();
    v.shuffle(rng);
    v
}
