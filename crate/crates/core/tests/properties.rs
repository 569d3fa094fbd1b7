use std::sync::Arc;

use cubefold::complex::hamming;
use cubefold::io::parse_pocset;
use cubefold::pocset::Arrangement;
use cubefold::{dual_complex, quotient_pocset, HyperplaneId, Pocset, DEFAULT_VERTEX_CAP};
use cubefold_testkit::{admissible_relation, cyclic_pocset, majority, naive_ultrafilters, random_pocset, rng, triples};
use proptest::prelude::*;
use rand::Rng;

fn small_pocset(seed: u64, max: usize) -> Arc<Pocset> {
    let mut r = rng(seed);
    let n = r.gen_range(1..=max);
    let attempts = r.gen_range(0..=3 * n);
    random_pocset(&mut r, n, attempts)
}

fn pairs(p: &Pocset) -> Vec<(HyperplaneId, HyperplaneId)> {
    let hs: Vec<_> = p.hyperplanes().collect();
    let mut out = Vec::new();
    for (i, &a) in hs.iter().enumerate() {
        for &b in &hs[i + 1..] {
            out.push((a, b));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arrangement_is_symmetric_and_complement_dual(seed in any::<u64>()) {
        let p = small_pocset(seed, 5);
        for h in p.halfspaces() {
            for k in p.halfspaces() {
                let a = p.arrangement(h, k);
                prop_assert_eq!(a, p.arrangement(k, h));
                let flipped = p.arrangement(h, k.star());
                let expected = match a {
                    Arrangement::Equal => Arrangement::Complementary,
                    Arrangement::Complementary => Arrangement::Equal,
                    Arrangement::Transverse => Arrangement::Transverse,
                    Arrangement::Nested if p.lt(h, k) => Arrangement::Incompatible,
                    Arrangement::Nested => Arrangement::Facing,
                    Arrangement::Facing | Arrangement::Incompatible => Arrangement::Nested,
                };
                prop_assert_eq!(flipped, expected);
            }
        }
    }

    #[test]
    fn separators_are_symmetric_and_exclude_endpoints(seed in any::<u64>()) {
        let p = small_pocset(seed, 6);
        let m = p.num_hyperplanes();
        for (a, b) in pairs(&p) {
            let ab = p.separators(a, b).unwrap();
            let ba = p.separators(b, a).unwrap();
            prop_assert_eq!(&ab, &ba);
            prop_assert!(ab.len() + 2 <= m);
            if !ab.is_empty() {
                prop_assert!(p.disjoint(a, b));
            }
        }
    }

    #[test]
    fn subsets_of_facing_collections_are_facing(seed in any::<u64>()) {
        let p = small_pocset(seed, 6);
        let hs: Vec<_> = p.hyperplanes().collect();
        for mask in 1u32..(1 << hs.len()) {
            let set: Vec<_> = hs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &h)| h).collect();
            if !p.is_facing_collection(&set) {
                continue;
            }
            for sub in 1u32..(1 << set.len()) {
                let part: Vec<_> = set.iter().enumerate().filter(|(i, _)| sub >> i & 1 == 1).map(|(_, &h)| h).collect();
                prop_assert!(p.is_facing_collection(&part));
            }
        }
    }

    #[test]
    fn action_commutes_with_structure(seed in any::<u64>()) {
        let mut r = rng(seed);
        let copies = [2, 3, 4][r.gen_range(0..3)];
        let per = r.gen_range(1..=2);
        let attempts = r.gen_range(0..=6);
        let (p, action) = cyclic_pocset(&mut r, copies, per, attempts);
        let orbits = action.orbits();
        for g in action.elements() {
            for h in p.halfspaces() {
                prop_assert_eq!(g.apply(h.star()), g.apply(h).star());
                for k in p.halfspaces() {
                    prop_assert_eq!(p.lt(h, k), p.lt(g.apply(h), g.apply(k)));
                }
            }
            for (a, b) in pairs(&p) {
                let mut moved: Vec<_> = p.separators(a, b).unwrap().into_iter().map(|l| g.apply_hyperplane(l)).collect();
                moved.sort();
                prop_assert_eq!(moved, p.separators(g.apply_hyperplane(a), g.apply_hyperplane(b)).unwrap());
            }
        }
        for h in p.halfspaces() {
            let mut starred: Vec<_> = orbits.classes[orbits.class_of[h.0]].iter().map(|k| k.star()).collect();
            starred.sort();
            prop_assert_eq!(&starred, &orbits.classes[orbits.class_of[h.star().0]]);
        }
        for h in p.hyperplanes() {
            let stab = action.stabilizer(h).unwrap();
            for g in &stab {
                prop_assert!(stab.contains(&g.inverse()));
                for k in &stab {
                    prop_assert!(stab.contains(&g.after(k)));
                }
            }
        }
    }

    #[test]
    fn complex_matches_brute_force(seed in any::<u64>()) {
        let p = small_pocset(seed, 7);
        let x = dual_complex(p.clone(), DEFAULT_VERTEX_CAP).unwrap();
        let mut got: Vec<_> = x.vertices().iter().map(|u| u.choices().to_vec()).collect();
        got.sort();
        prop_assert_eq!(got, naive_ultrafilters(&p));
    }

    #[test]
    fn edges_flip_exactly_their_label(seed in any::<u64>()) {
        let p = small_pocset(seed, 6);
        let x = dual_complex(p.clone(), DEFAULT_VERTEX_CAP).unwrap();
        for e in x.edges() {
            let (u, v) = (x.vertex(e.a), x.vertex(e.b));
            prop_assert_eq!(hamming(u, v), 1);
            prop_assert_ne!(u.choice(e.label), v.choice(e.label));
        }
        let d = x.bfs_distances(0);
        prop_assert!(d.iter().all(|&d| d != usize::MAX));
    }

    #[test]
    fn l1_distance_is_graph_distance(seed in any::<u64>()) {
        let p = small_pocset(seed, 6);
        let x = dual_complex(p.clone(), DEFAULT_VERTEX_CAP).unwrap();
        let n = x.vertices().len();
        let dist: Vec<Vec<usize>> = (0..n).map(|i| x.bfs_distances(i)).collect();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(dist[i][j], x.l1_distance(x.vertex(i), x.vertex(j)).unwrap());
            }
        }
        let mut r = rng(seed ^ 1);
        for [a, b, c] in triples(&mut r, n, 200) {
            prop_assert!(dist[a][c] <= dist[a][b] + dist[b][c]);
        }
    }

    #[test]
    fn medians_are_vertices(seed in any::<u64>()) {
        let p = small_pocset(seed, 7);
        let x = dual_complex(p.clone(), DEFAULT_VERTEX_CAP).unwrap();
        let mut r = rng(seed ^ 2);
        for [a, b, c] in triples(&mut r, x.vertices().len(), 100) {
            let (u, v, w) = (x.vertex(a), x.vertex(b), x.vertex(c));
            let m = x.median(u, v, w);
            let vote = majority(u.choices(), v.choices(), w.choices());
            prop_assert_eq!(m.choices(), vote.as_slice());
            prop_assert!(x.vertex_index(&m).is_some());
            let d = |s: &cubefold::Ultrafilter, t: &cubefold::Ultrafilter| hamming(s, t);
            prop_assert_eq!(d(u, &m) + d(&m, v), d(u, v));
        }
    }

    #[test]
    fn quotient_grammar_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = small_pocset(seed, 6);
        let action = cubefold::GroupAction::trivial(p);
        let Some(rel) = admissible_relation(&mut r, &action, 2, 10) else { return Ok(()) };
        let q = quotient_pocset(&rel).unwrap();
        let back = parse_pocset(&q.pocset().to_grammar()).unwrap();
        prop_assert!(back.isomorphic_by_name(q.pocset()));
        prop_assert!(q.pocset().isomorphic_by_name(&back));
    }

    #[test]
    fn quotient_order_matches_inseparable_representatives(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = small_pocset(seed, 6);
        let action = cubefold::GroupAction::trivial(p.clone());
        let Some(rel) = admissible_relation(&mut r, &action, 2, 10) else { return Ok(()) };
        let q = quotient_pocset(&rel).unwrap();
        let qp = q.pocset();
        for h in p.halfspaces() {
            for k in p.halfspaces() {
                let (qh, qk) = (q.project(h), q.project(k));
                if h.hyperplane() == k.hyperplane() || !qp.lt(qh, qk) {
                    continue;
                }
                let (a, b) = (h.hyperplane(), k.hyperplane());
                if p.inseparable_by(|l| rel.hyperplanes_related(l, b), a, b) {
                    prop_assert!(p.lt(h, k) || p.lt(h.star(), k));
                }
                if p.inseparable_by(|l| rel.hyperplanes_related(l, a), a, b) {
                    prop_assert!(p.lt(k, h.star()) || p.lt(k.star(), h.star()));
                }
            }
        }
    }

    #[test]
    fn classes_between_have_separating_representatives(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = small_pocset(seed, 6);
        let action = cubefold::GroupAction::trivial(p.clone());
        let Some(rel) = admissible_relation(&mut r, &action, 2, 10) else { return Ok(()) };
        let q = quotient_pocset(&rel).unwrap();
        let qp = q.pocset();
        for h in p.halfspaces() {
            for l in p.halfspaces() {
                for qk in qp.halfspaces() {
                    let (qh, ql) = (q.project(h), q.project(l));
                    if !(qp.lt(qh, qk) && qp.lt(qk, ql)) {
                        continue;
                    }
                    let reps = q.members(qk);
                    let (a, b) = (h.hyperplane(), l.hyperplane());
                    prop_assert!(reps.iter().any(|k| p.separates(k.hyperplane(), a, b)));
                    if p.lt(h, l) {
                        prop_assert!(reps.iter().any(|&k| p.lt(h, k) && p.lt(k, l)));
                    }
                }
            }
        }
    }

    #[test]
    fn transverse_classes_have_crossing_witnesses(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = small_pocset(seed, 6);
        let action = cubefold::GroupAction::trivial(p);
        let Some(rel) = admissible_relation(&mut r, &action, 3, 10) else { return Ok(()) };
        let q = quotient_pocset(&rel).unwrap();
        for (a, b) in pairs(q.pocset()) {
            if q.pocset().transverse(a, b) {
                prop_assert!(q.transversality_witness(a, b).is_ok());
            }
        }
    }
}
