use std::sync::Arc;

use cubefold::complex::hamming;
use cubefold::fold::FoldStep;
use cubefold::maps::distance_violation;
use cubefold::{
    dual_complex, folding_sequence, validate_pocset, FoldConfig, HyperplaneId, PocsetMap, RawPocset, ResolutionState,
    DEFAULT_VERTEX_CAP,
};
use cubefold_testkit::{resolution_from_seed, rng, shuffled, widen_target};
use proptest::prelude::*;
use rand::Rng;

fn state(seed: u64) -> ResolutionState {
    let st = resolution_from_seed(seed);
    if seed % 2 == 0 {
        widen_target(&st)
    } else {
        st
    }
}

/// Each fold step with the state it was applied to.
fn steps(st: &ResolutionState) -> Vec<(ResolutionState, FoldStep)> {
    let trace = folding_sequence(st, &FoldConfig::default()).unwrap();
    let mut before = st.clone();
    let mut out = Vec::new();
    for s in trace.steps {
        let next = s.result.clone();
        out.push((before, s));
        before = next;
    }
    out
}

/// An isomorphic copy of the domain with fresh names, shuffled hyperplane
/// order and random side order, and the renaming map onto the original.
fn relabel(f: &PocsetMap, seed: u64) -> PocsetMap {
    let d = f.domain();
    let mut r = rng(seed);
    let hs = shuffled(&mut r, &d.hyperplanes().collect::<Vec<_>>());
    let fresh = |n: &str| format!("r_{n}");
    let mut raw = RawPocset::new();
    for h in hs {
        let [mut a, mut b] = h.sides();
        if r.gen_bool(0.5) {
            std::mem::swap(&mut a, &mut b);
        }
        raw = raw.pair(&fresh(d.name(a)), &fresh(d.name(b)));
    }
    for (x, y) in d.covers() {
        raw = raw.le(&fresh(d.name(x)), &fresh(d.name(y)));
    }
    let copy = Arc::new(validate_pocset(&raw).unwrap());
    let entries: Vec<_> = d.halfspaces().map(|h| (copy.halfspace(&fresh(d.name(h))).unwrap(), h)).collect();
    PocsetMap::from_partial(copy, d.clone(), &entries).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn induced_vertices_are_ultrafilters_and_distances_shrink(seed in any::<u64>()) {
        let st = state(seed);
        let f = st.map();
        let x = dual_complex(f.domain().clone(), DEFAULT_VERTEX_CAP).unwrap();
        let y = dual_complex(f.codomain().clone(), DEFAULT_VERTEX_CAP).unwrap();
        for u in x.vertices() {
            prop_assert!(f.induced_codomain_vertex(u).unwrap().is_valid(f.codomain()));
        }
        let fv = f.induced_codomain_map(&x, &y).unwrap();
        prop_assert_eq!(distance_violation(&x, &y, &fv, false), None);
        for e in x.edges() {
            prop_assert!(hamming(y.vertex(fv[e.a]), y.vertex(fv[e.b])) <= 1);
        }
    }

    #[test]
    fn embeddings_preserve_distances(seed in any::<u64>()) {
        let trace = folding_sequence(&state(seed), &FoldConfig::default()).unwrap();
        let f = trace.final_embedding();
        prop_assert!(f.classify().is_embedding);
        let x = dual_complex(f.domain().clone(), DEFAULT_VERTEX_CAP).unwrap();
        let y = dual_complex(f.codomain().clone(), DEFAULT_VERTEX_CAP).unwrap();
        let fv = f.induced_codomain_map(&x, &y).unwrap();
        prop_assert_eq!(distance_violation(&x, &y, &fv, true), None);
        let renamed = relabel(f, seed).then(f).unwrap();
        prop_assert!(renamed.classify().is_embedding);
    }

    #[test]
    fn fold_classes_face_and_are_admissible(seed in any::<u64>()) {
        for (before, s) in steps(&state(seed)) {
            let p = before.pocset();
            for h in p.hyperplanes() {
                prop_assert!(p.is_facing_collection(&s.relation.hyperplane_class(h)));
            }
            prop_assert!(s.relation.check_admissible().admissible());
            prop_assert!(s.checks.iter().all(|(_, ok)| *ok));
        }
    }

    #[test]
    fn transverse_classes_come_from_crossings_or_the_folded_pair(seed in any::<u64>()) {
        for (before, s) in steps(&state(seed)) {
            let p = before.pocset();
            let q = &s.quotient;
            let qp = q.pocset();
            let hs: Vec<HyperplaneId> = qp.hyperplanes().collect();
            for (i, &a) in hs.iter().enumerate() {
                for &b in &hs[i + 1..] {
                    if !qp.transverse(a, b) {
                        continue;
                    }
                    let (ra, rb) = (q.preimage_hyperplanes(a), q.preimage_hyperplanes(b));
                    let crossing = ra.iter().any(|&x| rb.iter().any(|&y| p.transverse(x, y)));
                    let between = |h_class: HyperplaneId, k_reps: &[HyperplaneId]| {
                        before.action().elements().iter().any(|g| {
                            [(s.pair.0, s.pair.1), (s.pair.1, s.pair.0)].into_iter().any(|(h1, h2)| {
                                let (x, y) = (g.apply(h1), g.apply(h2));
                                q.project_hyperplane(x.hyperplane()) == h_class
                                    && k_reps.iter().flat_map(|k| k.sides()).any(|k| p.lt(x.star(), k) && p.lt(k, y))
                            })
                        })
                    };
                    prop_assert!(crossing || between(a, &rb) || between(b, &ra));
                    let (ia, ib) = (before.map().apply_hyperplane(ra[0]), before.map().apply_hyperplane(rb[0]));
                    prop_assert!(before.map().codomain().transverse(ia, ib));
                }
            }
            for h in p.hyperplanes() {
                for h2 in s.relation.hyperplane_class(h) {
                    for k in p.hyperplanes() {
                        if p.separates(k, h, h2) {
                            prop_assert!(qp.transverse(q.project_hyperplane(h), q.project_hyperplane(k)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn separations_lost_by_a_fold_are_explained(seed in any::<u64>()) {
        for (before, s) in steps(&state(seed)) {
            let p = before.pocset();
            let (f, t) = (before.map(), before.map().codomain());
            let q = &s.quotient;
            let rel = &s.relation;
            for k in p.hyperplanes() {
                for h in p.hyperplanes() {
                    for l in p.hyperplanes() {
                        if h >= l || !p.separates(k, h, l) {
                            continue;
                        }
                        let imgs = [f.apply_hyperplane(h), f.apply_hyperplane(k), f.apply_hyperplane(l)];
                        if t.transverse(imgs[0], imgs[1]) || t.transverse(imgs[1], imgs[2]) || t.transverse(imgs[0], imgs[2]) {
                            continue;
                        }
                        let [qh, qk, ql] = [h, k, l].map(|x| q.project_hyperplane(x));
                        if qh == ql || q.pocset().separates(qk, qh, ql) {
                            continue;
                        }
                        if rel.hyperplanes_related(h, k) || rel.hyperplanes_related(l, k) {
                            continue;
                        }
                        prop_assert!(q.pocset().is_facing_collection(&[qh, qk, ql]));
                        let lifts = rel.hyperplane_class(k).into_iter().filter(|&k2| p.separates(k2, h, l)).count();
                        prop_assert_eq!(lifts, 2);
                    }
                }
            }
        }
    }

    #[test]
    fn folding_terminates_within_bound(seed in any::<u64>()) {
        let st = state(seed);
        let trace = folding_sequence(&st, &FoldConfig::default()).unwrap();
        prop_assert!(trace.steps.len() <= trace.step_bound());
        prop_assert!(trace.final_embedding().classify().is_embedding);
        prop_assert_eq!(trace.composite().unwrap(), st.map().clone());
        prop_assert!(trace.complexity_history.windows(2).all(|w| w[1] < w[0]));
        prop_assert_eq!(trace.complexity_history.last().copied(), Some(0));
    }

    #[test]
    fn folding_is_deterministic(seed in any::<u64>()) {
        let st = state(seed);
        let a = folding_sequence(&st, &FoldConfig::default()).unwrap().to_json();
        let b = folding_sequence(&st, &FoldConfig::default()).unwrap().to_json();
        prop_assert_eq!(a, b);
    }
}
