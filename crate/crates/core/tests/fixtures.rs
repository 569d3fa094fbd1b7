use std::sync::Arc;

use cubefold::io::{parse_action, parse_map, parse_pocset, parse_relation};
use cubefold::maps::{distance_violation, MapWitness};
use cubefold::quotient::{Aer, TransversalityWitness};
use cubefold::{
    dual_complex, folding_sequence, quotient_pocset, FoldConfig, GroupAction, Pocset, PocsetMap, ResolutionState,
    DEFAULT_VERTEX_CAP,
};
use cubefold_testkit::fixture;

fn pocset(name: &str) -> Arc<Pocset> {
    Arc::new(parse_pocset(&fixture(name)).unwrap())
}

fn map(name: &str, d: &Arc<Pocset>, c: &Arc<Pocset>) -> PocsetMap {
    parse_map(&fixture(name), d.clone(), c.clone()).unwrap()
}

fn action(name: &str, p: &Arc<Pocset>) -> GroupAction {
    parse_action(&fixture(name), p.clone()).unwrap()
}

fn counts(p: &Arc<Pocset>) -> (usize, usize, usize, usize) {
    let x = dual_complex(p.clone(), DEFAULT_VERTEX_CAP).unwrap();
    (x.vertices().len(), x.edges().len(), x.count_cubes(2), x.dimension())
}

#[test]
fn chain_fold_raises_dimension() {
    let chain = pocset("chain3.pocset");
    assert_eq!(counts(&chain), (4, 3, 0, 1));
    let rel = parse_relation(&fixture("chain_fold.rel"), chain.clone()).unwrap();
    let q = quotient_pocset(&rel).unwrap();
    assert_eq!(counts(q.pocset()), (4, 4, 1, 2));
    let a = q.project_hyperplane(chain.halfspace("a").unwrap().hyperplane());
    let b = q.project_hyperplane(chain.halfspace("b").unwrap().hyperplane());
    assert!(q.pocset().transverse(a, b));
}

#[test]
fn chain_fold_map_factors_through_one_step() {
    let (chain, square) = (pocset("chain3.pocset"), pocset("square.pocset"));
    let f = map("chain_fold.map", &chain, &square);
    let st = ResolutionState::new(GroupAction::trivial(chain.clone()), f.clone(), GroupAction::trivial(square.clone())).unwrap();
    let trace = folding_sequence(&st, &FoldConfig::default()).unwrap();
    assert_eq!(trace.steps.len(), 1);
    assert_eq!(trace.step_bound(), 1);
    assert!(trace.final_embedding().domain().isomorphic_by_name(trace.steps[0].quotient.pocset()));
    assert_eq!(trace.composite().unwrap(), f);

    let x = dual_complex(chain, DEFAULT_VERTEX_CAP).unwrap();
    let y = dual_complex(square, DEFAULT_VERTEX_CAP).unwrap();
    let mut image = f.induced_codomain_map(&x, &y).unwrap();
    image.sort();
    image.dedup();
    assert_eq!(image.len(), 4);
}

#[test]
fn fan_target_and_rotation() {
    let fan = pocset("fan.pocset");
    let x = dual_complex(fan.clone(), DEFAULT_VERTEX_CAP).unwrap();
    assert_eq!((x.vertices().len(), x.edges().len()), (9, 12));
    let maximal = x.maximal_cubes();
    assert_eq!(maximal.len(), 4);
    assert!(maximal.iter().all(|c| c.dimension() == 2));
    let r = action("fan_rotation.action", &fan);
    assert_eq!(r.order(), 4);
    assert_eq!(r.hyperplane_orbits(), vec![0; 4]);
}

#[test]
fn star_tree_folds_onto_the_fan() {
    let (star, fan) = (pocset("star_tree.pocset"), pocset("fan.pocset"));
    let f = map("star_to_fan.map", &star, &fan);
    let st = ResolutionState::new(action("star_tree.action", &star), f.clone(), action("fan_rotation.action", &fan)).unwrap();
    assert_eq!(st.identified_pairs(), 4);
    let trace = folding_sequence(&st, &FoldConfig::default()).unwrap();
    assert_eq!(trace.steps.len(), 1);
    assert_eq!(trace.complexity_history, vec![0]);
    let fin = trace.final_embedding();
    assert_eq!(fin.domain().num_hyperplanes(), fan.num_hyperplanes());
    assert!(fin.classify().is_embedding);
    assert_eq!(trace.composite().unwrap(), f);
}

#[test]
fn twin_chain_needs_stabilizer_folds() {
    let (twin, ray) = (pocset("twin_chain.pocset"), pocset("ray.pocset"));
    let f = map("twin_fold.map", &twin, &ray);
    let st = ResolutionState::new(action("twin_chain.action", &twin), f, action("ray_trivial.action", &ray)).unwrap();
    assert_eq!(st.complexity().unwrap().total, 2);
    let trace = folding_sequence(&st, &FoldConfig::default()).unwrap();
    assert_eq!(trace.complexity_history, vec![2, 1, 0]);
    assert_eq!(trace.steps.len(), 2);
    for s in &trace.steps {
        assert!(s.checks.iter().all(|(_, ok)| *ok));
    }
}

#[test]
fn embedding_preserves_distances() {
    let (c3, c4) = (pocset("chain3.pocset"), pocset("chain4.pocset"));
    let f = map("chain3_in_chain4.map", &c3, &c4);
    assert!(f.classify().is_embedding);
    let x = dual_complex(c3, DEFAULT_VERTEX_CAP).unwrap();
    let y = dual_complex(c4, DEFAULT_VERTEX_CAP).unwrap();
    let fv = f.induced_codomain_map(&x, &y).unwrap();
    assert_eq!(distance_violation(&x, &y, &fv, true), None);
}

#[test]
fn separated_classes_need_not_cross() {
    let p = pocset("converse.pocset");
    let rel = parse_relation(&fixture("converse.rel"), p.clone()).unwrap();
    let q = quotient_pocset(&rel).unwrap();
    let h = |n: &str| p.halfspace(n).unwrap().hyperplane();
    let shape = cubefold::quotient::find_crossing_shape(&p, &[h("h0"), h("h1")], &[h("h2"), h("h3")]);
    assert_eq!(shape, Some(TransversalityWitness::SeparatesFirst { separator: h("h2"), a: h("h0"), b: h("h1") }));
    let qp = q.pocset();
    let (a, b) = (qp.halfspace("q0_h0_h1").unwrap(), qp.halfspace("q2_h2_h3").unwrap());
    assert!(!qp.transverse(a.hyperplane(), b.hyperplane()));
}

#[test]
fn aer3_sentinel_names_the_crossing_pair() {
    let p = pocset("crossing_pair.pocset");
    let rel = parse_relation(&fixture("aer3_sentinel.rel"), p.clone()).unwrap();
    let report = rel.check_admissible();
    let v = report.first(Aer::Aer3).unwrap();
    assert_eq!((p.name(v.witness.0), p.name(v.witness.1)), ("a", "b"));
}

#[test]
fn am2_sentinel_names_the_collapsed_pair() {
    let (d, c) = (pocset("crossing_pair.pocset"), pocset("line.pocset"));
    let f = map("am2_sentinel.map", &d, &c);
    let class = f.classify();
    let am2 = class.am.iter().find(|r| r.axiom == "AM2").unwrap();
    let Some(MapWitness::Pair(x, y)) = am2.witness else { panic!("no AM2 witness") };
    assert_eq!((d.name(x), d.name(y)), ("a", "b"));
    assert!(!class.is_resolution);
}
