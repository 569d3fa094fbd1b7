//! Equivariant folding: a tree with a rotation folds onto the fan, and a
//! pair of swapped chains folds onto a ray through stabilizer folds.

use std::sync::Arc;

use cubefold::io::{parse_action, parse_map, parse_pocset};
use cubefold::{folding_sequence, FoldConfig, ResolutionState};

fn run(name: &str, dom: &str, dom_action: &str, cod: &str, cod_action: &str, map: &str) {
    let d = Arc::new(parse_pocset(dom).unwrap());
    let c = Arc::new(parse_pocset(cod).unwrap());
    let st = ResolutionState::new(
        parse_action(dom_action, d.clone()).unwrap(),
        parse_map(map, d.clone(), c.clone()).unwrap(),
        parse_action(cod_action, c).unwrap(),
    )
    .unwrap();
    let trace = folding_sequence(&st, &FoldConfig::default()).unwrap();
    println!(
        "{name}: group of order {}, {} identified pairs, complexity {:?}",
        st.action().order(),
        st.identified_pairs(),
        trace.complexity_history
    );
    for (i, s) in trace.steps.iter().enumerate() {
        println!("  step {}: {} ~ {} leaves {} halfspace classes", i + 1, s.pair_names.0, s.pair_names.1, s.relation.num_classes());
    }
    print!("{}", trace.final_embedding().to_grammar());
}

fn main() {
    run(
        "star tree onto fan",
        include_str!("../fixtures/star_tree.pocset"),
        include_str!("../fixtures/star_tree.action"),
        include_str!("../fixtures/fan.pocset"),
        include_str!("../fixtures/fan_rotation.action"),
        include_str!("../fixtures/star_to_fan.map"),
    );
    run(
        "twin chain onto ray",
        include_str!("../fixtures/twin_chain.pocset"),
        include_str!("../fixtures/twin_chain.action"),
        include_str!("../fixtures/ray.pocset"),
        include_str!("../fixtures/ray_trivial.action"),
        include_str!("../fixtures/twin_fold.map"),
    );
}
