//! Folds a resolution of a chain onto a square, one step at a time.

use std::sync::Arc;

use cubefold::io::{parse_map, parse_pocset};
use cubefold::{elementary_fold, find_foldable_pairs, folding_sequence, FoldConfig, GroupAction, ResolutionState};

fn main() {
    let chain = Arc::new(parse_pocset(include_str!("../fixtures/chain3.pocset")).unwrap());
    let square = Arc::new(parse_pocset(include_str!("../fixtures/square.pocset")).unwrap());
    let f = parse_map(include_str!("../fixtures/chain_fold.map"), chain.clone(), square.clone()).unwrap();
    let st = ResolutionState::new(GroupAction::trivial(chain.clone()), f, GroupAction::trivial(square)).unwrap();

    for (a, b) in find_foldable_pairs(&st) {
        println!("foldable: {} ~ {}", chain.name(a), chain.name(b));
    }
    let cfg = FoldConfig::default();
    let pair = find_foldable_pairs(&st)[0];
    let step = elementary_fold(&st, pair, &cfg).unwrap();
    print!("{}", step.quotient.pocset().to_grammar());
    for (check, ok) in &step.checks {
        println!("{check}: {ok}");
    }

    let trace = folding_sequence(&st, &cfg).unwrap();
    println!("{}", serde_json::to_string_pretty(&trace.to_json()).unwrap());
}
