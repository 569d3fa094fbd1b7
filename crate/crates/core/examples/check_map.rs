//! Classifies maps between pocsets and prints the induced vertex map.

use std::sync::Arc;

use cubefold::io::{parse_map, parse_pocset};
use cubefold::maps::distance_violation;
use cubefold::{dual_complex, DEFAULT_VERTEX_CAP};

fn main() {
    let load = |text: &str| Arc::new(parse_pocset(text).unwrap());
    let chain3 = load(include_str!("../fixtures/chain3.pocset"));
    let chain4 = load(include_str!("../fixtures/chain4.pocset"));
    let square = load(include_str!("../fixtures/square.pocset"));

    for (label, text, target) in [
        ("embedding", include_str!("../fixtures/chain3_in_chain4.map"), &chain4),
        ("resolution", include_str!("../fixtures/chain_fold.map"), &square),
        ("not a resolution", include_str!("../fixtures/chain_fold_am3.map"), &square),
    ] {
        let f = parse_map(text, chain3.clone(), target.clone()).unwrap();
        println!("-- {label}");
        print!("{}", f.classify().render(&f));
        if f.classify().is_resolution {
            let x = dual_complex(chain3.clone(), DEFAULT_VERTEX_CAP).unwrap();
            let y = dual_complex(target.clone(), DEFAULT_VERTEX_CAP).unwrap();
            let fv = f.induced_codomain_map(&x, &y).unwrap();
            println!("vertex map {fv:?}, distances kept: {}", distance_violation(&x, &y, &fv, true).is_none());
        }
    }
}
