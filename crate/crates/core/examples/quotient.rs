//! Checks a relation for admissibility and forms the quotient pocset.

use std::sync::Arc;

use cubefold::io::{parse_pocset, parse_relation};
use cubefold::{dual_complex, quotient_pocset, DEFAULT_VERTEX_CAP};

fn main() {
    let chain = Arc::new(parse_pocset(include_str!("../fixtures/chain3.pocset")).unwrap());
    let rel = parse_relation(include_str!("../fixtures/chain_fold.rel"), chain.clone()).unwrap();
    print!("{}", rel.check_admissible().render(&chain));
    let q = quotient_pocset(&rel).unwrap();
    print!("{}", q.pocset().to_grammar());
    for p in [&chain, q.pocset()] {
        let x = dual_complex(p.clone(), DEFAULT_VERTEX_CAP).unwrap();
        println!("{} vertices, dimension {}", x.vertices().len(), x.dimension());
    }

    let cross = Arc::new(parse_pocset(include_str!("../fixtures/crossing_pair.pocset")).unwrap());
    let bad = parse_relation(include_str!("../fixtures/aer3_sentinel.rel"), cross.clone()).unwrap();
    print!("{}", bad.check_admissible().render(&cross));
}
