//! Parses a pocset, reports its axioms, and classifies halfspace pairs.

use cubefold::io::parse_pocset;

fn main() {
    let p = parse_pocset(include_str!("../fixtures/fan.pocset")).expect("fan is a pocset");
    println!("{} hyperplanes", p.num_hyperplanes());
    for (axiom, ok) in p.axiom_report() {
        println!("{axiom}: {}", if ok { "ok" } else { "violated" });
    }
    let k0 = p.halfspace("K0").unwrap();
    for h in p.halfspaces() {
        println!("K0 vs {}: {}", p.name(h), p.arrangement(k0, h));
    }

    let broken = "pair a na\npair b nb\nle a b\nle b na\n";
    match parse_pocset(broken) {
        Ok(_) => println!("unexpectedly valid"),
        Err(e) => println!("rejected: {e}"),
    }
}
