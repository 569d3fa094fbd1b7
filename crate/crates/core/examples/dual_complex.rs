//! Builds the cube complex dual to a pocset and queries its geometry.

use std::sync::Arc;

use cubefold::io::parse_pocset;
use cubefold::{dual_complex, DEFAULT_VERTEX_CAP};

fn main() {
    let p = Arc::new(parse_pocset(include_str!("../fixtures/fan.pocset")).unwrap());
    let x = dual_complex(p.clone(), DEFAULT_VERTEX_CAP).unwrap();
    println!(
        "{} vertices, {} edges, {} squares, dimension {}",
        x.vertices().len(),
        x.edges().len(),
        x.count_cubes(2),
        x.dimension()
    );
    for cube in x.maximal_cubes() {
        let walls: Vec<_> = cube.hyperplanes.iter().map(|&h| p.hyperplane_name(h)).collect();
        println!("maximal cube on {walls:?}: vertices {:?}", cube.vertices);
    }
    let (u, v, w) = (x.vertex(0), x.vertex(3), x.vertex(7));
    let m = x.median(u, v, w);
    println!("median of v0, v3, v7 is v{}", x.vertex_index(&m).unwrap());
    println!("d(v0, v8) = {}", x.l1_distance(u, x.vertex(8)).unwrap());
    println!("{}", x.to_dot());
}
