//! The CAT(0) cube complex dual to a finite pocset.
//!
//! Vertices are ultrafilters, edges flip a single hyperplane, and cubes are
//! kept implicit: at each vertex we record which hyperplanes can be flipped,
//! and any pairwise transverse subset of those spans a cube.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::pocset::{HalfspaceId, HyperplaneId, Pocset};

pub const DEFAULT_VERTEX_CAP: usize = 1 << 20;

/// One chosen side per hyperplane, indexed by hyperplane id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ultrafilter(Vec<HalfspaceId>);

impl Ultrafilter {
    pub fn from_choices(choices: Vec<HalfspaceId>) -> Self {
        Ultrafilter(choices)
    }

    #[inline]
    pub fn choice(&self, h: HyperplaneId) -> HalfspaceId {
        self.0[h.0]
    }

    #[inline]
    pub fn contains(&self, h: HalfspaceId) -> bool {
        self.0[h.hyperplane().0] == h
    }

    pub fn choices(&self) -> &[HalfspaceId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn flip(&self, h: HyperplaneId) -> Ultrafilter {
        let mut c = self.0.clone();
        c[h.0] = c[h.0].star();
        Ultrafilter(c)
    }

    /// One side per hyperplane, each on the right hyperplane, upward closed.
    pub fn is_valid(&self, p: &Pocset) -> bool {
        if self.0.len() != p.num_hyperplanes() {
            return false;
        }
        if self.0.iter().enumerate().any(|(i, h)| h.hyperplane().0 != i) {
            return false;
        }
        self.0.iter().all(|&h| p.above(h).all(|k| self.contains(k)))
    }

    /// Chosen halfspace is minimal in the ultrafilter, so flipping it stays valid.
    pub fn is_flippable(&self, p: &Pocset, h: HyperplaneId) -> bool {
        let x = self.choice(h);
        !p.below(x).any(|y| self.contains(y))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("dual complex exceeds the vertex cap of {0}")]
    TooLarge(usize),
    #[error("ultrafilter is not a vertex of this complex")]
    NotAVertex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub label: HyperplaneId,
}

/// A cube given by its vertex indices (sorted) and crossing hyperplanes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cube {
    pub vertices: Vec<usize>,
    pub hyperplanes: Vec<HyperplaneId>,
}

impl Cube {
    pub fn dimension(&self) -> usize {
        self.hyperplanes.len()
    }
}

#[derive(Clone, Debug)]
pub struct CubeComplex {
    pocset: Arc<Pocset>,
    vertices: Vec<Ultrafilter>,
    index: HashMap<Ultrafilter, usize>,
    edges: Vec<Edge>,
    flippable: Vec<Vec<HyperplaneId>>,
    adjacency: Vec<Vec<(usize, HyperplaneId)>>,
}

/// Enumerates every ultrafilter and builds edges and the cube index.
pub fn dual_complex(pocset: Arc<Pocset>, vertex_cap: usize) -> Result<CubeComplex, ComplexError> {
    let vertices = enumerate_ultrafilters(&pocset, vertex_cap)?;
    let index: HashMap<Ultrafilter, usize> = vertices.iter().cloned().enumerate().map(|(i, u)| (u, i)).collect();
    let mut edges = Vec::new();
    let mut flippable = Vec::with_capacity(vertices.len());
    let mut adjacency = vec![Vec::new(); vertices.len()];
    for (i, v) in vertices.iter().enumerate() {
        let flips: Vec<HyperplaneId> = pocset.hyperplanes().filter(|&h| v.is_flippable(&pocset, h)).collect();
        for &h in &flips {
            let j = *index.get(&v.flip(h)).expect("flipping a minimal halfspace yields an ultrafilter");
            adjacency[i].push((j, h));
            if j > i {
                edges.push(Edge { a: i, b: j, label: h });
            }
        }
        flippable.push(flips);
    }
    Ok(CubeComplex {
        pocset,
        vertices,
        index,
        edges,
        flippable,
        adjacency,
    })
}

/// Depth-first over hyperplanes in id order, canonical side first, with
/// forward propagation of upward closure. Output is in lexicographic order.
fn enumerate_ultrafilters(p: &Pocset, cap: usize) -> Result<Vec<Ultrafilter>, ComplexError> {
    let m = p.num_hyperplanes();
    let mut out = Vec::new();
    let forced: Vec<Option<HalfspaceId>> = vec![None; m];
    descend(p, 0, forced, &mut out, cap)?;
    Ok(out)
}

fn descend(
    p: &Pocset,
    next: usize,
    forced: Vec<Option<HalfspaceId>>,
    out: &mut Vec<Ultrafilter>,
    cap: usize,
) -> Result<(), ComplexError> {
    if next == forced.len() {
        if out.len() >= cap {
            return Err(ComplexError::TooLarge(cap));
        }
        out.push(Ultrafilter(forced.into_iter().map(Option::unwrap).collect()));
        return Ok(());
    }
    let h = HyperplaneId(next);
    let options: Vec<HalfspaceId> = match forced[next] {
        Some(x) => vec![x],
        None => h.sides().to_vec(),
    };
    for x in options {
        let mut f = forced.clone();
        if choose(p, x, &mut f) {
            descend(p, next + 1, f, out, cap)?;
        }
    }
    Ok(())
}

fn choose(p: &Pocset, x: HalfspaceId, forced: &mut [Option<HalfspaceId>]) -> bool {
    for y in std::iter::once(x).chain(p.above(x)) {
        let slot = &mut forced[y.hyperplane().0];
        match slot {
            Some(z) if *z != y => return false,
            _ => *slot = Some(y),
        }
    }
    true
}

impl CubeComplex {
    pub fn pocset(&self) -> &Arc<Pocset> {
        &self.pocset
    }

    pub fn vertices(&self) -> &[Ultrafilter] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Ultrafilter {
        &self.vertices[i]
    }

    pub fn vertex_index(&self, u: &Ultrafilter) -> Option<usize> {
        self.index.get(u).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbours(&self, v: usize) -> &[(usize, HyperplaneId)] {
        &self.adjacency[v]
    }

    pub fn flippable(&self, v: usize) -> &[HyperplaneId] {
        &self.flippable[v]
    }

    /// Number of hyperplanes on which the two vertices differ.
    pub fn l1_distance(&self, u: &Ultrafilter, v: &Ultrafilter) -> Result<usize, ComplexError> {
        if self.vertex_index(u).is_none() || self.vertex_index(v).is_none() {
            return Err(ComplexError::NotAVertex);
        }
        Ok(hamming(u, v))
    }

    /// Graph distances in the 1-skeleton from `from`.
    pub fn bfs_distances(&self, from: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertices.len()];
        dist[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &self.adjacency[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Per-hyperplane majority vote.
    pub fn median(&self, u: &Ultrafilter, v: &Ultrafilter, w: &Ultrafilter) -> Ultrafilter {
        median(u, v, w)
    }

    /// Every vertex of the cube at `base` spanned by `hyperplanes`, or `None`
    /// if they are not pairwise transverse and flippable there.
    pub fn cube_at(&self, base: usize, hyperplanes: &[HyperplaneId]) -> Option<Cube> {
        let flips = &self.flippable[base];
        if !hyperplanes.iter().all(|h| flips.contains(h)) {
            return None;
        }
        for (i, &a) in hyperplanes.iter().enumerate() {
            if hyperplanes[i + 1..].iter().any(|&b| !self.pocset.transverse(a, b)) {
                return None;
            }
        }
        let mut vertices = Vec::with_capacity(1 << hyperplanes.len());
        for mask in 0u64..(1 << hyperplanes.len()) {
            let mut u = self.vertices[base].clone();
            for (bit, &h) in hyperplanes.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    u = u.flip(h);
                }
            }
            vertices.push(self.vertex_index(&u)?);
        }
        vertices.sort_unstable();
        let mut hs = hyperplanes.to_vec();
        hs.sort();
        Some(Cube { vertices, hyperplanes: hs })
    }

    /// Inclusion-maximal cubes, sorted by vertex list.
    pub fn maximal_cubes(&self) -> Vec<Cube> {
        let mut seen: BTreeSet<Cube> = BTreeSet::new();
        for v in 0..self.vertices.len() {
            let flips = &self.flippable[v];
            let mut cliques = Vec::new();
            bron_kerbosch(&self.pocset, Vec::new(), flips.clone(), Vec::new(), &mut cliques);
            for clique in cliques {
                let cube = self.cube_at(v, &clique).expect("transverse flippable set spans a cube");
                seen.insert(cube);
            }
        }
        seen.into_iter().collect()
    }

    pub fn dimension(&self) -> usize {
        self.maximal_cubes().iter().map(Cube::dimension).max().unwrap_or(0)
    }

    /// Number of `k`-cubes, counted once each.
    pub fn count_cubes(&self, k: usize) -> usize {
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        for v in 0..self.vertices.len() {
            let flips = &self.flippable[v];
            for subset in k_subsets(flips, k) {
                if let Some(c) = self.cube_at(v, &subset) {
                    seen.insert(c.vertices);
                }
            }
        }
        seen.len()
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph dual {\n");
        for i in 0..self.vertices.len() {
            let _ = writeln!(s, "  v{i};");
        }
        for e in &self.edges {
            let _ = writeln!(
                s,
                "  v{} -- v{} [label=\"{}\"];",
                e.a,
                e.b,
                self.pocset.hyperplane_name(e.label)
            );
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let vertices: Vec<Vec<&str>> = self
            .vertices
            .iter()
            .map(|u| {
                let mut names: Vec<&str> = u.choices().iter().map(|&h| self.pocset.name(h)).collect();
                names.sort_unstable();
                names
            })
            .collect();
        let edges: Vec<serde_json::Value> = self
            .edges
            .iter()
            .map(|e| {
                serde_json::json!({
                    "endpoints": [e.a, e.b],
                    "label": self.pocset.hyperplane_name(e.label),
                })
            })
            .collect();
        let cubes = self.maximal_cubes();
        let dimension = cubes.iter().map(Cube::dimension).max().unwrap_or(0);
        let maximal: Vec<&Vec<usize>> = cubes.iter().map(|c| &c.vertices).collect();
        serde_json::json!({
            "vertices": vertices,
            "edges": edges,
            "maximal_cubes": maximal,
            "dimension": dimension,
        })
    }
}

pub fn hamming(u: &Ultrafilter, v: &Ultrafilter) -> usize {
    u.0.iter().zip(&v.0).filter(|(a, b)| a != b).count()
}

pub fn median(u: &Ultrafilter, v: &Ultrafilter, w: &Ultrafilter) -> Ultrafilter {
    Ultrafilter(
        u.0.iter()
            .zip(&v.0)
            .zip(&w.0)
            .map(|((&a, &b), &c)| if a == b || a == c { a } else { b })
            .collect(),
    )
}

fn bron_kerbosch(
    p: &Pocset,
    r: Vec<HyperplaneId>,
    mut candidates: Vec<HyperplaneId>,
    mut excluded: Vec<HyperplaneId>,
    out: &mut Vec<Vec<HyperplaneId>>,
) {
    if candidates.is_empty() && excluded.is_empty() {
        out.push(r);
        return;
    }
    while let Some(v) = candidates.first().copied() {
        let mut r2 = r.clone();
        r2.push(v);
        let c2 = candidates.iter().copied().filter(|&w| p.transverse(v, w)).collect();
        let x2 = excluded.iter().copied().filter(|&w| p.transverse(v, w)).collect();
        bron_kerbosch(p, r2, c2, x2, out);
        candidates.remove(0);
        excluded.push(v);
    }
}

fn k_subsets(items: &[HyperplaneId], k: usize) -> Vec<Vec<HyperplaneId>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in k_subsets(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}
