//! Finite pocsets: halfspaces, complementation, the strict order and the
//! arrangement queries every other module is built on.
//!
//! Halfspaces are interned densely. Hyperplane `i` owns halfspaces `2i` and
//! `2i + 1`, so complementation is `id ^ 1`. The even id always carries the
//! lexicographically smaller name and serves as the canonical representative.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfspaceId(pub usize);

impl HalfspaceId {
    #[inline]
    pub fn star(self) -> HalfspaceId {
        HalfspaceId(self.0 ^ 1)
    }

    #[inline]
    pub fn hyperplane(self) -> HyperplaneId {
        HyperplaneId(self.0 >> 1)
    }

    #[inline]
    pub fn is_canonical(self) -> bool {
        self.0 & 1 == 0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HyperplaneId(pub usize);

impl HyperplaneId {
    #[inline]
    pub fn canonical(self) -> HalfspaceId {
        HalfspaceId(2 * self.0)
    }

    #[inline]
    pub fn sides(self) -> [HalfspaceId; 2] {
        [HalfspaceId(2 * self.0), HalfspaceId(2 * self.0 + 1)]
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

/// Relative position of two halfspaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arrangement {
    Equal,
    Complementary,
    /// `h < k` or `k < h`.
    Nested,
    /// `star(k) < h`: each contains the other's bounding hyperplane.
    Facing,
    Transverse,
    /// `k < star(h)`: the halfspaces are disjoint.
    Incompatible,
}

impl fmt::Display for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Arrangement::Equal => "equal",
            Arrangement::Complementary => "complementary",
            Arrangement::Nested => "nested",
            Arrangement::Facing => "facing",
            Arrangement::Transverse => "transverse",
            Arrangement::Incompatible => "incompatible",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HyperplaneArrangement {
    Equal,
    Transverse,
    Disjoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PocsetError {
    #[error("{}halfspace `{name}` already belongs to the pair ({existing_a}, {existing_b})", at(.line))]
    DuplicatePair {
        name: String,
        existing_a: String,
        existing_b: String,
        line: Option<usize>,
    },
    #[error("{}halfspace `{name}` cannot be its own complement", at(.line))]
    StarFixedPoint { name: String, line: Option<usize> },
    #[error("{}`{name}` becomes comparable with its complement", at(.line))]
    ComparableWithComplement { name: String, line: Option<usize> },
    #[error("{}order relations close into a cycle through `{name}`", at(.line))]
    OrderCycle { name: String, line: Option<usize> },
    #[error("{}unknown halfspace `{name}`", at(.line))]
    UnknownHalfspaceName { name: String, line: Option<usize> },
    #[error("unknown halfspace id {0}")]
    UnknownHalfspace(usize),
    #[error("unknown hyperplane id {0}")]
    UnknownHyperplane(usize),
    #[error("separation query on a hyperplane and itself")]
    EqualHyperplanes,
    #[error("halfspaces `{0}` and `{1}` are not comparable")]
    NotComparable(String, String),
}

fn at(line: &Option<usize>) -> String {
    line.map_or(String::new(), |l| format!("line {l}: "))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawPair {
    pub a: String,
    pub b: String,
    pub line: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawLe {
    pub lo: String,
    pub hi: String,
    pub line: Option<usize>,
}

/// Unvalidated pocset description: complementary pairs and order generators.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawPocset {
    pub pairs: Vec<RawPair>,
    pub order: Vec<RawLe>,
}

impl RawPocset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pair(mut self, a: &str, b: &str) -> Self {
        self.pairs.push(RawPair {
            a: a.to_owned(),
            b: b.to_owned(),
            line: None,
        });
        self
    }

    pub fn le(mut self, lo: &str, hi: &str) -> Self {
        self.order.push(RawLe {
            lo: lo.to_owned(),
            hi: hi.to_owned(),
            line: None,
        });
        self
    }
}

/// A validated finite pocset. Immutable once built.
#[derive(Clone, Debug)]
pub struct Pocset {
    names: Vec<String>,
    lookup: HashMap<String, HalfspaceId>,
    /// `above[h]` holds every `k` with `h < k`.
    above: Vec<FixedBitSet>,
    below: Vec<FixedBitSet>,
}

impl PartialEq for Pocset {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.above == other.above
    }
}

impl Eq for Pocset {}

/// Builds a [`Pocset`] from pairs and order generators, closing the order
/// under transitivity and complement duality.
pub fn validate_pocset(raw: &RawPocset) -> Result<Pocset, PocsetError> {
    let mut pair_names: Vec<(String, String)> = Vec::new();
    let mut lookup: HashMap<String, HalfspaceId> = HashMap::new();

    for p in &raw.pairs {
        if p.a == p.b {
            return Err(PocsetError::StarFixedPoint {
                name: p.a.clone(),
                line: p.line,
            });
        }
        let known_a = lookup.get(&p.a).copied();
        let known_b = lookup.get(&p.b).copied();
        match (known_a, known_b) {
            (None, None) => {
                let i = pair_names.len();
                let (lo, hi) = if p.a < p.b {
                    (p.a.clone(), p.b.clone())
                } else {
                    (p.b.clone(), p.a.clone())
                };
                lookup.insert(lo.clone(), HalfspaceId(2 * i));
                lookup.insert(hi.clone(), HalfspaceId(2 * i + 1));
                pair_names.push((lo, hi));
            }
            (Some(x), Some(y)) if x.star() == y => {}
            (Some(x), _) | (None, Some(x)) => {
                let (ea, eb) = pair_names[x.hyperplane().0].clone();
                let name = if known_a.is_some() { &p.a } else { &p.b };
                return Err(PocsetError::DuplicatePair {
                    name: name.clone(),
                    existing_a: ea,
                    existing_b: eb,
                    line: p.line,
                });
            }
        }
    }

    let mut names = Vec::with_capacity(2 * pair_names.len());
    for (lo, hi) in pair_names {
        names.push(lo);
        names.push(hi);
    }
    let n = names.len();
    let mut p = Pocset {
        names,
        lookup,
        above: vec![FixedBitSet::with_capacity(n); n],
        below: vec![FixedBitSet::with_capacity(n); n],
    };

    for le in &raw.order {
        let resolve = |name: &str| {
            p.lookup
                .get(name)
                .copied()
                .ok_or_else(|| PocsetError::UnknownHalfspaceName {
                    name: name.to_owned(),
                    line: le.line,
                })
        };
        let lo = resolve(&le.lo)?;
        let hi = resolve(&le.hi)?;
        if lo == hi {
            continue;
        }
        p.add_relation(lo, hi);
        p.add_relation(hi.star(), lo.star());
        p.check_axioms(le.line)?;
    }
    Ok(p)
}

impl Pocset {
    fn add_relation(&mut self, lo: HalfspaceId, hi: HalfspaceId) {
        if self.above[lo.0].contains(hi.0) {
            return;
        }
        let mut down = self.below[lo.0].clone();
        down.insert(lo.0);
        let mut up = self.above[hi.0].clone();
        up.insert(hi.0);
        for a in down.ones() {
            self.above[a].union_with(&up);
        }
        for b in up.ones() {
            self.below[b].union_with(&down);
        }
    }

    fn check_axioms(&self, line: Option<usize>) -> Result<(), PocsetError> {
        for h in 0..self.names.len() {
            if self.above[h].contains(h) {
                return Err(PocsetError::OrderCycle {
                    name: self.names[h].clone(),
                    line,
                });
            }
            if self.above[h].contains(h ^ 1) {
                return Err(PocsetError::ComparableWithComplement {
                    name: self.names[h].clone(),
                    line,
                });
            }
        }
        Ok(())
    }

    /// Named axiom checks, in the order the pocset definition lists them.
    ///
    /// Local finiteness and finite width always hold for a finite carrier;
    /// they are listed so reports line up with the definition.
    pub fn axiom_report(&self) -> Vec<(&'static str, bool)> {
        let n = self.names.len();
        let involution = (0..n).all(|h| h ^ 1 != h);
        let irreflexive = (0..n).all(|h| !self.above[h].contains(h));
        let incomparable = (0..n).all(|h| !self.above[h].contains(h ^ 1));
        let transitive = (0..n).all(|h| self.above[h].ones().all(|k| self.above[h].is_superset(&self.above[k])));
        let reversing = (0..n).all(|h| self.above[h].ones().all(|k| self.above[k ^ 1].contains(h ^ 1)));
        vec![
            ("fixed-point-free involution", involution),
            ("irreflexive", irreflexive),
            ("transitive", transitive),
            ("order-reversing involution", reversing),
            ("h incomparable with star(h)", incomparable),
            ("locally finite", true),
            ("finite width", true),
        ]
    }

    pub fn num_halfspaces(&self) -> usize {
        self.names.len()
    }

    pub fn num_hyperplanes(&self) -> usize {
        self.names.len() / 2
    }

    pub fn halfspaces(&self) -> impl Iterator<Item = HalfspaceId> + '_ {
        (0..self.names.len()).map(HalfspaceId)
    }

    pub fn hyperplanes(&self) -> impl Iterator<Item = HyperplaneId> + '_ {
        (0..self.num_hyperplanes()).map(HyperplaneId)
    }

    pub fn name(&self, h: HalfspaceId) -> &str {
        &self.names[h.0]
    }

    /// Canonical name of a hyperplane: its lexicographically smaller side.
    pub fn hyperplane_name(&self, h: HyperplaneId) -> &str {
        &self.names[h.canonical().0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn halfspace(&self, name: &str) -> Option<HalfspaceId> {
        self.lookup.get(name).copied()
    }

    pub fn contains_halfspace(&self, h: HalfspaceId) -> bool {
        h.0 < self.names.len()
    }

    pub fn contains_hyperplane(&self, h: HyperplaneId) -> bool {
        h.0 < self.num_hyperplanes()
    }

    fn check_halfspace(&self, h: HalfspaceId) -> Result<(), PocsetError> {
        if self.contains_halfspace(h) {
            Ok(())
        } else {
            Err(PocsetError::UnknownHalfspace(h.0))
        }
    }

    fn check_hyperplane(&self, h: HyperplaneId) -> Result<(), PocsetError> {
        if self.contains_hyperplane(h) {
            Ok(())
        } else {
            Err(PocsetError::UnknownHyperplane(h.0))
        }
    }

    /// Strict order `h < k`.
    #[inline]
    pub fn lt(&self, h: HalfspaceId, k: HalfspaceId) -> bool {
        self.above[h.0].contains(k.0)
    }

    #[inline]
    pub fn le(&self, h: HalfspaceId, k: HalfspaceId) -> bool {
        h == k || self.lt(h, k)
    }

    pub fn above(&self, h: HalfspaceId) -> impl Iterator<Item = HalfspaceId> + '_ {
        self.above[h.0].ones().map(HalfspaceId)
    }

    pub fn below(&self, h: HalfspaceId) -> impl Iterator<Item = HalfspaceId> + '_ {
        self.below[h.0].ones().map(HalfspaceId)
    }

    /// Arrangement of two halfspaces. Panics on ids outside the pocset.
    pub fn arrangement(&self, h: HalfspaceId, k: HalfspaceId) -> Arrangement {
        if h == k {
            Arrangement::Equal
        } else if h == k.star() {
            Arrangement::Complementary
        } else if self.lt(h, k) || self.lt(k, h) {
            Arrangement::Nested
        } else if self.lt(k.star(), h) {
            Arrangement::Facing
        } else if self.lt(k, h.star()) {
            Arrangement::Incompatible
        } else {
            Arrangement::Transverse
        }
    }

    pub fn classify(&self, h: HalfspaceId, k: HalfspaceId) -> Result<Arrangement, PocsetError> {
        self.check_halfspace(h)?;
        self.check_halfspace(k)?;
        Ok(self.arrangement(h, k))
    }

    #[inline]
    pub fn transverse(&self, a: HyperplaneId, b: HyperplaneId) -> bool {
        a != b && self.arrangement(a.canonical(), b.canonical()) == Arrangement::Transverse
    }

    /// Distinct and not transverse.
    #[inline]
    pub fn disjoint(&self, a: HyperplaneId, b: HyperplaneId) -> bool {
        a != b && !self.transverse(a, b)
    }

    pub fn hyperplane_arrangement(&self, a: HyperplaneId, b: HyperplaneId) -> HyperplaneArrangement {
        if a == b {
            HyperplaneArrangement::Equal
        } else if self.transverse(a, b) {
            HyperplaneArrangement::Transverse
        } else {
            HyperplaneArrangement::Disjoint
        }
    }

    pub fn classify_hyperplanes(
        &self,
        a: HyperplaneId,
        b: HyperplaneId,
    ) -> Result<HyperplaneArrangement, PocsetError> {
        self.check_hyperplane(a)?;
        self.check_hyperplane(b)?;
        Ok(self.hyperplane_arrangement(a, b))
    }

    /// Whether `l` separates `a` and `b`: some orientations satisfy `a < l < b`.
    pub fn separates(&self, l: HyperplaneId, a: HyperplaneId, b: HyperplaneId) -> bool {
        if l == a || l == b || a == b {
            return false;
        }
        for x in a.sides() {
            for y in l.sides() {
                if self.lt(x, y) && b.sides().iter().any(|&z| self.lt(y, z)) {
                    return true;
                }
            }
        }
        false
    }

    /// All hyperplanes separating `a` from `b`, endpoints excluded.
    pub fn separators(&self, a: HyperplaneId, b: HyperplaneId) -> Result<Vec<HyperplaneId>, PocsetError> {
        self.check_hyperplane(a)?;
        self.check_hyperplane(b)?;
        if a == b {
            return Err(PocsetError::EqualHyperplanes);
        }
        Ok(self.hyperplanes().filter(|&l| self.separates(l, a, b)).collect())
    }

    /// No hyperplane accepted by `within` separates `a` and `b`.
    pub fn inseparable_by(&self, within: impl Fn(HyperplaneId) -> bool, a: HyperplaneId, b: HyperplaneId) -> bool {
        !self.hyperplanes().any(|l| within(l) && self.separates(l, a, b))
    }

    pub fn is_inseparable(
        &self,
        set: &[HyperplaneId],
        a: HyperplaneId,
        b: HyperplaneId,
    ) -> Result<bool, PocsetError> {
        self.check_hyperplane(a)?;
        self.check_hyperplane(b)?;
        if a == b {
            return Err(PocsetError::EqualHyperplanes);
        }
        Ok(!set.iter().any(|&l| self.separates(l, a, b)))
    }

    /// The orientation pair `(x, y)` of two disjoint hyperplanes in which `x`
    /// and `y` face each other. `None` for equal or transverse hyperplanes.
    pub fn facing_sides(&self, a: HyperplaneId, b: HyperplaneId) -> Option<(HalfspaceId, HalfspaceId)> {
        for x in a.sides() {
            for y in b.sides() {
                if a != b && self.lt(y.star(), x) {
                    return Some((x, y));
                }
            }
        }
        None
    }

    /// A simultaneous orientation of `set` in which every pair faces, found
    /// by search with propagation. Orientations come back in `set` order.
    pub fn facing_orientation(&self, set: &[HyperplaneId]) -> Option<Vec<HalfspaceId>> {
        let mut uniq = set.to_vec();
        uniq.sort();
        uniq.dedup();
        if uniq.len() != set.len() {
            return None;
        }
        let mut assign: Vec<Option<HalfspaceId>> = vec![None; set.len()];
        self.orient_search(set, &mut assign).then(|| assign.into_iter().map(Option::unwrap).collect())
    }

    fn orient_search(&self, set: &[HyperplaneId], assign: &mut Vec<Option<HalfspaceId>>) -> bool {
        let Some(free) = assign.iter().position(Option::is_none) else {
            return true;
        };
        for side in set[free].sides() {
            let saved = assign.clone();
            assign[free] = Some(side);
            if self.propagate_facing(set, assign) && self.orient_search(set, assign) {
                return true;
            }
            *assign = saved;
        }
        false
    }

    fn propagate_facing(&self, set: &[HyperplaneId], assign: &mut [Option<HalfspaceId>]) -> bool {
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..set.len() {
                let Some(x) = assign[i] else { continue };
                for j in 0..set.len() {
                    if i == j {
                        continue;
                    }
                    let partner = set[j].sides().into_iter().find(|&y| self.lt(y.star(), x));
                    match (assign[j], partner) {
                        (_, None) => return false,
                        (Some(y), Some(p)) if y != p => return false,
                        (None, Some(p)) => {
                            assign[j] = Some(p);
                            changed = true;
                        }
                        _ => {}
                    }
                }
            }
        }
        true
    }

    /// Facing collection: pairwise disjoint, pairwise inseparable within the
    /// collection, and simultaneously orientable so that all pairs face.
    pub fn is_facing_collection(&self, set: &[HyperplaneId]) -> bool {
        self.facing_pairwise(set) && self.facing_orientation(set).is_some()
    }

    /// The pairwise form of the facing condition alone.
    pub fn facing_pairwise(&self, set: &[HyperplaneId]) -> bool {
        for (i, &a) in set.iter().enumerate() {
            for &b in &set[i + 1..] {
                if !self.disjoint(a, b) {
                    return false;
                }
                if set.iter().any(|&l| self.separates(l, a, b)) {
                    return false;
                }
            }
        }
        true
    }

    /// All `k` with `lo <= k <= hi`.
    pub fn interval(&self, lo: HalfspaceId, hi: HalfspaceId) -> Result<Vec<HalfspaceId>, PocsetError> {
        self.check_halfspace(lo)?;
        self.check_halfspace(hi)?;
        if !self.le(lo, hi) {
            return Err(PocsetError::NotComparable(self.name(lo).into(), self.name(hi).into()));
        }
        Ok(self
            .halfspaces()
            .filter(|&k| self.le(lo, k) && self.le(k, hi))
            .collect())
    }

    /// Sub-pocset on the given hyperplanes, keeping names and pair order.
    pub fn restrict(&self, hyperplanes: &[HyperplaneId]) -> SubPocset {
        let mut hs = hyperplanes.to_vec();
        hs.sort();
        hs.dedup();
        let mut raw = RawPocset::new();
        for &h in &hs {
            let [a, b] = h.sides();
            raw = raw.pair(self.name(a), self.name(b));
        }
        let keep: Vec<HalfspaceId> = hs.iter().flat_map(|h| h.sides()).collect();
        for &x in &keep {
            for &y in &keep {
                if self.lt(x, y) {
                    raw = raw.le(self.name(x), self.name(y));
                }
            }
        }
        let pocset = validate_pocset(&raw).expect("restriction of a valid pocset is valid");
        let to_parent = pocset
            .halfspaces()
            .map(|h| self.halfspace(pocset.name(h)).expect("name kept"))
            .collect();
        SubPocset { pocset, to_parent }
    }

    /// Cover relations, one of each complement-dual pair.
    pub fn covers(&self) -> Vec<(HalfspaceId, HalfspaceId)> {
        let mut out = Vec::new();
        for x in self.halfspaces() {
            for y in self.above(x) {
                let covered = self.above(x).any(|z| z != y && self.lt(z, y));
                if covered {
                    continue;
                }
                let dual = (y.star(), x.star());
                if (x, y) <= dual {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Serialises in the line grammar (`pair` / `le`), cover relations only.
    pub fn to_grammar(&self) -> String {
        let mut s = String::new();
        for h in self.hyperplanes() {
            let [a, b] = h.sides();
            s.push_str(&format!("pair {} {}\n", self.name(a), self.name(b)));
        }
        for (x, y) in self.covers() {
            s.push_str(&format!("le {} {}\n", self.name(x), self.name(y)));
        }
        s
    }

    /// Same halfspace names and the same order, ignoring interned ids.
    pub fn isomorphic_by_name(&self, other: &Pocset) -> bool {
        if self.num_halfspaces() != other.num_halfspaces() {
            return false;
        }
        let map: Option<Vec<HalfspaceId>> = self.halfspaces().map(|h| other.halfspace(self.name(h))).collect();
        let Some(map) = map else { return false };
        self.halfspaces().all(|h| {
            map[h.0].star() == map[h.star().0]
                && self.halfspaces().all(|k| self.lt(h, k) == other.lt(map[h.0], map[k.0]))
        })
    }
}

/// A pocset restricted to some hyperplanes of a parent.
#[derive(Clone, Debug)]
pub struct SubPocset {
    pub pocset: Pocset,
    pub to_parent: Vec<HalfspaceId>,
}
