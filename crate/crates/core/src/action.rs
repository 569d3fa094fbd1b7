//! Finite groups acting on a pocset by automorphisms, identified with their
//! image in the symmetric group on halfspaces.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::maps::PocsetMap;
use crate::pocset::{HalfspaceId, HyperplaneId, Pocset};

/// Upper bound on the size of a generated group.
pub const DEFAULT_GROUP_CAP: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Checks that `images` is a bijection of `0..images.len()`.
    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Permutation(images))
    }

    #[inline]
    pub fn apply(&self, h: HalfspaceId) -> HalfspaceId {
        HalfspaceId(self.0[h.0])
    }

    /// Image of a hyperplane; only meaningful for star-commuting permutations.
    #[inline]
    pub fn apply_hyperplane(&self, h: HyperplaneId) -> HyperplaneId {
        self.apply(h.canonical()).hyperplane()
    }

    /// `self` after `first`.
    pub fn after(&self, first: &Permutation) -> Permutation {
        Permutation(first.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("generator `{generator}` is not a bijection on halfspaces")]
    NotBijection { generator: String },
    #[error("generator `{generator}` is not an automorphism: fails on ({a}, {b})")]
    NotAutomorphism { generator: String, a: String, b: String },
    #[error("group element #{element} sends `{halfspace}` to its complement")]
    Inversion { element: usize, halfspace: String },
    #[error("generator `{0}` has no partner in the other action")]
    UnpairedGenerator(String),
    #[error("unknown hyperplane id {0}")]
    UnknownHyperplane(usize),
    #[error("generated group exceeds {0} elements")]
    GroupTooLarge(usize),
}

/// A validated action: generators plus the eagerly generated group.
#[derive(Clone, Debug)]
pub struct GroupAction {
    pocset: Arc<Pocset>,
    generators: Vec<(String, Permutation)>,
    /// Breadth-first order from the identity; index 0 is the identity.
    elements: Vec<Permutation>,
}

/// Partition of halfspaces into orbits, ordered by least member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    pub classes: Vec<Vec<HalfspaceId>>,
    pub class_of: Vec<usize>,
}

pub fn validate_action(pocset: Arc<Pocset>, generators: Vec<(String, Permutation)>) -> Result<GroupAction, ActionError> {
    let n = pocset.num_halfspaces();
    for (name, g) in &generators {
        if g.len() != n {
            return Err(ActionError::NotBijection { generator: name.clone() });
        }
        for h in pocset.halfspaces() {
            if g.apply(h.star()) != g.apply(h).star() {
                return Err(ActionError::NotAutomorphism {
                    generator: name.clone(),
                    a: pocset.name(h).into(),
                    b: pocset.name(h.star()).into(),
                });
            }
            for k in pocset.halfspaces() {
                if pocset.lt(h, k) != pocset.lt(g.apply(h), g.apply(k)) {
                    return Err(ActionError::NotAutomorphism {
                        generator: name.clone(),
                        a: pocset.name(h).into(),
                        b: pocset.name(k).into(),
                    });
                }
            }
        }
    }
    let elements = generate(n, generators.iter().map(|(_, g)| g), DEFAULT_GROUP_CAP)?;
    for (i, g) in elements.iter().enumerate() {
        if let Some(h) = pocset.halfspaces().find(|&h| g.apply(h) == h.star()) {
            return Err(ActionError::Inversion {
                element: i,
                halfspace: pocset.name(h).into(),
            });
        }
    }
    Ok(GroupAction {
        pocset,
        generators,
        elements,
    })
}

/// Breadth-first product closure starting from the identity.
pub(crate) fn generate<'a>(
    n: usize,
    generators: impl Iterator<Item = &'a Permutation> + Clone,
    cap: usize,
) -> Result<Vec<Permutation>, ActionError> {
    let id = Permutation::identity(n);
    let mut seen: HashMap<Permutation, usize> = HashMap::new();
    seen.insert(id.clone(), 0);
    let mut elements = vec![id];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in generators.clone() {
            let next = g.after(&elements[i]);
            if !seen.contains_key(&next) {
                if elements.len() >= cap {
                    return Err(ActionError::GroupTooLarge(cap));
                }
                seen.insert(next.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(next);
            }
        }
    }
    Ok(elements)
}

impl GroupAction {
    pub fn trivial(pocset: Arc<Pocset>) -> Self {
        validate_action(pocset, Vec::new()).expect("trivial action is valid")
    }

    pub fn pocset(&self) -> &Arc<Pocset> {
        &self.pocset
    }

    pub fn generators(&self) -> &[(String, Permutation)] {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Option<&Permutation> {
        self.generators.iter().find(|(n, _)| n == name).map(|(_, g)| g)
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn orbits(&self) -> OrbitPartition {
        let n = self.pocset.num_halfspaces();
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for h in self.pocset.halfspaces() {
            if class_of[h.0] != usize::MAX {
                continue;
            }
            let mut orbit: Vec<HalfspaceId> = self.elements.iter().map(|g| g.apply(h)).collect();
            orbit.sort();
            orbit.dedup();
            for k in &orbit {
                class_of[k.0] = classes.len();
            }
            classes.push(orbit);
        }
        OrbitPartition { classes, class_of }
    }

    /// Orbit index of each hyperplane, orbits numbered by least member.
    pub fn hyperplane_orbits(&self) -> Vec<usize> {
        let m = self.pocset.num_hyperplanes();
        let mut orbit = vec![usize::MAX; m];
        let mut next = 0;
        for h in self.pocset.hyperplanes() {
            if orbit[h.0] != usize::MAX {
                continue;
            }
            for g in &self.elements {
                orbit[g.apply_hyperplane(h).0] = next;
            }
            next += 1;
        }
        orbit
    }

    /// Elements fixing the hyperplane; without inversions they fix each side.
    pub fn stabilizer(&self, h: HyperplaneId) -> Result<Vec<Permutation>, ActionError> {
        if !self.pocset.contains_hyperplane(h) {
            return Err(ActionError::UnknownHyperplane(h.0));
        }
        Ok(self
            .elements
            .iter()
            .filter(|g| g.apply_hyperplane(h) == h)
            .cloned()
            .collect())
    }

    /// Whether two actions share exactly the same generator names.
    pub fn check_pairing(&self, other: &GroupAction) -> Result<(), ActionError> {
        for (name, _) in &self.generators {
            if other.generator(name).is_none() {
                return Err(ActionError::UnpairedGenerator(name.clone()));
            }
        }
        for (name, _) in &other.generators {
            if self.generator(name).is_none() {
                return Err(ActionError::UnpairedGenerator(name.clone()));
            }
        }
        Ok(())
    }
}

/// First `(generator, halfspace)` with `f(g·h) != g·f(h)`, pairing generators
/// by name.
pub fn equivariance_witness(
    domain: &GroupAction,
    codomain: &GroupAction,
    f: &PocsetMap,
) -> Result<Option<(String, HalfspaceId)>, ActionError> {
    domain.check_pairing(codomain)?;
    for (name, g) in domain.generators() {
        let g_cod = codomain.generator(name).expect("paired");
        for h in domain.pocset().halfspaces() {
            if f.apply(g.apply(h)) != g_cod.apply(f.apply(h)) {
                return Ok(Some((name.clone(), h)));
            }
        }
    }
    Ok(None)
}

pub fn check_equivariant(domain: &GroupAction, codomain: &GroupAction, f: &PocsetMap) -> Result<bool, ActionError> {
    Ok(equivariance_witness(domain, codomain, f)?.is_none())
}
