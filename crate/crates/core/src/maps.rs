//! Maps between pocsets: admissibility, embeddings, resolutions, and the
//! vertex map they induce between dual complexes.

use std::sync::Arc;

use thiserror::Error;

use crate::complex::{ComplexError, CubeComplex, Ultrafilter};
use crate::pocset::{HalfspaceId, HyperplaneId, Pocset, SubPocset};
use crate::quotient::{quotient_pocset, AdmissibilityReport, EquivalenceRelation, Quotient, QuotientError};

/// A total assignment of codomain halfspaces to domain halfspaces.
#[derive(Clone, Debug)]
pub struct PocsetMap {
    domain: Arc<Pocset>,
    codomain: Arc<Pocset>,
    assign: Vec<HalfspaceId>,
}

impl PartialEq for PocsetMap {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.codomain == other.codomain && self.assign == other.assign
    }
}

impl Eq for PocsetMap {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("map assigns {got} halfspaces, domain has {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("image {0} is not a codomain halfspace")]
    OutOfRange(usize),
    #[error("conflicting images for `{0}` and its complement")]
    StarConflict(String),
    #[error("no image given for `{0}` or its complement")]
    Unassigned(String),
    #[error("map does not commute with complementation at `{0}`")]
    Am1Violated(String),
    #[error("map is not admissible")]
    NotAdmissible,
    #[error("map is not a resolution")]
    NotResolution,
    #[error("maps do not compose: codomain and domain differ")]
    NotComposable,
    #[error("complex does not belong to this map")]
    WrongComplex,
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("lemma violation: {0}")]
    LemmaViolation(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapWitness {
    /// AM1: a domain halfspace whose complement is not sent to the complement.
    Halfspace(HalfspaceId),
    /// AM2 and AM3: a pair of domain halfspaces.
    Pair(HalfspaceId, HalfspaceId),
    /// AM4: a codomain hyperplane with no compatible orientation.
    Hyperplane(HyperplaneId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmResult {
    pub axiom: &'static str,
    pub witness: Option<MapWitness>,
}

impl AmResult {
    pub fn ok(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapClassification {
    pub am: Vec<AmResult>,
    pub is_embedding: bool,
    pub is_resolution: bool,
    /// The kernel relation's report, when AM1 holds and the kernel is defined.
    pub kernel: Option<AdmissibilityReport>,
}

impl MapClassification {
    pub fn admissible(&self) -> bool {
        self.am.iter().all(AmResult::ok)
    }

    pub fn render(&self, f: &PocsetMap) -> String {
        let mut out = String::new();
        for r in &self.am {
            match r.witness {
                None => out.push_str(&format!("{} OK\n", r.axiom)),
                Some(MapWitness::Halfspace(h)) => {
                    out.push_str(&format!("{} FAIL {}\n", r.axiom, f.domain.name(h)))
                }
                Some(MapWitness::Pair(a, b)) => out.push_str(&format!(
                    "{} FAIL {} {}\n",
                    r.axiom,
                    f.domain.name(a),
                    f.domain.name(b)
                )),
                Some(MapWitness::Hyperplane(h)) => {
                    out.push_str(&format!("{} FAIL {}\n", r.axiom, f.codomain.hyperplane_name(h)))
                }
            }
        }
        let yn = |b: bool| if b { "yes" } else { "no" };
        out.push_str(&format!("embedding: {}\n", yn(self.is_embedding)));
        out.push_str(&format!("resolution: {}\n", yn(self.is_resolution)));
        out
    }
}

/// Codomain hyperplanes split by their relation to the image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImagePartition {
    /// Image hyperplanes.
    pub h1: Vec<HyperplaneId>,
    /// Non-image hyperplanes transverse to every image hyperplane.
    pub h2: Vec<HyperplaneId>,
    /// The rest, each with its unique side containing or crossing the image.
    pub h3: Vec<(HyperplaneId, HalfspaceId)>,
}

impl PocsetMap {
    pub fn new(domain: Arc<Pocset>, codomain: Arc<Pocset>, assign: Vec<HalfspaceId>) -> Result<Self, MapError> {
        if assign.len() != domain.num_halfspaces() {
            return Err(MapError::WrongLength {
                expected: domain.num_halfspaces(),
                got: assign.len(),
            });
        }
        if let Some(bad) = assign.iter().find(|h| !codomain.contains_halfspace(**h)) {
            return Err(MapError::OutOfRange(bad.0));
        }
        Ok(PocsetMap {
            domain,
            codomain,
            assign,
        })
    }

    /// Builds a map from images of some halfspaces; complements get the
    /// complementary image.
    pub fn from_partial(
        domain: Arc<Pocset>,
        codomain: Arc<Pocset>,
        entries: &[(HalfspaceId, HalfspaceId)],
    ) -> Result<Self, MapError> {
        let mut assign: Vec<Option<HalfspaceId>> = vec![None; domain.num_halfspaces()];
        for &(h, img) in entries {
            if !codomain.contains_halfspace(img) {
                return Err(MapError::OutOfRange(img.0));
            }
            for (x, y) in [(h, img), (h.star(), img.star())] {
                match assign[x.0] {
                    Some(prev) if prev != y => return Err(MapError::StarConflict(domain.name(h).into())),
                    _ => assign[x.0] = Some(y),
                }
            }
        }
        let assign = assign
            .into_iter()
            .enumerate()
            .map(|(i, a)| a.ok_or_else(|| MapError::Unassigned(domain.name(HalfspaceId(i)).into())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(domain, codomain, assign)
    }

    pub fn identity(p: Arc<Pocset>) -> Self {
        let assign = p.halfspaces().collect();
        PocsetMap {
            domain: p.clone(),
            codomain: p,
            assign,
        }
    }

    pub fn domain(&self) -> &Arc<Pocset> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Pocset> {
        &self.codomain
    }

    pub fn assignments(&self) -> &[HalfspaceId] {
        &self.assign
    }

    #[inline]
    pub fn apply(&self, h: HalfspaceId) -> HalfspaceId {
        self.assign[h.0]
    }

    /// Image hyperplane; meaningful once AM1 holds.
    #[inline]
    pub fn apply_hyperplane(&self, h: HyperplaneId) -> HyperplaneId {
        self.apply(h.canonical()).hyperplane()
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &PocsetMap) -> Result<PocsetMap, MapError> {
        if *self.codomain != *next.domain {
            return Err(MapError::NotComposable);
        }
        Ok(PocsetMap {
            domain: self.domain.clone(),
            codomain: next.codomain.clone(),
            assign: self.assign.iter().map(|&h| next.apply(h)).collect(),
        })
    }

    pub fn preimage_hyperplanes(&self, target: HyperplaneId) -> Vec<HyperplaneId> {
        self.domain
            .hyperplanes()
            .filter(|&h| self.apply_hyperplane(h) == target)
            .collect()
    }

    pub fn image_hyperplanes(&self) -> Vec<HyperplaneId> {
        let mut out: Vec<HyperplaneId> = self.domain.hyperplanes().map(|h| self.apply_hyperplane(h)).collect();
        out.sort();
        out.dedup();
        out
    }

    fn am1_witness(&self) -> Option<HalfspaceId> {
        self.domain
            .halfspaces()
            .find(|&h| self.apply(h.star()) != self.apply(h).star())
    }

    fn am2_witness(&self) -> Option<(HalfspaceId, HalfspaceId)> {
        let d = &*self.domain;
        for a in d.hyperplanes() {
            for b in d.hyperplanes().filter(|&b| b > a) {
                if d.transverse(a, b) && !self.codomain.transverse(self.apply_hyperplane(a), self.apply_hyperplane(b)) {
                    return Some((a.canonical(), b.canonical()));
                }
            }
        }
        None
    }

    fn am3_witness(&self) -> Option<(HalfspaceId, HalfspaceId)> {
        let d = &*self.domain;
        for a in d.hyperplanes() {
            let target = self.apply_hyperplane(a);
            let pre: Vec<bool> = d.hyperplanes().map(|h| self.apply_hyperplane(h) == target).collect();
            for b in d.hyperplanes().filter(|&b| b > a && pre[b.0]) {
                let Some((x, y)) = d.facing_sides(a, b) else { continue };
                if d.inseparable_by(|l| pre[l.0], a, b) && self.apply(x) != self.apply(y) {
                    return Some((x, y));
                }
            }
        }
        None
    }

    /// Sides of `h` that are not strictly below any image halfspace, i.e.
    /// compatible with the whole image.
    fn compatible_sides(&self, h: HyperplaneId) -> Vec<HalfspaceId> {
        h.sides()
            .into_iter()
            .filter(|&x| self.assign.iter().all(|&y| !self.codomain.lt(x, y.star())))
            .collect()
    }

    fn am4_witness(&self) -> Option<HyperplaneId> {
        let image = self.image_hyperplanes();
        self.codomain
            .hyperplanes()
            .filter(|h| image.binary_search(h).is_err())
            .find(|&h| self.compatible_sides(h).is_empty())
    }

    /// AM1 through AM4 only.
    pub fn am_report(&self) -> Vec<AmResult> {
        let am1 = self.am1_witness();
        // the later axioms read hyperplane images, which need AM1
        let (am2, am3) = if am1.is_some() {
            (None, None)
        } else {
            (self.am2_witness(), self.am3_witness())
        };
        vec![
            AmResult {
                axiom: "AM1",
                witness: am1.map(MapWitness::Halfspace),
            },
            AmResult {
                axiom: "AM2",
                witness: am2.map(|(a, b)| MapWitness::Pair(a, b)),
            },
            AmResult {
                axiom: "AM3",
                witness: am3.map(|(a, b)| MapWitness::Pair(a, b)),
            },
            AmResult {
                axiom: "AM4",
                witness: self.am4_witness().map(MapWitness::Hyperplane),
            },
        ]
    }

    pub fn is_admissible(&self) -> bool {
        self.am_report().iter().all(AmResult::ok)
    }

    /// A pair breaking injectivity or order reflection, if any.
    pub fn embedding_witness(&self) -> Option<(HalfspaceId, HalfspaceId)> {
        let d = &*self.domain;
        for h in d.halfspaces() {
            for k in d.halfspaces() {
                if h != k && self.apply(h) == self.apply(k) {
                    return Some((h, k));
                }
                if self.codomain.le(self.apply(h), self.apply(k)) && !d.le(h, k) {
                    return Some((h, k));
                }
            }
        }
        None
    }

    /// `h ~ k` iff `f(h) = f(k)`.
    pub fn kernel_relation(&self) -> Result<EquivalenceRelation, MapError> {
        if let Some(h) = self.am1_witness() {
            return Err(MapError::Am1Violated(self.domain.name(h).into()));
        }
        let labels: Vec<usize> = self.assign.iter().map(|h| h.0).collect();
        Ok(EquivalenceRelation::from_labels(self.domain.clone(), &labels)?)
    }

    /// The quotient by the kernel and the induced map out of it.
    pub fn factor_through_kernel(&self) -> Result<(Quotient, PocsetMap), MapError> {
        let rel = self.kernel_relation()?;
        let q = quotient_pocset(&rel)?;
        let assign = q.pocset().halfspaces().map(|c| self.apply(q.members(c)[0])).collect();
        let induced = PocsetMap::new(q.pocset().clone(), self.codomain.clone(), assign)?;
        Ok((q, induced))
    }

    pub fn classify(&self) -> MapClassification {
        let am = self.am_report();
        let admissible = am.iter().all(AmResult::ok);
        let is_embedding = admissible && self.embedding_witness().is_none();
        let kernel = self.kernel_relation().ok().map(|r| r.check_admissible());
        let is_resolution = admissible
            && kernel.as_ref().is_some_and(AdmissibilityReport::admissible)
            && self
                .factor_through_kernel()
                .is_ok_and(|(_, induced)| induced.is_admissible() && induced.embedding_witness().is_none());
        MapClassification {
            am,
            is_embedding,
            is_resolution,
            kernel,
        }
    }

    pub fn image_partition(&self) -> Result<ImagePartition, MapError> {
        if !self.is_admissible() {
            return Err(MapError::NotAdmissible);
        }
        self.partition_unchecked()
    }

    fn partition_unchecked(&self) -> Result<ImagePartition, MapError> {
        let h1 = self.image_hyperplanes();
        let mut h2 = Vec::new();
        let mut h3 = Vec::new();
        for h in self.codomain.hyperplanes() {
            if h1.binary_search(&h).is_ok() {
                continue;
            }
            if h1.iter().all(|&i| self.codomain.transverse(h, i)) {
                h2.push(h);
                continue;
            }
            match self.compatible_sides(h).as_slice() {
                [x] => h3.push((h, *x)),
                sides => {
                    return Err(MapError::LemmaViolation(format!(
                        "{} has {} sides compatible with the image",
                        self.codomain.hyperplane_name(h),
                        sides.len()
                    )))
                }
            }
        }
        Ok(ImagePartition { h1, h2, h3 })
    }

    /// The codomain restricted to image hyperplanes.
    pub fn image_pocset(&self) -> SubPocset {
        self.codomain.restrict(&self.image_hyperplanes())
    }

    /// `F(u)` on one image hyperplane: the image of the orientation `u`
    /// gives a minimal preimage. All minimal choices must agree.
    pub fn induced_side(&self, u: &Ultrafilter, target: HyperplaneId) -> Result<HalfspaceId, MapError> {
        let d = &*self.domain;
        let chosen: Vec<HalfspaceId> = self
            .preimage_hyperplanes(target)
            .into_iter()
            .map(|h| u.choice(h))
            .collect();
        let mut value = None;
        for &x in &chosen {
            if chosen.iter().any(|&y| d.lt(y, x)) {
                continue;
            }
            let img = self.apply(x);
            match value {
                Some(v) if v != img => {
                    return Err(MapError::LemmaViolation(format!(
                        "minimal preimages of {} disagree",
                        self.codomain.hyperplane_name(target)
                    )))
                }
                _ => value = Some(img),
            }
        }
        value.ok_or_else(|| MapError::LemmaViolation("hyperplane has no preimage".into()))
    }

    /// `F(u)` extended to the whole codomain: image hyperplanes by the
    /// minimal rule, the others by their canonical side (transverse to the
    /// image) or their forced side.
    pub fn induced_codomain_vertex(&self, u: &Ultrafilter) -> Result<Ultrafilter, MapError> {
        let part = self.partition_unchecked()?;
        let mut choices: Vec<HalfspaceId> = self.codomain.hyperplanes().map(HyperplaneId::canonical).collect();
        for &h in &part.h1 {
            choices[h.0] = self.induced_side(u, h)?;
        }
        for &(h, x) in &part.h3 {
            choices[h.0] = x;
        }
        let v = Ultrafilter::from_choices(choices);
        if !v.is_valid(&self.codomain) {
            return Err(MapError::LemmaViolation("induced orientation is not an ultrafilter".into()));
        }
        Ok(v)
    }

    /// Vertex map from the domain complex into the complex of the image
    /// pocset, as indices.
    pub fn induced_complex_map(&self, x: &CubeComplex, image: &CubeComplex) -> Result<Vec<usize>, MapError> {
        if **x.pocset() != *self.domain {
            return Err(MapError::WrongComplex);
        }
        let sub = self.image_pocset();
        if sub.pocset != **image.pocset() {
            return Err(MapError::WrongComplex);
        }
        let mut out = Vec::with_capacity(x.vertices().len());
        for u in x.vertices() {
            let choices = sub
                .pocset
                .hyperplanes()
                .map(|h| {
                    let parent = sub.to_parent[h.canonical().0].hyperplane();
                    let side = self.induced_side(u, parent)?;
                    Ok(if side == sub.to_parent[h.canonical().0] {
                        h.canonical()
                    } else {
                        h.canonical().star()
                    })
                })
                .collect::<Result<Vec<_>, MapError>>()?;
            let v = Ultrafilter::from_choices(choices);
            let idx = image
                .vertex_index(&v)
                .ok_or_else(|| MapError::LemmaViolation("induced orientation is not an ultrafilter".into()))?;
            out.push(idx);
        }
        Ok(out)
    }

    /// Vertex map into the full codomain complex via [`Self::induced_codomain_vertex`].
    pub fn induced_codomain_map(&self, x: &CubeComplex, target: &CubeComplex) -> Result<Vec<usize>, MapError> {
        if **x.pocset() != *self.domain || **target.pocset() != *self.codomain {
            return Err(MapError::WrongComplex);
        }
        x.vertices()
            .iter()
            .map(|u| {
                let v = self.induced_codomain_vertex(u)?;
                target
                    .vertex_index(&v)
                    .ok_or_else(|| MapError::LemmaViolation("induced vertex missing from target".into()))
            })
            .collect()
    }

    /// `map a -> x` lines, one per hyperplane, canonical side first.
    pub fn to_grammar(&self) -> String {
        let mut s = String::new();
        for h in self.domain.hyperplanes() {
            let a = h.canonical();
            s.push_str(&format!("map {} -> {}\n", self.domain.name(a), self.codomain.name(self.apply(a))));
        }
        s
    }
}

/// First vertex pair whose distance grows under `f`, or for `isometric`
/// whose distance changes at all.
pub fn distance_violation(
    x: &CubeComplex,
    y: &CubeComplex,
    f: &[usize],
    isometric: bool,
) -> Option<(usize, usize)> {
    let n = x.vertices().len();
    for i in 0..n {
        for j in i + 1..n {
            let before = crate::complex::hamming(x.vertex(i), x.vertex(j));
            let after = crate::complex::hamming(y.vertex(f[i]), y.vertex(f[j]));
            if after > before || (isometric && after != before) {
                return Some((i, j));
            }
        }
    }
    None
}
