//! Elementary folds of equivariant resolutions and full folding sequences.
//!
//! The group acting on domain and target is modelled as the subgroup of
//! permutations of the disjoint union generated by the same-named generator
//! pairs. Stabilizers on either side are read off that joint group, which is
//! what the complexity count needs.

use std::sync::Arc;

use serde_json::{json, Value};
use thiserror::Error;

use crate::action::{equivariance_witness, generate, validate_action, ActionError, GroupAction, Permutation, DEFAULT_GROUP_CAP};
use crate::complex::{dual_complex, ComplexError, CubeComplex, Ultrafilter, DEFAULT_VERTEX_CAP};
use crate::maps::{distance_violation, MapError, PocsetMap};
use crate::pocset::{HalfspaceId, HyperplaneId, Pocset};
use crate::quotient::{quotient_pocset, EquivalenceRelation, Quotient, QuotientError};
use crate::unionfind::UnionFind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoldError {
    #[error("input is not a resolution:\n{0}")]
    NotResolution(String),
    #[error("map is not equivariant: generator `{generator}` at `{halfspace}`")]
    NotEquivariant { generator: String, halfspace: String },
    #[error("action and map disagree on a pocset")]
    PocsetMismatch,
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error("`{0}` and `{1}` are not an elementary foldable pair")]
    NotFoldable(String, String),
    #[error("`{0}` and `{1}` have different images")]
    NotIdentified(String, String),
    #[error("induced action inverts `{0}`")]
    InversionCreated(String),
    #[error("orbit map is not injective")]
    OrbitMapNotInjective,
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("lemma violation: {0}")]
    LemmaViolation(String),
}

impl FoldError {
    /// 1 for invalid input, 2 for a failed lemma check, 3 for a resource cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            FoldError::LemmaViolation(_) | FoldError::InversionCreated(_) => 2,
            FoldError::Complex(ComplexError::TooLarge(_)) | FoldError::Action(ActionError::GroupTooLarge(_)) => 3,
            _ => 1,
        }
    }
}

fn violation(msg: impl Into<String>) -> FoldError {
    FoldError::LemmaViolation(msg.into())
}

impl From<QuotientError> for FoldError {
    fn from(e: QuotientError) -> Self {
        match e {
            QuotientError::LemmaViolation(m) => FoldError::LemmaViolation(m),
            other => FoldError::LemmaViolation(other.to_string()),
        }
    }
}

impl From<MapError> for FoldError {
    fn from(e: MapError) -> Self {
        match e {
            MapError::Complex(c) => FoldError::Complex(c),
            MapError::LemmaViolation(m) => FoldError::LemmaViolation(m),
            other => FoldError::LemmaViolation(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FoldConfig {
    pub verify: bool,
    pub vertex_cap: usize,
}

impl Default for FoldConfig {
    fn default() -> Self {
        FoldConfig {
            verify: true,
            vertex_cap: DEFAULT_VERTEX_CAP,
        }
    }
}

/// An equivariant resolution together with both actions.
#[derive(Clone, Debug)]
pub struct ResolutionState {
    action: GroupAction,
    map: PocsetMap,
    target_action: GroupAction,
    joint: Vec<(Permutation, Permutation)>,
}

/// Per image orbit: the representative target hyperplane, the least
/// preimage, and the joint elements fixing the first but not the second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexityTerm {
    pub target: HyperplaneId,
    pub preimage: HyperplaneId,
    pub missing: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complexity {
    pub total: usize,
    pub terms: Vec<ComplexityTerm>,
}

impl ResolutionState {
    /// Checks that `map` is a resolution and equivariant for the paired
    /// generators.
    pub fn new(action: GroupAction, map: PocsetMap, target_action: GroupAction) -> Result<Self, FoldError> {
        let st = Self::unchecked(action, map, target_action)?;
        let c = st.map.classify();
        if !c.is_resolution {
            return Err(FoldError::NotResolution(c.render(&st.map)));
        }
        if let Some((generator, h)) = equivariance_witness(&st.action, &st.target_action, &st.map)? {
            return Err(FoldError::NotEquivariant {
                generator,
                halfspace: st.map.domain().name(h).into(),
            });
        }
        Ok(st)
    }

    fn unchecked(action: GroupAction, map: PocsetMap, target_action: GroupAction) -> Result<Self, FoldError> {
        if **action.pocset() != **map.domain() || **target_action.pocset() != **map.codomain() {
            return Err(FoldError::PocsetMismatch);
        }
        action.check_pairing(&target_action)?;
        let n = map.domain().num_halfspaces();
        let m = map.codomain().num_halfspaces();
        let gens: Vec<Permutation> = action
            .generators()
            .iter()
            .map(|(name, g)| {
                let t = target_action.generator(name).expect("paired");
                let mut images = g.images().to_vec();
                images.extend(t.images().iter().map(|&i| i + n));
                Permutation::from_images(images).expect("disjoint union of bijections")
            })
            .collect();
        let joint = generate(n + m, gens.iter(), DEFAULT_GROUP_CAP)?
            .into_iter()
            .map(|p| {
                let img = p.images();
                let dom = Permutation::from_images(img[..n].to_vec()).expect("preserves the domain");
                let cod = Permutation::from_images(img[n..].iter().map(|&i| i - n).collect()).expect("preserves the target");
                (dom, cod)
            })
            .collect();
        Ok(ResolutionState {
            action,
            map,
            target_action,
            joint,
        })
    }

    pub fn pocset(&self) -> &Arc<Pocset> {
        self.map.domain()
    }

    pub fn action(&self) -> &GroupAction {
        &self.action
    }

    pub fn map(&self) -> &PocsetMap {
        &self.map
    }

    pub fn target_action(&self) -> &GroupAction {
        &self.target_action
    }

    /// Joint group elements as (domain, target) permutation pairs; index 0
    /// is the identity.
    pub fn joint(&self) -> &[(Permutation, Permutation)] {
        &self.joint
    }

    /// Unordered pairs of distinct hyperplanes with the same image.
    pub fn identified_pairs(&self) -> usize {
        let hs: Vec<HyperplaneId> = self.pocset().hyperplanes().collect();
        let mut n = 0;
        for (i, &a) in hs.iter().enumerate() {
            for &b in &hs[i + 1..] {
                if self.map.apply_hyperplane(a) == self.map.apply_hyperplane(b) {
                    n += 1;
                }
            }
        }
        n
    }

    /// Least pair of identified hyperplanes in distinct orbits, if the
    /// orbit-level map is not injective.
    pub fn orbit_collision(&self) -> Option<(HyperplaneId, HyperplaneId)> {
        let orbit = self.action.hyperplane_orbits();
        let hs: Vec<HyperplaneId> = self.pocset().hyperplanes().collect();
        for (i, &a) in hs.iter().enumerate() {
            for &b in &hs[i + 1..] {
                if orbit[a.0] != orbit[b.0] && self.map.apply_hyperplane(a) == self.map.apply_hyperplane(b) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// The complexity count, defined once the orbit map is injective.
    pub fn complexity(&self) -> Result<Complexity, FoldError> {
        if self.orbit_collision().is_some() {
            return Err(FoldError::OrbitMapNotInjective);
        }
        let target_orbit = self.target_action.hyperplane_orbits();
        let image = self.map.image_hyperplanes();
        let mut seen = vec![false; target_orbit.iter().copied().max().map_or(0, |m| m + 1)];
        let mut terms = Vec::new();
        for &h in &image {
            let o = target_orbit[h.0];
            if seen[o] {
                continue;
            }
            seen[o] = true;
            // least member of the orbit; the image is invariant so it is hit
            let target = self
                .map
                .codomain()
                .hyperplanes()
                .find(|x| target_orbit[x.0] == o)
                .expect("orbit is nonempty");
            let preimage = *self
                .map
                .preimage_hyperplanes(target)
                .first()
                .ok_or_else(|| violation("image is not invariant under the target action"))?;
            let missing = self
                .joint
                .iter()
                .enumerate()
                .filter(|(_, (d, t))| t.apply_hyperplane(target) == target && d.apply_hyperplane(preimage) != preimage)
                .map(|(i, _)| i)
                .collect();
            terms.push(ComplexityTerm {
                target,
                preimage,
                missing,
            });
        }
        Ok(Complexity {
            total: terms.iter().map(|t| t.missing.len()).sum(),
            terms,
        })
    }
}

/// Elementary foldable pairs, as facing halfspaces `(x, y)` with `x` on the
/// smaller hyperplane, sorted by hyperplane ids.
pub fn find_foldable_pairs(st: &ResolutionState) -> Vec<(HalfspaceId, HalfspaceId)> {
    let p = st.pocset();
    let f = st.map();
    let mut out = Vec::new();
    for a in p.hyperplanes() {
        let target = f.apply_hyperplane(a);
        let class: Vec<bool> = p.hyperplanes().map(|h| f.apply_hyperplane(h) == target).collect();
        for b in p.hyperplanes().filter(|&b| b > a && class[b.0]) {
            if let Some(pair) = foldable(p, f, &class, a, b) {
                out.push(pair);
            }
        }
    }
    out
}

fn foldable(p: &Pocset, f: &PocsetMap, class: &[bool], a: HyperplaneId, b: HyperplaneId) -> Option<(HalfspaceId, HalfspaceId)> {
    let (x, y) = p.facing_sides(a, b)?;
    if f.apply(x) != f.apply(y) || !p.inseparable_by(|l| class[l.0], a, b) {
        return None;
    }
    let seps = p.separators(a, b).ok()?;
    for (i, &s) in seps.iter().enumerate() {
        if seps[i + 1..].iter().any(|&t| f.apply_hyperplane(s) == f.apply_hyperplane(t)) {
            return None;
        }
    }
    Some((x, y))
}

/// An image vertex inside a maximal cube after a fold, built from the
/// cube by the orientation recipe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoboundedWitness {
    pub cube: Vec<usize>,
    pub vertex: usize,
    pub image: usize,
}

#[derive(Clone, Debug)]
pub struct FoldStep {
    pub pair: (HalfspaceId, HalfspaceId),
    pub pair_names: (String, String),
    pub relation: EquivalenceRelation,
    pub quotient: Quotient,
    pub result: ResolutionState,
    /// Named checks that ran, all of which passed.
    pub checks: Vec<(String, bool)>,
    pub cobounded: Vec<CoboundedWitness>,
    pub complexity: Option<usize>,
}

/// Smallest relation containing the pair that is invariant under the
/// action and complementation.
pub fn fold_relation(st: &ResolutionState, pair: (HalfspaceId, HalfspaceId)) -> EquivalenceRelation {
    let p = st.pocset();
    let mut uf = UnionFind::new(p.num_halfspaces());
    for g in st.action().elements() {
        let (a, b) = (g.apply(pair.0), g.apply(pair.1));
        uf.union(a.0, b.0);
        uf.union(a.star().0, b.star().0);
    }
    let labels = uf.labels();
    EquivalenceRelation::from_labels(p.clone(), &labels).expect("sized to pocset")
}

/// Descends every generator to the quotient.
pub fn descend_action(action: &GroupAction, q: &Quotient) -> Result<GroupAction, FoldError> {
    let qp = q.pocset();
    let mut gens = Vec::new();
    for (name, g) in action.generators() {
        let mut images = Vec::with_capacity(qp.num_halfspaces());
        for c in qp.halfspaces() {
            let members = q.members(c);
            let img = q.project(g.apply(members[0]));
            if members.iter().any(|&m| q.project(g.apply(m)) != img) {
                return Err(violation(format!("generator `{name}` does not descend to the quotient")));
            }
            images.push(img.0);
        }
        let perm = Permutation::from_images(images).ok_or_else(|| violation(format!("descended `{name}` is not a bijection")))?;
        gens.push((name.clone(), perm));
    }
    match validate_action(qp.clone(), gens) {
        Ok(a) => Ok(a),
        Err(ActionError::Inversion { halfspace, .. }) => Err(FoldError::InversionCreated(halfspace)),
        Err(ActionError::GroupTooLarge(n)) => Err(FoldError::Action(ActionError::GroupTooLarge(n))),
        Err(e) => Err(violation(format!("descended action is invalid: {e}"))),
    }
}

/// Folds one elementary foldable pair and runs the per-step checks.
pub fn elementary_fold(
    st: &ResolutionState,
    pair: (HalfspaceId, HalfspaceId),
    cfg: &FoldConfig,
) -> Result<FoldStep, FoldError> {
    let p = st.pocset();
    let names = (p.name(pair.0).to_owned(), p.name(pair.1).to_owned());
    let pairs = find_foldable_pairs(st);
    let pair = if pairs.contains(&pair) {
        pair
    } else if pairs.contains(&(pair.1, pair.0)) {
        (pair.1, pair.0)
    } else {
        return Err(FoldError::NotFoldable(names.0, names.1));
    };
    let mut checks = Vec::new();
    let relation = fold_relation(st, pair);

    if cfg.verify {
        let mut done = vec![false; p.num_hyperplanes()];
        for h in p.hyperplanes() {
            if done[h.0] {
                continue;
            }
            let class = relation.hyperplane_class(h);
            for c in &class {
                done[c.0] = true;
            }
            if !p.is_facing_collection(&class) {
                return Err(violation(format!("class of {} is not a facing collection", p.hyperplane_name(h))));
            }
        }
        checks.push(("classes_facing".to_owned(), true));
        let report = relation.check_admissible();
        if !report.admissible() {
            return Err(violation(format!("fold relation is not admissible:\n{}", report.render(p))));
        }
        checks.push(("relation_admissible".to_owned(), true));
    }

    let quotient = quotient_pocset(&relation)?;
    checks.push(("quotient_pocset".to_owned(), true));
    let qp = quotient.pocset().clone();
    let action = descend_action(st.action(), &quotient)?;

    let mut assign = Vec::with_capacity(qp.num_halfspaces());
    for c in qp.halfspaces() {
        let members = quotient.members(c);
        let img = st.map().apply(members[0]);
        if members.iter().any(|&m| st.map().apply(m) != img) {
            return Err(violation("fold relation identifies halfspaces with different images"));
        }
        assign.push(img);
    }
    let f1 = PocsetMap::new(qp.clone(), st.map().codomain().clone(), assign)?;
    let result = ResolutionState::unchecked(action, f1, st.target_action().clone())?;

    let mut cobounded = Vec::new();
    if cfg.verify {
        let class = result.map().classify();
        if !class.is_resolution {
            return Err(violation(format!("folded map is not a resolution:\n{}", class.render(result.map()))));
        }
        checks.push(("folded_map_resolution".to_owned(), true));
        if let Some((g, h)) = equivariance_witness(result.action(), result.target_action(), result.map())? {
            return Err(violation(format!("folded map is not equivariant: `{g}` at `{}`", qp.name(h))));
        }
        checks.push(("folded_map_equivariant".to_owned(), true));
        check_factorization(st.map(), &quotient, result.map())?;
        checks.push(("factorization".to_owned(), true));

        let before = dual_complex(p.clone(), cfg.vertex_cap)?;
        let after = dual_complex(qp.clone(), cfg.vertex_cap)?;
        let projection = quotient.projection_map();
        let fv = projection.induced_codomain_map(&before, &after)?;
        if let Some((i, j)) = distance_violation(&before, &after, &fv, false) {
            return Err(violation(format!("induced map increases the distance between v{i} and v{j}")));
        }
        checks.push(("distance_non_increasing".to_owned(), true));
        cobounded = cobounded_witnesses(&quotient, &before, &after, &fv)?;
        checks.push(("cobounded".to_owned(), true));
    }

    let complexity = result.complexity().ok().map(|c| c.total);
    Ok(FoldStep {
        pair,
        pair_names: (p.name(pair.0).to_owned(), p.name(pair.1).to_owned()),
        relation,
        quotient,
        result,
        checks,
        cobounded,
        complexity,
    })
}

/// Compares `H/~f0` with `(H/~)/~f1` through the class bijection induced by
/// the fold, exhaustively on complements and order.
pub fn check_factorization(f0: &PocsetMap, fold: &Quotient, f1: &PocsetMap) -> Result<(), FoldError> {
    let (q0, _) = f0.factor_through_kernel()?;
    let (q1, _) = f1.factor_through_kernel()?;
    let (p0, p1) = (q0.pocset(), q1.pocset());
    if p0.num_halfspaces() != p1.num_halfspaces() {
        return Err(violation("kernel quotients differ in size"));
    }
    let mut to1: Vec<Option<HalfspaceId>> = vec![None; p0.num_halfspaces()];
    for h in f0.domain().halfspaces() {
        let a = q0.project(h);
        let b = q1.project(fold.project(h));
        match to1[a.0] {
            Some(x) if x != b => return Err(violation("class bijection is not well defined")),
            _ => to1[a.0] = Some(b),
        }
    }
    let to1: Vec<HalfspaceId> = to1.into_iter().map(|x| x.expect("every class has a member")).collect();
    let mut hit = vec![false; p1.num_halfspaces()];
    for &b in &to1 {
        if std::mem::replace(&mut hit[b.0], true) {
            return Err(violation("class bijection is not injective"));
        }
    }
    for a in p0.halfspaces() {
        if to1[a.star().0] != to1[a.0].star() {
            return Err(violation("class bijection does not commute with complements"));
        }
        for b in p0.halfspaces() {
            if p0.lt(a, b) != p1.lt(to1[a.0], to1[b.0]) {
                return Err(violation(format!(
                    "order differs at {} < {}",
                    p0.name(a),
                    p0.name(b)
                )));
            }
        }
    }
    Ok(())
}

/// For each maximal cube after the fold, orients the domain so that its
/// image lands in the cube: cube hyperplanes with one preimage take the
/// canonical side, folded ones the facing orientation of their class, and
/// every other hyperplane the side containing all preimages of the first
/// cube hyperplane disjoint from its image.
pub fn cobounded_witnesses(
    q: &Quotient,
    before: &CubeComplex,
    after: &CubeComplex,
    fv: &[usize],
) -> Result<Vec<CoboundedWitness>, FoldError> {
    let p = q.source();
    let qp = q.pocset();
    let mut out = Vec::new();
    for cube in after.maximal_cubes() {
        let mut choices = Vec::with_capacity(p.num_hyperplanes());
        for h in p.hyperplanes() {
            let image = q.project_hyperplane(h);
            let side = if cube.hyperplanes.contains(&image) {
                let pre = q.preimage_hyperplanes(image);
                if pre.len() == 1 {
                    h.canonical()
                } else {
                    let orient = p
                        .facing_orientation(&pre)
                        .ok_or_else(|| violation(format!("class of {} has no facing orientation", p.hyperplane_name(h))))?;
                    orient[pre.iter().position(|&x| x == h).expect("h is a preimage")]
                }
            } else {
                let k = cube
                    .hyperplanes
                    .iter()
                    .copied()
                    .find(|&k| qp.disjoint(image, k))
                    .ok_or_else(|| {
                        violation(format!(
                            "{} crosses every hyperplane of a maximal cube",
                            qp.hyperplane_name(image)
                        ))
                    })?;
                let pre = q.preimage_hyperplanes(k);
                h.sides()
                    .into_iter()
                    .find(|&x| pre.iter().all(|l| l.sides().iter().any(|&y| p.lt(y, x))))
                    .ok_or_else(|| {
                        violation(format!(
                            "no side of {} contains the preimages of {}",
                            p.hyperplane_name(h),
                            qp.hyperplane_name(k)
                        ))
                    })?
            };
            choices.push(side);
        }
        let u = Ultrafilter::from_choices(choices);
        let vertex = before
            .vertex_index(&u)
            .ok_or_else(|| violation("cube recipe does not give an ultrafilter"))?;
        let image = fv[vertex];
        if cube.vertices.binary_search(&image).is_err() {
            return Err(violation("recipe vertex maps outside its cube"));
        }
        out.push(CoboundedWitness {
            cube: cube.vertices.clone(),
            vertex,
            image,
        });
    }
    Ok(out)
}

/// Folds until `h` and `k` are identified. Each step folds a foldable pair
/// inside the interval spanned by their hyperplanes, fewest separators first.
/// Returns the steps, the final state, and the common image of `h`.
pub fn fold_to_target(
    st: &ResolutionState,
    h: HalfspaceId,
    k: HalfspaceId,
    cfg: &FoldConfig,
) -> Result<(Vec<FoldStep>, ResolutionState, HalfspaceId), FoldError> {
    let p = st.pocset();
    if h == k {
        return Ok((Vec::new(), st.clone(), h));
    }
    if st.map().apply(h) != st.map().apply(k) {
        return Err(FoldError::NotIdentified(p.name(h).into(), p.name(k).into()));
    }
    let bound = identified_in_interval(st, h.hyperplane(), k.hyperplane());
    let mut steps: Vec<FoldStep> = Vec::new();
    let mut cur = st.clone();
    let (mut h, mut k) = (h, k);
    while h != k {
        let cp = cur.pocset().clone();
        let (a, b) = (h.hyperplane(), k.hyperplane());
        let mut interval = cp.separators(a, b).map_err(|_| violation("identified halfspaces on one hyperplane"))?;
        interval.extend([a, b]);
        let pair = find_foldable_pairs(&cur)
            .into_iter()
            .filter(|(x, y)| interval.contains(&x.hyperplane()) && interval.contains(&y.hyperplane()))
            .min_by_key(|&(x, y)| {
                let span = cp.separators(x.hyperplane(), y.hyperplane()).map_or(usize::MAX, |s| s.len());
                (span, x.hyperplane(), y.hyperplane())
            })
            .ok_or_else(|| {
                violation(format!(
                    "no elementary foldable pair between {} and {}",
                    cp.hyperplane_name(a),
                    cp.hyperplane_name(b)
                ))
            })?;
        let step = elementary_fold(&cur, pair, cfg)?;
        h = step.quotient.project(h);
        k = step.quotient.project(k);
        cur = step.result.clone();
        steps.push(step);
        if steps.len() > bound {
            return Err(violation(format!(
                "targeted folding exceeded {bound} steps"
            )));
        }
    }
    Ok((steps, cur, h))
}

fn identified_in_interval(st: &ResolutionState, a: HyperplaneId, b: HyperplaneId) -> usize {
    let p = st.pocset();
    let mut hs = p.separators(a, b).unwrap_or_default();
    hs.extend([a, b]);
    let f = st.map();
    let mut n = 0;
    for (i, &x) in hs.iter().enumerate() {
        for &y in &hs[i + 1..] {
            if f.apply_hyperplane(x) == f.apply_hyperplane(y) {
                n += 1;
            }
        }
    }
    n
}

/// A complete folding sequence ending in an embedding.
#[derive(Clone, Debug)]
pub struct FoldTrace {
    pub original: PocsetMap,
    pub steps: Vec<FoldStep>,
    pub final_state: ResolutionState,
    pub initial_identified_pairs: usize,
    pub initial_complexity: Option<usize>,
    /// Complexity before each phase-two target fold, ending with zero.
    pub complexity_history: Vec<usize>,
}

impl FoldTrace {
    pub fn final_embedding(&self) -> &PocsetMap {
        self.final_state.map()
    }

    pub fn step_bound(&self) -> usize {
        self.initial_identified_pairs + self.initial_complexity.unwrap_or(0)
    }

    /// All projections followed by the final embedding.
    pub fn composite(&self) -> Result<PocsetMap, MapError> {
        let mut acc = PocsetMap::identity(self.original.domain().clone());
        for s in &self.steps {
            acc = acc.then(&s.quotient.projection_map())?;
        }
        acc.then(self.final_embedding())
    }

    pub fn to_json(&self) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|s| {
                let p = s.relation.pocset();
                let classes: Vec<Vec<&str>> = s
                    .relation
                    .classes()
                    .iter()
                    .map(|c| c.iter().map(|&h| p.name(h)).collect())
                    .collect();
                let checks: serde_json::Map<String, Value> =
                    s.checks.iter().map(|(k, v)| (k.clone(), Value::Bool(*v))).collect();
                let cob: Vec<Value> = s
                    .cobounded
                    .iter()
                    .map(|w| json!({"cube": w.cube, "vertex": w.vertex, "image": w.image}))
                    .collect();
                json!({
                    "pair": [s.pair_names.0, s.pair_names.1],
                    "relation_classes": classes,
                    "quotient_pocset": s.quotient.pocset().to_grammar(),
                    "checks": checks,
                    "complexity": s.complexity,
                    "cobounded": cob,
                })
            })
            .collect();
        let f = self.final_embedding();
        let embedding: serde_json::Map<String, Value> = f
            .domain()
            .halfspaces()
            .map(|h| (f.domain().name(h).to_owned(), Value::String(f.codomain().name(f.apply(h)).to_owned())))
            .collect();
        json!({
            "steps": steps,
            "final_pocset": f.domain().to_grammar(),
            "final_embedding": embedding,
            "complexity_history": self.complexity_history,
            "initial_identified_pairs": self.initial_identified_pairs,
            "initial_complexity": self.initial_complexity,
            "step_bound": self.step_bound(),
            "embedding": f.classify().is_embedding,
        })
    }
}

/// Phase one folds until the orbit-level map is injective; phase two folds
/// away stabilizer elements missing upstairs until the complexity is zero.
/// The result is checked to be an embedding that recomposes to the input.
pub fn folding_sequence(st: &ResolutionState, cfg: &FoldConfig) -> Result<FoldTrace, FoldError> {
    let initial_identified_pairs = st.identified_pairs();
    let initial_complexity = st.complexity().ok().map(|c| c.total);
    let bound = initial_identified_pairs + initial_complexity.unwrap_or(0);
    let mut steps = Vec::new();
    let mut cur = st.clone();

    while let Some((a, b)) = cur.orbit_collision() {
        let h = a.canonical();
        let target = cur.map().apply(h);
        let k = b.sides().into_iter().find(|&k| cur.map().apply(k) == target).expect("identified hyperplanes");
        let (s, next, _) = fold_to_target(&cur, h, k, cfg)?;
        steps.extend(s);
        cur = next;
        if steps.len() > bound {
            return Err(violation(format!("folding exceeded {bound} steps")));
        }
    }

    let mut history = Vec::new();
    loop {
        let c = cur.complexity()?;
        if let Some(&prev) = history.last() {
            if c.total >= prev {
                return Err(violation(format!("complexity did not drop below {prev}")));
            }
        }
        history.push(c.total);
        let Some(term) = c.terms.iter().find(|t| !t.missing.is_empty()) else { break };
        let s = &cur.joint()[term.missing[0]].0;
        let h = term.preimage.canonical();
        let (more, next, _) = fold_to_target(&cur, h, s.apply(h), cfg)?;
        if more.is_empty() {
            return Err(violation("stabilizer fold made no progress"));
        }
        steps.extend(more);
        cur = next;
        if steps.len() > bound {
            return Err(violation(format!("folding exceeded {bound} steps")));
        }
    }

    let trace = FoldTrace {
        original: st.map().clone(),
        steps,
        final_state: cur,
        initial_identified_pairs,
        initial_complexity,
        complexity_history: history,
    };
    let fin = trace.final_embedding().classify();
    if !fin.is_embedding {
        return Err(violation(format!("final map is not an embedding:\n{}", fin.render(trace.final_embedding()))));
    }
    if trace.composite()? != trace.original {
        return Err(violation("projections and final embedding do not recompose the input"));
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pocset::{validate_pocset, RawPocset};

    fn build(pairs: &[&str], le: &[(&str, &str)]) -> Arc<Pocset> {
        let mut raw = RawPocset::new();
        for n in pairs {
            raw = raw.pair(n, &format!("n{n}"));
        }
        for (a, b) in le {
            raw = raw.le(a, b);
        }
        Arc::new(validate_pocset(&raw).unwrap())
    }

    fn chain(names: &[&str]) -> Arc<Pocset> {
        let le: Vec<(&str, &str)> = names.windows(2).map(|w| (w[0], w[1])).collect();
        build(names, &le)
    }

    fn map(d: &Arc<Pocset>, c: &Arc<Pocset>, entries: &[(&str, &str)]) -> PocsetMap {
        let e: Vec<_> = entries
            .iter()
            .map(|(a, b)| (d.halfspace(a).unwrap(), c.halfspace(b).unwrap()))
            .collect();
        PocsetMap::from_partial(d.clone(), c.clone(), &e).unwrap()
    }

    fn trivial_state(f: PocsetMap) -> ResolutionState {
        let a = GroupAction::trivial(f.domain().clone());
        let t = GroupAction::trivial(f.codomain().clone());
        ResolutionState::new(a, f, t).unwrap()
    }

    fn h(p: &Pocset, n: &str) -> HalfspaceId {
        p.halfspace(n).unwrap()
    }

    #[test]
    fn embedding_has_nothing_to_fold() {
        let st = trivial_state(PocsetMap::identity(chain(&["a", "b"])));
        assert!(find_foldable_pairs(&st).is_empty());
        let t = folding_sequence(&st, &FoldConfig::default()).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.complexity_history, vec![0]);
        assert_eq!(*t.final_embedding(), *st.map());
    }

    #[test]
    fn two_chain_folds_to_an_edge() {
        let d = chain(&["a", "b"]);
        let c = build(&["x"], &[]);
        let st = trivial_state(map(&d, &c, &[("na", "x"), ("b", "x")]));
        let pairs = find_foldable_pairs(&st);
        assert_eq!(pairs, vec![(h(&d, "na"), h(&d, "b"))]);
        let step = elementary_fold(&st, pairs[0], &FoldConfig::default()).unwrap();
        assert_eq!(step.quotient.pocset().num_hyperplanes(), 1);
        assert!(step.result.map().classify().is_embedding);
        assert!(step.checks.iter().all(|(_, ok)| *ok));
        assert_eq!(step.cobounded.len(), 1);
    }

    #[test]
    fn three_chain_folds_to_a_square() {
        let d = chain(&["a", "b", "c"]);
        let c = build(&["x", "y"], &[]);
        let st = trivial_state(map(&d, &c, &[("na", "x"), ("c", "x"), ("b", "y")]));
        assert_eq!(find_foldable_pairs(&st), vec![(h(&d, "na"), h(&d, "c"))]);
        let t = folding_sequence(&st, &FoldConfig::default()).unwrap();
        assert_eq!(t.steps.len(), 1);
        let step = &t.steps[0];
        assert_eq!(step.cobounded.len(), 1);
        assert_eq!(step.cobounded[0].cube.len(), 4);
        assert!(t.final_embedding().classify().is_embedding);
        assert_eq!(t.composite().unwrap(), *st.map());
    }

    #[test]
    fn inner_pair_folds_before_outer() {
        // a < b < c < d with a, c identified and b, d identified
        let d = chain(&["a", "b", "c", "d"]);
        let t = build(&["x", "y"], &[]);
        let f = map(&d, &t, &[("na", "x"), ("c", "x"), ("b", "y"), ("nd", "y")]);
        let st = trivial_state(f);
        // (b, d) is separated by c, identified with a, which does not also
        // separate, so both pairs qualify; neither is separated by an
        // identified pair of hyperplanes
        let pairs = find_foldable_pairs(&st);
        assert!(pairs.contains(&(h(&d, "na"), h(&d, "c"))));
        let tr = folding_sequence(&st, &FoldConfig::default()).unwrap();
        assert!(tr.steps.len() <= tr.step_bound());
        assert!(tr.final_embedding().classify().is_embedding);
    }

    #[test]
    fn nested_pairs_need_two_steps() {
        // a < b < c < d with a ~ d (outer) and b ~ c (inner)
        let d = chain(&["a", "b", "c", "d"]);
        let t = build(&["x", "y"], &[]);
        let f = map(&d, &t, &[("na", "x"), ("d", "x"), ("nb", "y"), ("c", "y")]);
        let st = trivial_state(f);
        assert_eq!(find_foldable_pairs(&st), vec![(h(&d, "nb"), h(&d, "c"))]);
        let (steps, _, _) = fold_to_target(&st, h(&d, "na"), h(&d, "d"), &FoldConfig::default()).unwrap();
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[0].pair_names, ("nb".to_owned(), "c".to_owned()));
    }

    #[test]
    fn fold_to_target_trivial_cases() {
        let d = chain(&["a", "b"]);
        let c = build(&["x"], &[]);
        let st = trivial_state(map(&d, &c, &[("na", "x"), ("b", "x")]));
        let (s, _, _) = fold_to_target(&st, h(&d, "b"), h(&d, "b"), &FoldConfig::default()).unwrap();
        assert!(s.is_empty());
        let (s, _, _) = fold_to_target(&st, h(&d, "na"), h(&d, "b"), &FoldConfig::default()).unwrap();
        assert_eq!(s.len(), 1);
        assert!(matches!(
            fold_to_target(&st, h(&d, "a"), h(&d, "b"), &FoldConfig::default()),
            Err(FoldError::NotIdentified(..))
        ));
        assert!(matches!(
            elementary_fold(&st, (h(&d, "a"), h(&d, "b")), &FoldConfig::default()),
            Err(FoldError::NotFoldable(..))
        ));
    }

    #[test]
    fn non_resolution_is_rejected() {
        let d = chain(&["a", "b", "c"]);
        let c = build(&["x", "y"], &[]);
        let f = map(&d, &c, &[("a", "x"), ("c", "x"), ("b", "y")]);
        let a = GroupAction::trivial(d);
        let t = GroupAction::trivial(c);
        assert!(matches!(ResolutionState::new(a, f, t), Err(FoldError::NotResolution(_))));
    }

    #[test]
    fn complexity_needs_injective_orbit_map() {
        let d = chain(&["a", "b"]);
        let c = build(&["x"], &[]);
        let st = trivial_state(map(&d, &c, &[("na", "x"), ("b", "x")]));
        assert_eq!(st.complexity(), Err(FoldError::OrbitMapNotInjective));
        let id = trivial_state(PocsetMap::identity(d.clone()));
        assert_eq!(id.complexity().unwrap().total, 0);
        assert_eq!(st.identified_pairs(), 1);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(violation("x").exit_code(), 2);
        assert_eq!(FoldError::Complex(ComplexError::TooLarge(1)).exit_code(), 3);
        assert_eq!(FoldError::OrbitMapNotInjective.exit_code(), 1);
    }
}
