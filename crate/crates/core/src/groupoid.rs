//! Finite groupoids, partial groupoid actions and skew groupoid rings.
//!
//! Morphisms compose by concatenation: `gh` exists iff `t(h) = s(g)`.

use petgraph::unionfind::UnionFind;
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bimodule::Bimodule;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::genmatrix::{build_genmatrix, GenMatrixRing, GenMatrixSpec};
use crate::group::FiniteGroup;
use crate::partial_action::PartialMap;
use crate::report::Report;
use crate::ring::{hom_violation_on, ideal_unit, is_ideal, set_generators, FiniteRing, RingMorphism, RingRef, SubRing};
use crate::set::{Elem, ElemSet};
use crate::skew::{IndexStructure, SkewRing};

pub type Morphism = usize;

#[derive(Clone, Debug, Serialize)]
pub struct FiniteGroupoid {
    label: String,
    objects: Vec<String>,
    names: Vec<String>,
    source: Vec<usize>,
    target: Vec<usize>,
    ids: Vec<Morphism>,
    /// `compose[g * k + h] = Some(gh)`.
    compose: Vec<Option<Morphism>>,
    inverse: Vec<Morphism>,
}

impl FiniteGroupoid {
    /// Builds a groupoid from source, target and partial composition tables,
    /// deriving identities and inverses, and verifies it.
    pub fn from_tables(
        label: impl Into<String>,
        objects: Vec<String>,
        names: Vec<String>,
        source: Vec<usize>,
        target: Vec<usize>,
        compose: Vec<Vec<Option<Morphism>>>,
    ) -> Result<FiniteGroupoid> {
        let k = names.len();
        let n = objects.len();
        let mut rep = Report::new("groupoid tables");
        if n == 0 || k == 0 || source.len() != k || target.len() != k || compose.len() != k || compose.iter().any(|r| r.len() != k) {
            rep.push("shape", "tables must cover every morphism");
            return Err(Error::InvalidGroupoid(rep));
        }
        if source.iter().chain(&target).any(|&x| x >= n) || compose.iter().flatten().flatten().any(|&x| x >= k) {
            rep.push("shape", "index out of range");
            return Err(Error::InvalidGroupoid(rep));
        }
        let compose: Vec<Option<Morphism>> = compose.into_iter().flatten().collect();
        let at = |g: usize, h: usize| compose[g * k + h];
        let mut ids = vec![usize::MAX; n];
        for x in 0..n {
            let found = (0..k).find(|&u| {
                source[u] == x
                    && target[u] == x
                    && (0..k).all(|g| (source[g] != x || at(g, u) == Some(g)) && (target[g] != x || at(u, g) == Some(g)))
            });
            match found {
                Some(u) => ids[x] = u,
                None => rep.push("identity", format!("object {} has no identity morphism", objects[x])),
            }
        }
        if !rep.is_ok() {
            return Err(Error::InvalidGroupoid(rep));
        }
        let mut inverse = vec![usize::MAX; k];
        for g in 0..k {
            match (0..k).find(|&h| at(h, g) == Some(ids[source[g]]) && at(g, h) == Some(ids[target[g]])) {
                Some(h) => inverse[g] = h,
                None => rep.push("inverse", format!("{} has no inverse", names[g])),
            }
        }
        if !rep.is_ok() {
            return Err(Error::InvalidGroupoid(rep));
        }
        let g = FiniteGroupoid { label: label.into(), objects, names, source, target, ids, compose, inverse };
        let rep = verify_groupoid(&g);
        if !rep.is_ok() {
            return Err(Error::InvalidGroupoid(rep));
        }
        Ok(g)
    }

    /// The coarse groupoid on `n` objects: `(y,z)(x,y) = (x,z)`, morphism
    /// `(x,y)` has id `x * n + y`.
    pub fn coarse(n: usize) -> FiniteGroupoid {
        assert!(n > 0);
        let k = n * n;
        let compose = (0..k * k)
            .map(|i| {
                let (g, h) = (i / k, i % k);
                let (y, z) = (g / n, g % n);
                let (x, y2) = (h / n, h % n);
                (y == y2).then_some(x * n + z)
            })
            .collect();
        FiniteGroupoid {
            label: format!("coarse{n}"),
            objects: (1..=n).map(|i| i.to_string()).collect(),
            names: (0..k).map(|u| format!("({},{})", u / n + 1, u % n + 1)).collect(),
            source: (0..k).map(|u| u / n).collect(),
            target: (0..k).map(|u| u % n).collect(),
            ids: (0..n).map(|x| x * n + x).collect(),
            compose,
            inverse: (0..k).map(|u| (u % n) * n + u / n).collect(),
        }
    }

    /// A group as a one-object groupoid.
    pub fn from_group(g: &FiniteGroup) -> FiniteGroupoid {
        let k = g.order();
        FiniteGroupoid {
            label: g.label().to_string(),
            objects: vec!["*".into()],
            names: g.elements().map(|x| g.name(x).to_string()).collect(),
            source: vec![0; k],
            target: vec![0; k],
            ids: vec![g.identity()],
            compose: (0..k * k).map(|i| Some(g.op(i / k, i % k))).collect(),
            inverse: g.elements().map(|x| g.inv(x)).collect(),
        }
    }

    /// Direct product; `(a, b)` has id `a * |b| + b` and object `(x, y)` has id
    /// `x * |b_0| + y`.
    pub fn product(a: &FiniteGroupoid, b: &FiniteGroupoid) -> FiniteGroupoid {
        let (ka, kb) = (a.morphism_count(), b.morphism_count());
        let nb = b.object_count();
        let k = ka * kb;
        let split = |u: usize| (u / kb, u % kb);
        let compose = (0..k * k)
            .map(|i| {
                let ((g1, g2), (h1, h2)) = (split(i / k), split(i % k));
                Some(a.compose(g1, h1)? * kb + b.compose(g2, h2)?)
            })
            .collect();
        let mut objects = Vec::new();
        for x in &a.objects {
            for y in &b.objects {
                objects.push(format!("({x},{y})"));
            }
        }
        FiniteGroupoid {
            label: format!("{}x{}", a.label, b.label),
            objects,
            names: (0..k).map(|u| format!("({},{})", a.names[u / kb], b.names[u % kb])).collect(),
            source: (0..k).map(|u| a.source[u / kb] * nb + b.source[u % kb]).collect(),
            target: (0..k).map(|u| a.target[u / kb] * nb + b.target[u % kb]).collect(),
            ids: (0..a.object_count() * nb).map(|x| a.ids[x / nb] * kb + b.ids[x % nb]).collect(),
            compose,
            inverse: (0..k).map(|u| a.inverse[u / kb] * kb + b.inverse[u % kb]).collect(),
        }
    }

    /// Disjoint union; morphisms and objects of `b` come after those of `a`.
    pub fn disjoint_union(a: &FiniteGroupoid, b: &FiniteGroupoid) -> FiniteGroupoid {
        let (ka, kb) = (a.morphism_count(), b.morphism_count());
        let na = a.object_count();
        let k = ka + kb;
        let compose = (0..k * k)
            .map(|i| {
                let (g, h) = (i / k, i % k);
                match (g < ka, h < ka) {
                    (true, true) => a.compose(g, h),
                    (false, false) => b.compose(g - ka, h - ka).map(|x| x + ka),
                    _ => None,
                }
            })
            .collect();
        FiniteGroupoid {
            label: format!("{}+{}", a.label, b.label),
            objects: a.objects.iter().chain(&b.objects).cloned().collect(),
            names: a.names.iter().chain(&b.names).cloned().collect(),
            source: a.source.iter().copied().chain(b.source.iter().map(|x| x + na)).collect(),
            target: a.target.iter().copied().chain(b.target.iter().map(|x| x + na)).collect(),
            ids: a.ids.iter().copied().chain(b.ids.iter().map(|x| x + ka)).collect(),
            compose,
            inverse: a.inverse.iter().copied().chain(b.inverse.iter().map(|x| x + ka)).collect(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.names.len()
    }

    pub fn object_name(&self, x: usize) -> &str {
        &self.objects[x]
    }

    pub fn name(&self, g: Morphism) -> &str {
        &self.names[g]
    }

    pub fn source(&self, g: Morphism) -> usize {
        self.source[g]
    }

    pub fn target(&self, g: Morphism) -> usize {
        self.target[g]
    }

    /// The identity morphism of object `x`.
    pub fn identity(&self, x: usize) -> Morphism {
        self.ids[x]
    }

    pub fn compose(&self, g: Morphism, h: Morphism) -> Option<Morphism> {
        self.compose[g * self.morphism_count() + h]
    }

    pub fn inv(&self, g: Morphism) -> Morphism {
        self.inverse[g]
    }

    pub fn is_identity(&self, g: Morphism) -> bool {
        self.ids[self.source[g]] == g
    }

    /// Morphisms `x -> y`.
    pub fn hom(&self, x: usize, y: usize) -> Vec<Morphism> {
        (0..self.morphism_count()).filter(|&g| self.source[g] == x && self.target[g] == y).collect()
    }

    /// The isotropy group at `x` with the morphism behind each element; the
    /// identity comes first.
    pub fn isotropy(&self, x: usize) -> (FiniteGroup, Vec<Morphism>) {
        let mut ms = self.hom(x, x);
        ms.sort_by_key(|&g| g != self.ids[x]);
        let pos: BTreeMap<Morphism, usize> = ms.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let table = ms
            .iter()
            .map(|&g| ms.iter().map(|&h| pos[&self.compose(g, h).expect("isotropy closed")]).collect())
            .collect();
        let grp = FiniteGroup::from_table(format!("{}({})", self.label, self.objects[x]), table)
            .expect("isotropy of a valid groupoid is a group")
            .with_names(ms.iter().map(|&g| self.names[g].clone()).collect())
            .expect("one name per element");
        (grp, ms)
    }

    pub fn composition_table(&self) -> Vec<Vec<Option<Morphism>>> {
        self.compose.chunks(self.morphism_count()).map(|c| c.to_vec()).collect()
    }

    pub fn sources(&self) -> &[usize] {
        &self.source
    }

    pub fn targets(&self) -> &[usize] {
        &self.target
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Checks composability, endpoints of products, associativity, identities and
/// inverses on every morphism.
pub fn verify_groupoid(g: &FiniteGroupoid) -> Report {
    let mut rep = Report::new(format!("groupoid {}", g.label));
    let k = g.morphism_count();
    for a in 0..k {
        for b in 0..k {
            match g.compose(a, b) {
                Some(ab) => {
                    if g.target[b] != g.source[a] {
                        rep.push("composable iff t(h) = s(g)", format!("{} {} defined", g.names[a], g.names[b]));
                    } else if g.source[ab] != g.source[b] || g.target[ab] != g.target[a] {
                        rep.push("endpoints of products", format!("{} {}", g.names[a], g.names[b]));
                    }
                }
                None if g.target[b] == g.source[a] => {
                    rep.push("composable iff t(h) = s(g)", format!("{} {} undefined", g.names[a], g.names[b]))
                }
                None => {}
            }
        }
    }
    if !rep.is_ok() {
        return rep;
    }
    for a in 0..k {
        for b in 0..k {
            let Some(ab) = g.compose(a, b) else { continue };
            for c in 0..k {
                let Some(bc) = g.compose(b, c) else { continue };
                if g.compose(ab, c) != g.compose(a, bc) {
                    rep.push("associativity", format!("({}, {}, {})", g.names[a], g.names[b], g.names[c]));
                }
            }
        }
    }
    for (x, &u) in g.ids.iter().enumerate() {
        if g.source[u] != x || g.target[u] != x {
            rep.push("identity", format!("identity of {} has wrong endpoints", g.objects[x]));
        }
        for a in 0..k {
            if (g.source[a] == x && g.compose(a, u) != Some(a)) || (g.target[a] == x && g.compose(u, a) != Some(a)) {
                rep.push("identity", format!("{} at {}", g.names[a], g.objects[x]));
            }
        }
    }
    for a in 0..k {
        let b = g.inverse[a];
        if g.compose(b, a) != Some(g.ids[g.source[a]]) || g.compose(a, b) != Some(g.ids[g.target[a]]) {
            rep.push("inverse", g.names[a].clone());
        }
    }
    rep
}

/// Objects grouped by the relation `Γ(x, y) ≠ ∅`, in order of first object.
pub fn connected_components(g: &FiniteGroupoid) -> Vec<Vec<usize>> {
    let n = g.object_count();
    let mut uf = UnionFind::<usize>::new(n);
    for a in 0..g.morphism_count() {
        uf.union(g.source[a], g.target[a]);
    }
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for x in 0..n {
        by_root.entry(uf.find(x)).or_default().push(x);
    }
    let mut comps: Vec<Vec<usize>> = by_root.into_values().collect();
    comps.sort_by_key(|c| c[0]);
    comps
}

pub fn is_connected(g: &FiniteGroupoid) -> bool {
    connected_components(g).len() == 1
}

/// The map `g ↦ ((s(g), t(g)), h_{t(g)}^-1 g h_{s(g)})` onto `Γ_0^2 × Γ(x)`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub target: FiniteGroupoid,
    pub isotropy: FiniteGroup,
    pub isotropy_morphisms: Vec<Morphism>,
    pub map: Vec<Morphism>,
}

impl Decomposition {
    /// Splits a morphism of the product into the coarse pair and isotropy index.
    pub fn split(&self, u: Morphism) -> ((usize, usize), usize) {
        let k = self.isotropy.order();
        let n = (self.target.morphism_count() / k).isqrt();
        let pair = u / k;
        ((pair / n, pair % n), u % k)
    }
}

/// Builds the decomposition map for a connected groupoid and checks that it is
/// a bijective functor on every composable pair.
pub fn connected_decomposition_iso(g: &FiniteGroupoid, x: usize, h: &[Morphism]) -> Result<Decomposition> {
    if !is_connected(g) {
        return Err(Error::NotConnected);
    }
    let n = g.object_count();
    if x >= n || h.len() != n {
        return Err(Error::InvalidParameters("need a base object and one morphism per object".into()));
    }
    for y in 0..n {
        if h[y] >= g.morphism_count() || g.source[h[y]] != x || g.target[h[y]] != y {
            return Err(Error::InvalidParameters(format!("h_{} is not a morphism {} -> {}", g.objects[y], g.objects[x], g.objects[y])));
        }
    }
    if h[x] != g.ids[x] {
        return Err(Error::InvalidParameters("h_x must be the identity of x".into()));
    }
    let (iso, ms) = g.isotropy(x);
    let k = iso.order();
    let target = FiniteGroupoid::product(&FiniteGroupoid::coarse(n), &FiniteGroupoid::from_group(&iso));
    let pos: BTreeMap<Morphism, usize> = ms.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut map = Vec::with_capacity(g.morphism_count());
    for a in 0..g.morphism_count() {
        let (s, t) = (g.source[a], g.target[a]);
        let inner = g.compose(a, h[s]).expect("h_s ends at s");
        let gx = g.compose(g.inverse[h[t]], inner).expect("h_t^-1 starts at t");
        let idx = *pos.get(&gx).ok_or_else(|| Error::IsomorphismCheckFailed(format!("{} does not land in the isotropy group", g.names[a])))?;
        map.push((s * n + t) * k + idx);
    }
    if ElemSet::from_iter(target.morphism_count(), map.iter().map(|&u| u as Elem)).len() != target.morphism_count()
        || map.len() != target.morphism_count()
    {
        return Err(Error::IsomorphismCheckFailed("decomposition map is not bijective".into()));
    }
    for a in 0..g.morphism_count() {
        for b in 0..g.morphism_count() {
            let lhs = g.compose(a, b).map(|ab| map[ab]);
            let rhs = target.compose(map[a], map[b]);
            if lhs != rhs {
                return Err(Error::IsomorphismCheckFailed(format!("composition of {} and {}", g.names[a], g.names[b])));
            }
        }
    }
    Ok(Decomposition { target, isotropy: iso, isotropy_morphisms: ms, map })
}

/// `alpha = (A_g, alpha_g)` over a groupoid: `A_g` is an ideal of `A_{t(g)}` and
/// `alpha_g : A_{g^-1} -> A_g`. The object ideal `A_x` is the domain of the
/// identity of `x`.
#[derive(Clone, Debug)]
pub struct PartialGroupoidAction {
    pub groupoid: Arc<FiniteGroupoid>,
    pub ring: RingRef,
    pub domains: Vec<ElemSet>,
    pub maps: Vec<PartialMap>,
}

impl PartialGroupoidAction {
    pub fn new(groupoid: Arc<FiniteGroupoid>, ring: RingRef, domains: Vec<ElemSet>, maps: Vec<PartialMap>) -> Result<Self> {
        let k = groupoid.morphism_count();
        if domains.len() != k || maps.len() != k {
            return Err(Error::ShapeMismatch(format!("need {k} domains and maps")));
        }
        if domains.iter().any(|d| d.universe() != ring.order()) || maps.iter().any(|m| m.universe() != ring.order()) {
            return Err(Error::ShapeMismatch("domain or map over the wrong carrier".into()));
        }
        Ok(PartialGroupoidAction { groupoid, ring, domains, maps })
    }

    pub fn object_ideal(&self, x: usize) -> &ElemSet {
        &self.domains[self.groupoid.identity(x)]
    }

    pub fn apply(&self, g: Morphism, a: Elem) -> Option<Elem> {
        self.maps[g].get(a)
    }
}

/// Checks the ideal structure, that every map is a ring isomorphism
/// `A_{g^-1} -> A_g`, identities on objects, and the preimage and composition
/// conditions for composable pairs.
pub fn verify_groupoid_action(a: &PartialGroupoidAction, _budget: &Budget) -> Report {
    let gd = &a.groupoid;
    let r = a.ring.as_ref();
    let mut rep = Report::new(format!("partial action of {} on {}", gd.label(), r.label()));
    for x in 0..gd.object_count() {
        if !is_ideal(r, a.object_ideal(x)) {
            rep.push("object ideal", gd.object_name(x).to_string());
        }
    }
    for g in 0..gd.morphism_count() {
        let d = &a.domains[g];
        let t = a.object_ideal(gd.target(g));
        if !d.is_subset(t) || !d.contains(r.zero()) {
            rep.push("ideal of the target ideal", gd.name(g).to_string());
            continue;
        }
        let gens = set_generators(r, d);
        let tg = set_generators(r, t);
        let closed = gens.iter().all(|&x| {
            d.contains(r.neg(x))
                && d.members().iter().all(|&y| d.contains(r.add(x, y)))
                && tg.iter().all(|&s| d.contains(r.mul(s, x)) && d.contains(r.mul(x, s)))
        });
        if !closed {
            rep.push("ideal of the target ideal", gd.name(g).to_string());
        }
    }
    if !rep.is_ok() {
        return rep;
    }
    for g in 0..gd.morphism_count() {
        let dinv = &a.domains[gd.inv(g)];
        let m = &a.maps[g];
        if m.domain() != *dinv {
            rep.push("domain", format!("alpha_{} is not defined exactly on A_{}", gd.name(g), gd.name(gd.inv(g))));
            continue;
        }
        if m.image(r.order()) != a.domains[g] {
            rep.push("bijection", format!("alpha_{} is not onto A_{}", gd.name(g), gd.name(g)));
            continue;
        }
        if let Some((c, w)) = hom_violation_on(r, dinv, r, &|x| m.at(x)) {
            rep.push(c, format!("alpha_{} at {w}", gd.name(g)));
        }
    }
    for x in 0..gd.object_count() {
        let u = gd.identity(x);
        if let Some(&y) = a.object_ideal(x).members().iter().find(|&&y| a.maps[u].get(y) != Some(y)) {
            rep.push("identity at objects", format!("alpha_{} moves {}", gd.name(u), r.show(y)));
        }
    }
    if !rep.is_ok() {
        return rep;
    }
    for g in 0..gd.morphism_count() {
        let dginv = &a.domains[gd.inv(g)];
        for h in 0..gd.morphism_count() {
            let Some(gh) = gd.compose(g, h) else { continue };
            let target = &a.domains[gd.inv(gh)];
            for &x in a.domains[gd.inv(h)].members() {
                let hx = a.maps[h].at(x);
                if !dginv.contains(hx) {
                    continue;
                }
                if !target.contains(x) {
                    rep.push("preimage condition", format!("g = {}, h = {}, x = {}", gd.name(g), gd.name(h), r.show(x)));
                } else if a.maps[g].get(hx) != a.maps[gh].get(x) {
                    rep.push("composition", format!("g = {}, h = {}, x = {}", gd.name(g), gd.name(h), r.show(x)));
                }
            }
        }
    }
    rep
}

/// Base object `x` and morphisms `h_y : x -> y` with `h_x = x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupTypeData {
    pub base: usize,
    pub h: Vec<Morphism>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupoidClassification {
    pub global: bool,
    /// `1_g` with `A_g = A 1_g`, when every domain has one.
    pub units: Option<Vec<Elem>>,
    pub group_type: Option<GroupTypeData>,
}

impl GroupoidClassification {
    pub fn unital(&self) -> bool {
        self.units.is_some()
    }
}

/// Whether `data` satisfies `A_{h_y^-1} = A_x` and `A_{h_y} = A_y` for all `y`.
pub fn check_group_type(a: &PartialGroupoidAction, data: &GroupTypeData) -> Result<()> {
    let gd = &a.groupoid;
    let n = gd.object_count();
    if data.base >= n || data.h.len() != n {
        return Err(Error::NotGroupType("need a base object and one morphism per object".into()));
    }
    if data.h[data.base] != gd.identity(data.base) {
        return Err(Error::NotGroupType("h_x is not the identity of x".into()));
    }
    for y in 0..n {
        let h = data.h[y];
        if h >= gd.morphism_count() || gd.source(h) != data.base || gd.target(h) != y {
            return Err(Error::NotGroupType(format!("h_{} is not a morphism from the base", gd.object_name(y))));
        }
        if a.domains[gd.inv(h)] != *a.object_ideal(data.base) || a.domains[h] != *a.object_ideal(y) {
            return Err(Error::NotGroupType(format!("{} does not have full domains", gd.name(h))));
        }
    }
    Ok(())
}

/// Tries every base object and, per object, every morphism from the base; the
/// first admissible system in index order is returned.
pub fn find_group_type(a: &PartialGroupoidAction) -> Option<GroupTypeData> {
    let gd = &a.groupoid;
    let n = gd.object_count();
    'base: for x in 0..n {
        let mut h = Vec::with_capacity(n);
        for y in 0..n {
            let pick = if y == x {
                Some(gd.identity(x))
            } else {
                gd.hom(x, y)
                    .into_iter()
                    .find(|&m| a.domains[gd.inv(m)] == *a.object_ideal(x) && a.domains[m] == *a.object_ideal(y))
            };
            match pick {
                Some(m) => h.push(m),
                None => continue 'base,
            }
        }
        return Some(GroupTypeData { base: x, h });
    }
    None
}

pub fn classify_groupoid_action(a: &PartialGroupoidAction) -> GroupoidClassification {
    let gd = &a.groupoid;
    let global = (0..gd.morphism_count()).all(|g| a.domains[g] == *a.object_ideal(gd.target(g)));
    let units: Option<Vec<Elem>> = a.domains.iter().map(|d| ideal_unit(a.ring.as_ref(), d)).collect();
    GroupoidClassification { global, units, group_type: find_group_type(a) }
}

/// The partial skew groupoid ring, with identity `Σ_y 1_y δ_y`.
pub fn skew_groupoid_ring(a: &PartialGroupoidAction, budget: &Budget) -> Result<SkewRing> {
    let gd = &a.groupoid;
    let r = a.ring.as_ref();
    let mut identity = Vec::with_capacity(gd.object_count());
    for y in 0..gd.object_count() {
        let u = ideal_unit(r, a.object_ideal(y)).ok_or_else(|| Error::NotUnital(format!("A_{} has no unit", gd.object_name(y))))?;
        identity.push((gd.identity(y), u));
    }
    if let Some(g) = (0..gd.morphism_count()).find(|&g| ideal_unit(r, &a.domains[g]).is_none()) {
        return Err(Error::NotUnital(format!("A_{} has no unit", gd.name(g))));
    }
    let idx = IndexStructure {
        names: gd.names().to_vec(),
        inverse: (0..gd.morphism_count()).map(|g| gd.inv(g)).collect(),
        compose: gd.compose.clone(),
    };
    SkewRing::new(format!("{}*{}", r.label(), gd.label()), a.ring.clone(), &a.domains, &a.maps, idx, &identity, budget)
}

/// A skew ring over a coarse groupoid presented as a generalized matrix ring
/// with `M_ij = A_i δ_(j,i)`, and the isomorphism between them.
#[derive(Clone, Debug)]
pub struct SkewMatrix {
    pub skew: Arc<SkewRing>,
    pub ring: Arc<GenMatrixRing>,
    /// `R_i = A 1_i` inside the base ring.
    pub corners: Vec<Arc<SubRing>>,
    /// `Σ a_u δ_u ↦` the matrix with `a_u` at entry `(t(u), s(u))`.
    pub phi: RingMorphism,
}

/// For a global unital action of a coarse groupoid `I_n^2` with
/// `A_(i,j) = A_j`, builds `R` with `M_ij = A_i δ_(j,i)`, left action by
/// multiplication, right action `s · t = s theta_ji(t)` and products
/// `r theta_ji(s)`, then checks that `phi` is a ring isomorphism on every pair.
pub fn skew_as_genmatrix(theta: &PartialGroupoidAction, budget: &Budget) -> Result<SkewMatrix> {
    let gd = &theta.groupoid;
    let n = gd.object_count();
    let coarse = FiniteGroupoid::coarse(n);
    if gd.morphism_count() != n * n
        || (0..n * n).any(|u| gd.source(u) != coarse.source(u) || gd.target(u) != coarse.target(u))
        || gd.compose != coarse.compose
    {
        return Err(Error::InvalidParameters("action must be over the coarse groupoid in standard numbering".into()));
    }
    let cls = classify_groupoid_action(theta);
    if !cls.global {
        return Err(Error::InvalidParameters("action on the coarse groupoid must be global".into()));
    }
    let a = theta.ring.clone();
    let mut corners = Vec::with_capacity(n);
    for i in 0..n {
        let u = ideal_unit(a.as_ref(), theta.object_ideal(i)).ok_or_else(|| Error::NotUnital(format!("A_{} has no unit", i + 1)))?;
        let mut c = SubRing::corner(a.clone(), u)?;
        c = SubRing::new(a.clone(), &c.as_parent_set(), u, format!("A{}", i + 1))?;
        corners.push(Arc::new(c));
    }
    let rings: Vec<RingRef> = corners.iter().map(|c| c.clone() as RingRef).collect();
    // theta_ji : A_j -> A_i is the map of the morphism (j, i).
    let th = |j: usize, i: usize, x: Elem| -> Elem {
        let y = theta.maps[j * n + i].at(corners[j].to_parent(x));
        corners[i].from_parent(y).expect("theta lands in the target corner")
    };
    let mut modules = BTreeMap::new();
    let mut products = BTreeMap::new();
    for i in 0..n {
        let ri = &corners[i];
        let sz = ri.order();
        let add: Vec<Vec<Elem>> = (0..sz as Elem).map(|x| (0..sz as Elem).map(|y| ri.add(x, y)).collect()).collect();
        let lact: Vec<Vec<Elem>> = (0..sz as Elem).map(|x| (0..sz as Elem).map(|y| ri.mul(x, y)).collect()).collect();
        for j in 0..n {
            if i == j {
                continue;
            }
            let ract: Vec<Vec<Elem>> = (0..sz as Elem)
                .map(|s| (0..corners[j].order() as Elem).map(|t| ri.mul(s, th(j, i, t))).collect())
                .collect();
            let m = Bimodule::from_tables(format!("A{}d({},{})", i + 1, j + 1, i + 1), rings[i].clone(), rings[j].clone(), &add, &lact, &ract)?;
            modules.insert((i, j), m);
            for k in 0..n {
                if j == k {
                    continue;
                }
                let t: Vec<Elem> = (0..sz as Elem)
                    .flat_map(|r| (0..corners[j].order() as Elem).map(move |s| (r, s)))
                    .map(|(r, s)| ri.mul(r, th(j, i, s)))
                    .collect();
                products.insert((i, j, k), t);
            }
        }
    }
    let mut gm = build_genmatrix(GenMatrixSpec { rings: rings.clone(), modules, products }, budget)?;
    gm.set_label(format!("R({})", a.label()));
    let ring = Arc::new(gm);
    let skew = Arc::new(skew_groupoid_ring(theta, budget)?);
    if skew.order() != ring.order() {
        return Err(Error::IsomorphismCheckFailed(format!("|skew| = {}, |R| = {}", skew.order(), ring.order())));
    }
    let mut map = Vec::with_capacity(skew.order());
    for x in 0..skew.order() as Elem {
        let comps = skew.components(x);
        let mut blocks = vec![0; n * n];
        for (u, &c) in comps.iter().enumerate() {
            let (s, t) = (u / n, u % n);
            blocks[t * n + s] = corners[t].from_parent(c).expect("component in A_t");
        }
        map.push(ring.encode(&blocks));
    }
    let phi = RingMorphism::new(skew.clone(), ring.clone(), map)?;
    if !phi.is_bijective() {
        return Err(Error::IsomorphismCheckFailed("phi is not bijective".into()));
    }
    let rep = phi.verify_exhaustive();
    if !rep.is_ok() {
        return Err(Error::IsomorphismCheckFailed(rep.to_string()));
    }
    Ok(SkewMatrix { skew, ring, corners, phi })
}

/// The global action of `I_n^2` on `R_1^n` with `theta_(i,j) = theta_j theta_i^-1`
/// moving coordinate `i` to coordinate `j`; `thetas[i]` is an automorphism of
/// `R_1` and `thetas[0]` must be the identity.
pub fn theta_action(r1: RingRef, thetas: &[Vec<Elem>], budget: &Budget) -> Result<PartialGroupoidAction> {
    let n = thetas.len();
    if n == 0 || thetas.iter().any(|t| t.len() != r1.order()) {
        return Err(Error::ShapeMismatch("need one automorphism table per index".into()));
    }
    if thetas[0].iter().enumerate().any(|(x, &y)| x as Elem != y) {
        return Err(Error::InvalidParameters("theta_1 must be the identity".into()));
    }
    let inv: Vec<Vec<Elem>> = thetas
        .iter()
        .map(|t| {
            PartialMap { table: t.clone() }
                .inverse(r1.order())
                .map(|m| m.table)
                .ok_or_else(|| Error::InvalidParameters("theta_i is not bijective".into()))
        })
        .collect::<Result<_>>()?;
    let p = crate::ring::DirectProduct::power(r1.clone(), n, budget)?;
    let a = p.ring();
    let gd = Arc::new(FiniteGroupoid::coarse(n));
    let mut domains = Vec::with_capacity(n * n);
    let mut maps = Vec::with_capacity(n * n);
    for u in 0..n * n {
        let (i, j) = (u / n, u % n);
        domains.push(ElemSet::from_iter(a.order(), (0..r1.order() as Elem).map(|x| p.inject(j, x))));
        let pairs = (0..r1.order() as Elem).map(|x| (p.inject(i, x), p.inject(j, thetas[j][inv[i][x as usize] as usize])));
        maps.push(PartialMap::from_pairs(a.order(), pairs)?);
    }
    PartialGroupoidAction::new(gd, a, domains, maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{verify_ring, zn, DirectProduct};

    #[test]
    fn coarse_composition_and_components() {
        let c = FiniteGroupoid::coarse(3);
        assert!(verify_groupoid(&c).is_ok());
        // (2,3)(1,2) = (1,3)
        assert_eq!(c.compose(3 + 2, 1), Some(2));
        // (1,2)(2,3) is not composable: t(2,3) = 3, s(1,2) = 1.
        assert_eq!(c.compose(1, 5), None);
        assert!(is_connected(&c));
        let u = FiniteGroupoid::disjoint_union(&FiniteGroupoid::coarse(2), &c);
        assert!(verify_groupoid(&u).is_ok());
        assert_eq!(connected_components(&u), vec![vec![0, 1], vec![2, 3, 4]]);
        let one = FiniteGroupoid::coarse(1);
        assert_eq!(one.morphism_count(), 1);
        assert!(one.is_identity(0));
    }

    #[test]
    fn from_tables_derives_identities_and_rejects_bad_tables() {
        let c = FiniteGroupoid::coarse(2);
        let g = FiniteGroupoid::from_tables(
            "c2",
            c.object_names().to_vec(),
            c.names().to_vec(),
            c.sources().to_vec(),
            c.targets().to_vec(),
            c.composition_table(),
        )
        .unwrap();
        assert_eq!(g.identity(1), 3);
        assert_eq!(g.inv(1), 2);
        let mut bad = c.composition_table();
        bad[1][2] = None;
        assert!(FiniteGroupoid::from_tables("bad", c.object_names().to_vec(), c.names().to_vec(), c.sources().to_vec(), c.targets().to_vec(), bad).is_err());
    }

    #[test]
    fn decomposition_with_isotropy_c2() {
        let g = FiniteGroupoid::product(&FiniteGroupoid::coarse(2), &FiniteGroupoid::from_group(&FiniteGroup::cyclic(2)));
        assert_eq!(g.morphism_count(), 8);
        // h_2 = ((1,2), g) instead of the obvious choice.
        let h = vec![g.identity(0), 3];
        assert_eq!(g.source(3), 0);
        let d = connected_decomposition_iso(&g, 0, &h).unwrap();
        assert_eq!(d.isotropy.order(), 2);
        assert_eq!(d.map.len(), 8);
        let e = connected_decomposition_iso(&FiniteGroupoid::coarse(2), 0, &[0, 1]).unwrap();
        assert_eq!(e.isotropy.order(), 1);
        assert!(matches!(
            connected_decomposition_iso(&FiniteGroupoid::disjoint_union(&FiniteGroupoid::coarse(1), &FiniteGroupoid::coarse(1)), 0, &[0, 1]),
            Err(Error::NotConnected)
        ));
    }

    #[test]
    fn theta_action_is_global_unital_group_type() {
        let b = Budget::default();
        let z2 = DirectProduct::power(zn(2).unwrap(), 2, &b).unwrap();
        let swap: Vec<Elem> = (0..4).map(|x| z2.encode(&[z2.decode(x)[1], z2.decode(x)[0]])).collect();
        let a = theta_action(z2.ring(), &[(0..4).collect(), swap], &b).unwrap();
        assert!(verify_groupoid_action(&a, &b).is_ok());
        let c = classify_groupoid_action(&a);
        assert!(c.global && c.unital());
        assert_eq!(c.group_type, Some(GroupTypeData { base: 0, h: vec![0, 1] }));
        let s = skew_groupoid_ring(&a, &b).unwrap();
        assert_eq!(s.order(), 256);
        assert!(verify_ring(&s, &b).is_ok());
    }

    #[test]
    fn coarse_skew_ring_is_a_matrix_ring() {
        let b = Budget::default();
        let a = theta_action(zn(2).unwrap(), &[vec![0, 1], vec![0, 1]], &b).unwrap();
        let sm = skew_as_genmatrix(&a, &b).unwrap();
        assert_eq!(sm.ring.order(), 16);
        assert!(sm.phi.is_bijective());
    }
}
