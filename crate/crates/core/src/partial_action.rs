//! Partial group actions on finite rings.

use serde::Serialize;
use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GElem};
use crate::report::Report;
use crate::ring::{
    all_ideals, hom_violation_on, ideal_unit, ideal_violation, isomorphisms_between, set_product, FiniteRing,
    RingRef, SubRing,
};
use crate::set::{Elem, ElemSet, NONE};

/// A partial function on a dense carrier, `NONE` where undefined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialMap {
    pub table: Vec<Elem>,
}

impl PartialMap {
    pub fn undefined(universe: usize) -> Self {
        PartialMap { table: vec![NONE; universe] }
    }

    pub fn identity_on(set: &ElemSet) -> Self {
        let mut m = Self::undefined(set.universe());
        for &x in set.members() {
            m.table[x as usize] = x;
        }
        m
    }

    pub fn from_pairs(universe: usize, pairs: impl IntoIterator<Item = (Elem, Elem)>) -> Result<Self> {
        let mut m = Self::undefined(universe);
        for (a, b) in pairs {
            if a as usize >= universe {
                return Err(Error::ShapeMismatch(format!("map argument {a} outside carrier")));
            }
            if m.table[a as usize] != NONE && m.table[a as usize] != b {
                return Err(Error::ShapeMismatch(format!("map assigns two values to {a}")));
            }
            m.table[a as usize] = b;
        }
        Ok(m)
    }

    #[inline]
    pub fn get(&self, x: Elem) -> Option<Elem> {
        match self.table.get(x as usize) {
            Some(&y) if y != NONE => Some(y),
            _ => None,
        }
    }

    #[inline]
    pub fn at(&self, x: Elem) -> Elem {
        self.table[x as usize]
    }

    pub fn set(&mut self, x: Elem, y: Elem) {
        self.table[x as usize] = y;
    }

    pub fn universe(&self) -> usize {
        self.table.len()
    }

    pub fn domain(&self) -> ElemSet {
        ElemSet::from_iter(self.universe(), (0..self.universe() as Elem).filter(|&x| self.at(x) != NONE))
    }

    pub fn image(&self, target_universe: usize) -> ElemSet {
        ElemSet::from_iter(target_universe, self.table.iter().copied().filter(|&y| y != NONE))
    }

    pub fn pairs(&self) -> Vec<(Elem, Elem)> {
        (0..self.universe() as Elem).filter_map(|x| self.get(x).map(|y| (x, y))).collect()
    }

    /// Inverse on the image, if injective. `target_universe` sizes the result.
    pub fn inverse(&self, target_universe: usize) -> Option<PartialMap> {
        let mut inv = PartialMap::undefined(target_universe);
        for (x, y) in self.pairs() {
            if inv.table[y as usize] != NONE {
                return None;
            }
            inv.table[y as usize] = x;
        }
        Some(inv)
    }

    /// Restriction to `set`.
    pub fn restrict(&self, set: &ElemSet) -> PartialMap {
        let mut m = PartialMap::undefined(self.universe());
        for &x in set.members() {
            m.table[x as usize] = self.table[x as usize];
        }
        m
    }
}

/// `alpha = (D_g, alpha_g)`: ideals `D_g` and maps `alpha_g : D_{g^-1} -> D_g`.
#[derive(Clone, Debug)]
pub struct PartialGroupAction {
    pub group: Arc<FiniteGroup>,
    pub ring: RingRef,
    pub domains: Vec<ElemSet>,
    pub maps: Vec<PartialMap>,
}

impl PartialGroupAction {
    /// Checks only shapes: one domain and one map per group element, each map
    /// defined exactly on `D_{g^-1}` with values in `D_g`.
    pub fn new(group: Arc<FiniteGroup>, ring: RingRef, domains: Vec<ElemSet>, maps: Vec<PartialMap>) -> Result<Self> {
        let n = group.order();
        if domains.len() != n || maps.len() != n {
            return Err(Error::ShapeMismatch(format!("need {n} domains and maps")));
        }
        for g in 0..n {
            if domains[g].universe() != ring.order() || maps[g].universe() != ring.order() {
                return Err(Error::ShapeMismatch(format!("domain or map for {} has wrong carrier", group.name(g))));
            }
        }
        for g in 0..n {
            let dinv = &domains[group.inv(g)];
            if maps[g].domain() != *dinv {
                return Err(Error::ShapeMismatch(format!(
                    "map for {} must be defined exactly on D_{}",
                    group.name(g),
                    group.name(group.inv(g))
                )));
            }
            if let Some(x) = dinv.members().iter().find(|&&x| !domains[g].contains(maps[g].at(x))) {
                return Err(Error::ShapeMismatch(format!(
                    "map for {} sends {} outside D_{}",
                    group.name(g),
                    ring.show(*x),
                    group.name(g)
                )));
            }
        }
        Ok(PartialGroupAction { group, ring, domains, maps })
    }

    /// A global action given by one automorphism table per group element.
    pub fn global(group: Arc<FiniteGroup>, ring: RingRef, autos: Vec<Vec<Elem>>) -> Result<Self> {
        let full = ElemSet::full(ring.order());
        let maps = autos
            .into_iter()
            .map(|t| {
                if t.len() != ring.order() {
                    Err(Error::ShapeMismatch("automorphism table has wrong length".into()))
                } else {
                    Ok(PartialMap { table: t })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(group.clone(), ring, vec![full; group.order()], maps)
    }

    /// The trivial action: `D_g = A`, `alpha_g = id`.
    pub fn trivial(group: Arc<FiniteGroup>, ring: RingRef) -> Self {
        let id = (0..ring.order() as Elem).collect::<Vec<_>>();
        let n = group.order();
        Self::global(group, ring, vec![id; n]).expect("identity maps have the right shape")
    }

    pub fn apply(&self, g: GElem, x: Elem) -> Option<Elem> {
        self.maps[g].get(x)
    }

    /// The restriction to the ideal `I = Ae` for a central idempotent `e`, as a
    /// partial action on the corner ring `Ae`:
    /// `D'_g = I ∩ alpha_g(I ∩ D_{g^-1})`.
    pub fn restrict_to_corner(&self, e: Elem) -> Result<Self> {
        let corner = SubRing::corner(self.ring.clone(), e)?;
        let ideal = corner.as_parent_set();
        let n = self.group.order();
        let mut domains = Vec::with_capacity(n);
        for g in 0..n {
            let src = ideal.intersection(&self.domains[self.group.inv(g)]);
            let img = ElemSet::from_iter(self.ring.order(), src.members().iter().map(|&x| self.maps[g].at(x)));
            let d = ideal.intersection(&img);
            domains.push(ElemSet::from_iter(corner.order(), d.members().iter().map(|&x| corner.from_parent(x).expect("in corner"))));
        }
        let mut maps = Vec::with_capacity(n);
        for g in 0..n {
            let mut m = PartialMap::undefined(corner.order());
            for &x in domains[self.group.inv(g)].members() {
                let y = self.maps[g].at(corner.to_parent(x));
                m.set(x, corner.from_parent(y).ok_or_else(|| Error::ShapeMismatch("restriction leaves the corner".into()))?);
            }
            maps.push(m);
        }
        Self::new(self.group.clone(), Arc::new(corner), domains, maps)
    }
}

/// Checks that the domains are ideals, the maps are ring isomorphisms, and the
/// identity, preimage and composition axioms hold.
pub fn verify_partial_action(a: &PartialGroupAction, _budget: &Budget) -> Report {
    let g = &a.group;
    let r = a.ring.as_ref();
    let mut rep = Report::new(format!("partial action of {} on {}", g.label(), r.label()));
    for x in g.elements() {
        if let Some(w) = ideal_violation(r, &a.domains[x]) {
            rep.push("domain is an ideal", format!("D_{}: {w}", g.name(x)));
        }
    }
    for x in g.elements() {
        let dinv = &a.domains[g.inv(x)];
        let img = a.maps[x].image(r.order());
        if img != a.domains[x] || img.len() != dinv.len() {
            rep.push("isomorphism onto domain", format!("alpha_{} is not a bijection onto D_{}", g.name(x), g.name(x)));
            continue;
        }
        let m = &a.maps[x];
        if let Some((c, w)) = hom_violation_on(r, dinv, r, &|y| m.at(y)) {
            rep.push(format!("alpha_g is {c}"), format!("g = {}, {w}", g.name(x)));
        }
    }
    let e = g.identity();
    if a.domains[e].len() != r.order() {
        rep.push("identity domain is the ring", format!("|D_e| = {}", a.domains[e].len()));
    }
    for y in 0..r.order() as Elem {
        if a.maps[e].get(y) != Some(y) {
            rep.push("alpha_e is the identity", r.show(y));
            break;
        }
    }
    if !rep.is_ok() {
        return rep;
    }
    let inverses: Vec<PartialMap> = a.maps.iter().map(|m| m.inverse(r.order()).expect("bijection")).collect();
    for x in g.elements() {
        for h in g.elements() {
            let gh = g.op(x, h);
            let target = &a.domains[g.inv(gh)];
            for &y in a.domains[h].intersection(&a.domains[g.inv(x)]).members() {
                let pre = inverses[h].at(y);
                if !target.contains(pre) {
                    rep.push(
                        "preimage condition",
                        format!("g = {}, h = {}, alpha_h^-1({}) = {} not in D_(gh)^-1", g.name(x), g.name(h), r.show(y), r.show(pre)),
                    );
                    continue;
                }
                let lhs = a.maps[x].at(a.maps[h].at(pre));
                let rhs = a.maps[gh].at(pre);
                if lhs != rhs {
                    rep.push(
                        "composition",
                        format!("g = {}, h = {}, a = {}: {} != {}", g.name(x), g.name(h), r.show(pre), r.show(lhs), r.show(rhs)),
                    );
                }
            }
        }
    }
    rep
}

/// Checks the axioms of a product partial action.
pub fn verify_product_partial_action(a: &PartialGroupAction, budget: &Budget) -> Report {
    let g = &a.group;
    let r = a.ring.as_ref();
    let mut rep = Report::new(format!("product partial action of {} on {}", g.label(), r.label()));
    for x in g.elements() {
        if let Some(w) = ideal_violation(r, &a.domains[x]) {
            rep.push("domain is an ideal", format!("D_{}: {w}", g.name(x)));
        }
        let img = a.maps[x].image(r.order());
        if img != a.domains[x] || img.len() != a.domains[g.inv(x)].len() {
            rep.push("isomorphism onto domain", g.name(x).to_string());
        }
    }
    if !rep.is_ok() {
        return rep;
    }
    let e = g.identity();
    if a.domains[e].len() != r.order() || (0..r.order() as Elem).any(|y| a.maps[e].get(y) != Some(y)) {
        rep.push("identity", "D_e = A with alpha_e = id fails");
    }
    let _ = budget;
    let prod = |s: &ElemSet, t: &ElemSet| set_product(r, s, t);
    for x in g.elements() {
        if prod(&a.domains[x], &a.domains[x]) != a.domains[x] {
            rep.push("idempotent domains", format!("D_{}^2 != D_{}", g.name(x), g.name(x)));
        }
        for h in g.elements() {
            if prod(&a.domains[x], &a.domains[h]) != prod(&a.domains[h], &a.domains[x]) {
                rep.push("commuting domains", format!("({}, {})", g.name(x), g.name(h)));
            }
            let src = prod(&a.domains[g.inv(x)], &a.domains[h]);
            let img = ElemSet::from_iter(r.order(), src.members().iter().map(|&y| a.maps[x].at(y)));
            let want = prod(&a.domains[x], &a.domains[g.op(x, h)]);
            if img != want {
                rep.push("image of products", format!("alpha_{}(D_{} D_{}) != D_{} D_{}", g.name(x), g.name(g.inv(x)), g.name(h), g.name(x), g.name(g.op(x, h))));
            }
            let dom = prod(&a.domains[g.inv(h)], &a.domains[g.inv(g.op(x, h))]);
            for &y in dom.members() {
                let mid = a.maps[h].at(y);
                let lhs = a.maps[x].get(mid);
                if lhs != Some(a.maps[g.op(x, h)].at(y)) {
                    rep.push("composition", format!("g = {}, h = {}, a = {}", g.name(x), g.name(h), r.show(y)));
                }
            }
        }
    }
    rep
}

/// Finite intersections equal products. With idempotent, pairwise commuting
/// domains whose pairwise products are intersections, arbitrary sequences
/// reduce to subsets, which are checked in ascending order.
pub fn regularity_violation(a: &PartialGroupAction, budget: &Budget) -> Result<Option<String>> {
    let g = &a.group;
    let r = a.ring.as_ref();
    if g.order() > budget.max_group_order.max(16) {
        return Err(Error::BudgetExceeded {
            what: "regularity check over subsets".into(),
            size: g.order() as u128,
            limit: budget.max_group_order.max(16) as u128,
        });
    }
    let d = &a.domains;
    for x in g.elements() {
        if set_product(r, &d[x], &d[x]) != d[x] {
            return Ok(Some(format!("D_{}^2 != D_{}", g.name(x), g.name(x))));
        }
        for y in g.elements() {
            if set_product(r, &d[x], &d[y]) != d[x].intersection(&d[y]) {
                return Ok(Some(format!("D_{} D_{} != D_{} ∩ D_{}", g.name(x), g.name(y), g.name(x), g.name(y))));
            }
        }
    }
    let n = g.order();
    for mask in 1u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let mut inter = d[members[0]].clone();
        let mut prod = d[members[0]].clone();
        for &m in &members[1..] {
            inter = inter.intersection(&d[m]);
            prod = set_product(r, &prod, &d[m]);
        }
        if inter != prod {
            let names: Vec<&str> = members.iter().map(|&m| g.name(m)).collect();
            return Ok(Some(format!("intersection != product for {names:?}")));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub global: bool,
    /// Identities `1_g` of the domains when every domain is generated by a
    /// central idempotent.
    pub units: Option<Vec<Elem>>,
    pub regular: bool,
    pub product: bool,
}

impl Classification {
    pub fn unital(&self) -> bool {
        self.units.is_some()
    }
}

/// Identities of the domains, if the action is unital.
pub fn unit_idempotents(a: &PartialGroupAction) -> Option<Vec<Elem>> {
    a.domains.iter().map(|d| ideal_unit(a.ring.as_ref(), d)).collect()
}

pub fn classify(a: &PartialGroupAction, budget: &Budget) -> Result<Classification> {
    let global = a.domains.iter().all(|d| d.len() == a.ring.order());
    let units = unit_idempotents(a);
    let regular = regularity_violation(a, budget)?.is_none();
    let product = verify_product_partial_action(a, budget).is_ok();
    Ok(Classification { global, units, regular, product })
}

/// `phi : A -> B` is a ring isomorphism with `phi(A_g) = B_g` intertwining the maps.
pub fn check_equivalent(a: &PartialGroupAction, b: &PartialGroupAction, phi: &[Elem]) -> Report {
    let (ra, rb) = (a.ring.as_ref(), b.ring.as_ref());
    let mut rep = Report::new(format!("equivalence {} ~ {}", ra.label(), rb.label()));
    if phi.len() != ra.order() || ra.order() != rb.order() {
        rep.push("bijection", "carriers differ in size");
        return rep;
    }
    if ElemSet::from_iter(rb.order(), phi.iter().copied()).len() != rb.order() {
        rep.push("bijection", "phi is not injective");
        return rep;
    }
    if phi[ra.one() as usize] != rb.one() {
        rep.push("unital", rb.show(phi[ra.one() as usize]));
    }
    if let Some((c, w)) = hom_violation_on(ra, &ElemSet::full(ra.order()), rb, &|x| phi[x as usize]) {
        rep.push(format!("phi is {c}"), w);
    }
    compare_transport(a, b, phi, true, &mut rep);
    rep
}

/// `iota : A -> B` is an injective (not necessarily unital) ring morphism with
/// `iota(A_g) ⊆ B_g` intertwining the maps.
pub fn check_extension(a: &PartialGroupAction, b: &PartialGroupAction, iota: &[Elem]) -> Report {
    let (ra, rb) = (a.ring.as_ref(), b.ring.as_ref());
    let mut rep = Report::new(format!("extension {} -> {}", ra.label(), rb.label()));
    if iota.len() != ra.order() || ElemSet::from_iter(rb.order(), iota.iter().copied()).len() != ra.order() {
        rep.push("monomorphism", "iota is not injective");
        return rep;
    }
    if let Some((c, w)) = hom_violation_on(ra, &ElemSet::full(ra.order()), rb, &|x| iota[x as usize]) {
        rep.push(format!("iota is {c}"), w);
    }
    compare_transport(a, b, iota, false, &mut rep);
    rep
}

fn compare_transport(a: &PartialGroupAction, b: &PartialGroupAction, f: &[Elem], equal: bool, rep: &mut Report) {
    let g = &a.group;
    let (ra, rb) = (a.ring.as_ref(), b.ring.as_ref());
    for x in g.elements() {
        let img = ElemSet::from_iter(rb.order(), a.domains[x].members().iter().map(|&y| f[y as usize]));
        let ok = if equal { img == b.domains[x] } else { img.is_subset(&b.domains[x]) };
        if !ok {
            rep.push("domains correspond", format!("g = {}", g.name(x)));
        }
        for &y in a.domains[g.inv(x)].members() {
            let lhs = b.maps[x].get(f[y as usize]);
            let rhs = f[a.maps[x].at(y) as usize];
            if lhs != Some(rhs) {
                rep.push("maps correspond", format!("g = {}, x = {}", g.name(x), ra.show(y)));
            }
        }
    }
}

/// All partial actions of `group` on a small ring, by brute force over ideals
/// and isomorphisms between them. Candidates pair `alpha_{g^-1}` with the
/// inverse of `alpha_g` and are kept when they verify.
pub fn enumerate_partial_actions(group: Arc<FiniteGroup>, ring: RingRef, budget: &Budget) -> Result<Vec<PartialGroupAction>> {
    let r = ring.as_ref();
    budget.check_table("partial action enumeration", r.order() as u128)?;
    let ideals = all_ideals(r, budget)?;
    let g = group.clone();
    // One representative per {g, g^-1}, identity excluded.
    let reps: Vec<GElem> = g.elements().filter(|&x| x != 0 && x <= g.inv(x)).collect();
    let mut options: Vec<Vec<(usize, usize, Vec<Elem>)>> = Vec::new();
    for &x in &reps {
        let mut opts = Vec::new();
        for (i, di) in ideals.iter().enumerate() {
            for (j, dj) in ideals.iter().enumerate() {
                if di.len() != dj.len() {
                    continue;
                }
                // alpha_x : D_{x^-1} = di -> D_x = dj
                for m in isomorphisms_between(r, di, r, dj, 64) {
                    if x == g.inv(x) && i != j {
                        continue;
                    }
                    opts.push((i, j, m));
                }
            }
        }
        options.push(opts);
    }
    let total: u128 = options.iter().map(|o| o.len() as u128).product();
    if total > budget.max_search_states as u128 {
        return Err(Error::SearchSpaceExceeded(format!("{total} candidate partial actions")));
    }
    let mut out = Vec::new();
    if options.iter().any(|o| o.is_empty()) {
        return Ok(out);
    }
    let mut idx = vec![0usize; reps.len()];
    loop {
        let mut domains = vec![ElemSet::full(r.order()); g.order()];
        let mut maps = vec![PartialMap { table: (0..r.order() as Elem).collect() }; g.order()];
        for (k, &x) in reps.iter().enumerate() {
            let (i, j, m) = &options[k][idx[k]];
            domains[g.inv(x)] = ideals[*i].clone();
            domains[x] = ideals[*j].clone();
            let pm = PartialMap { table: m.clone() };
            maps[g.inv(x)] = pm.inverse(r.order()).expect("isomorphism");
            maps[x] = pm;
        }
        if let Ok(a) = PartialGroupAction::new(group.clone(), ring.clone(), domains, maps) {
            if verify_partial_action(&a, budget).is_ok() {
                out.push(a);
            }
        }
        let mut k = 0;
        loop {
            if k == reps.len() {
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{ideal_generated_by, zn, DirectProduct};

    fn z2sq() -> DirectProduct {
        DirectProduct::power(zn(2).unwrap(), 2, &Budget::default()).unwrap()
    }

    fn swap_action() -> PartialGroupAction {
        let p = z2sq();
        // Elements (a, b) encoded as 2a + b; the swap sends 1 <-> 2.
        PartialGroupAction::global(Arc::new(FiniteGroup::cyclic(2)), p.ring(), vec![vec![0, 1, 2, 3], vec![0, 2, 1, 3]]).unwrap()
    }

    #[test]
    fn global_swap_is_valid_and_unital() {
        let a = swap_action();
        assert!(verify_partial_action(&a, &Budget::default()).is_ok());
        let c = classify(&a, &Budget::default()).unwrap();
        assert!(c.global && c.regular && c.product);
        assert_eq!(c.units, Some(vec![3, 3]));
    }

    #[test]
    fn restriction_to_ideal() {
        let a = swap_action();
        let p = z2sq();
        let i = ideal_generated_by(p.ring().as_ref(), [p.unit(0)]);
        let b = a.restrict_to_corner(p.unit(0)).unwrap();
        assert_eq!(b.ring.order(), i.len());
        assert!(verify_partial_action(&b, &Budget::default()).is_ok());
        assert_eq!(b.domains[1].len(), 1);
    }

    #[test]
    fn broken_composition_is_reported() {
        let p = z2sq();
        let r = p.ring();
        let g = Arc::new(FiniteGroup::cyclic(3));
        let id = vec![0, 1, 2, 3];
        let swap = vec![0, 2, 1, 3];
        // g -> swap, g^2 -> swap: g * g = g^2 but swap * swap = id.
        let a = PartialGroupAction::global(g, r, vec![id, swap.clone(), swap]).unwrap();
        let rep = verify_partial_action(&a, &Budget::default());
        assert!(rep.has("composition"), "{rep}");
    }

    #[test]
    fn non_ideal_domain_is_reported() {
        let r: RingRef = zn(4).unwrap();
        let g = Arc::new(FiniteGroup::cyclic(2));
        let d = ElemSet::from_iter(4, [0, 1]);
        let a = PartialGroupAction::new(
            g,
            r.clone(),
            vec![ElemSet::full(4), d.clone()],
            vec![PartialMap { table: vec![0, 1, 2, 3] }, PartialMap::identity_on(&d)],
        )
        .unwrap();
        assert!(verify_partial_action(&a, &Budget::default()).has("domain is an ideal"));
    }

    #[test]
    fn enumeration_counts() {
        let c2 = Arc::new(FiniteGroup::cyclic(2));
        let all = enumerate_partial_actions(c2.clone(), z2sq().ring(), &Budget::default()).unwrap();
        // D_g = 0, Z2x0, 0xZ2 with identity maps, or the whole ring with id or swap.
        assert_eq!(all.len(), 5);
        let z2: RingRef = zn(2).unwrap();
        assert_eq!(enumerate_partial_actions(c2, z2, &Budget::default()).unwrap().len(), 2);
    }
}
