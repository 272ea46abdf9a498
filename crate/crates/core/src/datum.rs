//! Datums of partial actions on generalized matrix rings and the action `gamma`
//! they assemble into, unitality, and actions induced by global datums.

use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::genmatrix::{check_symmetry, GenMatrixRing, SubGenMatrix};
use crate::group::{FiniteGroup, GElem};
use crate::partial_action::{verify_partial_action, check_equivalent, check_extension, PartialGroupAction, PartialMap};
use crate::report::Report;
use crate::ring::{ideal_unit, is_central, is_central_idempotent, same_ring, FiniteRing, RingRef, SubRing};
use crate::set::{Elem, ElemSet};

/// Pairs beyond this count are checked on additive generators.
const PAIR_LIMIT: u128 = 1 << 22;

/// Component actions `alpha^(i)` on the diagonal rings and maps
/// `gamma_g^(ij) : D_{g^-1}^(i) M_ij -> D_g^(i) M_ij`.
#[derive(Clone, Debug)]
pub struct Datum {
    pub parent: Arc<GenMatrixRing>,
    pub group: Arc<FiniteGroup>,
    pub actions: Vec<PartialGroupAction>,
    /// `gamma[g][i*n+j]`, over the carrier of `M_ij`.
    pub gamma: Vec<Vec<PartialMap>>,
    domains: Vec<Vec<ElemSet>>,
}

/// The partial action `(I_g, gamma_g)` on the parent ring.
pub type GammaAction = PartialGroupAction;

fn bname(i: usize, j: usize) -> String {
    format!("({},{})", i + 1, j + 1)
}

fn same_group(a: &FiniteGroup, b: &FiniteGroup) -> bool {
    a.order() == b.order() && a.table() == b.table()
}

impl Datum {
    /// Checks shapes: one action per diagonal ring over the same group, and each
    /// `gamma_g^(ij)` defined exactly on `D_{g^-1}^(i) M_ij`.
    pub fn new(
        parent: Arc<GenMatrixRing>,
        group: Arc<FiniteGroup>,
        actions: Vec<PartialGroupAction>,
        gamma: Vec<Vec<PartialMap>>,
    ) -> Result<Datum> {
        let n = parent.size();
        if actions.len() != n {
            return Err(Error::ShapeMismatch(format!("need {n} component actions")));
        }
        for (i, a) in actions.iter().enumerate() {
            if !same_ring(&a.ring, parent.ring(i)) {
                return Err(Error::AmbientMismatch(format!("alpha^({}) does not act on R_{}", i + 1, i + 1)));
            }
            if !same_group(&a.group, &group) {
                return Err(Error::ShapeMismatch(format!("alpha^({}) is over another group", i + 1)));
            }
        }
        if gamma.len() != group.order() || gamma.iter().any(|row| row.len() != n * n) {
            return Err(Error::ShapeMismatch("gamma needs one map per group element and block".into()));
        }
        let domains: Vec<Vec<ElemSet>> = group
            .elements()
            .map(|g| {
                (0..n * n)
                    .map(|b| {
                        let m = parent.module(b / n, b % n);
                        m.left_product(&actions[b / n].domains[g], &m.all())
                    })
                    .collect()
            })
            .collect();
        for g in group.elements() {
            for b in 0..n * n {
                let m = parent.module(b / n, b % n);
                let map = &gamma[g][b];
                if map.universe() != m.order() {
                    return Err(Error::ShapeMismatch(format!("gamma_{}^{} has wrong carrier", group.name(g), bname(b / n, b % n))));
                }
                if map.domain() != domains[group.inv(g)][b] {
                    return Err(Error::ShapeMismatch(format!(
                        "gamma_{}^{} must be defined exactly on D_{}^({}) M_{}{}",
                        group.name(g),
                        bname(b / n, b % n),
                        group.name(group.inv(g)),
                        b / n + 1,
                        b / n + 1,
                        b % n + 1
                    )));
                }
                if map.table.iter().any(|&y| y != crate::set::NONE && y as usize >= m.order()) {
                    return Err(Error::ShapeMismatch(format!("gamma_{}^{} leaves M", group.name(g), bname(b / n, b % n))));
                }
            }
        }
        Ok(Datum { parent, group, actions, gamma, domains })
    }

    /// Fills the diagonal maps from the component actions.
    pub fn with_offdiagonal(
        parent: Arc<GenMatrixRing>,
        group: Arc<FiniteGroup>,
        actions: Vec<PartialGroupAction>,
        mut off: BTreeMap<(usize, usize), Vec<PartialMap>>,
    ) -> Result<Datum> {
        let n = parent.size();
        let mut gamma = vec![Vec::with_capacity(n * n); group.order()];
        for (g, row) in gamma.iter_mut().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        let a = actions.get(i).ok_or_else(|| Error::ShapeMismatch(format!("need {n} component actions")))?;
                        row.push(a.maps[g].clone());
                    } else {
                        let maps = off
                            .get_mut(&(i, j))
                            .ok_or_else(|| Error::ShapeMismatch(format!("missing gamma^{}", bname(i, j))))?;
                        if maps.len() != group.order() {
                            return Err(Error::ShapeMismatch(format!("gamma^{} needs one map per group element", bname(i, j))));
                        }
                        row.push(std::mem::replace(&mut maps[g], PartialMap::undefined(0)));
                    }
                }
            }
        }
        Datum::new(parent, group, actions, gamma)
    }

    pub fn size(&self) -> usize {
        self.parent.size()
    }

    /// `D_g^(i) M_ij`.
    pub fn domain(&self, g: GElem, i: usize, j: usize) -> &ElemSet {
        &self.domains[g][i * self.size() + j]
    }

    pub fn map(&self, g: GElem, i: usize, j: usize) -> &PartialMap {
        &self.gamma[g][i * self.size() + j]
    }

    /// `gamma_g` applied entrywise to an element of the parent ring.
    pub fn apply(&self, g: GElem, x: Elem) -> Option<Elem> {
        let d = self.parent.decode(x);
        let out: Option<Vec<Elem>> = d.iter().enumerate().map(|(b, &m)| self.gamma[g][b].get(m)).collect();
        Some(self.parent.encode(&out?))
    }
}

/// The datum restricted to the index subset `idx`, over the corresponding
/// principal generalized matrix subring.
pub fn sub_datum(d: &Datum, idx: &[usize], budget: &Budget) -> Result<Datum> {
    let ring = Arc::new(d.parent.principal_submatrix(idx, budget)?);
    let actions = idx.iter().map(|&i| d.actions[i].clone()).collect();
    let gamma = d
        .group
        .elements()
        .map(|g| idx.iter().flat_map(|&i| idx.iter().map(move |&j| (i, j))).map(|(i, j)| d.map(g, i, j).clone()).collect())
        .collect();
    Datum::new(ring, d.group.clone(), actions, gamma)
}

/// Pairs `(u, v)` from two sets, or from their additive generators when there
/// are too many pairs.
pub(crate) fn pair_lists(m: &crate::bimodule::Bimodule, u: &ElemSet, p: &crate::bimodule::Bimodule, v: &ElemSet) -> (Vec<Elem>, Vec<Elem>) {
    if (u.len() as u128) * (v.len() as u128) <= PAIR_LIMIT {
        (u.sorted(), v.sorted())
    } else {
        (m.generators_of(u), p.generators_of(v))
    }
}

/// Checks that the component actions are partial actions, symmetry of the
/// domains, the gamma conditions, and the derived inverse and two-sided
/// preimage identities.
pub fn verify_datum(d: &Datum, budget: &Budget) -> Report {
    let r = &d.parent;
    let n = r.size();
    let g = &d.group;
    let mut rep = Report::new(format!("datum on {}", r.label()));
    for (i, a) in d.actions.iter().enumerate() {
        rep.merge(&format!("alpha^({}): ", i + 1), verify_partial_action(a, budget));
    }
    for x in g.elements() {
        let fam: Vec<ElemSet> = d.actions.iter().map(|a| a.domains[x].clone()).collect();
        if let Err((i, j, w)) = check_symmetry(r, &fam) {
            rep.push("symmetry", format!("g = {}, block {}: {w}", g.name(x), bname(i, j)));
        }
    }
    for x in g.elements() {
        let xi = g.inv(x);
        for i in 0..n {
            for j in 0..n {
                let m = r.module(i, j);
                let map = d.map(x, i, j);
                let src = d.domain(xi, i, j);
                let img = map.image(m.order());
                if img != *d.domain(x, i, j) || img.len() != src.len() {
                    rep.push("bijection", format!("gamma_{}^{} is not a bijection onto D_g M", g.name(x), bname(i, j)));
                    continue;
                }
                let gens = m.generators_of(src);
                'add: for &a in src.members() {
                    for &b in &gens {
                        if map.at(m.add(a, b)) != m.add(map.at(a), map.at(b)) {
                            rep.push("additive", format!("gamma_{}^{} at ({}, {})", g.name(x), bname(i, j), m.show(a), m.show(b)));
                            break 'add;
                        }
                    }
                }
            }
        }
    }
    if !rep.is_ok() {
        return rep;
    }
    let e = g.identity();
    for x in g.elements() {
        for i in 0..n {
            if d.map(x, i, i) != &d.actions[i].maps[x] {
                rep.push("diagonal is alpha", format!("g = {}, i = {}", g.name(x), i + 1));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let m = r.module(i, j);
            if let Some(y) = (0..m.order() as Elem).find(|&y| d.map(e, i, j).get(y) != Some(y)) {
                rep.push("identity at e", format!("block {}, {}", bname(i, j), m.show(y)));
            }
        }
    }
    for x in g.elements() {
        let xi = g.inv(x);
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    let (mik, mkj, mij) = (r.module(i, k), r.module(k, j), r.module(i, j));
                    let (us, vs) = pair_lists(mik, d.domain(xi, i, k), mkj, d.domain(xi, k, j));
                    let (gik, gkj, gij) = (d.map(x, i, k), d.map(x, k, j), d.map(x, i, j));
                    'pairs: for &u in &us {
                        for &v in &vs {
                            let uv = r.block_product(i, k, j, u, v);
                            let lhs = r.block_product(i, k, j, gik.at(u), gkj.at(v));
                            match gij.get(uv) {
                                None => {
                                    rep.push(
                                        "multiplicative across blocks",
                                        format!("g = {}, (i,k,j) = ({},{},{}): product {} outside the domain", g.name(x), i + 1, k + 1, j + 1, mij.show(uv)),
                                    );
                                    break 'pairs;
                                }
                                Some(rhs) if rhs != lhs => {
                                    rep.push(
                                        "multiplicative across blocks",
                                        format!(
                                            "g = {}, (i,k,j) = ({},{},{}), u = {}, v = {}: {} != {}",
                                            g.name(x),
                                            i + 1,
                                            k + 1,
                                            j + 1,
                                            mik.show(u),
                                            mkj.show(v),
                                            mij.show(lhs),
                                            mij.show(rhs)
                                        ),
                                    );
                                    break 'pairs;
                                }
                                _ => {}
                            }
                        }
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let m = r.module(i, j);
            let inverses: Vec<PartialMap> =
                g.elements().map(|h| d.map(h, i, j).inverse(m.order()).expect("bijection checked")).collect();
            for x in g.elements() {
                let xi = g.inv(x);
                for h in g.elements() {
                    let gh = g.op(x, h);
                    let target = d.domain(g.inv(gh), i, j);
                    let mut pre = ElemSet::empty(m.order());
                    for &y in d.domain(xi, i, j).intersection(d.domain(h, i, j)).members() {
                        let p = inverses[h].at(y);
                        pre.insert(p);
                        if !target.contains(p) {
                            rep.push(
                                "preimage condition",
                                format!("g = {}, h = {}, block {}: {}", g.name(x), g.name(h), bname(i, j), m.show(p)),
                            );
                            continue;
                        }
                        let lhs = d.map(x, i, j).at(y);
                        let rhs = d.map(gh, i, j).at(p);
                        if lhs != rhs {
                            rep.push(
                                "composition",
                                format!("g = {}, h = {}, block {}, m = {}: {} != {}", g.name(x), g.name(h), bname(i, j), m.show(p), m.show(lhs), m.show(rhs)),
                            );
                        }
                    }
                    let want = target.intersection(d.domain(g.inv(h), i, j));
                    if pre != want {
                        rep.push("two-sided preimage", format!("g = {}, h = {}, block {}", g.name(x), g.name(h), bname(i, j)));
                    }
                }
                for &y in d.domain(xi, i, j).members() {
                    if d.map(xi, i, j).get(d.map(x, i, j).at(y)) != Some(y) {
                        rep.push("inverse", format!("g = {}, block {}, m = {}", g.name(x), bname(i, j), m.show(y)));
                        break;
                    }
                }
            }
        }
    }
    rep
}

/// Builds `I_g = (D_g^(i) M_ij)` and `gamma_g = (gamma_g^(ij))` on the parent
/// ring and re-verifies the partial action axioms on the result.
pub fn construct_gamma(d: &Datum, budget: &Budget) -> Result<GammaAction> {
    let rep = verify_datum(d, budget);
    if !rep.is_ok() {
        return Err(Error::DatumInvalid(rep));
    }
    let r = &d.parent;
    budget.check_elements("ambient ring for gamma", r.radix().total())?;
    let n = r.size();
    let g = &d.group;
    let mut domains = Vec::with_capacity(g.order());
    for x in g.elements() {
        let blocks: Vec<ElemSet> = (0..n * n).map(|b| d.domains[x][b].clone()).collect();
        domains.push(r.block_set(&blocks, budget)?);
    }
    let mut maps = Vec::with_capacity(g.order());
    for x in g.elements() {
        let mut m = PartialMap::undefined(r.order());
        for &y in domains[g.inv(x)].members() {
            let v = d.apply(x, y).ok_or_else(|| Error::TheoremCheckFailed(format!("gamma_{} undefined at {}", g.name(x), r.show(y))))?;
            m.set(y, v);
        }
        maps.push(m);
    }
    let ring: RingRef = r.clone();
    let a = PartialGroupAction::new(g.clone(), ring, domains, maps).map_err(|e| Error::TheoremCheckFailed(e.to_string()))?;
    let rep = verify_partial_action(&a, budget);
    if !rep.is_ok() {
        return Err(Error::TheoremCheckFailed(rep.to_string()));
    }
    Ok(a)
}

/// `gamma^(k)` on the corner `iota_k(R_k)`, together with the embedding
/// `R_k -> iota_k(R_k)` used to compare it with `alpha^(k)`.
pub struct CornerRestriction {
    pub action: PartialGroupAction,
    pub corner: Arc<SubRing>,
    pub embedding: Vec<Elem>,
}

/// Restricts `gamma` to `iota_k(R_k)` and checks that the result is equivalent
/// to `alpha^(k)` through `iota_k` and extended by `gamma` through inclusion.
pub fn restrict_to_corner(d: &Datum, gamma: &GammaAction, k: usize, budget: &Budget) -> Result<CornerRestriction> {
    let r = &d.parent;
    if k >= r.size() {
        return Err(Error::ShapeMismatch(format!("no corner {}", k + 1)));
    }
    let g = &d.group;
    let iota = r.corner_embedding(k);
    let set = ElemSet::from_iter(r.order(), iota.iter().copied());
    let parent: RingRef = r.clone();
    let corner = Arc::new(
        SubRing::new(parent, &set, r.from_block(k, k, r.ring(k).one()), format!("iota_{}(R_{})", k + 1, k + 1))
            .map_err(|e| Error::CorollaryCheckFailed(e.to_string()))?,
    );
    let mut domains = Vec::with_capacity(g.order());
    for x in g.elements() {
        let inter = gamma.domains[x].intersection(&set);
        domains.push(ElemSet::from_iter(corner.order(), inter.members().iter().map(|&y| corner.from_parent(y).expect("in corner"))));
    }
    let mut maps = Vec::with_capacity(g.order());
    for x in g.elements() {
        let mut m = PartialMap::undefined(corner.order());
        for &y in domains[g.inv(x)].members() {
            let v = gamma.maps[x].at(corner.to_parent(y));
            let v = corner
                .from_parent(v)
                .ok_or_else(|| Error::CorollaryCheckFailed(format!("gamma_{} leaves the corner", g.name(x))))?;
            m.set(y, v);
        }
        maps.push(m);
    }
    let cring: RingRef = corner.clone();
    let action = PartialGroupAction::new(g.clone(), cring, domains, maps).map_err(|e| Error::CorollaryCheckFailed(e.to_string()))?;
    let rep = verify_partial_action(&action, budget);
    if !rep.is_ok() {
        return Err(Error::CorollaryCheckFailed(rep.to_string()));
    }
    let embedding: Vec<Elem> = iota.iter().map(|&y| corner.from_parent(y).expect("in corner")).collect();
    let rep = check_equivalent(&d.actions[k], &action, &embedding);
    if !rep.is_ok() {
        return Err(Error::CorollaryCheckFailed(rep.to_string()));
    }
    let inclusion: Vec<Elem> = corner.parent_elements().to_vec();
    let rep = check_extension(&action, gamma, &inclusion);
    if !rep.is_ok() {
        return Err(Error::CorollaryCheckFailed(rep.to_string()));
    }
    Ok(CornerRestriction { action, corner, embedding })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Unitality {
    /// `units[g][i] = 1_g^(i)`.
    pub units: Vec<Vec<Elem>>,
    /// `1_g^(i) m = m 1_g^(j)` for all `g, i, j` and `m` in `M_ij`.
    pub central: bool,
    /// `I_g = R 1_g` for all `g`.
    pub unit_ideal: bool,
    pub unital_action: bool,
    pub witness: Option<String>,
}

/// Unitality of `gamma` from the component units `1_g^(i)`.
///
/// The block condition is compared with centrality of `1_g = diag(1_g^(i))` in
/// the parent ring, and `I_g` with `R 1_g`.
pub fn unitality_check(d: &Datum, budget: &Budget) -> Result<Unitality> {
    let r = &d.parent;
    let n = r.size();
    let g = &d.group;
    let mut units = Vec::with_capacity(g.order());
    for x in g.elements() {
        let mut row = Vec::with_capacity(n);
        for (i, a) in d.actions.iter().enumerate() {
            row.push(ideal_unit(a.ring.as_ref(), &a.domains[x]).ok_or(Error::NonUnitalComponent(i + 1))?);
        }
        units.push(row);
    }
    for x in g.elements() {
        for i in 0..n {
            for j in 0..n {
                let m = r.module(i, j);
                let via_unit = ElemSet::from_iter(m.order(), (0..m.order() as Elem).map(|y| m.lact(units[x][i], y)));
                if via_unit != *d.domain(x, i, j) {
                    return Err(Error::BlockMismatch(format!(
                        "D_{}^({}) M_{}{} differs from 1_g M_{}{}",
                        g.name(x),
                        i + 1,
                        i + 1,
                        j + 1,
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
    }
    let mut witness = None;
    'cond: for x in g.elements() {
        for i in 0..n {
            for j in 0..n {
                let m = r.module(i, j);
                for y in 0..m.order() as Elem {
                    if m.lact(units[x][i], y) != m.ract(y, units[x][j]) {
                        witness = Some(format!("g = {}, block {}, m = {}", g.name(x), bname(i, j), m.show(y)));
                        break 'cond;
                    }
                }
            }
        }
    }
    let central = witness.is_none();
    let ambient_fits = budget.check_elements("unitality", r.radix().total()).is_ok();
    let mut unit_ideal = true;
    for x in g.elements() {
        let one_g = r.diag(&units[x]);
        let ambient_central = if r.order() <= budget.max_table {
            is_central(r.as_ref(), one_g)
        } else {
            (0..n * n).all(|b| {
                let m = r.module(b / n, b % n);
                m.generators_of(&m.all()).into_iter().all(|y| {
                    let e = r.from_block(b / n, b % n, y);
                    r.mul(one_g, e) == r.mul(e, one_g)
                })
            })
        };
        if ambient_central != central && (central || witness_mentions(&witness, g.name(x))) {
            return Err(Error::EquivalenceFailed(format!(
                "block condition says {central}, ambient centrality of 1_{} says {ambient_central}",
                g.name(x)
            )));
        }
        let equal = if ambient_fits {
            let blocks: Vec<ElemSet> = (0..n * n).map(|b| d.domains[x][b].clone()).collect();
            let ig = r.block_set(&blocks, budget)?;
            let r1 = ElemSet::from_iter(r.order(), (0..r.order() as Elem).map(|y| r.mul(y, one_g)));
            ig == r1
        } else {
            (0..n * n).all(|b| {
                let m = r.module(b / n, b % n);
                let s = ElemSet::from_iter(m.order(), (0..m.order() as Elem).map(|y| m.ract(y, units[x][b % n])));
                s == d.domains[x][b]
            })
        };
        if central && !equal {
            return Err(Error::EquivalenceFailed(format!("1_{} is central but I_g != R 1_g", g.name(x))));
        }
        unit_ideal &= equal;
    }
    Ok(Unitality { units, central, unit_ideal, unital_action: central && unit_ideal, witness })
}

fn witness_mentions(w: &Option<String>, name: &str) -> bool {
    w.as_deref().is_some_and(|s| s.starts_with(&format!("g = {name},")))
}

/// Total maps `beta_g^(ij) : M_ij -> M_ij` for every `g` and block.
#[derive(Clone, Debug)]
pub struct GlobalDatum {
    pub parent: Arc<GenMatrixRing>,
    pub group: Arc<FiniteGroup>,
    /// `maps[g][i*n+j]`.
    pub maps: Vec<Vec<Vec<Elem>>>,
}

impl GlobalDatum {
    pub fn new(parent: Arc<GenMatrixRing>, group: Arc<FiniteGroup>, maps: Vec<Vec<Vec<Elem>>>) -> Result<GlobalDatum> {
        let n = parent.size();
        if maps.len() != group.order() || maps.iter().any(|row| row.len() != n * n) {
            return Err(Error::ShapeMismatch("global datum needs one map per group element and block".into()));
        }
        for row in &maps {
            for (b, t) in row.iter().enumerate() {
                let o = parent.module(b / n, b % n).order();
                if t.len() != o || t.iter().any(|&y| y as usize >= o) {
                    return Err(Error::ShapeMismatch(format!("beta^{} has the wrong shape", bname(b / n, b % n))));
                }
            }
        }
        Ok(GlobalDatum { parent, group, maps })
    }

    pub fn map(&self, g: GElem, i: usize, j: usize) -> &[Elem] {
        &self.maps[g][i * self.parent.size() + j]
    }

    /// The global action `beta^(i)` on `R_i`.
    pub fn component(&self, i: usize) -> Result<PartialGroupAction> {
        let autos = self.group.elements().map(|g| self.map(g, i, i).to_vec()).collect();
        PartialGroupAction::global(self.group.clone(), self.parent.ring(i).clone(), autos)
    }

    /// `beta_g` applied entrywise.
    pub fn apply(&self, g: GElem, x: Elem) -> Elem {
        let d = self.parent.decode(x);
        let out: Vec<Elem> = d.iter().enumerate().map(|(b, &m)| self.maps[g][b][m as usize]).collect();
        self.parent.encode(&out)
    }

    /// The datum with `alpha^(i) = beta^(i)` and `gamma = beta`.
    pub fn to_datum(&self) -> Result<Datum> {
        let n = self.parent.size();
        let actions = (0..n).map(|i| self.component(i)).collect::<Result<Vec<_>>>()?;
        let gamma = self.maps.iter().map(|row| row.iter().map(|t| PartialMap { table: t.clone() }).collect()).collect();
        Datum::new(self.parent.clone(), self.group.clone(), actions, gamma)
    }
}

/// Checks that the maps are additive bijections forming actions blockwise,
/// that the diagonal maps are automorphisms, and that block products are
/// preserved. When the parent ring fits the budget, `beta` is also checked as a
/// global action on it.
pub fn verify_global_datum(gd: &GlobalDatum, budget: &Budget) -> Report {
    let r = &gd.parent;
    let n = r.size();
    let g = &gd.group;
    let mut rep = Report::new(format!("global datum on {}", r.label()));
    for x in g.elements() {
        for i in 0..n {
            for j in 0..n {
                let m = r.module(i, j);
                let t = gd.map(x, i, j);
                if ElemSet::from_iter(m.order(), t.iter().copied()).len() != m.order() {
                    rep.push("bijection", format!("beta_{}^{}", g.name(x), bname(i, j)));
                    continue;
                }
                let gens = m.generators_of(&m.all());
                'add: for a in 0..m.order() as Elem {
                    for &b in &gens {
                        if t[m.add(a, b) as usize] != m.add(t[a as usize], t[b as usize]) {
                            rep.push("additive", format!("beta_{}^{} at ({}, {})", g.name(x), bname(i, j), m.show(a), m.show(b)));
                            break 'add;
                        }
                    }
                }
            }
        }
    }
    if !rep.is_ok() {
        return rep;
    }
    for i in 0..n {
        match gd.component(i) {
            Ok(a) => rep.merge(&format!("beta^({}): ", i + 1), verify_partial_action(&a, budget)),
            Err(e) => rep.push("component action", e.to_string()),
        }
    }
    let e = g.identity();
    for i in 0..n {
        for j in 0..n {
            let m = r.module(i, j);
            if let Some(y) = (0..m.order() as Elem).find(|&y| gd.map(e, i, j)[y as usize] != y) {
                rep.push("identity at e", format!("block {}, {}", bname(i, j), m.show(y)));
            }
            for x in g.elements() {
                for h in g.elements() {
                    let (bx, bh, bxh) = (gd.map(x, i, j), gd.map(h, i, j), gd.map(g.op(x, h), i, j));
                    if let Some(y) = (0..m.order()).find(|&y| bx[bh[y] as usize] != bxh[y]) {
                        rep.push(
                            "composition",
                            format!("g = {}, h = {}, block {}, m = {}", g.name(x), g.name(h), bname(i, j), m.show(y as Elem)),
                        );
                    }
                }
            }
        }
    }
    for x in g.elements() {
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    let (mik, mkj) = (r.module(i, k), r.module(k, j));
                    let (us, vs) = pair_lists(mik, &mik.all(), mkj, &mkj.all());
                    let (bik, bkj, bij) = (gd.map(x, i, k), gd.map(x, k, j), gd.map(x, i, j));
                    'pairs: for &u in &us {
                        for &v in &vs {
                            let lhs = r.block_product(i, k, j, bik[u as usize], bkj[v as usize]);
                            let rhs = bij[r.block_product(i, k, j, u, v) as usize];
                            if lhs != rhs {
                                rep.push(
                                    "multiplicative across blocks",
                                    format!("g = {}, (i,k,j) = ({},{},{}), u = {}, v = {}", g.name(x), i + 1, k + 1, j + 1, mik.show(u), mkj.show(v)),
                                );
                                break 'pairs;
                            }
                        }
                    }
                }
            }
        }
    }
    if !rep.is_ok() {
        return rep;
    }
    if r.radix().total() <= budget.max_elements as u128 {
        let autos: Vec<Vec<Elem>> = g.elements().map(|x| (0..r.order() as Elem).map(|y| gd.apply(x, y)).collect()).collect();
        let ring: RingRef = r.clone();
        match PartialGroupAction::global(g.clone(), ring, autos) {
            Ok(a) => rep.merge("ambient beta: ", verify_partial_action(&a, budget)),
            Err(e) => rep.push("ambient beta", e.to_string()),
        }
    } else {
        rep.skip("ambient beta: parent ring above the element budget");
    }
    rep
}

/// The partial action induced by a global datum on `J = (J_i M_ij)` with
/// `J_i = R_i e_i`, built both as `J ∩ beta_g(J)` and through the induced datum.
pub struct InducedAction {
    pub j: SubGenMatrix,
    pub datum: Datum,
    pub gamma: GammaAction,
    pub alpha: PartialGroupAction,
}

pub fn induce_action(gd: &GlobalDatum, idempotents: &[Elem], budget: &Budget) -> Result<InducedAction> {
    let rep = verify_global_datum(gd, budget);
    if !rep.is_ok() {
        return Err(Error::InvalidGlobalDatum(rep));
    }
    let r = &gd.parent;
    let n = r.size();
    let g = &gd.group;
    if idempotents.len() != n {
        return Err(Error::ShapeMismatch(format!("need {n} idempotents")));
    }
    for (i, &e) in idempotents.iter().enumerate() {
        if !is_central_idempotent(r.ring(i).as_ref(), e) {
            return Err(Error::NotIdempotentGenerated(format!("e_{} = {}", i + 1, r.ring(i).show(e))));
        }
    }
    let corners: Vec<Arc<SubRing>> = (0..n)
        .map(|i| SubRing::corner(r.ring(i).clone(), idempotents[i]).map(Arc::new))
        .collect::<Result<_>>()?;
    let fam: Vec<ElemSet> = corners.iter().map(|c| c.as_parent_set()).collect();
    if let Err((i, j, w)) = check_symmetry(r, &fam) {
        return Err(Error::SymmetryFails(format!("block {}: {w}", bname(i, j))));
    }
    let blocks: Vec<ElemSet> = (0..n * n)
        .map(|b| {
            let m = r.module(b / n, b % n);
            m.left_product(&fam[b / n], &m.all())
        })
        .collect();
    let sub = SubGenMatrix::new(r.clone(), corners.clone(), blocks.clone(), budget)?;

    // D_g^(i) as J_i ∩ beta_g(J_i) and as R_i e_i beta_g(e_i).
    let mut comp_domains: Vec<Vec<ElemSet>> = vec![Vec::with_capacity(g.order()); n];
    for i in 0..n {
        let ri = r.ring(i);
        for x in g.elements() {
            let bx = gd.map(x, i, i);
            let moved = ElemSet::from_iter(ri.order(), fam[i].members().iter().map(|&y| bx[y as usize]));
            let by_sets = fam[i].intersection(&moved);
            let f = ri.mul(idempotents[i], bx[idempotents[i] as usize]);
            let by_unit = ElemSet::from_iter(ri.order(), (0..ri.order() as Elem).map(|y| ri.mul(y, f)));
            if by_sets != by_unit {
                return Err(Error::CoincidenceCheckFailed(format!(
                    "J_{} ∩ beta_{}(J_{}) differs from R_{} e_{} beta_{}(e_{})",
                    i + 1,
                    g.name(x),
                    i + 1,
                    i + 1,
                    i + 1,
                    g.name(x),
                    i + 1
                )));
            }
            comp_domains[i].push(by_sets);
        }
    }
    let mut actions = Vec::with_capacity(n);
    for i in 0..n {
        let c = &corners[i];
        let domains: Vec<ElemSet> = comp_domains[i]
            .iter()
            .map(|s| ElemSet::from_iter(c.order(), s.members().iter().map(|&y| c.from_parent(y).expect("inside J_i"))))
            .collect();
        let mut maps = Vec::with_capacity(g.order());
        for x in g.elements() {
            let bx = gd.map(x, i, i);
            let mut m = PartialMap::undefined(c.order());
            for &y in domains[g.inv(x)].members() {
                let v = c
                    .from_parent(bx[c.to_parent(y) as usize])
                    .ok_or_else(|| Error::CoincidenceCheckFailed(format!("beta_{} leaves J_{}", g.name(x), i + 1)))?;
                m.set(y, v);
            }
            maps.push(m);
        }
        let ring: RingRef = c.clone();
        actions.push(PartialGroupAction::new(g.clone(), ring, domains, maps).map_err(|e| Error::CoincidenceCheckFailed(e.to_string()))?);
    }

    // gamma_g^(ij)(e_i beta_{g^-1}(e_i) m) = e_i beta_g(e_i) beta_g^(ij)(m).
    let fx = |i: usize, x: GElem| r.ring(i).mul(idempotents[i], gd.map(x, i, i)[idempotents[i] as usize]);
    let mut gamma = Vec::with_capacity(g.order());
    for x in g.elements() {
        let xi = g.inv(x);
        let mut row = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let m = r.module(i, j);
                let bx = gd.map(x, i, j);
                let (f_src, f_tgt) = (fx(i, xi), fx(i, x));
                let mut map = PartialMap::undefined(sub.ring.module(i, j).order());
                for y in 0..m.order() as Elem {
                    let arg = m.lact(f_src, y);
                    let val = m.lact(f_tgt, bx[y as usize]);
                    let (Some(a), Some(v)) = (sub.block_id(i, j, arg), sub.block_id(i, j, val)) else {
                        return Err(Error::CoincidenceCheckFailed(format!("gamma_{}^{} leaves J_{}{}", g.name(x), bname(i, j), i + 1, j + 1)));
                    };
                    match map.get(a) {
                        Some(old) if old != v => {
                            return Err(Error::CoincidenceCheckFailed(format!(
                                "gamma_{}^{} is not well defined at {}",
                                g.name(x),
                                bname(i, j),
                                m.show(arg)
                            )))
                        }
                        _ => map.set(a, v),
                    }
                }
                row.push(map);
            }
        }
        gamma.push(row);
    }
    let datum = Datum::new(sub.ring.clone(), g.clone(), actions, gamma).map_err(|e| Error::CoincidenceCheckFailed(e.to_string()))?;
    let rep = verify_datum(&datum, budget);
    if !rep.is_ok() {
        return Err(Error::CoincidenceCheckFailed(format!("induced datum fails: {rep}")));
    }

    // Blockwise: D_g^(i) M_ij = J_ij ∩ beta_g^(ij)(J_ij).
    for x in g.elements() {
        for b in 0..n * n {
            let m = r.module(b / n, b % n);
            let bx = gd.map(x, b / n, b % n);
            let moved = ElemSet::from_iter(m.order(), blocks[b].members().iter().map(|&y| bx[y as usize]));
            let inter = blocks[b].intersection(&moved);
            let dm = m.left_product(&comp_domains[b / n][x], &m.all());
            if inter != dm {
                return Err(Error::CoincidenceCheckFailed(format!(
                    "J ∩ beta_{}(J) differs from D_g M in block {}",
                    g.name(x),
                    bname(b / n, b % n)
                )));
            }
        }
    }
    let gamma = construct_gamma(&datum, budget)?;

    let jr = &sub.ring;
    let to_blocks = |y: Elem| r.decode(sub.to_parent(y));
    let mut domains = Vec::with_capacity(g.order());
    for x in g.elements() {
        let xi = g.inv(x);
        domains.push(ElemSet::from_iter(
            jr.order(),
            (0..jr.order() as Elem).filter(|&y| {
                let p = to_blocks(y);
                let back: Vec<Elem> = p.iter().enumerate().map(|(b, &v)| gd.maps[xi][b][v as usize]).collect();
                sub.from_parent_blocks(&back).is_some()
            }),
        ));
    }
    let mut maps = Vec::with_capacity(g.order());
    for x in g.elements() {
        let mut m = PartialMap::undefined(jr.order());
        for &y in domains[g.inv(x)].members() {
            let p = to_blocks(y);
            let img: Vec<Elem> = p.iter().enumerate().map(|(b, &v)| gd.maps[x][b][v as usize]).collect();
            m.set(y, sub.from_parent_blocks(&img).expect("J ∩ beta_g(J)"));
        }
        maps.push(m);
    }
    let jref: RingRef = jr.clone();
    let alpha = PartialGroupAction::new(g.clone(), jref, domains, maps).map_err(|e| Error::CoincidenceCheckFailed(e.to_string()))?;
    for x in g.elements() {
        if alpha.domains[x] != gamma.domains[x] {
            return Err(Error::CoincidenceCheckFailed(format!("domains of alpha and gamma differ at {}", g.name(x))));
        }
        if alpha.maps[x] != gamma.maps[x] {
            return Err(Error::CoincidenceCheckFailed(format!("alpha_{} and gamma_{} differ", g.name(x), g.name(x))));
        }
    }
    Ok(InducedAction { j: sub, datum, gamma, alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genmatrix::matrix_ring;
    use crate::ring::{zn, DirectProduct};

    fn swap_datum() -> (GlobalDatum, DirectProduct) {
        // M_2(Z2 x Z2) with C2 swapping the factors entrywise.
        let b = Budget::default();
        let p = DirectProduct::power(zn(2).unwrap(), 2, &b).unwrap();
        let r = Arc::new(matrix_ring(p.ring(), 2, &b).unwrap());
        let swap: Vec<Elem> = (0..4).map(|x| p.encode(&[p.decode(x)[1], p.decode(x)[0]])).collect();
        let id: Vec<Elem> = (0..4).collect();
        let maps = vec![vec![id; 4], vec![swap; 4]];
        (GlobalDatum::new(r, Arc::new(FiniteGroup::cyclic(2)), maps).unwrap(), p)
    }

    #[test]
    fn global_datum_gives_global_gamma() {
        let b = Budget::default();
        let (gd, _) = swap_datum();
        assert!(verify_global_datum(&gd, &b).is_ok());
        let d = gd.to_datum().unwrap();
        assert!(verify_datum(&d, &b).is_ok());
        let gamma = construct_gamma(&d, &b).unwrap();
        assert_eq!(gamma.domains[1].len(), 256);
        for k in 0..2 {
            restrict_to_corner(&d, &gamma, k, &b).unwrap();
        }
        let u = unitality_check(&d, &b).unwrap();
        assert!(u.central && u.unit_ideal && u.unital_action);
    }

    #[test]
    fn induced_action_on_first_factor() {
        let b = Budget::default();
        let (gd, p) = swap_datum();
        let e = p.unit(0);
        let ind = induce_action(&gd, &[e, e], &b).unwrap();
        // J = M_2(Z2 x 0) and J ∩ swap(J) = 0.
        assert_eq!(ind.j.ring.order(), 16);
        assert_eq!(ind.alpha.domains[1].len(), 1);
        assert_eq!(ind.alpha.domains[0].len(), 16);
    }

    #[test]
    fn broken_identity_is_reported() {
        let b = Budget::default();
        let (mut gd, _) = swap_datum();
        gd.maps[0][1] = vec![0, 2, 1, 3];
        let rep = verify_global_datum(&gd, &b);
        assert!(rep.has("identity at e"));
        let d = gd.to_datum().unwrap();
        assert!(verify_datum(&d, &b).has("identity at e"));
        assert!(matches!(construct_gamma(&d, &b), Err(Error::DatumInvalid(_))));
    }

    #[test]
    fn asymmetric_idempotents_are_rejected() {
        let b = Budget::default();
        let (gd, p) = swap_datum();
        let r = induce_action(&gd, &[p.unit(0), p.unit(1)], &b);
        assert!(matches!(r, Err(Error::SymmetryFails(_))));
        assert!(matches!(induce_action(&gd, &[7, 0], &b), Err(Error::NotIdempotentGenerated(_))));
    }
}
