//! Modules over regular partial actions and Morita equivalence certificates
//! extracted from datums.

use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bimodule::Bimodule;
use crate::budget::Budget;
use crate::datum::{construct_gamma, pair_lists, restrict_to_corner, sub_datum, verify_datum, Datum};
use crate::error::{Error, Result};
use crate::genmatrix::GenMatrixRing;
use crate::partial_action::{regularity_violation, verify_product_partial_action, PartialGroupAction, PartialMap};
use crate::report::Report;
use crate::ring::{same_ring, set_product};
use crate::set::{Elem, ElemSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

fn require_regular(a: &PartialGroupAction, name: &str, budget: &Budget) -> Result<()> {
    if let Some(w) = regularity_violation(a, budget)? {
        return Err(Error::NotRegular(format!("{name}: {w}")));
    }
    Ok(())
}

/// `D M` (left) or `M D` (right) for a subset `D` of the acting ring.
fn scaled(m: &Bimodule, side: Side, d: &ElemSet) -> ElemSet {
    match side {
        Side::Left => m.left_product(d, &m.all()),
        Side::Right => m.right_product(&m.all(), d),
    }
}

/// Checks that `maps[g] : D_{g^-1} M -> D_g M` make `m` a left or right
/// `alpha`-module: additive bijections, identity at `e`, composition on
/// `D_{h^-1} D_{(gh)^-1} M`, and semilinearity.
pub fn verify_alpha_module(m: &Bimodule, side: Side, alpha: &PartialGroupAction, maps: &[PartialMap], budget: &Budget) -> Result<Report> {
    let ring = match side {
        Side::Left => m.left(),
        Side::Right => m.right(),
    };
    if !same_ring(ring, &alpha.ring) {
        return Err(Error::AmbientMismatch(format!("{} is not a module over {}", m.label(), alpha.ring.label())));
    }
    let g = &alpha.group;
    if maps.len() != g.order() || maps.iter().any(|p| p.universe() != m.order()) {
        return Err(Error::ShapeMismatch("need one map on the module carrier per group element".into()));
    }
    require_regular(alpha, &alpha.ring.label(), budget)?;
    let side_name = if side == Side::Left { "left" } else { "right" };
    let mut rep = Report::new(format!("{} as a {side_name} module over a partial action on {}", m.label(), alpha.ring.label()));
    let doms: Vec<ElemSet> = g.elements().map(|x| scaled(m, side, &alpha.domains[x])).collect();
    for x in g.elements() {
        let src = &doms[g.inv(x)];
        let p = &maps[x];
        if p.domain() != *src {
            rep.push("domain", format!("map for {} is not defined exactly on D_g^-1 M", g.name(x)));
            continue;
        }
        let img = p.image(m.order());
        if img != doms[x] || img.len() != src.len() {
            rep.push("bijection", format!("map for {} is not a bijection onto D_g M", g.name(x)));
            continue;
        }
        let gens = m.generators_of(src);
        'add: for &a in src.members() {
            for &b in &gens {
                if p.at(m.add(a, b)) != m.add(p.at(a), p.at(b)) {
                    rep.push("additive", format!("g = {}, ({}, {})", g.name(x), m.show(a), m.show(b)));
                    break 'add;
                }
            }
        }
    }
    if !rep.is_ok() {
        return Ok(rep);
    }
    let e = g.identity();
    if let Some(y) = (0..m.order() as Elem).find(|&y| maps[e].get(y) != Some(y)) {
        rep.push("identity at e", m.show(y));
    }
    let r = alpha.ring.as_ref();
    for x in g.elements() {
        for h in g.elements() {
            let gh = g.op(x, h);
            let dd = set_product(r, &alpha.domains[g.inv(h)], &alpha.domains[g.inv(gh)]);
            for &y in scaled(m, side, &dd).members() {
                let lhs = maps[h].get(y).and_then(|z| maps[x].get(z));
                if lhs != maps[gh].get(y) {
                    rep.push("composition", format!("g = {}, h = {}, m = {}", g.name(x), g.name(h), m.show(y)));
                    break;
                }
            }
        }
    }
    for x in g.elements() {
        let xi = g.inv(x);
        let ring_set = &alpha.domains[xi];
        let (avals, mvals) = if (ring_set.len() as u128) * (doms[xi].len() as u128) <= 1 << 22 {
            (ring_set.sorted(), doms[xi].sorted())
        } else {
            (crate::ring::set_generators(r, ring_set), m.generators_of(&doms[xi]))
        };
        'semi: for &a in &avals {
            let ga = alpha.maps[x].at(a);
            for &y in &mvals {
                let (lhs, rhs) = match side {
                    Side::Left => (maps[x].get(m.lact(a, y)), m.lact(ga, maps[x].at(y))),
                    Side::Right => (maps[x].get(m.ract(y, a)), m.ract(maps[x].at(y), ga)),
                };
                if lhs != Some(rhs) {
                    rep.push("semilinear", format!("g = {}, a = {}, m = {}", g.name(x), r.show(a), m.show(y)));
                    break 'semi;
                }
            }
        }
    }
    Ok(rep)
}

/// Additive span of `theta_ijk(u, v)` over `u` in `s` and `v` in `t`.
fn block_product_set(r: &GenMatrixRing, i: usize, j: usize, k: usize, s: &ElemSet, t: &ElemSet) -> ElemSet {
    let (mij, mjk, mik) = (r.module(i, j), r.module(j, k), r.module(i, k));
    let gs = mij.generators_of(s);
    let gt = mjk.generators_of(t);
    mik.span(gs.iter().flat_map(|&u| gt.iter().map(move |&v| r.block_product(i, j, k, u, v))))
}

#[derive(Debug, Clone, Serialize)]
pub struct MoritaCheck {
    /// Empty iff the context conditions, the module structures and the product
    /// compatibility all hold.
    pub report: Report,
    /// The product partial action on the Morita ring and its corner
    /// restrictions, when the Morita ring fits the budget.
    pub product_action: Option<Report>,
}

impl MoritaCheck {
    pub fn is_ok(&self) -> bool {
        self.report.is_ok() && self.product_action.as_ref().is_none_or(|r| r.is_ok())
    }
}

/// Context conditions and product compatibility for indices `i, j` (0-based)
/// of a datum with `M_ij M_ji = R_i` and `M_ji M_ij = R_j`.
pub fn check_morita_equivalent(d: &Datum, i: usize, j: usize, budget: &Budget) -> Result<MoritaCheck> {
    let r = &d.parent;
    let n = r.size();
    if i >= n || j >= n {
        return Err(Error::ShapeMismatch(format!("indices {} and {} out of range", i + 1, j + 1)));
    }
    let g = &d.group;
    let (ai, aj) = (&d.actions[i], &d.actions[j]);
    require_regular(ai, &format!("alpha^({})", i + 1), budget)?;
    require_regular(aj, &format!("alpha^({})", j + 1), budget)?;
    let (mij, mji) = (r.module(i, j), r.module(j, i));
    if block_product_set(r, i, j, i, &mij.all(), &mji.all()).len() != r.ring(i).order() {
        return Err(Error::HypothesisFails(format!("M_{}{} M_{}{} != R_{}", i + 1, j + 1, j + 1, i + 1, i + 1)));
    }
    if block_product_set(r, j, i, j, &mji.all(), &mij.all()).len() != r.ring(j).order() {
        return Err(Error::HypothesisFails(format!("M_{}{} M_{}{} != R_{}", j + 1, i + 1, i + 1, j + 1, j + 1)));
    }
    let mut rep = Report::new(format!("Morita equivalence of alpha^({}) and alpha^({})", i + 1, j + 1));
    for x in g.elements() {
        let s = mji.right_product(&mji.all(), &ai.domains[x]);
        let t = block_product_set(r, j, i, j, &s, &mij.all());
        if t != aj.domains[x] {
            rep.push("context condition", format!("M_{}{} D_{} M_{}{} != D_{}^({})", j + 1, i + 1, g.name(x), i + 1, j + 1, g.name(x), j + 1));
        }
    }
    let maps = |a: usize, b: usize| -> Vec<PartialMap> { g.elements().map(|x| d.map(x, a, b).clone()).collect() };
    rep.merge("M_ij left: ", verify_alpha_module(mij, Side::Left, ai, &maps(i, j), budget)?);
    rep.merge("M_ij right: ", verify_alpha_module(mij, Side::Right, aj, &maps(i, j), budget)?);
    rep.merge("M_ji left: ", verify_alpha_module(mji, Side::Left, aj, &maps(j, i), budget)?);
    rep.merge("M_ji right: ", verify_alpha_module(mji, Side::Right, ai, &maps(j, i), budget)?);
    for (a, b, act) in [(i, j, ai), (j, i, aj)] {
        let (mab, mba) = (r.module(a, b), r.module(b, a));
        for x in g.elements() {
            let xi = g.inv(x);
            let (us, vs) = pair_lists(mab, d.domain(xi, a, b), mba, d.domain(xi, b, a));
            'pairs: for &u in &us {
                for &v in &vs {
                    let lhs = act.maps[x].get(r.block_product(a, b, a, u, v));
                    let rhs = r.block_product(a, b, a, d.map(x, a, b).at(u), d.map(x, b, a).at(v));
                    if lhs != Some(rhs) {
                        rep.push(
                            "product compatibility",
                            format!("alpha^({})_{} at u = {}, v = {}", a + 1, g.name(x), mab.show(u), mba.show(v)),
                        );
                        break 'pairs;
                    }
                }
            }
        }
    }
    let product_action = morita_ring_action(d, i, j, budget)?;
    Ok(MoritaCheck { report: rep, product_action })
}

/// The action `gamma` on the Morita ring `(R_i, M_ij; M_ji, R_j)`, checked to be
/// a product partial action restricting to `alpha^(i)` and `alpha^(j)`.
fn morita_ring_action(d: &Datum, i: usize, j: usize, budget: &Budget) -> Result<Option<Report>> {
    let sub = sub_datum(d, &[i, j], budget)?;
    if sub.parent.radix().total() > budget.max_table as u128 {
        return Ok(None);
    }
    let mut rep = Report::new("product partial action on the Morita ring");
    let gamma = match construct_gamma(&sub, budget) {
        Ok(a) => a,
        Err(e) if e.is_budget() => return Ok(None),
        Err(e) => {
            rep.push("partial action", e.to_string());
            return Ok(Some(rep));
        }
    };
    rep.merge("", verify_product_partial_action(&gamma, budget));
    for k in 0..2 {
        if let Err(e) = restrict_to_corner(&sub, &gamma, k, budget) {
            rep.push("corner restriction", e.to_string());
        }
    }
    Ok(Some(rep))
}

/// Assembles the datum `{alpha^(1), gamma^(12), gamma^(21), alpha^(2)}` on a
/// 2x2 Morita ring after checking the context condition, the module
/// structures, product compatibility and the intersection hypothesis
/// `D_g M ∩ D_h M = (D_g ∩ D_h) M`.
pub fn datum_from_morita(
    ring: Arc<GenMatrixRing>,
    a1: PartialGroupAction,
    a2: PartialGroupAction,
    gamma12: Vec<PartialMap>,
    gamma21: Vec<PartialMap>,
    budget: &Budget,
) -> Result<Datum> {
    if ring.size() != 2 {
        return Err(Error::ShapeMismatch("a Morita ring has two diagonal blocks".into()));
    }
    require_regular(&a1, "alpha^(1)", budget)?;
    require_regular(&a2, "alpha^(2)", budget)?;
    let g = a1.group.clone();
    let (m12, m21) = (ring.module(0, 1), ring.module(1, 0));
    for (i, j) in [(0, 1), (1, 0)] {
        let prod = block_product_set(&ring, i, j, i, &ring.module(i, j).all(), &ring.module(j, i).all());
        if prod.len() != ring.ring(i).order() {
            return Err(Error::HypothesisFails(format!("context map onto R_{} is not surjective", i + 1)));
        }
    }
    for x in g.elements() {
        let s = m21.right_product(&m21.all(), &a1.domains[x]);
        if block_product_set(&ring, 1, 0, 1, &s, &m12.all()) != a2.domains[x] {
            return Err(Error::HypothesisFails(format!("M_21 D_{} M_12 != D'_{}", g.name(x), g.name(x))));
        }
    }
    for (m, side, a, maps, name) in [
        (m12, Side::Left, &a1, &gamma12, "M_12 left"),
        (m12, Side::Right, &a2, &gamma12, "M_12 right"),
        (m21, Side::Left, &a2, &gamma21, "M_21 left"),
        (m21, Side::Right, &a1, &gamma21, "M_21 right"),
    ] {
        let rep = verify_alpha_module(m, side, a, maps, budget)?;
        if !rep.is_ok() {
            return Err(Error::HypothesisFails(format!("{name}: {rep}")));
        }
    }
    for (i, j, a) in [(0usize, 1usize, &a1), (1, 0, &a2)] {
        let m = ring.module(i, j);
        for x in g.elements() {
            for h in g.elements() {
                let lhs = m.left_product(&a.domains[x], &m.all()).intersection(&m.left_product(&a.domains[h], &m.all()));
                let rhs = m.left_product(&a.domains[x].intersection(&a.domains[h]), &m.all());
                if lhs != rhs {
                    return Err(Error::HypothesisFails(format!(
                        "D_{} M_{}{} ∩ D_{} M_{}{} != (D_{} ∩ D_{}) M_{}{}",
                        g.name(x),
                        i + 1,
                        j + 1,
                        g.name(h),
                        i + 1,
                        j + 1,
                        g.name(x),
                        g.name(h),
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
    }
    let mut off = BTreeMap::new();
    off.insert((0, 1), gamma12);
    off.insert((1, 0), gamma21);
    let d = Datum::with_offdiagonal(ring, g, vec![a1, a2], off)?;
    for (i, j) in [(0, 1), (1, 0)] {
        let (mij, mji) = (d.parent.module(i, j), d.parent.module(j, i));
        let a = &d.actions[i];
        for x in d.group.elements() {
            let xi = d.group.inv(x);
            let (us, vs) = pair_lists(mij, d.domain(xi, i, j), mji, d.domain(xi, j, i));
            for &u in &us {
                for &v in &vs {
                    let lhs = a.maps[x].get(d.parent.block_product(i, j, i, u, v));
                    let rhs = d.parent.block_product(i, j, i, d.map(x, i, j).at(u), d.map(x, j, i).at(v));
                    if lhs != Some(rhs) {
                        return Err(Error::HypothesisFails(format!(
                            "alpha^({})_{}(u v) != gamma(u) gamma(v) at u = {}, v = {}",
                            i + 1,
                            d.group.name(x),
                            mij.show(u),
                            mji.show(v)
                        )));
                    }
                }
            }
        }
    }
    let rep = verify_datum(&d, budget);
    if !rep.is_ok() {
        return Err(Error::DatumInvalid(rep));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datum::GlobalDatum;
    use crate::genmatrix::matrix_ring;
    use crate::group::FiniteGroup;
    use crate::ring::{zn, DirectProduct};

    fn swap_datum() -> Datum {
        let b = Budget::default();
        let p = DirectProduct::power(zn(2).unwrap(), 2, &b).unwrap();
        let r = Arc::new(matrix_ring(p.ring(), 2, &b).unwrap());
        let swap: Vec<Elem> = (0..4).map(|x| p.encode(&[p.decode(x)[1], p.decode(x)[0]])).collect();
        let id: Vec<Elem> = (0..4).collect();
        GlobalDatum::new(r, Arc::new(FiniteGroup::cyclic(2)), vec![vec![id; 4], vec![swap; 4]]).unwrap().to_datum().unwrap()
    }

    #[test]
    fn regular_module_over_itself() {
        let d = swap_datum();
        let a = &d.actions[0];
        let m = Bimodule::regular(a.ring.clone());
        let rep = verify_alpha_module(&m, Side::Left, a, &a.maps, &Budget::default()).unwrap();
        assert!(rep.is_ok(), "{rep}");
        let mut broken = a.maps.clone();
        broken[0] = PartialMap { table: vec![0, 2, 1, 3] };
        let rep = verify_alpha_module(&m, Side::Left, a, &broken, &Budget::default()).unwrap();
        assert!(rep.has("identity at e"));
    }

    #[test]
    fn matrix_datum_is_morita() {
        let b = Budget::default();
        let d = swap_datum();
        let c = check_morita_equivalent(&d, 0, 1, &b).unwrap();
        assert!(c.is_ok(), "{:?}", c);
        assert!(c.product_action.is_some());
    }

    #[test]
    fn round_trip_through_morita_data() {
        let b = Budget::default();
        let d = swap_datum();
        let maps = |i: usize, j: usize| (0..2).map(|g| d.map(g, i, j).clone()).collect::<Vec<_>>();
        let back = datum_from_morita(d.parent.clone(), d.actions[0].clone(), d.actions[1].clone(), maps(0, 1), maps(1, 0), &b).unwrap();
        assert_eq!(back.gamma, d.gamma);
    }
}
