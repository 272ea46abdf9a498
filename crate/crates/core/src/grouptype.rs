//! Group-type partial groupoid actions: the global action `beta` of `Γ_0^2`,
//! the isotropy action `epsilon` on `A ⋆_beta Γ_0^2`, the datum on the matrix
//! ring `(A_i δ_(j,i))` and the chain of skew ring isomorphisms.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::budget::Budget;
use crate::datum::{construct_gamma, verify_datum, Datum, GammaAction};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GElem};
use crate::groupoid::{
    check_group_type, classify_groupoid_action, connected_decomposition_iso, is_connected, skew_as_genmatrix,
    skew_groupoid_ring, verify_groupoid_action, FiniteGroupoid, GroupTypeData, Morphism, PartialGroupoidAction,
    SkewMatrix,
};
use crate::partial_action::{check_equivalent, enumerate_partial_actions, verify_partial_action, PartialGroupAction, PartialMap};
use crate::ring::{zn, DirectProduct, FiniteRing, RingMorphism, RingRef};
use crate::set::{Elem, ElemSet};
use crate::skew::SkewRing;

/// `beta_(x_i, x_j) = alpha_{h_j} alpha_{h_i^-1}` on `A_(x_i, x_j) = A_{x_j}`,
/// over the coarse groupoid on the objects.
pub fn beta_from_grouptype(a: &PartialGroupoidAction, data: &GroupTypeData, budget: &Budget) -> Result<PartialGroupoidAction> {
    check_group_type(a, data)?;
    let gd = &a.groupoid;
    let n = gd.object_count();
    let r = a.ring.as_ref();
    let mut domains = Vec::with_capacity(n * n);
    let mut maps = Vec::with_capacity(n * n);
    for u in 0..n * n {
        let (i, j) = (u / n, u % n);
        domains.push(a.object_ideal(j).clone());
        let hi_inv = gd.inv(data.h[i]);
        let pairs = a.object_ideal(i).members().iter().map(|&y| {
            let back = a.maps[hi_inv].at(y);
            (y, a.maps[data.h[j]].at(back))
        });
        maps.push(PartialMap::from_pairs(r.order(), pairs.collect::<Vec<_>>())?);
    }
    let beta = PartialGroupoidAction::new(Arc::new(FiniteGroupoid::coarse(n)), a.ring.clone(), domains, maps)?;
    let rep = verify_groupoid_action(&beta, budget);
    if !rep.is_ok() {
        return Err(Error::TheoremCheckFailed(format!("beta is not an action: {rep}")));
    }
    if !classify_groupoid_action(&beta).global {
        return Err(Error::TheoremCheckFailed("beta is not global".into()));
    }
    Ok(beta)
}

/// The isotropy group at the base with its morphisms, identity first.
pub fn isotropy_of(a: &PartialGroupoidAction, data: &GroupTypeData) -> (Arc<FiniteGroup>, Vec<Morphism>) {
    let (g, ms) = a.groupoid.isotropy(data.base);
    (Arc::new(g), ms)
}

/// `C_g = ⊕_u alpha_{h_{t(u)}}(A_g) δ_u` and
/// `epsilon_g(alpha_{h_{t(u)}}(a) δ_u) = alpha_{h_{t(u)}}(alpha_g(a)) δ_u`.
pub fn epsilon_action(
    a: &PartialGroupoidAction,
    data: &GroupTypeData,
    group: &Arc<FiniteGroup>,
    iso: &[Morphism],
    c: &Arc<SkewRing>,
    budget: &Budget,
) -> Result<PartialGroupAction> {
    let gd = &a.groupoid;
    let n = gd.object_count();
    let k = n * n;
    let h = &data.h;
    // Component sets of C_g per u, and epsilon_g per component.
    let comp = |g: GElem, u: usize| -> Vec<Elem> {
        let t = u % n;
        let mut v: Vec<Elem> = a.domains[iso[g]].members().iter().map(|&x| a.maps[h[t]].at(x)).collect();
        v.sort_unstable();
        v
    };
    let eps = |g: GElem, u: usize, y: Elem| -> Elem {
        let t = u % n;
        let x = a.maps[gd.inv(h[t])].at(y);
        a.maps[h[t]].at(a.maps[iso[g]].at(x))
    };
    let mut domains = Vec::with_capacity(group.order());
    let mut lists = Vec::with_capacity(group.order());
    for g in group.elements() {
        let per_u: Vec<Vec<Elem>> = (0..k).map(|u| comp(g, u)).collect();
        let elems = cartesian(&per_u, budget)?;
        let set = ElemSet::from_iter(c.order(), elems.iter().map(|cs| c.from_components(cs).expect("component of C")));
        domains.push(set);
        lists.push(elems);
    }
    let mut maps = Vec::with_capacity(group.order());
    for g in group.elements() {
        let ginv = group.inv(g);
        let pairs: Vec<(Elem, Elem)> = lists[ginv]
            .iter()
            .map(|cs| {
                let img: Vec<Elem> = cs.iter().enumerate().map(|(u, &y)| eps(g, u, y)).collect();
                (c.from_components(cs).expect("component"), c.from_components(&img).expect("image component"))
            })
            .collect();
        maps.push(PartialMap::from_pairs(c.order(), pairs)?);
    }
    let act = PartialGroupAction::new(group.clone(), c.clone(), domains, maps)?;
    let rep = verify_partial_action(&act, budget);
    if !rep.is_ok() {
        return Err(Error::InvalidAction(rep));
    }
    Ok(act)
}

fn cartesian(lists: &[Vec<Elem>], budget: &Budget) -> Result<Vec<Vec<Elem>>> {
    let total: u128 = lists.iter().map(|l| l.len() as u128).product();
    budget.check_elements("component product", total)?;
    let mut out: Vec<Vec<Elem>> = vec![Vec::new()];
    for l in lists {
        out = out.into_iter().flat_map(|p| l.iter().map(move |&x| [p.as_slice(), &[x]].concat())).collect();
    }
    Ok(out)
}

/// The datum of a group-type action on `R = (A_i δ_(j,i))`.
#[derive(Clone, Debug)]
pub struct GroupTypeDatum {
    pub datum: Datum,
    pub beta: PartialGroupoidAction,
    pub matrix: SkewMatrix,
    pub group: Arc<FiniteGroup>,
    pub isotropy_morphisms: Vec<Morphism>,
}

/// `alpha^(i)_g(alpha_{h_i}(a)) = alpha_{h_i}(alpha_g(a))` on
/// `D_g^(i) = alpha_{h_i}(A_g)`, and the same rule on every `M_ij`; the result
/// must pass `verify_datum`.
pub fn gamma_from_grouptype(a: &PartialGroupoidAction, data: &GroupTypeData, budget: &Budget) -> Result<GroupTypeDatum> {
    if !is_connected(&a.groupoid) {
        return Err(Error::NotConnected);
    }
    let beta = beta_from_grouptype(a, data, budget)?;
    let matrix = skew_as_genmatrix(&beta, budget)?;
    let (group, iso) = isotropy_of(a, data);
    let gd = &a.groupoid;
    let n = gd.object_count();
    let h = &data.h;
    let mut actions = Vec::with_capacity(n);
    let mut comp_maps = Vec::with_capacity(n);
    for i in 0..n {
        let ri = &matrix.corners[i];
        let back = gd.inv(h[i]);
        let mut domains = Vec::with_capacity(group.order());
        let mut maps = Vec::with_capacity(group.order());
        for g in group.elements() {
            let dom = a.domains[iso[g]].members().iter().map(|&x| ri.from_parent(a.maps[h[i]].at(x)).expect("in A_i"));
            domains.push(ElemSet::from_iter(ri.order(), dom));
            let src = &a.domains[iso[group.inv(g)]];
            let pairs: Vec<(Elem, Elem)> = src
                .members()
                .iter()
                .map(|&x| {
                    let y = a.maps[h[i]].at(x);
                    debug_assert_eq!(a.maps[back].at(y), x);
                    let z = a.maps[h[i]].at(a.maps[iso[g]].at(x));
                    (ri.from_parent(y).expect("in A_i"), ri.from_parent(z).expect("in A_i"))
                })
                .collect();
            maps.push(PartialMap::from_pairs(ri.order(), pairs)?);
        }
        let act = PartialGroupAction::new(group.clone(), ri.clone(), domains, maps.clone())
            .map_err(|e| Error::TheoremCheckFailed(format!("alpha^({}) malformed: {e}", i + 1)))?;
        actions.push(act);
        comp_maps.push(maps);
    }
    let mut off = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off.insert((i, j), comp_maps[i].clone());
            }
        }
    }
    let datum = Datum::with_offdiagonal(matrix.ring.clone(), group.clone(), actions, off)?;
    let rep = verify_datum(&datum, budget);
    if !rep.is_ok() {
        return Err(Error::DatumInvalid(rep));
    }
    Ok(GroupTypeDatum { datum, beta, matrix, group, isotropy_morphisms: iso })
}

/// One verified stage of the chain.
#[derive(Clone, Debug, Serialize)]
pub struct ChainStage {
    pub stage: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub stages: Vec<ChainStage>,
    /// `|A ⋆_alpha Γ|`, `|(A ⋆_beta Γ_0^2) ⋆_epsilon G|`, `|R ⋆_gamma G|`.
    pub orders: [usize; 3],
}

fn broken(stage: &str, witness: impl Into<String>) -> Error {
    Error::ChainBroken { stage: stage.into(), witness: witness.into() }
}

fn check_iso(stage: &str, f: &RingMorphism) -> Result<()> {
    if !f.is_bijective() {
        return Err(broken(stage, "map is not bijective"));
    }
    let rep = f.verify_exhaustive();
    if !rep.is_ok() {
        return Err(broken(stage, rep.to_string()));
    }
    Ok(())
}

/// Builds `A ⋆_alpha Γ`, `(A ⋆_beta Γ_0^2) ⋆_epsilon G` and `R ⋆_gamma G` with the
/// maps `psi` and `phi`, checks both maps on every pair of elements, and checks
/// that `phi` carries `epsilon` to `gamma`.
pub fn iso_chain_check(a: &PartialGroupoidAction, data: &GroupTypeData, budget: &Budget) -> Result<ChainReport> {
    let mut stages = Vec::new();
    let mut note = |s: &str, d: String| stages.push(ChainStage { stage: s.into(), detail: d });
    let rep = verify_groupoid_action(a, budget);
    if !rep.is_ok() {
        return Err(broken("groupoid action", rep.to_string()));
    }
    check_group_type(a, data)?;
    let gd = &a.groupoid;
    let n = gd.object_count();
    let dec = connected_decomposition_iso(gd, data.base, &data.h).map_err(|e| broken("groupoid decomposition", e.to_string()))?;
    note("groupoid decomposition", format!("{} morphisms onto {}^2 x {}", gd.morphism_count(), n, dec.isotropy.label()));

    let s1 = Arc::new(skew_groupoid_ring(a, budget)?);
    let rep = s1.verify_associativity();
    if !rep.is_ok() {
        return Err(broken("skew groupoid ring", rep.to_string()));
    }
    let gt = gamma_from_grouptype(a, data, budget)?;
    let group = gt.group.clone();
    let iso = &gt.isotropy_morphisms;
    let c = gt.matrix.skew.clone();
    let eps = epsilon_action(a, data, &group, iso, &c, budget)?;
    let s2 = Arc::new(SkewRing::of_group_action(&eps, budget)?);
    let gamma: GammaAction = construct_gamma(&gt.datum, budget)?;
    let s3 = Arc::new(SkewRing::of_group_action(&gamma, budget)?);
    let orders = [s1.order(), s2.order(), s3.order()];
    if orders[0] != orders[1] || orders[1] != orders[2] {
        return Err(broken("cardinality", format!("{orders:?}")));
    }
    note("cardinality", format!("{} elements each", orders[0]));

    // psi(a δ_g) = (a δ_(s(g),t(g))) δ_{g_x}; dec.map[g] = ((s,t), k).
    let k = group.order();
    let mut pre = vec![usize::MAX; n * n * k];
    for (g, &u) in dec.map.iter().enumerate() {
        pre[u] = g;
    }
    // The decomposition orders isotropy elements like the isotropy group of the datum.
    if dec.isotropy_morphisms != *iso {
        return Err(broken("groupoid decomposition", "isotropy orders differ"));
    }
    let mut psi = Vec::with_capacity(s1.order());
    for x in 0..s1.order() as Elem {
        let comps = s1.components(x);
        let mut outer = Vec::with_capacity(k);
        for kk in 0..k {
            let inner: Vec<Elem> = (0..n * n).map(|u| comps[pre[u * k + kk]]).collect();
            let cx = c.from_components(&inner).ok_or_else(|| broken("psi", format!("component of {} leaves A ⋆ Γ_0^2", s1.show(x))))?;
            outer.push(cx);
        }
        psi.push(s2.from_components(&outer).ok_or_else(|| broken("psi", format!("image of {} leaves C_g", s1.show(x))))?);
    }
    let psi = RingMorphism::new(s1.clone(), s2.clone(), psi)?;
    check_iso("psi", &psi)?;
    note("psi", "bijective, additive and multiplicative on all pairs".into());

    let rep = check_equivalent(&eps, &gamma, &gt.matrix.phi.map);
    if !rep.is_ok() {
        return Err(broken("epsilon and gamma", rep.to_string()));
    }
    note("epsilon and gamma", "phi(C_g) = I_g and phi intertwines the maps".into());

    let mut phi_hat = Vec::with_capacity(s2.order());
    for x in 0..s2.order() as Elem {
        let img: Vec<Elem> = s2.components(x).iter().map(|&y| gt.matrix.phi.apply(y)).collect();
        phi_hat.push(s3.from_components(&img).ok_or_else(|| broken("phi", format!("image of {} leaves I_g", s2.show(x))))?);
    }
    let phi_hat = RingMorphism::new(s2.clone(), s3.clone(), phi_hat)?;
    check_iso("phi", &phi_hat)?;
    note("phi", "bijective, additive and multiplicative on all pairs".into());
    Ok(ChainReport { stages, orders })
}

/// A random group-type instance.
#[derive(Clone, Debug)]
pub struct GroupTypeInstance {
    pub action: PartialGroupoidAction,
    pub data: GroupTypeData,
    pub objects: usize,
    pub isotropy_order: usize,
    pub exponent: usize,
}

/// Options for [`random_group_type`].
#[derive(Clone, Debug)]
pub struct RandomGroupType {
    pub max_objects: usize,
    pub isotropy_orders: Vec<usize>,
    pub max_exponent: usize,
    /// Upper bound on `|A_x|^(n^2)`, the order of the matrix ring.
    pub max_matrix_order: u128,
}

impl Default for RandomGroupType {
    fn default() -> Self {
        RandomGroupType { max_objects: 3, isotropy_orders: vec![1, 2, 3], max_exponent: 2, max_matrix_order: 1 << 20 }
    }
}

/// `Γ = I_n^2 × C_k` acting on `A = ⊕_y A_y` with `A_y = Z_2^m`: a random
/// partial action of `C_k` on `Z_2^m`, transported to object `y` by a random
/// coordinate permutation `tau_y` (`tau_x` the identity). A morphism
/// `((s,t), g)` has domain `tau_t(D_g)` and map `tau_t alpha_g tau_s^-1`.
pub fn random_group_type<R: Rng>(rng: &mut R, opts: &RandomGroupType, budget: &Budget) -> Result<GroupTypeInstance> {
    for _ in 0..64 {
        let n = rng.gen_range(1..=opts.max_objects.max(1));
        let k = *opts.isotropy_orders.choose(rng).unwrap_or(&1);
        let m = rng.gen_range(1..=opts.max_exponent.max(1));
        if (1u128 << (m * n * n)) > opts.max_matrix_order {
            continue;
        }
        return group_type_instance(rng, n, k, m, budget);
    }
    Err(Error::InvalidParameters("no instance within the size bound".into()))
}

/// A group-type instance with the given shape; the isotropy action and the
/// transports are drawn from `rng`.
pub fn group_type_instance<R: Rng>(rng: &mut R, n: usize, k: usize, m: usize, budget: &Budget) -> Result<GroupTypeInstance> {
    let grp = Arc::new(FiniteGroup::cyclic(k));
    let small = DirectProduct::power(zn(2)?, m, budget)?;
    let actions = enumerate_partial_actions(grp.clone(), small.ring(), budget)?;
    let base = actions.choose(rng).ok_or_else(|| Error::InvalidParameters("no partial actions".into()))?.clone();
    let perms: Vec<Vec<usize>> = (0..n)
        .map(|y| {
            let mut p: Vec<usize> = (0..m).collect();
            if y > 0 {
                p.shuffle(rng);
            }
            p
        })
        .collect();
    build_group_type(&base, &perms, budget).map(|(action, data)| GroupTypeInstance { action, data, objects: n, isotropy_order: k, exponent: m })
}

/// Transports a partial action of a group on `Z_2^m` to `I_n^2 × G` with the
/// coordinate permutations `perms[y]`.
pub fn build_group_type(base: &PartialGroupAction, perms: &[Vec<usize>], budget: &Budget) -> Result<(PartialGroupoidAction, GroupTypeData)> {
    let n = perms.len();
    let small: RingRef = base.ring.clone();
    let m = perms.first().map_or(0, |p| p.len());
    if n == 0 || 1usize << m != small.order() {
        return Err(Error::InvalidParameters("ring must be Z2^m with one permutation of m coordinates per object".into()));
    }
    let grp = base.group.clone();
    let k = grp.order();
    let big = DirectProduct::power(zn(2)?, m * n, budget)?;
    let a = big.ring();
    let bits = |x: Elem| -> Vec<Elem> { (0..m).map(|c| (x >> (m - 1 - c)) & 1).collect() };
    let from_bits = |b: &[Elem]| -> Elem { b.iter().fold(0, |acc, &v| (acc << 1) | v) };
    let tau = |y: usize, x: Elem| -> Elem {
        let b = bits(x);
        let mut out = vec![0; m];
        for c in 0..m {
            out[perms[y][c]] = b[c];
        }
        from_bits(&out)
    };
    let embed = |y: usize, x: Elem| -> Elem {
        let mut coords = vec![0; m * n];
        coords[y * m..(y + 1) * m].copy_from_slice(&bits(x));
        big.encode(&coords)
    };
    let gd = Arc::new(FiniteGroupoid::product(&FiniteGroupoid::coarse(n), &FiniteGroupoid::from_group(&grp)));
    let mut domains = Vec::with_capacity(gd.morphism_count());
    let mut maps = Vec::with_capacity(gd.morphism_count());
    for u in 0..gd.morphism_count() {
        let (pair, g) = (u / k, u % k);
        let (s, t) = (pair / n, pair % n);
        domains.push(ElemSet::from_iter(a.order(), base.domains[g].members().iter().map(|&x| embed(t, tau(t, x)))));
        let pairs: Vec<(Elem, Elem)> = base.domains[grp.inv(g)]
            .members()
            .iter()
            .map(|&x| (embed(s, tau(s, x)), embed(t, tau(t, base.maps[g].at(x)))))
            .collect();
        maps.push(PartialMap::from_pairs(a.order(), pairs)?);
    }
    let act = PartialGroupoidAction::new(gd.clone(), a, domains, maps)?;
    let rep = verify_groupoid_action(&act, budget);
    if !rep.is_ok() {
        return Err(Error::InvalidAction(rep));
    }
    let data = classify_groupoid_action(&act)
        .group_type
        .ok_or_else(|| Error::TheoremCheckFailed("transported action is not group-type".into()))?;
    Ok((act, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datum::verify_datum;
    use crate::partial_action::verify_partial_action;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c2_on_z2sq() -> PartialGroupAction {
        // D_g = Z2 x 0, alpha_g the identity there.
        let b = Budget::default();
        let r = DirectProduct::power(zn(2).unwrap(), 2, &b).unwrap().ring();
        let g = Arc::new(FiniteGroup::cyclic(2));
        let dg = ElemSet::from_iter(4, [0, 2]);
        PartialGroupAction::new(
            g,
            r,
            vec![ElemSet::full(4), dg.clone()],
            vec![PartialMap { table: (0..4).collect() }, PartialMap::identity_on(&dg)],
        )
        .unwrap()
    }

    #[test]
    fn one_object_datum_is_the_isotropy_action() {
        let b = Budget::default();
        let (a, data) = build_group_type(&c2_on_z2sq(), &[vec![0, 1]], &b).unwrap();
        let gt = gamma_from_grouptype(&a, &data, &b).unwrap();
        assert_eq!(gt.datum.size(), 1);
        assert!(verify_datum(&gt.datum, &b).is_ok());
        assert_eq!(gt.datum.actions[0].domains[1].len(), 2);
    }

    #[test]
    fn two_objects_with_isotropy_c2() {
        let b = Budget::default();
        let (a, data) = build_group_type(&c2_on_z2sq(), &[vec![0, 1], vec![1, 0]], &b).unwrap();
        assert_eq!(a.groupoid.morphism_count(), 8);
        let beta = beta_from_grouptype(&a, &data, &b).unwrap();
        assert!(classify_groupoid_action(&beta).global);
        for x in 0..2 {
            assert!(beta.maps[x * 2 + x].pairs().iter().all(|&(p, q)| p == q));
        }
        let gt = gamma_from_grouptype(&a, &data, &b).unwrap();
        let gamma = construct_gamma(&gt.datum, &b).unwrap();
        assert!(verify_partial_action(&gamma, &b).is_ok());
        let eps = epsilon_action(&a, &data, &gt.group, &gt.isotropy_morphisms, &gt.matrix.skew, &b).unwrap();
        assert_eq!(eps.domains[0].len(), gt.matrix.skew.order());
        assert_eq!(eps.domains[1].len(), 16);
    }

    #[test]
    fn random_instances_are_group_type() {
        let b = Budget::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let opts = RandomGroupType { max_objects: 2, max_matrix_order: 256, ..Default::default() };
        for _ in 0..4 {
            let inst = random_group_type(&mut rng, &opts, &b).unwrap();
            let gt = gamma_from_grouptype(&inst.action, &inst.data, &b).unwrap();
            assert!(verify_datum(&gt.datum, &b).is_ok());
        }
    }

    #[test]
    fn chain_on_two_objects() {
        let b = Budget::default();
        let (a, data) = build_group_type(&c2_on_z2sq(), &[vec![0, 1], vec![1, 0]], &b).unwrap();
        let rep = iso_chain_check(&a, &data, &b).unwrap();
        assert_eq!(rep.orders, [4096; 3]);
        assert_eq!(rep.stages.len(), 5);
    }
}
