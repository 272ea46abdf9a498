//! Invariants, trace maps, separability and partial Galois coordinate systems
//! for unital partial actions, with the blockwise versions for `gamma`.

use serde::Serialize;
use std::collections::{HashMap, HashSet};

use crate::budget::Budget;
use crate::datum::{unitality_check, Datum, GammaAction};
use crate::error::{Error, Result};
use crate::genmatrix::GenMatrixRing;
use crate::group::GElem;
use crate::partial_action::{unit_idempotents, PartialGroupAction};
use crate::ring::{center, is_central_idempotent, set_generators, FiniteRing};
use crate::set::{Elem, ElemSet};

/// A unital partial action with the identities `1_g` of its domains.
#[derive(Clone, Debug)]
pub struct UnitalView {
    pub action: PartialGroupAction,
    pub units: Vec<Elem>,
}

impl UnitalView {
    pub fn new(action: PartialGroupAction) -> Result<UnitalView> {
        let units = unit_idempotents(&action)
            .ok_or_else(|| Error::NotUnitalAction(format!("some domain of the action on {} has no central unit", action.ring.label())))?;
        Ok(UnitalView { action, units })
    }

    /// Uses the given units after checking `A 1_g = A_g` with `1_g` a central
    /// idempotent.
    pub fn with_units(action: PartialGroupAction, units: Vec<Elem>) -> Result<UnitalView> {
        let r = action.ring.as_ref();
        if units.len() != action.group.order() {
            return Err(Error::ShapeMismatch("need one unit per group element".into()));
        }
        for (g, &u) in units.iter().enumerate() {
            if !is_central_idempotent(r, u) {
                return Err(Error::NotUnitalAction(format!("1_{} is not a central idempotent", action.group.name(g))));
            }
            let ideal = ElemSet::from_iter(r.order(), (0..r.order() as Elem).map(|x| r.mul(x, u)));
            if ideal != action.domains[g] {
                return Err(Error::NotUnitalAction(format!("A 1_{} differs from the domain", action.group.name(g))));
            }
        }
        Ok(UnitalView { action, units })
    }

    /// The view of `gamma` with `1_g = diag(1_g^(i))`.
    pub fn for_gamma(d: &Datum, gamma: &GammaAction, budget: &Budget) -> Result<UnitalView> {
        let u = unitality_check(d, budget)?;
        if !u.unital_action {
            return Err(Error::NotUnitalAction(u.witness.unwrap_or_else(|| "I_g differs from R 1_g".into())));
        }
        let units = u.units.iter().map(|row| d.parent.diag(row)).collect();
        Self::with_units(gamma.clone(), units)
    }

    pub fn ring(&self) -> &dyn FiniteRing {
        self.action.ring.as_ref()
    }

    /// `alpha_g(a 1_{g^-1})`.
    pub fn pi(&self, g: GElem, a: Elem) -> Elem {
        let r = self.ring();
        let ginv = self.action.group.inv(g);
        self.action.maps[g].at(r.mul(a, self.units[ginv]))
    }
}

/// `A^alpha = {a : alpha_g(a 1_{g^-1}) = a 1_g for all g}`, checked to be a
/// unital subring.
pub fn invariants(v: &UnitalView) -> Result<ElemSet> {
    let r = v.ring();
    let grp = &v.action.group;
    let set = ElemSet::from_iter(
        r.order(),
        (0..r.order() as Elem).filter(|&a| grp.elements().all(|g| v.pi(g, a) == r.mul(a, v.units[g]))),
    );
    if !set.contains(r.one()) || !set.contains(r.zero()) {
        return Err(Error::ClosureViolation("invariants miss 0 or 1".into()));
    }
    let gens = set_generators(r, &set);
    for &a in set.members() {
        for &b in &gens {
            if !set.contains(r.add(a, b)) || !set.contains(r.mul(a, b)) || !set.contains(r.mul(b, a)) {
                return Err(Error::ClosureViolation(format!("invariants not closed at ({}, {})", r.show(a), r.show(b))));
            }
        }
    }
    Ok(set)
}

/// `t(a) = Σ_g alpha_g(a 1_{g^-1})`.
pub fn trace(v: &UnitalView, a: Elem) -> Elem {
    let r = v.ring();
    v.action.group.elements().fold(r.zero(), |acc, g| r.add(acc, v.pi(g, a)))
}

/// The first central `c` with `t(c) = 1`, if any.
pub fn separability_witness(v: &UnitalView) -> Option<Elem> {
    let r = v.ring();
    center(r).sorted().into_iter().find(|&c| trace(v, c) == r.one())
}

/// Pairs `(a_t, b_t)` with `Σ a_t alpha_g(b_t 1_{g^-1}) = δ_{e,g}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GaloisSystem {
    pub pairs: Vec<(Elem, Elem)>,
}

impl GaloisSystem {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// `Σ_t a_t alpha_g(b_t 1_{g^-1})`.
pub fn galois_sum(v: &UnitalView, sys: &GaloisSystem, g: GElem) -> Elem {
    let r = v.ring();
    sys.pairs.iter().fold(r.zero(), |acc, &(a, b)| r.add(acc, r.mul(a, v.pi(g, b))))
}

/// The first group element where the system fails, if any.
pub fn galois_defect(v: &UnitalView, sys: &GaloisSystem) -> Option<GElem> {
    let r = v.ring();
    let e = v.action.group.identity();
    v.action.group.elements().find(|&g| galois_sum(v, sys, g) != if g == e { r.one() } else { r.zero() })
}

pub fn is_galois_system(v: &UnitalView, sys: &GaloisSystem) -> bool {
    sys.pairs.iter().all(|&(a, b)| (a as usize) < v.ring().order() && (b as usize) < v.ring().order()) && galois_defect(v, sys).is_none()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SearchOutcome {
    Found(GaloisSystem),
    /// The sums of all pair contributions never reach `δ`, at any length.
    Never,
    /// No system of at most this many pairs.
    NotWithin(usize),
    /// The search budget ran out.
    Undecided(String),
}

/// Searches for a coordinate system of at most `m_max` pairs.
///
/// Each pair contributes the vector `(a alpha_g(b 1_{g^-1}))_g`. Sums of at
/// most `h = ceil(m_max / 2)` contributions are enumerated breadth first, and
/// each new sum `s` is matched against an already indexed `δ - s`. If the sums
/// stop growing, they form the additive span of the contributions and a miss
/// is final.
pub fn galois_search(v: &UnitalView, m_max: usize, budget: &Budget) -> Result<SearchOutcome> {
    if m_max == 0 {
        return Err(Error::InvalidParameters("m_max must be at least 1".into()));
    }
    let r = v.ring();
    let grp = &v.action.group;
    let k = grp.order();
    let n = r.order();
    let pairs = (n as u128) * (n as u128);
    if pairs > (budget.max_search_states as u128) << 6 {
        return Err(Error::SearchSpaceExceeded(format!("{n}^2 candidate pairs")));
    }
    if (n as f64).log2() * k as f64 >= 127.0 {
        return Err(Error::SearchSpaceExceeded(format!("vectors of length {k} over {n} elements")));
    }
    // Vectors in R^k packed in radix n, coordinate 0 most significant.
    let pack = |x: &[Elem]| x.iter().fold(0u128, |acc, &d| acc * n as u128 + d as u128);
    let unpack = |mut v: u128, out: &mut [Elem]| {
        for d in out.iter_mut().rev() {
            *d = (v % n as u128) as Elem;
            v /= n as u128;
        }
    };
    let combine = |x: u128, y: u128, f: &dyn Fn(Elem, Elem) -> Elem| -> u128 {
        let (mut a, mut b) = (vec![0; k], vec![0; k]);
        unpack(x, &mut a);
        unpack(y, &mut b);
        for (p, &q) in a.iter_mut().zip(&b) {
            *p = f(*p, q);
        }
        pack(&a)
    };
    let add = |x: u128, y: u128| combine(x, y, &|p, q| r.add(p, q));
    let sub = |x: u128, y: u128| combine(x, y, &|p, q| r.sub(p, q));

    // Distinct nonzero contributions, first pair in lexicographic order.
    let proj: Vec<Vec<Elem>> = (0..n as Elem).map(|b| grp.elements().map(|g| v.pi(g, b)).collect()).collect();
    let zero = pack(&vec![r.zero(); k]);
    let mut steps: Vec<(u128, (Elem, Elem))> = Vec::new();
    let mut seen: HashSet<u128> = HashSet::new();
    for a in 0..n as Elem {
        for b in 0..n as Elem {
            let w: Vec<Elem> = proj[b as usize].iter().map(|&p| r.mul(a, p)).collect();
            let w = pack(&w);
            if w != zero && seen.insert(w) {
                steps.push((w, (a, b)));
            }
        }
    }
    drop(seen);
    let mut t = vec![r.zero(); k];
    t[grp.identity()] = r.one();
    let target = pack(&t);

    // states[i] = (vector, depth, parent, step)
    let mut states: Vec<(u128, usize, usize, usize)> = vec![(zero, 0, usize::MAX, usize::MAX)];
    let mut index: HashMap<u128, usize> = HashMap::from([(zero, 0)]);
    let h = m_max.div_ceil(2);
    let mut work: u128 = 0;
    let work_limit = (budget.max_search_states as u128) << 6;
    let expand = |frontier: &[usize],
                  states: &mut Vec<(u128, usize, usize, usize)>,
                  index: &mut HashMap<u128, usize>,
                  depth: usize,
                  work: &mut u128|
     -> Option<Vec<usize>> {
        let mut next = Vec::new();
        for &s in frontier {
            for (t, &(w, _)) in steps.iter().enumerate() {
                *work += 1;
                if *work > work_limit {
                    return None;
                }
                let x = add(states[s].0, w);
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(x) {
                    e.insert(states.len());
                    next.push(states.len());
                    states.push((x, depth, s, t));
                }
            }
            if states.len() > budget.max_search_states {
                return None;
            }
        }
        Some(next)
    };
    // A new state x of depth d meets an indexed y with x + y = δ. Every pair
    // of states is seen when the later of the two is added.
    let meet = |new: &[usize], states: &[(u128, usize, usize, usize)], index: &HashMap<u128, usize>| {
        new.iter().find_map(|&i| {
            let j = *index.get(&sub(target, states[i].0))?;
            (states[i].1 + states[j].1 <= m_max).then_some((i, j))
        })
    };
    let path = |states: &[(u128, usize, usize, usize)], mut i: usize| -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        while states[i].2 != usize::MAX {
            out.push(steps[states[i].3].1);
            i = states[i].2;
        }
        out.reverse();
        out
    };
    let mut frontier = vec![0usize];
    let mut hit = meet(&frontier, &states, &index);
    let mut depth = 0;
    let mut stable = false;
    while hit.is_none() && depth < h {
        depth += 1;
        match expand(&frontier, &mut states, &mut index, depth, &mut work) {
            Some(next) => frontier = next,
            None => return Ok(SearchOutcome::Undecided(format!("search budget exhausted at depth {depth}"))),
        }
        hit = meet(&frontier, &states, &index);
        if frontier.is_empty() {
            stable = true;
            break;
        }
    }
    if let Some((i, j)) = hit {
        let mut pairs = path(&states, i);
        pairs.extend(path(&states, j));
        let sys = GaloisSystem { pairs };
        if !is_galois_system(v, &sys) {
            return Err(Error::ClosureViolation("reconstructed Galois system fails validation".into()));
        }
        return Ok(SearchOutcome::Found(sys));
    }
    if stable {
        return Ok(SearchOutcome::Never);
    }
    // Keep growing to see whether the sums stabilize without reaching δ.
    loop {
        depth += 1;
        match expand(&frontier, &mut states, &mut index, depth, &mut work) {
            Some(next) => frontier = next,
            None => return Ok(SearchOutcome::NotWithin(m_max)),
        }
        if index.contains_key(&target) {
            return Ok(SearchOutcome::NotWithin(m_max));
        }
        if frontier.is_empty() {
            return Ok(SearchOutcome::Never);
        }
    }
}

/// Blocks `M^gamma_ij = {m : gamma_g^(ij)(m 1_{g^-1}^(j)) = m 1_g^(j)}`, checked
/// against the ambient invariants, the component invariants on the diagonal,
/// and closure under the invariant rings.
pub fn block_invariants(d: &Datum, view: &UnitalView, budget: &Budget) -> Result<Vec<ElemSet>> {
    let r = &d.parent;
    let n = r.size();
    let g = &d.group;
    let u = unitality_check(d, budget)?;
    let mut blocks = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let m = r.module(i, j);
            blocks.push(ElemSet::from_iter(
                m.order(),
                (0..m.order() as Elem).filter(|&y| {
                    g.elements().all(|x| d.map(x, i, j).get(m.ract(y, u.units[g.inv(x)][j])) == Some(m.ract(y, u.units[x][j])))
                }),
            ));
        }
    }
    let ambient = invariants(view)?;
    if r.block_set(&blocks, budget)? != ambient {
        return Err(Error::BlockMismatch("blockwise invariants differ from the ambient invariants".into()));
    }
    let mut comp_inv = Vec::with_capacity(n);
    for i in 0..n {
        let cv = UnitalView::new(d.actions[i].clone())?;
        let inv = invariants(&cv)?;
        if inv != blocks[i * n + i] {
            return Err(Error::BlockMismatch(format!("diagonal block {} differs from the invariants of R_{}", i + 1, i + 1)));
        }
        comp_inv.push(inv);
    }
    for i in 0..n {
        for j in 0..n {
            let m = r.module(i, j);
            let b = &blocks[i * n + j];
            for &y in b.members() {
                if comp_inv[i].members().iter().any(|&a| !b.contains(m.lact(a, y)))
                    || comp_inv[j].members().iter().any(|&a| !b.contains(m.ract(y, a)))
                {
                    return Err(Error::BlockMismatch(format!(
                        "M^gamma_{}{} is not a bimodule over the invariant rings at {}",
                        i + 1,
                        j + 1,
                        m.show(y)
                    )));
                }
            }
        }
    }
    Ok(blocks)
}

/// `t^(ij)(m) = Σ_g gamma_g^(ij)(m 1_{g^-1}^(j))`.
pub fn block_trace(d: &Datum, units: &[Vec<Elem>], i: usize, j: usize, m: Elem) -> Elem {
    let r = &d.parent;
    let g = &d.group;
    let md = r.module(i, j);
    g.elements().fold(md.zero(), |acc, x| md.add(acc, d.map(x, i, j).at(md.ract(m, units[g.inv(x)][j]))))
}

/// Compares the ambient trace with the blockwise trace on every element.
pub fn check_block_trace(d: &Datum, view: &UnitalView, budget: &Budget) -> Result<()> {
    let r = &d.parent;
    let n = r.size();
    let u = unitality_check(d, budget)?;
    for x in 0..r.order() as Elem {
        let blocks = r.decode(x);
        let entrywise: Vec<Elem> = (0..n * n).map(|b| block_trace(d, &u.units, b / n, b % n, blocks[b])).collect();
        let t = trace(view, x);
        if r.encode(&entrywise) != t {
            return Err(Error::BlockMismatch(format!("trace differs at {}", r.show(x))));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Separability {
    pub ambient: Option<Elem>,
    pub components: Vec<Option<Elem>>,
    /// Whether `diag(r_1, ..., r_n)` is a witness, when every component has one.
    pub diagonal_witness: Option<bool>,
}

/// Separability of `R` over its invariants against each component.
pub fn separability_equivalence(d: &Datum, view: &UnitalView) -> Result<Separability> {
    let r = &d.parent;
    let ambient = separability_witness(view);
    let mut components = Vec::with_capacity(r.size());
    for a in &d.actions {
        components.push(separability_witness(&UnitalView::new(a.clone())?));
    }
    let all = components.iter().all(|c| c.is_some());
    if ambient.is_some() != all {
        return Err(Error::EquivalenceFailed(format!(
            "ambient separable: {}, components separable: {:?}",
            ambient.is_some(),
            components.iter().map(|c| c.is_some()).collect::<Vec<_>>()
        )));
    }
    let diagonal_witness = if all {
        let w = r.diag(&components.iter().map(|c| c.expect("all present")).collect::<Vec<_>>());
        let ok = crate::ring::is_central(r.as_ref(), w) && trace(view, w) == r.one();
        if !ok {
            return Err(Error::EquivalenceFailed("diagonal of component witnesses is not a witness".into()));
        }
        Some(true)
    } else {
        None
    };
    Ok(Separability { ambient, components, diagonal_witness })
}

/// Pads component systems with zero pairs and forms diagonal matrices.
pub fn galois_lift(d: &Datum, view: &UnitalView, systems: &[GaloisSystem]) -> Result<GaloisSystem> {
    let r: &GenMatrixRing = &d.parent;
    let n = r.size();
    if systems.len() != n {
        return Err(Error::ShapeMismatch(format!("need {n} component systems")));
    }
    for (i, s) in systems.iter().enumerate() {
        let cv = UnitalView::new(d.actions[i].clone())?;
        if !is_galois_system(&cv, s) {
            return Err(Error::ComponentSystemInvalid(format!("system for component {} fails", i + 1)));
        }
    }
    let m = systems.iter().map(|s| s.len()).max().unwrap_or(0);
    let mut pairs = Vec::with_capacity(m);
    for t in 0..m {
        let (xs, ys): (Vec<Elem>, Vec<Elem>) = (0..n)
            .map(|i| systems[i].pairs.get(t).copied().unwrap_or((r.ring(i).zero(), r.ring(i).zero())))
            .unzip();
        pairs.push((r.diag(&xs), r.diag(&ys)));
    }
    let sys = GaloisSystem { pairs };
    if !is_galois_system(view, &sys) {
        return Err(Error::TheoremCheckFailed("lifted diagonal system fails".into()));
    }
    Ok(sys)
}

/// Result of pushing a system for `gamma` down to component `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Projection {
    /// The pairs `(u_jk, v_jk)` built for each group element.
    pub per_element: Vec<Vec<(Elem, Elem)>>,
    /// Whether the pairs are the same for every group element.
    pub uniform: bool,
    /// The common system, when uniform and valid for every group element.
    pub system: Option<GaloisSystem>,
}

/// For each `g`: `z_jk = a_tj^k gamma_g^(jt)(b_jt^k 1_{g^-1}^(t))`, `y_jk` its
/// preimage under `alpha_g^(t)`, and the pairs `(1, y_jk)` for `j != t` and
/// `(a_tt^k, b_tt^k)`. Each per-element family is checked at its own `g`.
pub fn galois_project(d: &Datum, view: &UnitalView, sys: &GaloisSystem, t: usize, budget: &Budget) -> Result<Projection> {
    let r = &d.parent;
    let n = r.size();
    if t >= n {
        return Err(Error::ShapeMismatch(format!("no component {}", t + 1)));
    }
    if !is_galois_system(view, sys) {
        return Err(Error::SystemInvalid("system fails for gamma".into()));
    }
    let g = &d.group;
    let u = unitality_check(d, budget)?;
    let rt = r.ring(t);
    let cv = UnitalView::new(d.actions[t].clone())?;
    let inverses: Vec<_> = g.elements().map(|x| d.actions[t].maps[x].inverse(rt.order()).expect("bijection")).collect();
    let mut per_element = Vec::with_capacity(g.order());
    for x in g.elements() {
        let xi = g.inv(x);
        let mut fam = Vec::new();
        for &(a, b) in &sys.pairs {
            let (ab, bb) = (r.decode(a), r.decode(b));
            for j in 0..n {
                if j == t {
                    fam.push((ab[t * n + t], bb[t * n + t]));
                    continue;
                }
                let mjt = r.module(j, t);
                let inner = d
                    .map(x, j, t)
                    .get(mjt.ract(bb[j * n + t], u.units[xi][t]))
                    .ok_or_else(|| Error::ProjectionInconsistent(format!("gamma_{} undefined on b 1_g^-1", g.name(x))))?;
                let z = r.block_product(t, j, t, ab[t * n + j], inner);
                let y = inverses[x]
                    .get(z)
                    .ok_or_else(|| Error::ProjectionInconsistent(format!("z outside D_{}^({})", g.name(x), t + 1)))?;
                fam.push((rt.one(), y));
            }
        }
        let s = GaloisSystem { pairs: fam.clone() };
        let want = if x == g.identity() { rt.one() } else { rt.zero() };
        if galois_sum(&cv, &s, x) != want {
            return Err(Error::ProjectionInconsistent(format!("projected family fails at its own element {}", g.name(x))));
        }
        per_element.push(fam);
    }
    let uniform = per_element.windows(2).all(|w| w[0] == w[1]);
    let system = if uniform {
        let s = GaloisSystem { pairs: per_element[0].clone() };
        if !is_galois_system(&cv, &s) {
            return Err(Error::ProjectionInconsistent("uniform projected system fails".into()));
        }
        Some(s)
    } else {
        None
    };
    Ok(Projection { per_element, uniform, system })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Galois { pairs: usize, via: String },
    NotGalois,
    NotWithinBound,
    Undecided,
}

impl Verdict {
    pub fn is_galois(&self) -> bool {
        matches!(self, Verdict::Galois { .. })
    }

    pub fn is_decided(&self) -> bool {
        matches!(self, Verdict::Galois { .. } | Verdict::NotGalois)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GaloisTheorem {
    pub ambient: Verdict,
    pub components: Vec<Verdict>,
    pub lifted: Option<GaloisSystem>,
    /// Per component, whether the projection of the ambient system was uniform.
    pub projection_uniform: Vec<Option<bool>>,
    pub agree: bool,
}

fn verdict(o: &SearchOutcome, via: &str) -> Verdict {
    match o {
        SearchOutcome::Found(s) => Verdict::Galois { pairs: s.len(), via: via.into() },
        SearchOutcome::Never => Verdict::NotGalois,
        SearchOutcome::NotWithin(_) => Verdict::NotWithinBound,
        SearchOutcome::Undecided(_) => Verdict::Undecided,
    }
}

/// Decides Galois-ness of `R` and of each component by bounded search, then
/// uses lifting and projection as second routes, and compares the verdicts.
pub fn galois_theorem_check(d: &Datum, view: &UnitalView, m_max: usize, budget: &Budget) -> Result<GaloisTheorem> {
    let n = d.size();
    let amb = galois_search(view, m_max, budget)?;
    let mut ambient = verdict(&amb, "search");
    let mut comps = Vec::with_capacity(n);
    let mut comp_systems = Vec::with_capacity(n);
    for a in &d.actions {
        let cv = UnitalView::new(a.clone())?;
        let o = galois_search(&cv, m_max, budget)?;
        comps.push(verdict(&o, "search"));
        comp_systems.push(match o {
            SearchOutcome::Found(s) => Some(s),
            _ => None,
        });
    }
    let mut lifted = None;
    if comp_systems.iter().all(|s| s.is_some()) {
        let systems: Vec<GaloisSystem> = comp_systems.iter().map(|s| s.clone().expect("all present")).collect();
        let s = galois_lift(d, view, &systems)?;
        if ambient == Verdict::NotGalois {
            return Err(Error::EquivalenceFailed("lifted system is valid but the search excluded every system".into()));
        }
        if !ambient.is_galois() {
            ambient = Verdict::Galois { pairs: s.len(), via: "lift".into() };
        }
        lifted = Some(s);
    }
    let mut projection_uniform = vec![None; n];
    if let SearchOutcome::Found(s) = &amb {
        for t in 0..n {
            let p = galois_project(d, view, s, t, budget)?;
            projection_uniform[t] = Some(p.uniform);
            if let Some(ps) = p.system {
                if comps[t] == Verdict::NotGalois {
                    return Err(Error::EquivalenceFailed(format!("projected system is valid but component {} was excluded", t + 1)));
                }
                if !comps[t].is_galois() {
                    comps[t] = Verdict::Galois { pairs: ps.len(), via: "projection".into() };
                }
            }
        }
    }
    let all_comp = comps.iter().all(|c| c.is_galois());
    let any_not = comps.contains(&Verdict::NotGalois);
    let agree = (ambient.is_galois() && all_comp) || (ambient == Verdict::NotGalois && any_not);
    if (ambient.is_galois() && any_not) || (ambient == Verdict::NotGalois && all_comp) {
        return Err(Error::EquivalenceFailed(format!("ambient {ambient:?}, components {comps:?}")));
    }
    Ok(GaloisTheorem { ambient, components: comps, lifted, projection_uniform, agree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::ring::{zn, DirectProduct, RingRef};
    use std::sync::Arc;

    fn swap(k: u32) -> (UnitalView, DirectProduct) {
        let b = Budget::default();
        let p = DirectProduct::power(zn(k).unwrap(), 2, &b).unwrap();
        let n = p.ring().order() as Elem;
        let sw: Vec<Elem> = (0..n).map(|x| p.encode(&[p.decode(x)[1], p.decode(x)[0]])).collect();
        let a = PartialGroupAction::global(Arc::new(FiniteGroup::cyclic(2)), p.ring(), vec![(0..n).collect(), sw]).unwrap();
        (UnitalView::new(a).unwrap(), p)
    }

    #[test]
    fn swap_invariants_and_trace() {
        let (v, p) = swap(2);
        let inv = invariants(&v).unwrap();
        assert_eq!(inv.sorted(), vec![0, 3]);
        assert_eq!(trace(&v, p.unit(0)), 3);
        assert_eq!(separability_witness(&v), Some(p.unit(1)));
    }

    #[test]
    fn swap_has_a_two_pair_system() {
        let (v, p) = swap(2);
        let sys = GaloisSystem { pairs: vec![(p.unit(0), p.unit(0)), (p.unit(1), p.unit(1))] };
        assert!(is_galois_system(&v, &sys));
        match galois_search(&v, 1, &Budget::default()).unwrap() {
            SearchOutcome::NotWithin(1) | SearchOutcome::Never => {}
            o => panic!("unexpected {o:?}"),
        }
        match galois_search(&v, 2, &Budget::default()).unwrap() {
            SearchOutcome::Found(s) => assert!(is_galois_system(&v, &s) && s.len() <= 2),
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn trivial_action_on_z2_is_never_galois_for_c2() {
        // C2 acting trivially and globally: Σ a_t b_t would have to be 1 and 0.
        let r: RingRef = zn(2).unwrap();
        let a = PartialGroupAction::trivial(Arc::new(FiniteGroup::cyclic(2)), r);
        let v = UnitalView::new(a).unwrap();
        assert_eq!(galois_search(&v, 4, &Budget::default()).unwrap(), SearchOutcome::Never);
    }
}
