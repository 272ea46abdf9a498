//! Worked examples and seeded corpora.
//!
//! Coordinates of `Z_q^m` are numbered from 0 in every spec type. The closed
//! forms of the `k^n` example use the 1-based names `ẽ_1..ẽ_n` instead; see
//! [`closed_form`].

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bimodule::Bimodule;
use crate::budget::Budget;
use crate::datum::{construct_gamma, induce_action, unitality_check, Datum, GammaAction, GlobalDatum, InducedAction};
use crate::error::{Error, Result};
use crate::genmatrix::{build_genmatrix, ideal_blocks, is_symmetric, symmetric_ideal, upper_triangular, GenMatrixRing, GenMatrixSpec, IdealFamily};
use crate::group::FiniteGroup;
use crate::groupoid::{skew_as_genmatrix, theta_action, SkewMatrix};
use crate::grouptype::{gamma_from_grouptype, group_type_instance, random_group_type, GroupTypeDatum, GroupTypeInstance, RandomGroupType};
use crate::ring::{all_ideals, is_ideal, zn, DirectProduct, FiniteRing, RingRef};
use crate::set::{Elem, ElemSet};

/// A global datum on `R` and the partial action it induces on `J`.
pub struct Bundle {
    pub label: String,
    pub global: GlobalDatum,
    pub idempotents: Vec<Elem>,
    pub induced: InducedAction,
}

impl Bundle {
    pub fn datum(&self) -> &Datum {
        &self.induced.datum
    }

    pub fn gamma(&self) -> &GammaAction {
        &self.induced.gamma
    }
}

/// `f` on the elements of a module sitting inside a ring, as a table on the
/// module carrier.
fn module_table(m: &Bimodule, f: impl Fn(Elem) -> Elem) -> Result<Vec<Elem>> {
    let (_, elems) = m.ambient().ok_or_else(|| Error::ShapeMismatch(format!("{} is not inside a ring", m.label())))?;
    elems
        .iter()
        .map(|&x| {
            elems
                .binary_search(&f(x))
                .map(|p| p as Elem)
                .map_err(|_| Error::NotInvariant(format!("{} is not mapped into itself", m.label())))
        })
        .collect()
}

/// The global datum acting by `autos[g]` on every block of a ring whose blocks
/// all sit inside one ring `B`.
pub fn entrywise_datum(r: Arc<GenMatrixRing>, group: Arc<FiniteGroup>, autos: &[Vec<Elem>]) -> Result<GlobalDatum> {
    let n = r.size();
    if autos.len() != group.order() {
        return Err(Error::ShapeMismatch("need one automorphism per group element".into()));
    }
    let mut maps = Vec::with_capacity(group.order());
    for t in autos {
        let row = (0..n * n)
            .map(|b| module_table(r.module(b / n, b % n), |x| t[x as usize]))
            .collect::<Result<Vec<_>>>()?;
        maps.push(row);
    }
    GlobalDatum::new(r, group, maps)
}

fn principal(b: &dyn FiniteRing, e: Elem) -> ElemSet {
    ElemSet::from_iter(b.order(), (0..b.order() as Elem).map(|x| b.mul(x, e)))
}

/// `R = (B, Be_1; Be_1, B)` with `theta` acting entrywise, and the partial
/// action induced on `J = (Be_2, Be_2 e_1; e_1 Be_2, Be_2)`.
///
/// The off-diagonal maps are also checked against
/// `gamma_g(e_2 theta_{g^-1}(e_2) e_1 b) = e_2 theta_g(e_2) e_1 theta_g(b)`.
pub fn gen_sec62(
    b: RingRef,
    e1: Elem,
    e2: Elem,
    group: Arc<FiniteGroup>,
    thetas: Vec<Vec<Elem>>,
    budget: &Budget,
) -> Result<Bundle> {
    if group.order() > budget.max_group_order {
        return Err(Error::InvalidParameters(format!("group order {} above {}", group.order(), budget.max_group_order)));
    }
    if thetas.len() != group.order() || thetas.iter().any(|t| t.len() != b.order()) {
        return Err(Error::ShapeMismatch("need one automorphism table of B per group element".into()));
    }
    let k1 = principal(b.as_ref(), e1);
    for g in group.elements() {
        if let Some(&x) = k1.members().iter().find(|&&x| !k1.contains(thetas[g][x as usize])) {
            return Err(Error::NotInvariant(format!("K_1 = B e_1: theta_{}({}) leaves it", group.name(g), b.show(x))));
        }
    }
    let mut modules = BTreeMap::new();
    modules.insert((0, 1), Bimodule::ideal(b.clone(), &k1, "Be1")?);
    modules.insert((1, 0), Bimodule::ideal(b.clone(), &k1, "Be1")?);
    let mut r = build_genmatrix(GenMatrixSpec { rings: vec![b.clone(), b.clone()], modules, products: BTreeMap::new() }, budget)?;
    r.set_label(format!("(B, Be1; Be1, B) over {}", b.label()));
    let r = Arc::new(r);
    let global = entrywise_datum(r, group, &thetas)?;
    let induced = induce_action(&global, &[e2, e2], budget)?;
    check_offdiagonal_formula(&global, &induced, b.as_ref(), &k1, e1, e2)?;
    Ok(Bundle { label: format!("idempotent ideal example over {}", b.label()), global, idempotents: vec![e2, e2], induced })
}

fn check_offdiagonal_formula(gd: &GlobalDatum, ind: &InducedAction, b: &dyn FiniteRing, k1: &ElemSet, e1: Elem, e2: Elem) -> Result<()> {
    let g = &gd.group;
    let pos = k1.positions();
    let unit = |x| b.mul(e2, gd.map(x, 0, 0)[e2 as usize]);
    for x in g.elements() {
        let (src, tgt) = (b.mul(unit(g.inv(x)), e1), b.mul(unit(x), e1));
        let theta = gd.map(x, 0, 0);
        for (i, j) in [(0, 1), (1, 0)] {
            let map = ind.datum.map(x, i, j);
            let mut args = ElemSet::empty(map.universe());
            for y in 0..b.order() as Elem {
                let arg = ind.j.block_id(i, j, pos[b.mul(src, y) as usize]);
                let val = ind.j.block_id(i, j, pos[b.mul(tgt, theta[y as usize]) as usize]);
                let (Some(arg), Some(val)) = (arg, val) else {
                    return Err(Error::FormulaMismatch(format!("block ({}, {}) formula leaves J", i + 1, j + 1)));
                };
                args.insert(arg);
                if map.get(arg) != Some(val) {
                    return Err(Error::FormulaMismatch(format!(
                        "gamma_{}^({},{}) at e2 theta(e2) e1 {} gives {:?}, formula gives {}",
                        g.name(x),
                        i + 1,
                        j + 1,
                        b.show(y),
                        map.get(arg),
                        val
                    )));
                }
            }
            if args != map.domain() {
                return Err(Error::FormulaMismatch(format!("domain of gamma_{}^({},{})", g.name(x), i + 1, j + 1)));
            }
        }
    }
    Ok(())
}

/// Coordinate permutation `c -> perm[c]` as a table on `p`.
pub fn permutation_table(p: &DirectProduct, perm: &[usize]) -> Vec<Elem> {
    (0..p.radix.total() as Elem)
        .map(|x| {
            let d = p.decode(x);
            let mut out = d.clone();
            for (c, &v) in d.iter().enumerate() {
                out[perm[c]] = v;
            }
            p.encode(&out)
        })
        .collect()
}

/// The element with `1` on `support` and `0` elsewhere.
pub fn support_element(p: &DirectProduct, support: &[usize]) -> Elem {
    let mut d: Vec<Elem> = p.factors.iter().map(|f| f.zero()).collect();
    for &c in support {
        d[c] = p.factors[c].one();
    }
    p.encode(&d)
}

fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter().all(|&c| c < perm.len() && !std::mem::replace(&mut seen[c], true))
}

fn compose_perm(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&c| a[c]).collect()
}

/// `perm^0, perm^1, .., perm^(k-1)`; `perm^k` must be the identity.
fn powers(perm: &[usize], k: usize) -> Result<Vec<Vec<usize>>> {
    if !is_permutation(perm) || k == 0 {
        return Err(Error::InvalidParameters(format!("{perm:?} of order {k} is not a permutation action")));
    }
    let id: Vec<usize> = (0..perm.len()).collect();
    let mut out = vec![id.clone()];
    for _ in 1..k {
        let next = compose_perm(perm, out.last().expect("nonempty"));
        out.push(next);
    }
    if compose_perm(perm, out.last().expect("nonempty")) != id {
        return Err(Error::InvalidParameters(format!("{perm:?} does not have order dividing {k}")));
    }
    Ok(out)
}

/// The `k^n`, `C_{n-r}` example.
pub struct Sec63 {
    pub bundle: Bundle,
    pub base: DirectProduct,
    pub n: usize,
    pub r: usize,
    /// Number of `(g, i)` for which `1_g^(i)` was compared.
    pub units_checked: usize,
    /// Number of `(g, x)` for which `gamma_g(x)` was compared.
    pub entries_checked: usize,
}

/// Closed forms for the `k^n` example.
///
/// Indices follow `ẽ_1, .., ẽ_n`: `ẽ_p` is coordinate `p - 1` of `B = k^n`.
/// The group is generated by `g` of order `h = n - r`, `e_1 = ẽ_1 + .. + ẽ_r`
/// and `e_2 = ẽ_r + .. + ẽ_{n-1}`. A diagonal entry of `J` is written
/// `b_0 ẽ_r + b_1 ẽ_{r+1} + .. + b_{h-1} ẽ_{n-1}`, so `b_j` is the coefficient of
/// `ẽ_{r+j}`.
pub mod closed_form {
    use crate::set::Elem;

    /// 1-based position to coordinate.
    fn c(p: usize) -> usize {
        p - 1
    }

    /// Support of `1_{g^i}` from the generic display
    /// `ẽ_r + .. + ẽ_{r+i-1} + ẽ_{r+i+1} + .. + ẽ_{n-1}`, meant for `1 <= i <= h-2`.
    pub fn unit_generic(n: usize, r: usize, i: usize) -> Vec<usize> {
        (r..=r + i - 1).chain(r + i + 1..=n - 1).collect()
    }

    /// Support of `1_{g^i}`: `e_2` at `i = 0`, the generic display for
    /// `1 <= i <= h-2` and `ẽ_r + .. + ẽ_{n-2}` at `i = h-1`.
    pub fn unit(n: usize, r: usize, i: usize) -> Vec<usize> {
        let h = n - r;
        if i == 0 {
            (r..=n - 1).collect()
        } else if i + 2 <= h {
            unit_generic(n, r, i)
        } else {
            (r..=n - 2).collect()
        }
    }

    /// Positions allowed in the domain `J_{g^{h-i}}` of `gamma_{g^i}`: all of
    /// `ẽ_r..ẽ_{n-1}` except `ẽ_{n-i}` (the coefficient `b_{h-i}`).
    pub fn domain(n: usize, r: usize, i: usize) -> Vec<usize> {
        (r..=n - 1).filter(|&p| p != n - i).collect()
    }

    fn inside(x: &[Elem], zero: Elem, allowed: &[usize]) -> bool {
        x.iter().enumerate().all(|(k, &v)| v == zero || allowed.contains(&(k + 1)))
    }

    /// `gamma_{g^i}` on a diagonal entry, `1 <= i <= h-1`:
    /// `b_0 ẽ_r + b_{h-i+1} ẽ_{r+1} + .. + b_{h-1} ẽ_{r+i-1}
    ///  + b_1 ẽ_{r+i+1} + .. + b_{h-i-1} ẽ_{n-1}`.
    /// `None` off the domain.
    pub fn gamma(n: usize, r: usize, i: usize, x: &[Elem], zero: Elem) -> Option<Vec<Elem>> {
        let h = n - r;
        if !inside(x, zero, &domain(n, r, i)) {
            return None;
        }
        let b = |j: usize| x[c(r + j)];
        let mut out = vec![zero; n];
        out[c(r)] = b(0);
        for j in h - i + 1..=h - 1 {
            out[c(r + j - (h - i))] = b(j);
        }
        for j in 1..=h - i - 1 {
            out[c(r + i + j)] = b(j);
        }
        Some(out)
    }

    /// The separate display for `gamma_g` on `c_0 ẽ_r + .. + c_{h-2} ẽ_{n-2}`:
    /// `c_0 ẽ_r + c_1 ẽ_{r+2} + .. + c_{h-2} ẽ_{n-1}`.
    pub fn gamma_g(n: usize, r: usize, x: &[Elem], zero: Elem) -> Option<Vec<Elem>> {
        let h = n - r;
        let allowed: Vec<usize> = (r..=n - 2).collect();
        if !inside(x, zero, &allowed) {
            return None;
        }
        let cz = |j: usize| x[c(r + j)];
        let mut out = vec![zero; n];
        out[c(r)] = cz(0);
        for j in 1..=h.saturating_sub(2) {
            out[c(r + 1 + j)] = cz(j);
        }
        Some(out)
    }

    /// Off-diagonal entries `y ẽ_r` are fixed.
    pub fn gamma_offdiagonal(r: usize, x: &[Elem], zero: Elem) -> Option<Vec<Elem>> {
        inside(x, zero, &[r]).then(|| x.to_vec())
    }
}

/// `B = k^n`, `e_1 = ẽ_1 + .. + ẽ_r`, `e_2 = ẽ_r + .. + ẽ_{n-1}` and `C_{n-r}`
/// generated by `theta_g(a_1..a_n) = (a_1..a_r, a_n, a_{r+1}..a_{n-1})`.
/// The induced action is compared elementwise with the closed forms.
pub fn gen_sec63(k: RingRef, n: usize, r: usize, budget: &Budget) -> Result<Sec63> {
    if !(1 <= r && r < n) {
        return Err(Error::InvalidParameters(format!("need 1 <= r < n, got r = {r}, n = {n}")));
    }
    let size = (k.order() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > budget.max_shift_carrier as u128 {
        return Err(Error::BudgetExceeded { what: "k^n".into(), size, limit: budget.max_shift_carrier as u128 });
    }
    let ko = k.order() as Elem;
    if (0..ko).any(|a| (0..ko).any(|b| k.mul(a, b) != k.mul(b, a))) {
        return Err(Error::InvalidParameters(format!("{} is not commutative", k.label())));
    }
    let h = n - r;
    let p = DirectProduct::power(k, n, budget)?;
    // theta^i sends a_p (p > r) to position r + 1 + ((p - r - 1 + i) mod h).
    let thetas: Vec<Vec<Elem>> = (0..h)
        .map(|i| {
            let perm: Vec<usize> = (1..=n).map(|q| if q <= r { q - 1 } else { r + (q - r - 1 + i) % h }).collect();
            permutation_table(&p, &perm)
        })
        .collect();
    let e1 = support_element(&p, &(0..r).collect::<Vec<_>>());
    let e2 = support_element(&p, &(r - 1..n - 1).collect::<Vec<_>>());
    let group = Arc::new(FiniteGroup::cyclic(h));
    let mut bundle = gen_sec62(p.ring(), e1, e2, group, thetas, budget)?;
    bundle.label = format!("k^n example, k = {}, n = {n}, r = {r}", p.factors[0].label());
    let (units_checked, entries_checked) = check_sec63(&p, n, r, &bundle, budget)?;
    Ok(Sec63 { bundle, base: p, n, r, units_checked, entries_checked })
}

fn check_sec63(p: &DirectProduct, n: usize, r: usize, bundle: &Bundle, budget: &Budget) -> Result<(usize, usize)> {
    let h = n - r;
    let k = &p.factors[0];
    let (zero, one) = (k.zero(), k.one());
    let mismatch = |w: String| Err(Error::FormulaMismatch(w));

    // The two transcriptions must agree where both apply.
    if h >= 2 && closed_form::unit_generic(n, r, h - 1) != closed_form::unit(n, r, h - 1) {
        return mismatch("generic and separate displays of 1_{g^(h-1)} differ".into());
    }
    for i in 1..h {
        if closed_form::domain(n, r, i) != closed_form::unit(n, r, h - i) {
            return mismatch(format!("domain of gamma_{{g^{i}}} is not B 1_{{g^{}}}", h - i));
        }
    }

    let d = bundle.datum();
    let g = &d.group;
    let j = &bundle.induced.j;
    let uni = unitality_check(d, budget)?;
    let mut units_checked = 0;
    for x in g.elements() {
        let support = closed_form::unit(n, r, x);
        let want: Vec<Elem> = (1..=n).map(|q| if support.contains(&q) { one } else { zero }).collect();
        for t in 0..d.size() {
            let got = p.decode(j.corners[t].to_parent(uni.units[x][t]));
            if got != want {
                return mismatch(format!("1_{}^({}) is {:?}, closed form gives {:?}", g.name(x), t + 1, got, want));
            }
            units_checked += 1;
        }
    }

    let parent = &j.parent;
    let nb = parent.size();
    let elems: Vec<Vec<Elem>> = (0..nb * nb)
        .map(|b| parent.module(b / nb, b % nb).ambient().map(|(_, e)| e).unwrap_or_default())
        .collect();
    let gamma = bundle.gamma();
    let mut entries_checked = 0;
    for x in g.elements() {
        for y in 0..j.ring.order() as Elem {
            let blocks = parent.decode(j.to_parent(y));
            let mut img = Vec::with_capacity(blocks.len());
            for (b, &v) in blocks.iter().enumerate() {
                let coords = p.decode(elems[b][v as usize]);
                let out = if x == 0 {
                    Some(coords.clone())
                } else if b / nb == b % nb {
                    let a = closed_form::gamma(n, r, x, &coords, zero);
                    if x == 1 {
                        let s = closed_form::gamma_g(n, r, &coords, zero);
                        if s != a {
                            return mismatch(format!("the two displays of gamma_g differ at {coords:?}: {a:?} vs {s:?}"));
                        }
                    }
                    a
                } else {
                    closed_form::gamma_offdiagonal(r, &coords, zero)
                };
                match out {
                    Some(c) => match elems[b].binary_search(&p.encode(&c)) {
                        Ok(pos) => img.push(pos as Elem),
                        Err(_) => return mismatch(format!("closed form of gamma_{} leaves block {b}", g.name(x))),
                    },
                    None => break,
                }
            }
            let closed = if img.len() == blocks.len() { j.from_parent_blocks(&img) } else { None };
            let generic = gamma.apply(x, y);
            if closed != generic {
                return mismatch(format!(
                    "gamma_{} at {}: generic {:?}, closed form {:?}",
                    g.name(x),
                    j.ring.show_matrix(y),
                    generic.map(|v| j.ring.show_matrix(v)),
                    closed.map(|v| j.ring.show_matrix(v))
                ));
            }
            entries_checked += 1;
        }
    }
    Ok((units_checked, entries_checked))
}

/// `B = Z_q^m` with `g` permuting coordinates, `R = (B f_ij)` where `f_ij` is
/// the idempotent supported on `blocks[i*n+j]` (diagonal supports are ignored,
/// `f_ii = 1`), and idempotents `e_i` supported on `idempotents[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportSpec {
    pub modulus: u32,
    pub coords: usize,
    /// `g` moves coordinate `c` to `perm[c]`.
    pub perm: Vec<usize>,
    pub order: usize,
    pub blocks: Vec<Vec<usize>>,
    pub idempotents: Vec<Vec<usize>>,
}

impl SupportSpec {
    pub fn size(&self) -> usize {
        self.idempotents.len()
    }

    fn support(&self, i: usize, j: usize) -> Vec<usize> {
        if i == j {
            (0..self.coords).collect()
        } else {
            self.blocks[i * self.size() + j].clone()
        }
    }

    /// `|J|` as a power of the modulus.
    fn j_exponent(&self) -> usize {
        let n = self.size();
        (0..n * n)
            .map(|b| {
                let s = self.support(b / n, b % n);
                s.iter().filter(|c| self.idempotents[b / n].contains(c)).count()
            })
            .sum()
    }

    fn r_exponent(&self) -> usize {
        let n = self.size();
        (0..n * n).map(|b| self.support(b / n, b % n).len()).sum()
    }
}

/// The ring `R` of a support spec and `B`.
pub fn support_ring(spec: &SupportSpec, budget: &Budget) -> Result<(DirectProduct, GenMatrixRing)> {
    let n = spec.size();
    if n == 0 || spec.blocks.len() != n * n {
        return Err(Error::ShapeMismatch("need n idempotent supports and n*n block supports".into()));
    }
    if spec.coords == 0 || spec.perm.len() != spec.coords {
        return Err(Error::ShapeMismatch("perm needs one entry per coordinate".into()));
    }
    let all = spec.blocks.iter().chain(&spec.idempotents).flatten();
    if let Some(c) = all.clone().find(|&&c| c >= spec.coords) {
        return Err(Error::InvalidParameters(format!("coordinate {c} out of range")));
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (sij, sjk, sik) = (spec.support(i, j), spec.support(j, k), spec.support(i, k));
                if let Some(c) = sij.iter().find(|c| sjk.contains(c) && !sik.contains(c)) {
                    return Err(Error::InvalidParameters(format!(
                        "coordinate {c} is in the supports of ({}, {}) and ({}, {}) but not ({}, {})",
                        i + 1,
                        j + 1,
                        j + 1,
                        k + 1,
                        i + 1,
                        k + 1
                    )));
                }
            }
        }
    }
    let p = DirectProduct::power(zn(spec.modulus)?, spec.coords, budget)?;
    let b = p.ring();
    let mut modules = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let set = principal(b.as_ref(), support_element(&p, &spec.support(i, j)));
                modules.insert((i, j), Bimodule::ideal(b.clone(), &set, format!("Bf{}{}", i + 1, j + 1))?);
            }
        }
    }
    let mut r = build_genmatrix(GenMatrixSpec { rings: vec![b.clone(); n], modules, products: BTreeMap::new() }, budget)?;
    r.set_label(format!("support ring over Z{}^{}", spec.modulus, spec.coords));
    Ok((p, r))
}

/// The bundle of a support spec; `g` acts entrywise.
pub fn support_bundle(spec: &SupportSpec, budget: &Budget) -> Result<Bundle> {
    let (p, r) = support_ring(spec, budget)?;
    let autos: Vec<Vec<Elem>> = powers(&spec.perm, spec.order)?.iter().map(|q| permutation_table(&p, q)).collect();
    let group = Arc::new(FiniteGroup::cyclic(spec.order));
    let global = entrywise_datum(Arc::new(r), group, &autos)?;
    let idempotents: Vec<Elem> = spec.idempotents.iter().map(|s| support_element(&p, s)).collect();
    let induced = induce_action(&global, &idempotents, budget)?;
    Ok(Bundle { label: format!("support spec {}", serde_json::to_string(spec)?), global, idempotents, induced })
}

/// Bounds for [`random_support_spec`].
#[derive(Clone, Debug)]
pub struct RandomSupport {
    pub moduli: Vec<u32>,
    pub max_coords: usize,
    pub max_blocks: usize,
    pub max_group: usize,
    /// Bounds on `|J|` and `|R|`.
    pub max_j: u128,
    pub max_r: u128,
}

impl Default for RandomSupport {
    fn default() -> Self {
        RandomSupport { moduli: vec![2, 3], max_coords: 3, max_blocks: 3, max_group: 4, max_j: 256, max_r: 1 << 16 }
    }
}

fn perm_order(perm: &[usize]) -> usize {
    let id: Vec<usize> = (0..perm.len()).collect();
    let mut cur = perm.to_vec();
    let mut k = 1;
    while cur != id {
        cur = compose_perm(perm, &cur);
        k += 1;
    }
    k
}

fn orbits(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for s in 0..perm.len() {
        let mut orb = Vec::new();
        let mut c = s;
        while !seen[c] {
            seen[c] = true;
            orb.push(c);
            c = perm[c];
        }
        if !orb.is_empty() {
            out.push(orb);
        }
    }
    out
}

/// A random support spec: invariant block supports closed under products,
/// and idempotents `e_i = e + e'_i` with `e'_i` avoiding row and column `i`,
/// which makes the family symmetric.
pub fn random_support_spec<R: Rng>(rng: &mut R, opts: &RandomSupport) -> Result<SupportSpec> {
    for _ in 0..256 {
        let q = *opts.moduli.choose(rng).unwrap_or(&2);
        let m = rng.gen_range(1..=opts.max_coords.max(1));
        let n = rng.gen_range(1..=opts.max_blocks.max(1));
        let mut perm: Vec<usize> = (0..m).collect();
        perm.shuffle(rng);
        let base = perm_order(&perm);
        let mult = rng.gen_range(1..=2);
        let order = if base * mult <= opts.max_group { base * mult } else { base };
        if order > opts.max_group {
            continue;
        }
        let orbs = orbits(&perm);
        let random_invariant = |rng: &mut R| -> Vec<usize> {
            let mut s: Vec<usize> = orbs.iter().filter(|_| rng.gen_bool(0.5)).flatten().copied().collect();
            s.sort_unstable();
            s
        };
        let mut blocks = vec![Vec::new(); n * n];
        for (b, blk) in blocks.iter_mut().enumerate() {
            if b / n != b % n {
                *blk = random_invariant(rng);
            }
        }
        let common: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.5)).collect();
        let idempotents: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                let touched: Vec<usize> =
                    (0..n).filter(|&j| j != i).flat_map(|j| blocks[i * n + j].iter().chain(&blocks[j * n + i]).copied()).collect();
                let mut e: Vec<usize> = (0..m).filter(|c| common.contains(c) || (!touched.contains(c) && rng.gen_bool(0.5))).collect();
                e.sort_unstable();
                e
            })
            .collect();
        if idempotents.iter().any(|e| e.is_empty()) {
            continue;
        }
        let spec = SupportSpec { modulus: q, coords: m, perm, order, blocks, idempotents };
        let closed = (0..n).all(|i| {
            (0..n).all(|j| (0..n).all(|k| spec.support(i, j).iter().all(|c| !spec.support(j, k).contains(c) || spec.support(i, k).contains(c))))
        });
        let pow = |e: usize| (q as u128).checked_pow(e as u32).unwrap_or(u128::MAX);
        if closed && pow(spec.j_exponent()) <= opts.max_j && pow(spec.r_exponent()) <= opts.max_r {
            return Ok(spec);
        }
    }
    Err(Error::InvalidParameters("no support spec within the bounds".into()))
}

/// Where a corpus datum came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Induced,
    GroupType,
    Worked,
}

/// A datum with its constructed partial action.
pub struct CorpusItem {
    pub label: String,
    pub source: Source,
    pub datum: Datum,
    pub gamma: GammaAction,
}

impl CorpusItem {
    fn from_bundle(b: Bundle, source: Source) -> CorpusItem {
        let label = b.label.clone();
        let InducedAction { datum, gamma, .. } = b.induced;
        CorpusItem { label, source, datum, gamma }
    }

    pub fn from_group_type(label: String, gt: GroupTypeDatum, budget: &Budget) -> Result<CorpusItem> {
        let gamma = construct_gamma(&gt.datum, budget)?;
        Ok(CorpusItem { label, source: Source::GroupType, datum: gt.datum, gamma })
    }
}

fn instance_label(inst: &GroupTypeInstance) -> String {
    format!("group type, {} objects, isotropy C{}, A_y = Z2^{}", inst.objects, inst.isotropy_order, inst.exponent)
}

/// A random induced datum with `|J| <= 256` and `|G| <= 4`.
pub fn random_induced<R: Rng>(rng: &mut R, budget: &Budget) -> Result<CorpusItem> {
    let spec = random_support_spec(rng, &RandomSupport::default())?;
    Ok(CorpusItem::from_bundle(support_bundle(&spec, budget)?, Source::Induced))
}

/// A random group-type datum with a ring of at most 256 elements and isotropy
/// of order at most 4.
pub fn random_grouptype_datum<R: Rng>(rng: &mut R, budget: &Budget) -> Result<CorpusItem> {
    let opts = RandomGroupType { max_objects: 2, isotropy_orders: vec![1, 2, 3, 4], max_exponent: 2, max_matrix_order: 256 };
    let inst = random_group_type(rng, &opts, budget)?;
    let gt = gamma_from_grouptype(&inst.action, &inst.data, budget)?;
    CorpusItem::from_group_type(instance_label(&inst), gt, budget)
}

/// Alternates between the induced and the group-type generators.
pub fn random_datums<R: Rng>(rng: &mut R, count: usize, budget: &Budget) -> Result<Vec<CorpusItem>> {
    (0..count)
        .map(|i| if i % 2 == 0 { random_induced(rng, budget) } else { random_grouptype_datum(rng, budget) })
        .collect()
}

/// The standard instance of the idempotent ideal example: `B = Z_2^4`,
/// `e_1 = ẽ_1 + ẽ_2`, `e_2 = ẽ_2 + ẽ_3`, `C_2` swapping coordinates 3 and 4.
pub fn sec62_standard(budget: &Budget) -> Result<Bundle> {
    let p = DirectProduct::power(zn(2)?, 4, budget)?;
    let swap = permutation_table(&p, &[0, 1, 3, 2]);
    let id: Vec<Elem> = (0..16).collect();
    let e1 = support_element(&p, &[0, 1]);
    let e2 = support_element(&p, &[1, 2]);
    gen_sec62(p.ring(), e1, e2, Arc::new(FiniteGroup::cyclic(2)), vec![id, swap], budget)
}

/// Unital instances for the Galois checks, with at least one datum whose
/// second component is a trivial `C_2` action on `Z_2`.
pub fn galois_corpus(budget: &Budget) -> Result<Vec<CorpusItem>> {
    use rand::SeedableRng;
    let mut out = vec![CorpusItem::from_bundle(sec62_standard(budget)?, Source::Worked)];
    out.push(CorpusItem::from_bundle(gen_sec63(zn(2)?, 4, 2, budget)?.bundle, Source::Worked));
    let fixed = [
        // Swap on M_2(Z2 x Z2).
        SupportSpec { modulus: 2, coords: 2, perm: vec![1, 0], order: 2, blocks: vec![vec![], vec![0, 1], vec![0, 1], vec![]], idempotents: vec![vec![0, 1], vec![0, 1]] },
        // Galois first component, fixed second component.
        SupportSpec { modulus: 2, coords: 3, perm: vec![1, 0, 2], order: 2, blocks: vec![vec![]; 4], idempotents: vec![vec![0, 1], vec![2]] },
        // Trivial group on M_2(Z3).
        SupportSpec { modulus: 3, coords: 1, perm: vec![0], order: 1, blocks: vec![vec![], vec![0], vec![0], vec![]], idempotents: vec![vec![0], vec![0]] },
        // C2 acting trivially on M_2(Z2).
        SupportSpec { modulus: 2, coords: 1, perm: vec![0], order: 2, blocks: vec![vec![], vec![0], vec![0], vec![]], idempotents: vec![vec![0], vec![0]] },
        // C3 rotating Z2^3, cut down by a non-invariant idempotent.
        SupportSpec { modulus: 2, coords: 3, perm: vec![1, 2, 0], order: 3, blocks: vec![vec![], vec![0, 1, 2], vec![0, 1, 2], vec![]], idempotents: vec![vec![0, 1], vec![0, 1]] },
        // C3 rotating Z2^3 globally.
        SupportSpec { modulus: 2, coords: 3, perm: vec![1, 2, 0], order: 3, blocks: vec![vec![]], idempotents: vec![vec![0, 1, 2]] },
    ];
    for s in &fixed {
        out.push(CorpusItem::from_bundle(support_bundle(s, budget)?, Source::Induced));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x6a10);
    let opts = RandomSupport { max_j: 64, max_r: 4096, ..RandomSupport::default() };
    for _ in 0..4 {
        let s = random_support_spec(&mut rng, &opts)?;
        out.push(CorpusItem::from_bundle(support_bundle(&s, budget)?, Source::Induced));
    }
    for (n, k, m) in [(2, 2, 1), (1, 3, 2), (2, 1, 1)] {
        let inst = group_type_instance(&mut rng, n, k, m, budget)?;
        let gt = gamma_from_grouptype(&inst.action, &inst.data, budget)?;
        out.push(CorpusItem::from_group_type(instance_label(&inst), gt, budget)?);
    }
    Ok(out)
}

/// Generalized matrix rings of sizes 2 and 3 for ideal-family sampling.
pub fn symmetry_rings(budget: &Budget) -> Result<Vec<Arc<GenMatrixRing>>> {
    let mut out = vec![
        Arc::new(upper_triangular(zn(2)?, 2, budget)?),
        Arc::new(upper_triangular(zn(2)?, 3, budget)?),
    ];
    let specs = [
        SupportSpec { modulus: 2, coords: 2, perm: vec![0, 1], order: 1, blocks: vec![vec![], vec![0], vec![1], vec![]], idempotents: vec![vec![0]; 2] },
        SupportSpec { modulus: 2, coords: 2, perm: vec![0, 1], order: 1, blocks: vec![vec![], vec![0, 1], vec![0, 1], vec![]], idempotents: vec![vec![0]; 2] },
        SupportSpec {
            modulus: 2,
            coords: 2,
            perm: vec![0, 1],
            order: 1,
            blocks: vec![vec![], vec![0], vec![0], vec![0], vec![], vec![0, 1], vec![0], vec![0, 1], vec![]],
            idempotents: vec![vec![0]; 3],
        },
        SupportSpec {
            modulus: 3,
            coords: 2,
            perm: vec![0, 1],
            order: 1,
            blocks: vec![vec![], vec![1], vec![], vec![], vec![], vec![0], vec![], vec![], vec![]],
            idempotents: vec![vec![0]; 3],
        },
    ];
    for s in &specs {
        out.push(Arc::new(support_ring(s, budget)?.1));
    }
    Ok(out)
}

/// Draws ideal families `(I_1, .., I_n)` of a fixed ring.
pub struct FamilySampler {
    pub ring: Arc<GenMatrixRing>,
    ideals: Vec<Vec<ElemSet>>,
}

impl FamilySampler {
    pub fn new(ring: Arc<GenMatrixRing>, budget: &Budget) -> Result<FamilySampler> {
        let ideals = ring.rings().iter().map(|r| all_ideals(r.as_ref(), budget)).collect::<Result<_>>()?;
        Ok(FamilySampler { ring, ideals })
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> IdealFamily {
        self.ideals.iter().map(|l| l.choose(rng).expect("the zero ideal exists").clone()).collect()
    }
}

/// The coarse-groupoid skew ring as a generalized matrix ring, the family
/// `I_j = theta_j(I_1)` on its diagonal and the ideal `(theta_j(I_1) δ_(k,j))`.
pub struct CoarseSkew {
    pub matrix: SkewMatrix,
    pub family: IdealFamily,
    pub ideal: ElemSet,
}

pub fn coarse_skew_example(r1: RingRef, thetas: &[Vec<Elem>], i1: &ElemSet, budget: &Budget) -> Result<CoarseSkew> {
    if i1.universe() != r1.order() || !is_ideal(r1.as_ref(), i1) {
        return Err(Error::DomainNotIdeal(format!("I_1 is not an ideal of {}", r1.label())));
    }
    let action = theta_action(r1.clone(), thetas, budget)?;
    let matrix = skew_as_genmatrix(&action, budget)?;
    let n = thetas.len();
    let p = DirectProduct::power(r1, n, budget)?;
    let family: IdealFamily = (0..n)
        .map(|j| {
            let c = &matrix.corners[j];
            ElemSet::from_iter(c.order(), i1.members().iter().map(|&x| c.from_parent(p.inject(j, thetas[j][x as usize])).expect("inside A_j")))
        })
        .collect();
    if !is_symmetric(&matrix.ring, &family) {
        return Err(Error::TheoremCheckFailed("the family theta_j(I_1) is not symmetric".into()));
    }
    let ideal = symmetric_ideal(&matrix.ring, &family, budget)?;
    let blocks = ideal_blocks(&matrix.ring, &family);
    for j in 0..n {
        for k in 0..n {
            let want = ElemSet::from_iter(matrix.ring.module(j, k).order(), family[j].members().iter().copied());
            if blocks[j * n + k] != want {
                return Err(Error::TheoremCheckFailed(format!("block ({}, {}) of the ideal is not theta_{}(I_1)", j + 1, k + 1, j + 1)));
            }
        }
    }
    Ok(CoarseSkew { matrix, family, ideal })
}

/// A serializable description of an example.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExampleSpec {
    /// `B = Z_q^m`, `g` permuting coordinates; `e1`, `e2` given by supports.
    Sec62 { modulus: u32, coords: usize, perm: Vec<usize>, order: usize, e1: Vec<usize>, e2: Vec<usize> },
    /// `k = Z_q`.
    Sec63 { modulus: u32, n: usize, r: usize },
    GrouptypeRandom { seed: u64, objects: usize, isotropy: usize, exponent: usize },
    /// `R_1 = Z_q^m`, `theta_j` a coordinate permutation (`perms[0]` the
    /// identity), `I_1` supported on `ideal`.
    CoarseSkew { modulus: u32, coords: usize, perms: Vec<Vec<usize>>, ideal: Vec<usize> },
    Support(SupportSpec),
}

/// A built example.
pub enum Example {
    Bundle(Bundle),
    Sec63(Sec63),
    GroupType { instance: GroupTypeInstance, datum: GroupTypeDatum },
    CoarseSkew(CoarseSkew),
}

pub fn build_example(spec: &ExampleSpec, budget: &Budget) -> Result<Example> {
    use rand::SeedableRng;
    Ok(match spec {
        ExampleSpec::Sec62 { modulus, coords, perm, order, e1, e2 } => {
            let p = DirectProduct::power(zn(*modulus)?, *coords, budget)?;
            if perm.len() != *coords {
                return Err(Error::ShapeMismatch("perm needs one entry per coordinate".into()));
            }
            let thetas = powers(perm, *order)?.iter().map(|q| permutation_table(&p, q)).collect();
            let check = |s: &[usize]| s.iter().all(|&c| c < *coords);
            if !check(e1) || !check(e2) {
                return Err(Error::InvalidParameters("idempotent support out of range".into()));
            }
            let (a, b) = (support_element(&p, e1), support_element(&p, e2));
            Example::Bundle(gen_sec62(p.ring(), a, b, Arc::new(FiniteGroup::cyclic(*order)), thetas, budget)?)
        }
        ExampleSpec::Sec63 { modulus, n, r } => Example::Sec63(gen_sec63(zn(*modulus)?, *n, *r, budget)?),
        ExampleSpec::GrouptypeRandom { seed, objects, isotropy, exponent } => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
            let instance = group_type_instance(&mut rng, *objects, *isotropy, *exponent, budget)?;
            let datum = gamma_from_grouptype(&instance.action, &instance.data, budget)?;
            Example::GroupType { instance, datum }
        }
        ExampleSpec::CoarseSkew { modulus, coords, perms, ideal } => {
            let p = DirectProduct::power(zn(*modulus)?, *coords, budget)?;
            if perms.iter().any(|q| q.len() != *coords || !is_permutation(q)) || ideal.iter().any(|&c| c >= *coords) {
                return Err(Error::InvalidParameters("permutations or ideal support out of range".into()));
            }
            let thetas: Vec<Vec<Elem>> = perms.iter().map(|q| permutation_table(&p, q)).collect();
            let b = p.ring();
            let i1 = principal(b.as_ref(), support_element(&p, ideal));
            Example::CoarseSkew(coarse_skew_example(b, &thetas, &i1, budget)?)
        }
        ExampleSpec::Support(s) => Example::Bundle(support_bundle(s, budget)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partial_action::verify_partial_action;
    use rand::SeedableRng;

    #[test]
    fn sec62_standard_instance() {
        let b = Budget::default();
        let bun = sec62_standard(&b).unwrap();
        let d = bun.datum();
        let c = &bun.induced.j.corners[0];
        // J_g in block (1,1) is B ẽ_2: {0, ẽ_2}.
        let dom: Vec<Elem> = d.actions[0].domains[1].members().iter().map(|&x| c.to_parent(x)).collect();
        assert_eq!(dom.len(), 2);
        assert!(dom.contains(&4));
        assert!(verify_partial_action(bun.gamma(), &b).is_ok());
    }

    #[test]
    fn sec62_rejects_moving_e1() {
        let b = Budget::default();
        let p = DirectProduct::power(zn(2).unwrap(), 2, &b).unwrap();
        let swap = permutation_table(&p, &[1, 0]);
        let id: Vec<Elem> = (0..4).collect();
        let e1 = support_element(&p, &[0]);
        let r = gen_sec62(p.ring(), e1, 3, Arc::new(FiniteGroup::cyclic(2)), vec![id, swap], &b);
        assert!(matches!(r, Err(Error::NotInvariant(_))));
    }

    #[test]
    fn sec63_small_cases() {
        let b = Budget::default();
        let t = gen_sec63(zn(2).unwrap(), 2, 1, &b).unwrap();
        assert_eq!(t.bundle.datum().group.order(), 1);
        let s = gen_sec63(zn(2).unwrap(), 4, 2, &b).unwrap();
        assert_eq!(s.entries_checked, 2 * s.bundle.induced.j.ring.order());
        assert_eq!(closed_form::unit(4, 2, 1), vec![2]);
        let s = gen_sec63(zn(2).unwrap(), 5, 1, &b).unwrap();
        assert_eq!(s.bundle.datum().group.order(), 4);
        assert!(matches!(gen_sec63(zn(2).unwrap(), 3, 3, &b), Err(Error::InvalidParameters(_))));
        assert!(matches!(gen_sec63(zn(3).unwrap(), 8, 2, &b), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn closed_forms_match_the_rotation() {
        // gamma_{g^i} moves ẽ_p to the position theta^i moves a_p to.
        let (n, r) = (7, 2);
        let h = n - r;
        for i in 1..h {
            for p in closed_form::domain(n, r, i) {
                let mut x = vec![0; n];
                x[p - 1] = 1;
                let y = closed_form::gamma(n, r, i, &x, 0).unwrap();
                let q = if p == r { r } else { r + 1 + (p - r - 1 + i) % h };
                assert_eq!(y.iter().position(|&v| v == 1), Some(q - 1), "i = {i}, p = {p}");
            }
        }
    }

    #[test]
    fn random_specs_build() {
        let b = Budget::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..6 {
            let item = random_induced(&mut rng, &b).unwrap();
            assert!(item.datum.parent.order() <= 256);
            assert!(verify_partial_action(&item.gamma, &b).is_ok());
        }
    }

    #[test]
    fn coarse_skew_family_is_symmetric() {
        let b = Budget::default();
        let ex = build_example(&ExampleSpec::CoarseSkew { modulus: 2, coords: 2, perms: vec![vec![0, 1], vec![1, 0]], ideal: vec![0] }, &b).unwrap();
        let Example::CoarseSkew(c) = ex else { panic!() };
        assert_eq!(c.ideal.len(), 16);
        assert!(c.family.iter().all(|s| s.len() == 2));
    }
}
