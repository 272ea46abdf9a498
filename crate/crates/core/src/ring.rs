//! Finite unital rings over dense carriers, ideals, centers and morphisms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::report::Report;
use crate::set::{additive_generators, additive_span, Elem, ElemSet, Radix, Span, NONE};

/// A finite unital ring whose elements are `0..order()`.
pub trait FiniteRing: Send + Sync + fmt::Debug {
    fn order(&self) -> usize;
    fn zero(&self) -> Elem;
    fn one(&self) -> Elem;
    fn add(&self, a: Elem, b: Elem) -> Elem;
    fn neg(&self, a: Elem) -> Elem;
    fn mul(&self, a: Elem, b: Elem) -> Elem;
    fn label(&self) -> String;

    fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    fn show(&self, a: Elem) -> String {
        a.to_string()
    }
}

pub type RingRef = Arc<dyn FiniteRing>;

/// Ring given by explicit addition and multiplication tables.
#[derive(Clone)]
pub struct TableRing {
    label: String,
    n: usize,
    zero: Elem,
    one: Elem,
    add: Vec<Elem>,
    neg: Vec<Elem>,
    mul: Vec<Elem>,
}

impl fmt::Debug for TableRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TableRing({}, order {})", self.label, self.n)
    }
}

impl TableRing {
    /// Builds the structure without checking ring axioms. Zero and negation are
    /// derived from the addition table when they exist.
    pub fn from_tables_unchecked(
        label: impl Into<String>,
        add: &[Vec<Elem>],
        mul: &[Vec<Elem>],
        one: Elem,
    ) -> Result<TableRing> {
        let n = add.len();
        if n == 0 {
            return Err(Error::TableIncomplete("empty carrier".into()));
        }
        for (name, t) in [("add", add), ("mul", mul)] {
            if t.len() != n {
                return Err(Error::TableIncomplete(format!("{name} has {} rows, expected {n}", t.len())));
            }
            for (i, row) in t.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::TableIncomplete(format!("{name} row {i} has {} entries", row.len())));
                }
                if let Some(&bad) = row.iter().find(|&&x| x as usize >= n) {
                    return Err(Error::TableIncomplete(format!("{name} row {i} contains {bad}")));
                }
            }
        }
        if one as usize >= n {
            return Err(Error::TableIncomplete(format!("one = {one} outside carrier")));
        }
        let flat = |t: &[Vec<Elem>]| t.iter().flatten().copied().collect::<Vec<_>>();
        let add = flat(add);
        let mul = flat(mul);
        let zero = (0..n as Elem)
            .find(|&z| (0..n).all(|x| add[z as usize * n + x] == x as Elem))
            .unwrap_or(0);
        let neg = (0..n)
            .map(|x| {
                (0..n as Elem)
                    .find(|&y| add[x * n + y as usize] == zero)
                    .unwrap_or(NONE)
            })
            .collect();
        Ok(TableRing { label: label.into(), n, zero, one, add, neg, mul })
    }

    /// Builds the ring and rejects it with a witness if any axiom fails.
    pub fn from_tables(
        label: impl Into<String>,
        add: &[Vec<Elem>],
        mul: &[Vec<Elem>],
        one: Elem,
    ) -> Result<TableRing> {
        let r = Self::from_tables_unchecked(label, add, mul, one)?;
        Budget::default().check_table("table ring", r.n as u128)?;
        let rep = verify_ring(&r, &Budget::default());
        if rep.is_ok() {
            Ok(r)
        } else {
            Err(Error::InvalidRing(rep))
        }
    }

    /// Copies the operations of any ring into tables.
    pub fn materialize(r: &dyn FiniteRing, budget: &Budget) -> Result<TableRing> {
        let n = r.order();
        budget.check_table(&format!("tables for {}", r.label()), n as u128)?;
        let add: Vec<Elem> = (0..n * n).into_par_iter().map(|i| r.add((i / n) as Elem, (i % n) as Elem)).collect();
        let mul: Vec<Elem> = (0..n * n).into_par_iter().map(|i| r.mul((i / n) as Elem, (i % n) as Elem)).collect();
        let neg = (0..n as Elem).map(|a| r.neg(a)).collect();
        Ok(TableRing { label: r.label(), n, zero: r.zero(), one: r.one(), add, neg, mul })
    }

    pub fn add_table(&self) -> Vec<Vec<Elem>> {
        self.add.chunks(self.n).map(|c| c.to_vec()).collect()
    }

    pub fn mul_table(&self) -> Vec<Vec<Elem>> {
        self.mul.chunks(self.n).map(|c| c.to_vec()).collect()
    }
}

impl FiniteRing for TableRing {
    fn order(&self) -> usize {
        self.n
    }
    fn zero(&self) -> Elem {
        self.zero
    }
    fn one(&self) -> Elem {
        self.one
    }
    #[inline]
    fn add(&self, a: Elem, b: Elem) -> Elem {
        self.add[a as usize * self.n + b as usize]
    }
    #[inline]
    fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize]
    }
    #[inline]
    fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a as usize * self.n + b as usize]
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

/// The ring `Z/nZ` with elements `0..n`.
pub fn zn(n: u32) -> Result<Arc<TableRing>> {
    if n == 0 {
        return Err(Error::InvalidParameters("Z/0 is not finite".into()));
    }
    Budget::default().check_table("Z/n", n as u128)?;
    let add: Vec<Vec<Elem>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    let mul: Vec<Vec<Elem>> = (0..n)
        .map(|a| (0..n).map(|b| ((a as u64 * b as u64) % n as u64) as Elem).collect())
        .collect();
    Ok(Arc::new(TableRing::from_tables_unchecked(format!("Z{n}"), &add, &mul, 1 % n)?))
}

/// Direct product of rings, stored as tables. Element ids are tuples in
/// mixed radix with the first factor most significant.
#[derive(Debug, Clone)]
pub struct DirectProduct {
    pub factors: Vec<RingRef>,
    pub radix: Radix,
    table: Arc<TableRing>,
}

impl DirectProduct {
    pub fn new(factors: Vec<RingRef>, budget: &Budget) -> Result<DirectProduct> {
        if factors.is_empty() {
            return Err(Error::InvalidParameters("empty product".into()));
        }
        let radix = Radix::new(factors.iter().map(|f| f.order() as u32).collect());
        let label = factors.iter().map(|f| f.label()).collect::<Vec<_>>().join("x");
        budget.check_table(&format!("product {label}"), radix.total())?;
        let n = radix.total() as usize;
        let k = factors.len();
        let decoded: Vec<Vec<u32>> = (0..n as Elem).map(|x| radix.decode(x)).collect();
        let op = |f: &(dyn Fn(&RingRef, Elem, Elem) -> Elem + Sync)| -> Vec<Elem> {
            (0..n * n)
                .into_par_iter()
                .map(|i| {
                    let (a, b) = (&decoded[i / n], &decoded[i % n]);
                    let d: Vec<u32> = (0..k).map(|j| f(&factors[j], a[j], b[j])).collect();
                    radix.encode(&d)
                })
                .collect()
        };
        let add = op(&|r, a, b| r.add(a, b));
        let mul = op(&|r, a, b| r.mul(a, b));
        let neg = decoded
            .iter()
            .map(|a| radix.encode(&(0..k).map(|j| factors[j].neg(a[j])).collect::<Vec<_>>()))
            .collect();
        let zero = radix.encode(&factors.iter().map(|f| f.zero()).collect::<Vec<_>>());
        let one = radix.encode(&factors.iter().map(|f| f.one()).collect::<Vec<_>>());
        let table = Arc::new(TableRing { label, n, zero, one, add, neg, mul });
        Ok(DirectProduct { factors, radix, table })
    }

    /// `k^n` for a single ring `k`.
    pub fn power(k: RingRef, n: usize, budget: &Budget) -> Result<DirectProduct> {
        Self::new(vec![k; n], budget)
    }

    pub fn ring(&self) -> RingRef {
        self.table.clone()
    }

    pub fn table(&self) -> Arc<TableRing> {
        self.table.clone()
    }

    pub fn encode(&self, coords: &[Elem]) -> Elem {
        self.radix.encode(coords)
    }

    pub fn decode(&self, x: Elem) -> Vec<Elem> {
        self.radix.decode(x)
    }

    /// The element with `x` in coordinate `j` and zero elsewhere.
    pub fn inject(&self, j: usize, x: Elem) -> Elem {
        let mut d: Vec<Elem> = self.factors.iter().map(|f| f.zero()).collect();
        d[j] = x;
        self.radix.encode(&d)
    }

    /// The primitive idempotent with identity in coordinate `j`.
    pub fn unit(&self, j: usize) -> Elem {
        self.inject(j, self.factors[j].one())
    }
}

impl FiniteRing for DirectProduct {
    fn order(&self) -> usize {
        self.table.n
    }
    fn zero(&self) -> Elem {
        self.table.zero
    }
    fn one(&self) -> Elem {
        self.table.one
    }
    #[inline]
    fn add(&self, a: Elem, b: Elem) -> Elem {
        self.table.add(a, b)
    }
    #[inline]
    fn neg(&self, a: Elem) -> Elem {
        self.table.neg(a)
    }
    #[inline]
    fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.table.mul(a, b)
    }
    fn label(&self) -> String {
        self.table.label.clone()
    }
    fn show(&self, a: Elem) -> String {
        format!("{:?}", self.decode(a))
    }
}

/// A subset of a ring closed under the ring operations, with its own identity
/// (corners `eRe`, fixed rings, centers). Ids are ranks within the subset.
#[derive(Clone)]
pub struct SubRing {
    parent: RingRef,
    label: String,
    elems: Vec<Elem>,
    pos: Vec<Elem>,
    one: Elem,
}

impl fmt::Debug for SubRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubRing({}, order {})", self.label, self.elems.len())
    }
}

impl SubRing {
    /// `one` is a parent element acting as identity on `set`.
    pub fn new(parent: RingRef, set: &ElemSet, one: Elem, label: impl Into<String>) -> Result<SubRing> {
        let label = label.into();
        let mut rep = Report::new(format!("subring {label}"));
        if !set.contains(parent.zero()) {
            rep.push("contains zero", "zero missing");
        }
        if !set.contains(one) {
            rep.push("contains identity", parent.show(one));
        }
        let elems = set.sorted();
        let gens = additive_generators(set, parent.zero(), &|a, b| parent.add(a, b));
        for &a in &elems {
            if !set.contains(parent.neg(a)) {
                rep.push("closed under negation", parent.show(a));
            }
            if parent.mul(one, a) != a || parent.mul(a, one) != a {
                rep.push("identity", parent.show(a));
            }
            for &g in &gens {
                if !set.contains(parent.add(a, g)) {
                    rep.push("closed under addition", format!("{} + {}", parent.show(a), parent.show(g)));
                }
            }
        }
        for &a in &gens {
            for &b in &gens {
                if !set.contains(parent.mul(a, b)) {
                    rep.push("closed under multiplication", format!("{} * {}", parent.show(a), parent.show(b)));
                }
            }
        }
        if !rep.is_ok() {
            return Err(Error::InvalidRing(rep));
        }
        let pos = set.positions();
        let one = pos[one as usize];
        Ok(SubRing { parent, label, elems, pos, one })
    }

    /// The corner `eRe = Re` for a central idempotent `e`.
    pub fn corner(parent: RingRef, e: Elem) -> Result<SubRing> {
        if !is_central_idempotent(parent.as_ref(), e) {
            return Err(Error::NotIdempotentGenerated(parent.show(e)));
        }
        let set = ElemSet::from_iter(parent.order(), (0..parent.order() as Elem).map(|a| parent.mul(a, e)));
        let label = format!("{}*{}", parent.label(), parent.show(e));
        SubRing::new(parent, &set, e, label)
    }

    pub fn parent(&self) -> &RingRef {
        &self.parent
    }

    pub fn to_parent(&self, x: Elem) -> Elem {
        self.elems[x as usize]
    }

    pub fn from_parent(&self, y: Elem) -> Option<Elem> {
        match self.pos.get(y as usize) {
            Some(&p) if p != NONE => Some(p),
            _ => None,
        }
    }

    pub fn parent_elements(&self) -> &[Elem] {
        &self.elems
    }

    pub fn as_parent_set(&self) -> ElemSet {
        ElemSet::from_iter(self.parent.order(), self.elems.iter().copied())
    }

    fn back(&self, y: Elem) -> Elem {
        let p = self.pos[y as usize];
        debug_assert!(p != NONE, "subring operation left the subset");
        p
    }
}

impl FiniteRing for SubRing {
    fn order(&self) -> usize {
        self.elems.len()
    }
    fn zero(&self) -> Elem {
        self.pos[self.parent.zero() as usize]
    }
    fn one(&self) -> Elem {
        self.one
    }
    fn add(&self, a: Elem, b: Elem) -> Elem {
        self.back(self.parent.add(self.elems[a as usize], self.elems[b as usize]))
    }
    fn neg(&self, a: Elem) -> Elem {
        self.back(self.parent.neg(self.elems[a as usize]))
    }
    fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.back(self.parent.mul(self.elems[a as usize], self.elems[b as usize]))
    }
    fn label(&self) -> String {
        self.label.clone()
    }
    fn show(&self, a: Elem) -> String {
        self.parent.show(self.elems[a as usize])
    }
}

fn first_triple<F>(n: usize, budget: &Budget, rep: &mut Report, pred: F, name: &str)
where
    F: Fn(Elem, Elem, Elem) -> Option<String> + Sync,
{
    let nn = n as u128;
    if nn * nn * nn <= budget.max_triples {
        let hit = (0..n as Elem).into_par_iter().find_map_first(|a| {
            for b in 0..n as Elem {
                for c in 0..n as Elem {
                    if let Some(w) = pred(a, b, c) {
                        return Some(w);
                    }
                }
            }
            None
        });
        if let Some(w) = hit {
            rep.push(name, w);
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let samples = 1usize << 20;
        for _ in 0..samples {
            let (a, b, c) = (rng.gen_range(0..n) as Elem, rng.gen_range(0..n) as Elem, rng.gen_range(0..n) as Elem);
            if let Some(w) = pred(a, b, c) {
                rep.push(name, w);
                return;
            }
        }
        rep.skip(format!("{name}: sampled {samples} triples, carrier {n} too large for all triples"));
    }
}

/// Checks every ring axiom, exhaustively over all triples within budget.
pub fn verify_ring(r: &dyn FiniteRing, budget: &Budget) -> Report {
    let n = r.order();
    let mut rep = Report::new(format!("ring {}", r.label()));
    let z = r.zero();
    let o = r.one();
    for a in 0..n as Elem {
        let s = r.show(a);
        if r.add(z, a) != a || r.add(a, z) != a {
            rep.push("zero identity", s.clone());
        }
        let na = r.neg(a);
        if na as usize >= n || r.add(a, na) != z {
            rep.push("additive inverse", s.clone());
        }
        if r.mul(o, a) != a || r.mul(a, o) != a {
            rep.push("identity violated", format!("one = {}, a = {s}", r.show(o)));
        }
    }
    if !rep.is_ok() {
        return rep;
    }
    let pair = (0..n as Elem).into_par_iter().find_map_first(|a| {
        (0..n as Elem).find_map(|b| {
            let (s, p) = (r.add(a, b), r.mul(a, b));
            if s as usize >= n || p as usize >= n {
                Some(("closure", format!("{a}, {b}")))
            } else if s != r.add(b, a) {
                Some(("addition commutative", format!("{}, {}", r.show(a), r.show(b))))
            } else {
                None
            }
        })
    });
    if let Some((c, w)) = pair {
        rep.push(c, w);
        return rep;
    }
    let show3 = |a, b, c| format!("({}, {}, {})", r.show(a), r.show(b), r.show(c));
    first_triple(n, budget, &mut rep, |a, b, c| {
        (r.add(r.add(a, b), c) != r.add(a, r.add(b, c))).then(|| show3(a, b, c))
    }, "addition associative");
    first_triple(n, budget, &mut rep, |a, b, c| {
        (r.mul(r.mul(a, b), c) != r.mul(a, r.mul(b, c))).then(|| show3(a, b, c))
    }, "multiplication associative");
    first_triple(n, budget, &mut rep, |a, b, c| {
        (r.mul(a, r.add(b, c)) != r.add(r.mul(a, b), r.mul(a, c))).then(|| show3(a, b, c))
    }, "left distributive");
    first_triple(n, budget, &mut rep, |a, b, c| {
        (r.mul(r.add(a, b), c) != r.add(r.mul(a, c), r.mul(b, c))).then(|| show3(a, b, c))
    }, "right distributive");
    rep
}

/// Structural equality: same order, zero, one and operations.
pub fn same_ring(a: &RingRef, b: &RingRef) -> bool {
    if Arc::ptr_eq(a, b) {
        return true;
    }
    let n = a.order();
    if n != b.order() || a.zero() != b.zero() || a.one() != b.one() {
        return false;
    }
    (0..n as Elem).into_par_iter().all(|x| {
        (0..n as Elem).all(|y| a.add(x, y) == b.add(x, y) && a.mul(x, y) == b.mul(x, y))
    })
}

pub fn all_elements(r: &dyn FiniteRing) -> ElemSet {
    ElemSet::full(r.order())
}

/// Small additive generating set of the whole ring.
pub fn ring_generators(r: &dyn FiniteRing) -> Vec<Elem> {
    additive_generators(&all_elements(r), r.zero(), &|a, b| r.add(a, b))
}

pub fn set_generators(r: &dyn FiniteRing, s: &ElemSet) -> Vec<Elem> {
    additive_generators(s, r.zero(), &|a, b| r.add(a, b))
}

/// Additive subgroup generated by `gens`.
pub fn span(r: &dyn FiniteRing, gens: impl IntoIterator<Item = Elem>) -> ElemSet {
    additive_span(r.order(), r.zero(), gens, &|a, b| r.add(a, b))
}

/// Smallest two-sided ideal containing `gens`.
pub fn ideal_generated_by(r: &dyn FiniteRing, gens: impl IntoIterator<Item = Elem>) -> ElemSet {
    let rg = ring_generators(r);
    grow_ideal(r, &rg, span(r, gens))
}

fn grow_ideal(r: &dyn FiniteRing, rg: &[Elem], start: ElemSet) -> ElemSet {
    let add = |a, b| r.add(a, b);
    let mut sp = Span::new(r.order(), r.zero(), &add);
    for &x in start.members() {
        sp.extend(x);
    }
    let mut i = 0;
    while i < sp.set.len() {
        let x = sp.set.members()[i];
        for &g in rg {
            sp.extend(r.mul(g, x));
            sp.extend(r.mul(x, g));
        }
        i += 1;
    }
    sp.set
}

/// Returns a witness if `s` is not a two-sided ideal.
pub fn ideal_violation(r: &dyn FiniteRing, s: &ElemSet) -> Option<String> {
    if !s.contains(r.zero()) {
        return Some("zero missing".into());
    }
    let sg = set_generators(r, s);
    for &a in s.members() {
        if !s.contains(r.neg(a)) {
            return Some(format!("-{} missing", r.show(a)));
        }
        for &g in &sg {
            if !s.contains(r.add(a, g)) {
                return Some(format!("{} + {} missing", r.show(a), r.show(g)));
            }
        }
    }
    for &g in &ring_generators(r) {
        for &a in &sg {
            if !s.contains(r.mul(g, a)) {
                return Some(format!("{} * {} missing", r.show(g), r.show(a)));
            }
            if !s.contains(r.mul(a, g)) {
                return Some(format!("{} * {} missing", r.show(a), r.show(g)));
            }
        }
    }
    None
}

pub fn is_ideal(r: &dyn FiniteRing, s: &ElemSet) -> bool {
    ideal_violation(r, s).is_none()
}

/// Additive span of all products `a * b`, `a` in `x`, `b` in `y`.
pub fn set_product(r: &dyn FiniteRing, x: &ElemSet, y: &ElemSet) -> ElemSet {
    let gx = set_generators(r, x);
    let gy = set_generators(r, y);
    span(r, gx.iter().flat_map(|&a| gy.iter().map(move |&b| r.mul(a, b))))
}

pub fn set_sum(r: &dyn FiniteRing, x: &ElemSet, y: &ElemSet) -> ElemSet {
    span(r, set_generators(r, x).into_iter().chain(set_generators(r, y)))
}

/// Every two-sided ideal, in a deterministic order (by size, then members).
pub fn all_ideals(r: &dyn FiniteRing, budget: &Budget) -> Result<Vec<ElemSet>> {
    budget.check_table("ideal enumeration", r.order() as u128)?;
    let rg = ring_generators(r);
    let mut seen: HashSet<Vec<Elem>> = HashSet::new();
    let mut found: Vec<ElemSet> = Vec::new();
    let zero_ideal = ElemSet::from_iter(r.order(), [r.zero()]);
    seen.insert(zero_ideal.sorted());
    found.push(zero_ideal);
    let principal: Vec<ElemSet> = (0..r.order() as Elem)
        .map(|x| grow_ideal(r, &rg, span(r, [x])))
        .filter(|p| seen.insert(p.sorted()))
        .collect();
    found.extend(principal.iter().cloned());
    let mut i = 0;
    while i < found.len() {
        for p in &principal {
            if p.is_subset(&found[i]) {
                continue;
            }
            let s = set_sum(r, &found[i], p);
            if seen.insert(s.sorted()) {
                found.push(s);
            }
        }
        i += 1;
    }
    found.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.sorted().cmp(&b.sorted())));
    Ok(found)
}

pub fn is_central(r: &dyn FiniteRing, x: Elem) -> bool {
    ring_generators(r).iter().all(|&g| r.mul(x, g) == r.mul(g, x))
}

pub fn is_idempotent(r: &dyn FiniteRing, e: Elem) -> bool {
    r.mul(e, e) == e
}

pub fn is_central_idempotent(r: &dyn FiniteRing, e: Elem) -> bool {
    (e as usize) < r.order() && is_idempotent(r, e) && is_central(r, e)
}

/// The center `Z(R)`.
pub fn center(r: &dyn FiniteRing) -> ElemSet {
    let rg = ring_generators(r);
    ElemSet::from_iter(
        r.order(),
        (0..r.order() as Elem).filter(|&x| rg.iter().all(|&g| r.mul(x, g) == r.mul(g, x))),
    )
}

/// The identity of the ideal `s` if `s = R e` for a central idempotent `e`.
pub fn ideal_unit(r: &dyn FiniteRing, s: &ElemSet) -> Option<Elem> {
    let sg = set_generators(r, s);
    s.sorted().into_iter().find(|&e| {
        sg.iter().all(|&x| r.mul(e, x) == x && r.mul(x, e) == x) && is_central_idempotent(r, e)
    })
}

/// All central idempotents.
pub fn central_idempotents(r: &dyn FiniteRing) -> Vec<Elem> {
    center(r).sorted().into_iter().filter(|&e| is_idempotent(r, e)).collect()
}

/// A map between carriers, checked on demand.
#[derive(Clone, Debug)]
pub struct RingMorphism {
    pub source: RingRef,
    pub target: RingRef,
    pub map: Vec<Elem>,
}

impl RingMorphism {
    pub fn new(source: RingRef, target: RingRef, map: Vec<Elem>) -> Result<RingMorphism> {
        if map.len() != source.order() {
            return Err(Error::ShapeMismatch(format!(
                "morphism table has {} entries, source has {}",
                map.len(),
                source.order()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&y| y as usize >= target.order()) {
            return Err(Error::ShapeMismatch(format!("image {bad} outside target")));
        }
        Ok(RingMorphism { source, target, map })
    }

    pub fn apply(&self, x: Elem) -> Elem {
        self.map[x as usize]
    }

    pub fn is_bijective(&self) -> bool {
        self.source.order() == self.target.order() && {
            let s = ElemSet::from_iter(self.target.order(), self.map.iter().copied());
            s.len() == self.target.order()
        }
    }

    /// Checks unitality, additivity and multiplicativity on every pair of elements.
    pub fn verify_exhaustive(&self) -> Report {
        let (s, t) = (&self.source, &self.target);
        let mut rep = Report::new(format!("morphism {} -> {}", s.label(), t.label()));
        if self.apply(s.one()) != t.one() {
            rep.push("preserves identity", t.show(self.apply(s.one())));
        }
        let n = s.order() as Elem;
        let hit = (0..n).into_par_iter().find_map_first(|a| {
            let fa = self.apply(a);
            (0..n).find_map(|b| {
                let fb = self.apply(b);
                if self.apply(s.add(a, b)) != t.add(fa, fb) {
                    Some(("additive", format!("({}, {})", s.show(a), s.show(b))))
                } else if self.apply(s.mul(a, b)) != t.mul(fa, fb) {
                    Some(("multiplicative", format!("({}, {})", s.show(a), s.show(b))))
                } else {
                    None
                }
            })
        });
        if let Some((c, w)) = hit {
            rep.push(c, w);
        }
        rep
    }

    /// Same conclusion as [`verify_exhaustive`](Self::verify_exhaustive), using
    /// additive generators: `f(a + g) = f(a) + f(g)` for all `a` and generators
    /// `g`, then multiplicativity on generator pairs.
    pub fn verify_by_generators(&self) -> Report {
        let (s, t) = (&self.source, &self.target);
        let mut rep = Report::new(format!("morphism {} -> {}", s.label(), t.label()));
        if self.apply(s.one()) != t.one() {
            rep.push("preserves identity", t.show(self.apply(s.one())));
        }
        let g = ring_generators(s.as_ref());
        for a in 0..s.order() as Elem {
            for &x in &g {
                if self.apply(s.add(a, x)) != t.add(self.apply(a), self.apply(x)) {
                    rep.push("additive", format!("({}, {})", s.show(a), s.show(x)));
                }
            }
        }
        for &a in &g {
            for &b in &g {
                if self.apply(s.mul(a, b)) != t.mul(self.apply(a), self.apply(b)) {
                    rep.push("multiplicative", format!("({}, {})", s.show(a), s.show(b)));
                }
            }
        }
        rep
    }

    pub fn inverse(&self) -> Option<RingMorphism> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.map.len()];
        for (x, &y) in self.map.iter().enumerate() {
            inv[y as usize] = x as Elem;
        }
        Some(RingMorphism { source: self.target.clone(), target: self.source.clone(), map: inv })
    }
}

/// First failure of additivity or multiplicativity of `f` on `set`, checked on
/// all pairs when there are at most `2^22` of them and on additive generators
/// otherwise.
pub fn hom_violation_on(
    src: &dyn FiniteRing,
    set: &ElemSet,
    tgt: &dyn FiniteRing,
    f: &(dyn Fn(Elem) -> Elem + Sync),
) -> Option<(&'static str, String)> {
    let members = set.sorted();
    let gens = set_generators(src, set);
    let exhaustive = (members.len() as u128).pow(2) <= 1 << 22;
    let (xs, ys): (&[Elem], &[Elem]) = if exhaustive { (&members, &members) } else { (&members, &gens) };
    let hit = xs.par_iter().find_map_first(|&a| {
        let fa = f(a);
        ys.iter().find_map(|&b| {
            (f(src.add(a, b)) != tgt.add(fa, f(b)))
                .then(|| ("additive", format!("({}, {})", src.show(a), src.show(b))))
        })
    });
    if hit.is_some() {
        return hit;
    }
    let (xs, ys): (&[Elem], &[Elem]) = if exhaustive { (&members, &members) } else { (&gens, &gens) };
    xs.par_iter().find_map_first(|&a| {
        let fa = f(a);
        ys.iter().find_map(|&b| {
            (f(src.mul(a, b)) != tgt.mul(fa, f(b)))
                .then(|| ("multiplicative", format!("({}, {})", src.show(a), src.show(b))))
        })
    })
}

/// Extends images of additive generators to an additive map on `span(gens)`.
/// Returns `None` if the assignment is inconsistent. Output is dense over the
/// source carrier with `NONE` outside the span.
pub fn extend_additive(
    src: &dyn FiniteRing,
    tgt: &dyn FiniteRing,
    gens: &[Elem],
    images: &[Elem],
) -> Option<Vec<Elem>> {
    let mut map = vec![NONE; src.order()];
    map[src.zero() as usize] = tgt.zero();
    let mut queue = vec![src.zero()];
    let mut i = 0;
    while i < queue.len() {
        let x = queue[i];
        for (&g, &img) in gens.iter().zip(images) {
            let y = src.add(x, g);
            let v = tgt.add(map[x as usize], img);
            match map[y as usize] {
                NONE => {
                    map[y as usize] = v;
                    queue.push(y);
                }
                w if w != v => return None,
                _ => {}
            }
        }
        i += 1;
    }
    Some(map)
}

/// Every multiplicative additive bijection from the subset `s` of `a` onto the
/// subset `t` of `b`. Both subsets must be closed under the ring operations.
/// Maps are dense over `a` with `NONE` outside `s`.
pub fn isomorphisms_between(
    a: &dyn FiniteRing,
    s: &ElemSet,
    b: &dyn FiniteRing,
    t: &ElemSet,
    limit: usize,
) -> Vec<Vec<Elem>> {
    let mut out = Vec::new();
    if s.len() != t.len() {
        return out;
    }
    let gens = set_generators(a, s);
    let targets = t.sorted();
    let k = gens.len();
    let mut idx = vec![0usize; k];
    let total = (targets.len() as u128).pow(k as u32);
    if total > 1 << 22 {
        return out;
    }
    let members = s.sorted();
    'outer: loop {
        let images: Vec<Elem> = idx.iter().map(|&i| targets[i]).collect();
        if let Some(map) = extend_additive(a, b, &gens, &images) {
            let img = ElemSet::from_iter(b.order(), members.iter().map(|&x| map[x as usize]));
            let ok = img.len() == members.len()
                && gens.iter().all(|&x| {
                    gens.iter().all(|&y| map[a.mul(x, y) as usize] == b.mul(map[x as usize], map[y as usize]))
                });
            if ok {
                out.push(map);
                if out.len() >= limit {
                    break;
                }
            }
        }
        for j in 0..k {
            idx[j] += 1;
            if idx[j] < targets.len() {
                continue 'outer;
            }
            idx[j] = 0;
        }
        break;
    }
    out
}

/// Ring automorphisms of a small ring.
pub fn automorphisms(r: &dyn FiniteRing) -> Vec<Vec<Elem>> {
    let all = all_elements(r);
    isomorphisms_between(r, &all, r, &all, usize::MAX)
        .into_iter()
        .filter(|m| m[r.one() as usize] == r.one())
        .collect()
}

/// Sorted list form, handy for set comparisons in reports.
pub fn as_sorted(s: &ElemSet) -> BTreeSet<Elem> {
    s.sorted().into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2sq() -> DirectProduct {
        DirectProduct::power(zn(2).unwrap(), 2, &Budget::default()).unwrap()
    }

    #[test]
    fn zn_is_a_ring() {
        for n in 1..=12 {
            assert!(verify_ring(zn(n).unwrap().as_ref(), &Budget::default()).is_ok());
        }
    }

    #[test]
    fn broken_identity_is_reported() {
        let add = vec![vec![0, 1], vec![1, 0]];
        let mul = vec![vec![0, 0], vec![0, 0]];
        let r = TableRing::from_tables_unchecked("bad", &add, &mul, 1).unwrap();
        let rep = verify_ring(&r, &Budget::default());
        assert!(rep.has("identity violated"), "{rep}");
        assert!(matches!(TableRing::from_tables("bad", &add, &mul, 1), Err(Error::InvalidRing(_))));
    }

    #[test]
    fn non_associative_table_is_rejected() {
        // Z3 with 2*2 changed to 2.
        let add: Vec<Vec<Elem>> = (0..3).map(|a| (0..3).map(|b| (a + b) % 3).collect()).collect();
        let mut mul: Vec<Vec<Elem>> = (0..3).map(|a| (0..3).map(|b| (a * b) % 3).collect()).collect();
        mul[2][2] = 2;
        let r = TableRing::from_tables_unchecked("bent", &add, &mul, 1).unwrap();
        assert!(!verify_ring(&r, &Budget::default()).is_ok());
    }

    #[test]
    fn product_units_and_ideals() {
        let p = z2sq();
        assert_eq!(p.order(), 4);
        assert_eq!(p.unit(0), 2);
        assert_eq!(p.unit(1), 1);
        assert_eq!(p.one(), 3);
        let ideals = all_ideals(&p, &Budget::default()).unwrap();
        assert_eq!(ideals.len(), 4);
        assert_eq!(central_idempotents(&p), vec![0, 1, 2, 3]);
    }

    #[test]
    fn ideals_of_z12() {
        let r = zn(12).unwrap();
        let ideals = all_ideals(r.as_ref(), &Budget::default()).unwrap();
        // One ideal per divisor of 12.
        assert_eq!(ideals.len(), 6);
        assert_eq!(ideal_generated_by(r.as_ref(), [8]).sorted(), vec![0, 4, 8]);
        let i = ideal_generated_by(r.as_ref(), [4]);
        assert_eq!(ideal_unit(r.as_ref(), &i), Some(4));
        let j = ideal_generated_by(r.as_ref(), [2]);
        assert_eq!(ideal_unit(r.as_ref(), &j), None);
    }

    #[test]
    fn corner_ring() {
        let p = z2sq();
        let c = SubRing::corner(p.ring(), p.unit(0)).unwrap();
        assert_eq!(c.order(), 2);
        assert!(verify_ring(&c, &Budget::default()).is_ok());
        assert!(SubRing::corner(zn(4).unwrap(), 2).is_err());
    }

    #[test]
    fn automorphisms_of_small_rings() {
        assert_eq!(automorphisms(&z2sq()).len(), 2);
        assert_eq!(automorphisms(zn(5).unwrap().as_ref()).len(), 1);
    }

    #[test]
    fn morphism_checks_agree() {
        let p = z2sq();
        let r: RingRef = p.ring();
        let swap = RingMorphism::new(r.clone(), r.clone(), vec![0, 2, 1, 3]).unwrap();
        assert!(swap.verify_exhaustive().is_ok());
        assert!(swap.verify_by_generators().is_ok());
        let bad = RingMorphism::new(r.clone(), r.clone(), vec![0, 1, 1, 3]).unwrap();
        assert!(!bad.verify_exhaustive().is_ok());
        assert!(!bad.verify_by_generators().is_ok());
    }

    #[test]
    fn center_of_commutative_ring_is_everything() {
        let r = zn(6).unwrap();
        assert_eq!(center(r.as_ref()).len(), 6);
    }
}
