//! Finite bimodules over pairs of finite rings and balanced products.

use rayon::prelude::*;
use std::fmt;
use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::report::Report;
use crate::ring::{set_generators, RingRef};
use crate::set::{additive_generators, additive_span, Elem, ElemSet, NONE};

#[derive(Clone)]
enum Repr {
    /// The ring itself, acting on both sides.
    Regular,
    /// A subset of `ambient` closed under addition and under multiplication by
    /// the images of the two rings.
    Ideal {
        ambient: RingRef,
        elems: Vec<Elem>,
        pos: Vec<Elem>,
        left_map: Option<Vec<Elem>>,
        right_map: Option<Vec<Elem>>,
    },
    Tables {
        zero: Elem,
        add: Vec<Elem>,
        neg: Vec<Elem>,
        lact: Vec<Elem>,
        ract: Vec<Elem>,
    },
    /// A sub-bimodule of `parent` over rings mapped into the parent's rings.
    Sub {
        parent: Arc<Bimodule>,
        elems: Vec<Elem>,
        pos: Vec<Elem>,
        left_map: Vec<Elem>,
        right_map: Vec<Elem>,
    },
}

/// An `(L, R)`-bimodule with carrier `0..order()`.
#[derive(Clone)]
pub struct Bimodule {
    label: String,
    left: RingRef,
    right: RingRef,
    n: usize,
    repr: Repr,
}

impl fmt::Debug for Bimodule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bimodule({}, order {})", self.label, self.n)
    }
}

fn back(pos: &[Elem], y: Elem) -> Elem {
    let p = pos[y as usize];
    debug_assert!(p != NONE, "module operation left the carrier");
    p
}

impl Bimodule {
    /// `R` as an `(R, R)`-bimodule.
    pub fn regular(r: RingRef) -> Bimodule {
        Bimodule { label: r.label(), n: r.order(), left: r.clone(), right: r, repr: Repr::Regular }
    }

    /// A subset of `ambient` that is an additive subgroup closed under left
    /// multiplication by the image of `left` and right multiplication by the
    /// image of `right`. A `None` map means the ring is `ambient` itself.
    pub fn ideal_in(
        ambient: RingRef,
        set: &ElemSet,
        left: RingRef,
        left_map: Option<Vec<Elem>>,
        right: RingRef,
        right_map: Option<Vec<Elem>>,
        label: impl Into<String>,
    ) -> Result<Bimodule> {
        let elems = set.sorted();
        let pos = set.positions();
        let label = label.into();
        let lm = |r: Elem| left_map.as_ref().map_or(r, |m| m[r as usize]);
        let rm = |r: Elem| right_map.as_ref().map_or(r, |m| m[r as usize]);
        let sg = set_generators(ambient.as_ref(), set);
        for &m in &sg {
            for a in 0..left.order() as Elem {
                if !set.contains(ambient.mul(lm(a), m)) {
                    return Err(Error::ShapeMismatch(format!("{label} not closed under left action")));
                }
            }
            for a in 0..right.order() as Elem {
                if !set.contains(ambient.mul(m, rm(a))) {
                    return Err(Error::ShapeMismatch(format!("{label} not closed under right action")));
                }
            }
        }
        if !set.contains(ambient.zero()) || set.members().iter().any(|&m| !set.contains(ambient.neg(m))) {
            return Err(Error::ShapeMismatch(format!("{label} is not an additive subgroup")));
        }
        Ok(Bimodule {
            label,
            n: elems.len(),
            left,
            right,
            repr: Repr::Ideal { ambient, elems, pos, left_map, right_map },
        })
    }

    /// A two-sided ideal of `r` as an `(r, r)`-bimodule.
    pub fn ideal(r: RingRef, set: &ElemSet, label: impl Into<String>) -> Result<Bimodule> {
        Self::ideal_in(r.clone(), set, r.clone(), None, r, None, label)
    }

    /// Explicit tables: `add` is `n x n`, `lact` is `|L| x n`, `ract` is `n x |R|`.
    /// Zero and negation are derived. Axioms are not checked here.
    pub fn from_tables(
        label: impl Into<String>,
        left: RingRef,
        right: RingRef,
        add: &[Vec<Elem>],
        lact: &[Vec<Elem>],
        ract: &[Vec<Elem>],
    ) -> Result<Bimodule> {
        let n = add.len();
        let shape = |name: &str, t: &[Vec<Elem>], rows: usize, cols: usize| -> Result<Vec<Elem>> {
            if t.len() != rows || t.iter().any(|r| r.len() != cols || r.iter().any(|&x| x as usize >= n)) {
                return Err(Error::TableIncomplete(format!("{name} must be {rows} x {cols} over 0..{n}")));
            }
            Ok(t.iter().flatten().copied().collect())
        };
        if n == 0 {
            return Err(Error::TableIncomplete("empty module".into()));
        }
        let add = shape("add", add, n, n)?;
        let lact = shape("lact", lact, left.order(), n)?;
        let ract = shape("ract", ract, n, right.order())?;
        let zero = (0..n as Elem)
            .find(|&z| (0..n).all(|x| add[z as usize * n + x] == x as Elem))
            .ok_or_else(|| Error::TableIncomplete("module addition has no zero".into()))?;
        let neg = (0..n)
            .map(|x| (0..n as Elem).find(|&y| add[x * n + y as usize] == zero).unwrap_or(NONE))
            .collect();
        Ok(Bimodule { label: label.into(), left, right, n, repr: Repr::Tables { zero, add, neg, lact, ract } })
    }

    /// The sub-bimodule on `set` over rings `left`, `right` whose elements map
    /// into this module's rings by `left_map`, `right_map`.
    pub fn restrict(
        self: &Arc<Self>,
        set: &ElemSet,
        left: RingRef,
        left_map: Vec<Elem>,
        right: RingRef,
        right_map: Vec<Elem>,
        label: impl Into<String>,
    ) -> Result<Bimodule> {
        let label = label.into();
        let gens = self.generators_of(set);
        for &m in &gens {
            for a in 0..left.order() {
                if !set.contains(self.lact(left_map[a], m)) {
                    return Err(Error::ShapeMismatch(format!("{label} not closed under left action")));
                }
            }
            for a in 0..right.order() {
                if !set.contains(self.ract(m, right_map[a])) {
                    return Err(Error::ShapeMismatch(format!("{label} not closed under right action")));
                }
            }
        }
        if !set.contains(self.zero()) || set.members().iter().any(|&m| !set.contains(self.neg(m))) {
            return Err(Error::ShapeMismatch(format!("{label} is not an additive subgroup")));
        }
        Ok(Bimodule {
            label,
            n: set.len(),
            left,
            right,
            repr: Repr::Sub {
                parent: self.clone(),
                elems: set.sorted(),
                pos: set.positions(),
                left_map,
                right_map,
            },
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn left(&self) -> &RingRef {
        &self.left
    }

    pub fn right(&self) -> &RingRef {
        &self.right
    }

    pub fn zero(&self) -> Elem {
        match &self.repr {
            Repr::Regular => self.left.zero(),
            Repr::Ideal { ambient, pos, .. } => pos[ambient.zero() as usize],
            Repr::Tables { zero, .. } => *zero,
            Repr::Sub { parent, pos, .. } => pos[parent.zero() as usize],
        }
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match &self.repr {
            Repr::Regular => self.left.add(a, b),
            Repr::Ideal { ambient, elems, pos, .. } => back(pos, ambient.add(elems[a as usize], elems[b as usize])),
            Repr::Tables { add, .. } => add[a as usize * self.n + b as usize],
            Repr::Sub { parent, elems, pos, .. } => back(pos, parent.add(elems[a as usize], elems[b as usize])),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        match &self.repr {
            Repr::Regular => self.left.neg(a),
            Repr::Ideal { ambient, elems, pos, .. } => back(pos, ambient.neg(elems[a as usize])),
            Repr::Tables { neg, .. } => neg[a as usize],
            Repr::Sub { parent, elems, pos, .. } => back(pos, parent.neg(elems[a as usize])),
        }
    }

    /// `r . m` for `r` in the left ring.
    #[inline]
    pub fn lact(&self, r: Elem, m: Elem) -> Elem {
        match &self.repr {
            Repr::Regular => self.left.mul(r, m),
            Repr::Ideal { ambient, elems, pos, left_map, .. } => {
                let r = left_map.as_ref().map_or(r, |lm| lm[r as usize]);
                back(pos, ambient.mul(r, elems[m as usize]))
            }
            Repr::Tables { lact, .. } => lact[r as usize * self.n + m as usize],
            Repr::Sub { parent, elems, pos, left_map, .. } => {
                back(pos, parent.lact(left_map[r as usize], elems[m as usize]))
            }
        }
    }

    /// `m . r` for `r` in the right ring.
    #[inline]
    pub fn ract(&self, m: Elem, r: Elem) -> Elem {
        match &self.repr {
            Repr::Regular => self.left.mul(m, r),
            Repr::Ideal { ambient, elems, pos, right_map, .. } => {
                let r = right_map.as_ref().map_or(r, |rm| rm[r as usize]);
                back(pos, ambient.mul(elems[m as usize], r))
            }
            Repr::Tables { ract, .. } => ract[m as usize * self.right.order() + r as usize],
            Repr::Sub { parent, elems, pos, right_map, .. } => {
                back(pos, parent.ract(elems[m as usize], right_map[r as usize]))
            }
        }
    }

    /// Embedding into a ring whose multiplication realises the module
    /// products, when the module was built inside one.
    pub fn ambient(&self) -> Option<(RingRef, Vec<Elem>)> {
        match &self.repr {
            Repr::Regular => Some((self.left.clone(), (0..self.n as Elem).collect())),
            Repr::Ideal { ambient, elems, .. } => Some((ambient.clone(), elems.clone())),
            _ => None,
        }
    }

    /// For sub-bimodules: the element of the parent module.
    pub fn to_parent(&self, m: Elem) -> Option<Elem> {
        match &self.repr {
            Repr::Sub { elems, .. } => Some(elems[m as usize]),
            _ => None,
        }
    }

    pub fn show(&self, m: Elem) -> String {
        match &self.repr {
            Repr::Regular => self.left.show(m),
            Repr::Ideal { ambient, elems, .. } => ambient.show(elems[m as usize]),
            Repr::Tables { .. } => m.to_string(),
            Repr::Sub { parent, elems, .. } => parent.show(elems[m as usize]),
        }
    }

    pub fn add_table(&self) -> Vec<Vec<Elem>> {
        (0..self.n as Elem).map(|a| (0..self.n as Elem).map(|b| self.add(a, b)).collect()).collect()
    }

    pub fn lact_table(&self) -> Vec<Vec<Elem>> {
        (0..self.left.order() as Elem).map(|r| (0..self.n as Elem).map(|m| self.lact(r, m)).collect()).collect()
    }

    pub fn ract_table(&self) -> Vec<Vec<Elem>> {
        (0..self.n as Elem).map(|m| (0..self.right.order() as Elem).map(|r| self.ract(m, r)).collect()).collect()
    }

    pub fn all(&self) -> ElemSet {
        ElemSet::full(self.n)
    }

    pub fn span(&self, gens: impl IntoIterator<Item = Elem>) -> ElemSet {
        additive_span(self.n, self.zero(), gens, &|a, b| self.add(a, b))
    }

    pub fn generators_of(&self, set: &ElemSet) -> Vec<Elem> {
        additive_generators(set, self.zero(), &|a, b| self.add(a, b))
    }

    /// The additive span of `r . m` for `r` in `ideal` (a subset of the left ring)
    /// and `m` in `sub` (a subset of the module).
    pub fn left_product(&self, ideal: &ElemSet, sub: &ElemSet) -> ElemSet {
        let gi = set_generators(self.left.as_ref(), ideal);
        let gm = self.generators_of(sub);
        self.span(gi.iter().flat_map(|&r| gm.iter().map(move |&m| self.lact(r, m))))
    }

    /// The additive span of `m . r` for `m` in `sub` and `r` in `ideal`.
    pub fn right_product(&self, sub: &ElemSet, ideal: &ElemSet) -> ElemSet {
        let gi = set_generators(self.right.as_ref(), ideal);
        let gm = self.generators_of(sub);
        self.span(gm.iter().flat_map(|&m| gi.iter().map(move |&r| self.ract(m, r))))
    }
}

fn all_triples<F>(a: usize, b: usize, c: usize, budget: &Budget, rep: &mut Report, name: &str, pred: F)
where
    F: Fn(Elem, Elem, Elem) -> Option<String> + Sync,
{
    if (a as u128) * (b as u128) * (c as u128) > budget.max_triples {
        rep.skip(format!("{name}: {a}x{b}x{c} triples over budget"));
        return;
    }
    let hit = (0..a as Elem).into_par_iter().find_map_first(|x| {
        for y in 0..b as Elem {
            for z in 0..c as Elem {
                if let Some(w) = pred(x, y, z) {
                    return Some(w);
                }
            }
        }
        None
    });
    if let Some(w) = hit {
        rep.push(name, w);
    }
}

/// Checks abelian group and bimodule axioms over all elements.
pub fn verify_bimodule(m: &Bimodule, budget: &Budget) -> Report {
    let mut rep = Report::new(format!("bimodule {}", m.label));
    let (l, r) = (m.left.as_ref(), m.right.as_ref());
    let n = m.n;
    let z = m.zero();
    for a in 0..n as Elem {
        if m.add(z, a) != a {
            rep.push("zero identity", m.show(a));
        }
        let na = m.neg(a);
        if na as usize >= n || m.add(a, na) != z {
            rep.push("additive inverse", m.show(a));
        }
        if m.lact(l.one(), a) != a {
            rep.push("left unital", m.show(a));
        }
        if m.ract(a, r.one()) != a {
            rep.push("right unital", m.show(a));
        }
        for b in 0..n as Elem {
            if m.add(a, b) != m.add(b, a) {
                rep.push("addition commutative", format!("({}, {})", m.show(a), m.show(b)));
            }
        }
    }
    if !rep.is_ok() {
        return rep;
    }
    let (ln, rn) = (l.order(), r.order());
    all_triples(n, n, n, budget, &mut rep, "addition associative", |a, b, c| {
        (m.add(m.add(a, b), c) != m.add(a, m.add(b, c))).then(|| format!("({a}, {b}, {c})"))
    });
    all_triples(ln, ln, n, budget, &mut rep, "left action associative", |x, y, a| {
        (m.lact(l.mul(x, y), a) != m.lact(x, m.lact(y, a))).then(|| format!("({}, {}, {})", l.show(x), l.show(y), m.show(a)))
    });
    all_triples(ln, ln, n, budget, &mut rep, "left action distributes over ring addition", |x, y, a| {
        (m.lact(l.add(x, y), a) != m.add(m.lact(x, a), m.lact(y, a))).then(|| format!("({}, {}, {})", l.show(x), l.show(y), m.show(a)))
    });
    all_triples(ln, n, n, budget, &mut rep, "left action additive", |x, a, b| {
        (m.lact(x, m.add(a, b)) != m.add(m.lact(x, a), m.lact(x, b))).then(|| format!("({}, {}, {})", l.show(x), m.show(a), m.show(b)))
    });
    all_triples(n, rn, rn, budget, &mut rep, "right action associative", |a, x, y| {
        (m.ract(a, r.mul(x, y)) != m.ract(m.ract(a, x), y)).then(|| format!("({}, {}, {})", m.show(a), r.show(x), r.show(y)))
    });
    all_triples(n, rn, rn, budget, &mut rep, "right action distributes over ring addition", |a, x, y| {
        (m.ract(a, r.add(x, y)) != m.add(m.ract(a, x), m.ract(a, y))).then(|| format!("({}, {}, {})", m.show(a), r.show(x), r.show(y)))
    });
    all_triples(n, n, rn, budget, &mut rep, "right action additive", |a, b, x| {
        (m.ract(m.add(a, b), x) != m.add(m.ract(a, x), m.ract(b, x))).then(|| format!("({}, {}, {})", m.show(a), m.show(b), r.show(x)))
    });
    all_triples(ln, n, rn, budget, &mut rep, "actions commute", |x, a, y| {
        (m.ract(m.lact(x, a), y) != m.lact(x, m.ract(a, y))).then(|| format!("({}, {}, {})", l.show(x), m.show(a), r.show(y)))
    });
    rep
}

/// A map `M x N -> P` given as a table `|M| x |N|`, where `M` is an
/// `(R, S)`-bimodule, `N` an `(S, T)`-bimodule and `P` an `(R, T)`-bimodule.
/// Checks bi-additivity, balance over `S` and outer linearity.
pub fn verify_balanced(m: &Bimodule, n: &Bimodule, p: &Bimodule, table: &[Elem], budget: &Budget) -> Report {
    let mut rep = Report::new(format!("balanced map {} x {} -> {}", m.label, n.label, p.label));
    let (mo, no) = (m.order(), n.order());
    if table.len() != mo * no || table.iter().any(|&x| x as usize >= p.order()) {
        rep.push("shape", format!("table must be {mo} x {no} over the target"));
        return rep;
    }
    let f = |a: Elem, b: Elem| table[a as usize * no + b as usize];
    let s = m.right.as_ref();
    all_triples(mo, s.order(), no, budget, &mut rep, "balanced", |a, x, b| {
        (f(m.ract(a, x), b) != f(a, n.lact(x, b))).then(|| format!("({}, {}, {})", m.show(a), s.show(x), n.show(b)))
    });
    all_triples(mo, mo, no, budget, &mut rep, "additive in the first argument", |a, a2, b| {
        (f(m.add(a, a2), b) != p.add(f(a, b), f(a2, b))).then(|| format!("({}, {}, {})", m.show(a), m.show(a2), n.show(b)))
    });
    all_triples(mo, no, no, budget, &mut rep, "additive in the second argument", |a, b, b2| {
        (f(a, n.add(b, b2)) != p.add(f(a, b), f(a, b2))).then(|| format!("({}, {}, {})", m.show(a), n.show(b), n.show(b2)))
    });
    let l = m.left.as_ref();
    all_triples(l.order(), mo, no, budget, &mut rep, "left linear", |x, a, b| {
        (f(m.lact(x, a), b) != p.lact(x, f(a, b))).then(|| format!("({}, {}, {})", l.show(x), m.show(a), n.show(b)))
    });
    let t = n.right.as_ref();
    all_triples(mo, no, t.order(), budget, &mut rep, "right linear", |a, b, y| {
        (f(a, n.ract(b, y)) != p.ract(f(a, b), y)).then(|| format!("({}, {}, {})", m.show(a), n.show(b), t.show(y)))
    });
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{ideal_generated_by, zn, DirectProduct};

    #[test]
    fn regular_module_is_bimodule() {
        let r: RingRef = zn(6).unwrap();
        assert!(verify_bimodule(&Bimodule::regular(r), &Budget::default()).is_ok());
    }

    #[test]
    fn ideal_module_and_products() {
        let b = DirectProduct::power(zn(2).unwrap(), 3, &Budget::default()).unwrap();
        let r = b.ring();
        let e = b.unit(0);
        let i = ideal_generated_by(r.as_ref(), [e]);
        let m = Bimodule::ideal(r.clone(), &i, "Be").unwrap();
        assert_eq!(m.order(), 2);
        assert!(verify_bimodule(&m, &Budget::default()).is_ok());
        let other = ideal_generated_by(r.as_ref(), [b.unit(1)]);
        assert_eq!(m.left_product(&other, &m.all()).len(), 1);
        assert_eq!(m.right_product(&m.all(), &i).len(), 2);
    }

    #[test]
    fn broken_action_is_reported() {
        let r: RingRef = zn(2).unwrap();
        let add = vec![vec![0, 1], vec![1, 0]];
        let lact = vec![vec![0, 0], vec![0, 0]];
        let ract = vec![vec![0, 0], vec![0, 1]];
        let m = Bimodule::from_tables("bad", r.clone(), r.clone(), &add, &lact, &ract).unwrap();
        let rep = verify_bimodule(&m, &Budget::default());
        assert!(rep.has("left unital"), "{rep}");
    }

    #[test]
    fn ring_multiplication_is_balanced() {
        let r: RingRef = zn(4).unwrap();
        let m = Bimodule::regular(r.clone());
        let t: Vec<Elem> = (0..16).map(|i| r.mul(i / 4, i % 4)).collect();
        assert!(verify_balanced(&m, &m, &m, &t, &Budget::default()).is_ok());
        let bad: Vec<Elem> = (0..16).map(|i| r.add(i / 4, i % 4)).collect();
        assert!(!verify_balanced(&m, &m, &m, &bad, &Budget::default()).is_ok());
    }
}
