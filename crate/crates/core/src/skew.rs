//! Partial skew rings `⊕ A_g δ_g` over a group or groupoid.
//!
//! The product is `(a δ_g)(b δ_h) = alpha_g(alpha_{g^-1}(a) b) δ_{gh}` when `gh`
//! is defined and zero otherwise. Elements are tuples of components in index
//! order, mixed radix with the first index most significant.

use std::fmt;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::partial_action::{PartialGroupAction, PartialMap};
use crate::report::Report;
use crate::ring::{set_generators, FiniteRing, RingRef};
use crate::set::{Elem, ElemSet, Radix, NONE};

pub const MAX_INDICES: usize = 64;

/// Index data of a skew ring: an inverse map and a partial composition.
pub struct IndexStructure {
    pub names: Vec<String>,
    pub inverse: Vec<usize>,
    /// `compose[g * k + h] = Some(gh)` when the product `gh` is defined.
    pub compose: Vec<Option<usize>>,
}

impl IndexStructure {
    pub fn of_group(g: &FiniteGroup) -> Self {
        let k = g.order();
        IndexStructure {
            names: g.elements().map(|x| g.name(x).to_string()).collect(),
            inverse: g.elements().map(|x| g.inv(x)).collect(),
            compose: (0..k * k).map(|i| Some(g.op(i / k, i % k))).collect(),
        }
    }
}

pub struct SkewRing {
    label: String,
    base: RingRef,
    names: Vec<String>,
    comp_elems: Vec<Vec<Elem>>,
    comp_pos: Vec<Vec<Elem>>,
    radix: Radix,
    k: usize,
    compose: Vec<Option<usize>>,
    /// For composable `(g, h)`: table `|A_g| x |A_h|` of positions in `A_gh`.
    tables: Vec<Option<Vec<Elem>>>,
    zero: Elem,
    one: Elem,
}

impl fmt::Debug for SkewRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SkewRing({}, order {})", self.label, self.radix.total())
    }
}

impl SkewRing {
    /// `components[g]` is `A_g` and `maps[g]` is `alpha_g : A_{g^-1} -> A_g`.
    /// `identity` lists `(index, base element)` summands of the unit.
    pub fn new(
        label: impl Into<String>,
        base: RingRef,
        components: &[ElemSet],
        maps: &[PartialMap],
        idx: IndexStructure,
        identity: &[(usize, Elem)],
        budget: &Budget,
    ) -> Result<SkewRing> {
        let label = label.into();
        let k = components.len();
        if k == 0 || k > MAX_INDICES || maps.len() != k || idx.inverse.len() != k || idx.compose.len() != k * k {
            return Err(Error::ShapeMismatch(format!("skew ring needs 1..={MAX_INDICES} consistent indices")));
        }
        let comp_elems: Vec<Vec<Elem>> = components.iter().map(|c| c.sorted()).collect();
        let comp_pos: Vec<Vec<Elem>> = components.iter().map(|c| c.positions()).collect();
        let radix = Radix::new(comp_elems.iter().map(|c| c.len() as u32).collect());
        budget.check_elements(&format!("skew ring {label}"), radix.total())?;
        let mut tables = vec![None; k * k];
        for g in 0..k {
            let ginv = idx.inverse[g];
            for h in 0..k {
                let Some(gh) = idx.compose[g * k + h] else { continue };
                let mut t = Vec::with_capacity(comp_elems[g].len() * comp_elems[h].len());
                for &a in &comp_elems[g] {
                    let pre = maps[ginv].get(a).ok_or_else(|| {
                        Error::ShapeMismatch(format!("alpha_{} undefined at {}", idx.names[ginv], base.show(a)))
                    })?;
                    for &b in &comp_elems[h] {
                        let c = base.mul(pre, b);
                        let v = maps[g].get(c).ok_or_else(|| {
                            Error::ShapeMismatch(format!(
                                "product ({} δ_{})({} δ_{}) undefined",
                                base.show(a),
                                idx.names[g],
                                base.show(b),
                                idx.names[h]
                            ))
                        })?;
                        let p = comp_pos[gh][v as usize];
                        if p == NONE {
                            return Err(Error::ShapeMismatch(format!(
                                "product of components {} and {} leaves A_{}",
                                idx.names[g], idx.names[h], idx.names[gh]
                            )));
                        }
                        t.push(p);
                    }
                }
                tables[g * k + h] = Some(t);
            }
        }
        let zero_digits: Vec<Elem> = (0..k).map(|g| comp_pos[g][base.zero() as usize]).collect();
        if zero_digits.contains(&NONE) {
            return Err(Error::ShapeMismatch("a component does not contain zero".into()));
        }
        let zero = radix.encode(&zero_digits);
        let mut one_digits = zero_digits.clone();
        for &(g, e) in identity {
            let p = comp_pos[g][e as usize];
            if p == NONE {
                return Err(Error::ShapeMismatch(format!("identity summand outside A_{}", idx.names[g])));
            }
            one_digits[g] = p;
        }
        let one = radix.encode(&one_digits);
        Ok(SkewRing { label, base, names: idx.names, comp_elems, comp_pos, radix, k, compose: idx.compose, tables, zero, one })
    }

    /// The partial skew group ring `A ⋆_alpha G`.
    pub fn of_group_action(a: &PartialGroupAction, budget: &Budget) -> Result<SkewRing> {
        let idx = IndexStructure::of_group(&a.group);
        let label = format!("{}*{}", a.ring.label(), a.group.label());
        Self::new(label, a.ring.clone(), &a.domains, &a.maps, idx, &[(0, a.ring.one())], budget)
    }

    pub fn base(&self) -> &RingRef {
        &self.base
    }

    pub fn index_count(&self) -> usize {
        self.k
    }

    pub fn index_name(&self, g: usize) -> &str {
        &self.names[g]
    }

    pub fn component(&self, g: usize) -> &[Elem] {
        &self.comp_elems[g]
    }

    pub fn composition(&self, g: usize, h: usize) -> Option<usize> {
        self.compose[g * self.k + h]
    }

    /// Base-ring components `a_g` of `x`.
    pub fn components(&self, x: Elem) -> Vec<Elem> {
        let d = self.radix.decode(x);
        d.iter().enumerate().map(|(g, &p)| self.comp_elems[g][p as usize]).collect()
    }

    /// The element `Σ a_g δ_g`; `None` if some `a_g` lies outside `A_g`.
    pub fn from_components(&self, comps: &[Elem]) -> Option<Elem> {
        let mut d = Vec::with_capacity(self.k);
        for (g, &a) in comps.iter().enumerate() {
            let p = *self.comp_pos[g].get(a as usize)?;
            if p == NONE {
                return None;
            }
            d.push(p);
        }
        Some(self.radix.encode(&d))
    }

    /// `a δ_g`.
    pub fn monomial(&self, g: usize, a: Elem) -> Option<Elem> {
        let mut c = vec![self.base.zero(); self.k];
        c[g] = a;
        self.from_components(&c)
    }

    /// Associativity on additive generators `a δ_g`, which decides it for the
    /// whole ring because the product is biadditive.
    pub fn verify_associativity(&self) -> Report {
        let mut rep = Report::new(format!("associativity of {}", self.label));
        let mut gens = Vec::new();
        for g in 0..self.k {
            let set = ElemSet::from_iter(self.base.order(), self.comp_elems[g].iter().copied());
            for a in set_generators(self.base.as_ref(), &set) {
                gens.push(self.monomial(g, a).expect("generator in component"));
            }
        }
        for &x in &gens {
            for &y in &gens {
                let xy = self.mul(x, y);
                for &z in &gens {
                    if self.mul(xy, z) != self.mul(x, self.mul(y, z)) {
                        rep.push("associative", format!("({}, {}, {})", self.show(x), self.show(y), self.show(z)));
                    }
                }
            }
        }
        rep
    }
}

impl FiniteRing for SkewRing {
    fn order(&self) -> usize {
        self.radix.total() as usize
    }
    fn zero(&self) -> Elem {
        self.zero
    }
    fn one(&self) -> Elem {
        self.one
    }
    fn add(&self, a: Elem, b: Elem) -> Elem {
        let mut x = [0u32; MAX_INDICES];
        let mut y = [0u32; MAX_INDICES];
        self.radix.decode_into(a, &mut x[..self.k]);
        self.radix.decode_into(b, &mut y[..self.k]);
        for g in 0..self.k {
            let s = self.base.add(self.comp_elems[g][x[g] as usize], self.comp_elems[g][y[g] as usize]);
            x[g] = self.comp_pos[g][s as usize];
        }
        self.radix.encode(&x[..self.k])
    }
    fn neg(&self, a: Elem) -> Elem {
        let mut x = [0u32; MAX_INDICES];
        self.radix.decode_into(a, &mut x[..self.k]);
        for g in 0..self.k {
            let s = self.base.neg(self.comp_elems[g][x[g] as usize]);
            x[g] = self.comp_pos[g][s as usize];
        }
        self.radix.encode(&x[..self.k])
    }
    fn mul(&self, a: Elem, b: Elem) -> Elem {
        let k = self.k;
        let mut x = [0u32; MAX_INDICES];
        let mut y = [0u32; MAX_INDICES];
        let mut z = [0u32; MAX_INDICES];
        self.radix.decode_into(a, &mut x[..k]);
        self.radix.decode_into(b, &mut y[..k]);
        let zero = self.base.zero();
        for g in 0..k {
            z[g] = zero;
        }
        for g in 0..k {
            if self.comp_elems[g][x[g] as usize] == zero {
                continue;
            }
            for h in 0..k {
                if self.comp_elems[h][y[h] as usize] == zero {
                    continue;
                }
                if let Some(gh) = self.compose[g * k + h] {
                    let t = self.tables[g * k + h].as_ref().expect("table for composable pair");
                    let p = t[x[g] as usize * self.comp_elems[h].len() + y[h] as usize];
                    z[gh] = self.base.add(z[gh], self.comp_elems[gh][p as usize]);
                }
            }
        }
        for g in 0..k {
            z[g] = self.comp_pos[g][z[g] as usize];
        }
        self.radix.encode(&z[..k])
    }
    fn label(&self) -> String {
        self.label.clone()
    }
    fn show(&self, a: Elem) -> String {
        let terms: Vec<String> = self
            .components(a)
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != self.base.zero())
            .map(|(g, &c)| format!("{}δ_{}", self.base.show(c), self.names[g]))
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{verify_ring, zn, DirectProduct};
    use std::sync::Arc;

    #[test]
    fn skew_group_ring_of_swap() {
        let p = DirectProduct::power(zn(2).unwrap(), 2, &Budget::default()).unwrap();
        let a = PartialGroupAction::global(Arc::new(FiniteGroup::cyclic(2)), p.ring(), vec![vec![0, 1, 2, 3], vec![0, 2, 1, 3]]).unwrap();
        let s = SkewRing::of_group_action(&a, &Budget::default()).unwrap();
        assert_eq!(s.order(), 16);
        assert!(verify_ring(&s, &Budget::default()).is_ok());
        assert!(s.verify_associativity().is_ok());
        // (e1 δ_g)(e1 δ_g) = alpha_g(alpha_g(e1) e1) δ_e = alpha_g(e2 e1) = 0.
        let e1 = p.unit(0);
        let x = s.monomial(1, e1).unwrap();
        assert_eq!(s.mul(x, x), s.zero());
        // (e1 δ_g)(e2 δ_g) = alpha_g(e2 e2) δ_e = e1 δ_e.
        let y = s.monomial(1, p.unit(1)).unwrap();
        assert_eq!(s.mul(x, y), s.monomial(0, e1).unwrap());
    }
}
