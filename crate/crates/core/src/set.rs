//! Element sets over a dense carrier and additive spans.

use fixedbitset::FixedBitSet;
use std::fmt;

/// Dense element id. Every carrier is `0..order`.
pub type Elem = u32;

/// Marker for "undefined" in partial tables.
pub const NONE: Elem = Elem::MAX;

/// Subset of a carrier `0..universe`, remembering insertion order.
#[derive(Clone)]
pub struct ElemSet {
    bits: FixedBitSet,
    list: Vec<Elem>,
}

impl ElemSet {
    pub fn empty(universe: usize) -> Self {
        ElemSet { bits: FixedBitSet::with_capacity(universe), list: Vec::new() }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for x in 0..universe as Elem {
            s.insert(x);
        }
        s
    }

    pub fn from_iter(universe: usize, it: impl IntoIterator<Item = Elem>) -> Self {
        let mut s = Self::empty(universe);
        for x in it {
            s.insert(x);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn contains(&self, x: Elem) -> bool {
        (x as usize) < self.bits.len() && self.bits.contains(x as usize)
    }

    /// Returns true if `x` was new.
    pub fn insert(&mut self, x: Elem) -> bool {
        if self.bits.put(x as usize) {
            false
        } else {
            self.list.push(x);
            true
        }
    }

    /// Members in insertion order.
    pub fn members(&self) -> &[Elem] {
        &self.list
    }

    pub fn sorted(&self) -> Vec<Elem> {
        self.bits.ones().map(|x| x as Elem).collect()
    }

    pub fn is_subset(&self, other: &ElemSet) -> bool {
        self.list.iter().all(|&x| other.contains(x))
    }

    pub fn intersection(&self, other: &ElemSet) -> ElemSet {
        ElemSet::from_iter(self.universe(), self.sorted().into_iter().filter(|&x| other.contains(x)))
    }

    /// Position of each member in sorted order, `NONE` for non-members.
    pub fn positions(&self) -> Vec<Elem> {
        let mut pos = vec![NONE; self.universe()];
        for (i, x) in self.bits.ones().enumerate() {
            pos[x] = i as Elem;
        }
        pos
    }

    /// First element (ascending) of `self` not in `other`.
    pub fn first_outside(&self, other: &ElemSet) -> Option<Elem> {
        self.bits.ones().map(|x| x as Elem).find(|&x| !other.contains(x))
    }
}

impl PartialEq for ElemSet {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits
    }
}
impl Eq for ElemSet {}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.sorted();
        if s.len() <= 16 {
            write!(f, "{s:?}")
        } else {
            write!(f, "{{{} elements: {:?}..}}", s.len(), &s[..8])
        }
    }
}

/// Additive subgroup under construction, grown one generator at a time.
///
/// Adding a generator `g` outside the current subgroup `S` appends the cosets
/// `S + g, S + 2g, ...` until a multiple of `g` falls back into `S`.
pub struct Span<'a, F: Fn(Elem, Elem) -> Elem> {
    pub set: ElemSet,
    add: &'a F,
    pub generators: Vec<Elem>,
}

impl<'a, F: Fn(Elem, Elem) -> Elem> Span<'a, F> {
    pub fn new(universe: usize, zero: Elem, add: &'a F) -> Self {
        let mut set = ElemSet::empty(universe);
        set.insert(zero);
        Span { set, add, generators: Vec::new() }
    }

    /// Returns true if `g` enlarged the subgroup.
    pub fn extend(&mut self, g: Elem) -> bool {
        if self.set.contains(g) {
            return false;
        }
        let old: Vec<Elem> = self.set.members().to_vec();
        let mut t = g;
        while !self.set.contains(t) {
            for &s in &old {
                self.set.insert((self.add)(s, t));
            }
            t = (self.add)(t, g);
        }
        self.generators.push(g);
        true
    }
}

/// Additive subgroup generated by `gens`.
pub fn additive_span<F: Fn(Elem, Elem) -> Elem>(
    universe: usize,
    zero: Elem,
    gens: impl IntoIterator<Item = Elem>,
    add: &F,
) -> ElemSet {
    let mut span = Span::new(universe, zero, add);
    for g in gens {
        span.extend(g);
    }
    span.set
}

/// A small additive generating set of `set`, chosen greedily in ascending order.
pub fn additive_generators<F: Fn(Elem, Elem) -> Elem>(
    set: &ElemSet,
    zero: Elem,
    add: &F,
) -> Vec<Elem> {
    let mut span = Span::new(set.universe(), zero, add);
    for x in set.sorted() {
        span.extend(x);
    }
    span.generators
}

/// Mixed-radix encoding of tuples; the first coordinate is most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Radix {
    dims: Vec<u32>,
    strides: Vec<u64>,
    total: u128,
}

impl Radix {
    pub fn new(dims: Vec<u32>) -> Self {
        let mut strides = vec![1u64; dims.len()];
        let mut total: u128 = 1;
        for i in (0..dims.len()).rev() {
            strides[i] = total.min(u64::MAX as u128) as u64;
            total = total.saturating_mul(dims[i] as u128);
        }
        Radix { dims, strides, total }
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Number of tuples, possibly beyond `u32`.
    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn encode(&self, digits: &[u32]) -> Elem {
        let mut x: u64 = 0;
        for (d, s) in digits.iter().zip(&self.strides) {
            x += *d as u64 * s;
        }
        x as Elem
    }

    pub fn decode_into(&self, x: Elem, out: &mut [u32]) {
        let mut x = x as u64;
        for i in (0..self.dims.len()).rev() {
            let d = self.dims[i] as u64;
            out[i] = (x % d) as u32;
            x /= d;
        }
    }

    pub fn decode(&self, x: Elem) -> Vec<u32> {
        let mut out = vec![0; self.dims.len()];
        self.decode_into(x, &mut out);
        out
    }

    pub fn digit(&self, x: Elem, i: usize) -> u32 {
        ((x as u64 / self.strides[i]) % self.dims[i] as u64) as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_of_cyclic_group() {
        let add = |a: Elem, b: Elem| (a + b) % 12;
        let s = additive_span(12, 0, [8], &add);
        assert_eq!(s.sorted(), vec![0, 4, 8]);
        let s = additive_span(12, 0, [8, 6], &add);
        assert_eq!(s.sorted(), vec![0, 2, 4, 6, 8, 10]);
    }

    #[test]
    fn radix_round_trip() {
        let r = Radix::new(vec![3, 2, 5]);
        assert_eq!(r.total(), 30);
        for x in 0..30 {
            assert_eq!(r.encode(&r.decode(x)), x);
        }
        assert_eq!(r.decode(29), vec![2, 1, 4]);
        assert_eq!(r.digit(29, 1), 1);
    }

    #[test]
    fn positions_are_sorted_ranks() {
        let s = ElemSet::from_iter(10, [7, 2, 5]);
        let p = s.positions();
        assert_eq!((p[2], p[5], p[7], p[3]), (0, 1, 2, NONE));
        assert_eq!(s.members(), &[7, 2, 5]);
    }
}
