//! Finite groups given by multiplication tables.

use std::fmt;

use crate::error::{Error, Result};

/// Group element id; the identity is always `0`.
pub type GElem = usize;

#[derive(Clone)]
pub struct FiniteGroup {
    label: String,
    n: usize,
    op: Vec<GElem>,
    inv: Vec<GElem>,
    names: Vec<String>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.label, self.n)
    }
}

impl FiniteGroup {
    /// Checks closure, associativity, identity `0` and inverses.
    pub fn from_table(label: impl Into<String>, table: Vec<Vec<GElem>>) -> Result<FiniteGroup> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::TableIncomplete("group table must be square over 0..n".into()));
        }
        let op: Vec<GElem> = table.into_iter().flatten().collect();
        let at = |a: usize, b: usize| op[a * n + b];
        for a in 0..n {
            if at(0, a) != a || at(a, 0) != a {
                return Err(Error::InvalidParameters(format!("0 is not an identity at {a}")));
            }
            for b in 0..n {
                for c in 0..n {
                    if at(at(a, b), c) != at(a, at(b, c)) {
                        return Err(Error::InvalidParameters(format!("not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        let mut inv = vec![0; n];
        for a in 0..n {
            inv[a] = (0..n)
                .find(|&b| at(a, b) == 0 && at(b, a) == 0)
                .ok_or_else(|| Error::InvalidParameters(format!("{a} has no inverse")))?;
        }
        let names = (0..n).map(|g| g.to_string()).collect();
        Ok(FiniteGroup { label: label.into(), n, op, inv, names })
    }

    /// Cyclic group `C_n`; element `i` is `g^i`.
    pub fn cyclic(n: usize) -> FiniteGroup {
        assert!(n > 0);
        let op = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        let inv = (0..n).map(|a| (n - a) % n).collect();
        let names = (0..n)
            .map(|i| match i {
                0 => "e".to_string(),
                1 => "g".to_string(),
                _ => format!("g^{i}"),
            })
            .collect();
        FiniteGroup { label: format!("C{n}"), n, op, inv, names }
    }

    /// Replaces element names; one per element.
    pub fn with_names(mut self, names: Vec<String>) -> Result<FiniteGroup> {
        if names.len() != self.n {
            return Err(Error::ShapeMismatch(format!("need {} names", self.n)));
        }
        self.names = names;
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> FiniteGroup {
        self.label = label.into();
        self
    }

    pub fn trivial() -> FiniteGroup {
        Self::cyclic(1)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn identity(&self) -> GElem {
        0
    }

    #[inline]
    pub fn op(&self, a: GElem, b: GElem) -> GElem {
        self.op[a * self.n + b]
    }

    #[inline]
    pub fn inv(&self, a: GElem) -> GElem {
        self.inv[a]
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn name(&self, g: GElem) -> &str {
        &self.names[g]
    }

    pub fn table(&self) -> Vec<Vec<GElem>> {
        self.op.chunks(self.n).map(|c| c.to_vec()).collect()
    }

    pub fn elements(&self) -> std::ops::Range<GElem> {
        0..self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_group_laws() {
        let g = FiniteGroup::cyclic(5);
        assert_eq!(g.op(3, 4), 2);
        assert_eq!(g.inv(2), 3);
        assert!(FiniteGroup::from_table("c5", g.table()).is_ok());
    }

    #[test]
    fn rejects_non_group() {
        assert!(FiniteGroup::from_table("x", vec![vec![0, 1], vec![1, 1]]).is_err());
    }
}
