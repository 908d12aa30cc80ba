//! Finite disjoint unions of symbolic clopens, and the budgeted algebra.

use std::fmt;

use crate::cylinder::clopen::{Atom, Dyadic, SymbolicClopen, Term};
use crate::cylinder::point::LazyPoint;
use crate::error::{Error, Result};

/// A clopen set as pairwise disjoint [`SymbolicClopen`] parts.
///
/// Parts are sorted, and sibling parts (equal except for one bit) are
/// merged, so `N_0 ∪ N_1` comes out as the full space. Set equality of two
/// unions is [`ClopenUnion::set_eq`]; structural equality is finer.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ClopenUnion {
    parts: Vec<SymbolicClopen>,
}

impl ClopenUnion {
    pub fn empty() -> ClopenUnion {
        ClopenUnion::default()
    }

    pub fn full() -> ClopenUnion {
        ClopenUnion::from(SymbolicClopen::full())
    }

    /// Union of arbitrary (possibly overlapping) clopens.
    pub fn from_parts<I: IntoIterator<Item = SymbolicClopen>>(parts: I) -> ClopenUnion {
        let mut u = ClopenUnion::empty();
        for p in parts {
            u = u.union(&ClopenUnion::from(p));
        }
        u
    }

    pub fn parts(&self) -> &[SymbolicClopen] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<SymbolicClopen> {
        self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The single part, when the union is one clopen.
    pub fn as_single(&self) -> Option<&SymbolicClopen> {
        match self.parts.as_slice() {
            [c] => Some(c),
            _ => None,
        }
    }

    pub fn contains(&self, p: &LazyPoint) -> bool {
        self.parts.iter().any(|c| c.contains(p))
    }

    pub fn intersect(&self, other: &ClopenUnion) -> ClopenUnion {
        let mut out = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                out.extend(a.meet(b));
            }
        }
        ClopenUnion::normalized(out)
    }

    pub fn minus(&self, other: &ClopenUnion) -> ClopenUnion {
        let mut cur = self.parts.clone();
        for b in &other.parts {
            cur = cur.iter().flat_map(|a| a.minus(b)).collect();
        }
        ClopenUnion::normalized(cur)
    }

    pub fn union(&self, other: &ClopenUnion) -> ClopenUnion {
        let mut parts = self.parts.clone();
        parts.extend(other.minus(self).parts);
        ClopenUnion::normalized(parts)
    }

    pub fn is_subset_of(&self, other: &ClopenUnion) -> bool {
        self.parts.iter().all(|p| {
            // fast path: inside one part of `other`
            other.parts.iter().any(|q| p.is_subset_of(q)) || ClopenUnion::from(p.clone()).minus(other).is_empty()
        })
    }

    pub fn set_eq(&self, other: &ClopenUnion) -> bool {
        self.is_subset_of(other) && other.is_subset_of(self)
    }

    /// `within \ self`.
    pub fn complement_within(&self, within: &ClopenUnion) -> ClopenUnion {
        within.minus(self)
    }

    /// Supremum of `d(α, β)` over the set: `2^{-m}` with `m` the longest
    /// common prefix of the part bases.
    pub fn diameter(&self) -> Result<Dyadic> {
        let first = self.parts.first().ok_or(Error::EmptySet)?;
        let mut m = first.base().len();
        for p in &self.parts[1..] {
            m = m.min(first.base().lcp(p.base()));
        }
        Ok(Dyadic::pow2_neg(m as u64))
    }

    fn normalized(mut parts: Vec<SymbolicClopen>) -> ClopenUnion {
        loop {
            parts.sort();
            parts.dedup();
            let Some((i, j, merged)) = find_sibling_pair(&parts) else {
                break;
            };
            parts.swap_remove(j.max(i));
            parts.swap_remove(j.min(i));
            parts.push(merged);
        }
        ClopenUnion { parts }
    }

    pub fn render(&self) -> String {
        if self.parts.is_empty() {
            return "∅".into();
        }
        self.parts.iter().map(|p| format!("[{}]", p.render())).collect::<Vec<_>>().join(" ∪ ")
    }
}

// two parts differing in exactly one pinned bit merge into one
fn find_sibling_pair(parts: &[SymbolicClopen]) -> Option<(usize, usize, SymbolicClopen)> {
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            if let Some(m) = merge_siblings(&parts[i], &parts[j]) {
                return Some((i, j, m));
            }
        }
    }
    None
}

fn merge_siblings(a: &SymbolicClopen, b: &SymbolicClopen) -> Option<SymbolicClopen> {
    if a.constrained_coords() != b.constrained_coords() || a.links() != b.links() {
        return None;
    }
    // same base length: the bases differ in their last bit only
    if a.base().len() == b.base().len() && a.fixed() == b.fixed() {
        let n = a.base().len();
        if n > 0 && a.base().lcp(b.base()) == n - 1 {
            return Some(relax(a, Some(n - 1), None));
        }
        return None;
    }
    if a.base() == b.base() && a.fixed().len() == b.fixed().len() {
        let diff: Vec<u64> = a.fixed().iter().filter(|(k, v)| b.fixed().get(k) != Some(v)).map(|(&k, _)| k).collect();
        if diff.len() == 1 && b.fixed().contains_key(&diff[0]) {
            return Some(relax(a, None, Some(diff[0])));
        }
    }
    None
}

// drop a base bit (the last one) or a pinned coordinate
fn relax(c: &SymbolicClopen, base_cut: Option<usize>, fixed_drop: Option<u64>) -> SymbolicClopen {
    let base = match base_cut {
        Some(n) => c.base().prefix(n),
        None => c.base().clone(),
    };
    let mut atoms = Vec::new();
    if base_cut.is_none() {
        atoms.extend(c.atoms().into_iter().filter(|a| !matches!(a, Atom::Fix(k, _) if Some(*k) == fixed_drop)));
    } else {
        atoms.extend(c.atoms());
    }
    SymbolicClopen::from_atoms(base, &atoms).expect("relaxing constraints keeps a nonempty set")
}

impl From<SymbolicClopen> for ClopenUnion {
    fn from(c: SymbolicClopen) -> ClopenUnion {
        ClopenUnion { parts: vec![c] }
    }
}

impl From<Option<SymbolicClopen>> for ClopenUnion {
    fn from(c: Option<SymbolicClopen>) -> ClopenUnion {
        ClopenUnion { parts: c.into_iter().collect() }
    }
}

impl fmt::Debug for ClopenUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClopenUnion({})", self.render())
    }
}

impl serde::Serialize for ClopenUnion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.parts.len()))?;
        for p in &self.parts {
            seq.serialize_element(&p.render())?;
        }
        seq.end()
    }
}

pub const DEFAULT_MAX_FREE_COORDS: usize = 24;

/// The set operations with an explicit bound on how many coordinates beyond
/// the base each operand may constrain.
///
/// The bound mirrors the cost of deciding these questions by enumeration;
/// the canonical form decides them directly, so an operand over the bound is
/// rejected rather than slow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Algebra {
    pub max_free_coords: usize,
}

impl Default for Algebra {
    fn default() -> Algebra {
        Algebra { max_free_coords: DEFAULT_MAX_FREE_COORDS }
    }
}

impl Algebra {
    pub fn new(max_free_coords: usize) -> Algebra {
        Algebra { max_free_coords }
    }

    pub fn check(&self, c: &SymbolicClopen) -> Result<()> {
        let count = c.constrained_coords().len();
        if count > self.max_free_coords {
            return Err(Error::TooManyFreeCoordinates { count, limit: self.max_free_coords });
        }
        Ok(())
    }

    fn check_all(&self, u: &ClopenUnion) -> Result<()> {
        u.parts().iter().try_for_each(|c| self.check(c))
    }

    pub fn intersect(&self, a: &SymbolicClopen, b: &SymbolicClopen) -> Result<ClopenUnion> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.meet(b).into())
    }

    pub fn union(&self, a: &SymbolicClopen, b: &SymbolicClopen) -> Result<ClopenUnion> {
        self.check(a)?;
        self.check(b)?;
        Ok(ClopenUnion::from(a.clone()).union(&ClopenUnion::from(b.clone())))
    }

    pub fn subset(&self, a: &SymbolicClopen, b: &SymbolicClopen) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.is_subset_of(b))
    }

    pub fn is_empty(&self, u: &ClopenUnion) -> Result<bool> {
        self.check_all(u)?;
        Ok(u.is_empty())
    }

    /// `d \ c`.
    pub fn complement_within(&self, c: &SymbolicClopen, d: &SymbolicClopen) -> Result<ClopenUnion> {
        self.check(c)?;
        self.check(d)?;
        Ok(ClopenUnion::normalized(d.minus(c)))
    }

    pub fn diameter(&self, u: &ClopenUnion) -> Result<Dyadic> {
        self.check_all(u)?;
        u.diameter()
    }

    pub fn union_subset(&self, a: &ClopenUnion, b: &ClopenUnion) -> Result<bool> {
        self.check_all(a)?;
        self.check_all(b)?;
        Ok(a.is_subset_of(b))
    }
}

/// All assignments to `coords` (ascending), for brute-force oracles.
pub fn assignments(coords: &[u64]) -> impl Iterator<Item = Vec<(u64, bool)>> + '_ {
    assert!(coords.len() < 32, "brute force over too many coordinates");
    (0u64..1 << coords.len()).map(move |m| coords.iter().enumerate().map(|(i, &c)| (c, m >> i & 1 == 1)).collect())
}

/// Whether the clopen contains every point agreeing with the assignment
/// (used by oracles when the assignment covers all relevant coordinates).
pub fn holds_on(c: &SymbolicClopen, bits: &[(u64, bool)]) -> bool {
    let get = |a: u64| bits.iter().find(|(k, _)| *k == a).map(|&(_, b)| b);
    for i in 0..c.base().len() as u64 {
        if get(i) != Some(c.base().get(i as usize)) {
            return false;
        }
    }
    c.atoms().into_iter().all(|a| match a {
        Atom::Fix(k, v) => get(k) == Some(v),
        Atom::Rel(x, y, d) => match (get(x), get(y)) {
            (Some(p), Some(q)) => p ^ q == d,
            _ => false,
        },
    })
}

impl SymbolicClopen {
    /// Value of a coordinate at a sample point, for diagnostics.
    pub fn pinned(&self, a: u64) -> Option<bool> {
        match self.term(a) {
            Term::Const(b) => Some(b),
            Term::Var(..) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::w;

    fn cyl(s: &str) -> SymbolicClopen {
        SymbolicClopen::cylinder(w(s))
    }

    #[test]
    fn worked_examples() {
        let u = ClopenUnion::from(cyl("0")).union(&ClopenUnion::from(cyl("1")));
        assert_eq!(u, ClopenUnion::full());
        assert_eq!(cyl("01").meet(&cyl("0")), Some(cyl("01")));
        assert!(ClopenUnion::from(cyl("00")).intersect(&cyl("1").into()).is_empty());
        assert_eq!(cyl("010").diameter(), Dyadic::pow2_neg(3));
        assert_eq!(SymbolicClopen::full().diameter(), Dyadic::pow2_neg(0));
    }

    #[test]
    fn complement_and_diameter() {
        let alg = Algebra::default();
        let d = cyl("0");
        let c: SymbolicClopen = "N=0; bit(3)=1".parse().unwrap();
        let rest = alg.complement_within(&c, &d).unwrap();
        assert!(rest.set_eq(&"N=0; bit(3)=0".parse::<SymbolicClopen>().unwrap().into()));
        let two = ClopenUnion::from_parts([cyl("0110"), cyl("0101")]);
        assert_eq!(two.diameter().unwrap(), Dyadic::pow2_neg(2));
        assert!(ClopenUnion::empty().diameter().is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let alg = Algebra::new(2);
        let c: SymbolicClopen = "N=; bit(3)=1; bit(5)=bit(9)".parse().unwrap();
        assert!(matches!(alg.subset(&c, &SymbolicClopen::full()), Err(Error::TooManyFreeCoordinates { count: 3, limit: 2 })));
    }
}
