//! Clopen sets given by a base cylinder plus two-coordinate parity atoms.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::cylinder::point::LazyPoint;
use crate::error::{Error, Result};
use crate::index::Index;
use crate::word::BinWord;

/// `2^{-exp}`, the only values the ultrametric takes on nonempty clopens.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct Dyadic {
    pub exp: u64,
}

impl Dyadic {
    pub fn pow2_neg(exp: u64) -> Dyadic {
        Dyadic { exp }
    }

    pub fn to_f64(self) -> f64 {
        2f64.powi(-(self.exp.min(i32::MAX as u64) as i32))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Dyadic) -> Ordering {
        other.exp.cmp(&self.exp)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Dyadic) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "1")
        } else {
            write!(f, "2^-{}", self.exp)
        }
    }
}

/// One constraint on the bits of a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `bit(a) = v`
    Fix(u64, bool),
    /// `bit(a) xor bit(b) = differs`
    Rel(u64, u64, bool),
}

/// Value of a coordinate inside a clopen: pinned, or tied to a free
/// representative (`bit = bit(rep) xor flip`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Term {
    Const(bool),
    Var(u64, bool),
}

/// `{α ∈ N_base | atoms hold}`, kept in a canonical form.
///
/// Canonical means: every atom lives beyond the base; coordinates pinned by
/// the atoms sit in `fixed`; every other constrained coordinate is tied to
/// the least coordinate of its class in `links`; the coordinate `|base|` is
/// never pinned (pinned prefixes are absorbed into the base). Two values are
/// equal as sets iff they are equal structurally. The empty set has no
/// representation; operations that can produce it return `Option` or a
/// [`ClopenUnion`](crate::cylinder::ClopenUnion).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolicClopen {
    base: BinWord,
    fixed: BTreeMap<u64, bool>,
    links: BTreeMap<u64, (u64, bool)>,
}

const ZERO: u64 = u64::MAX;

/// Union-find with parity, used to reach the canonical form.
#[derive(Clone, Debug)]
pub struct ClopenBuilder {
    base: BinWord,
    parent: HashMap<u64, (u64, bool)>,
    ok: bool,
}

impl ClopenBuilder {
    pub fn new(base: BinWord) -> ClopenBuilder {
        ClopenBuilder { base, parent: HashMap::new(), ok: true }
    }

    fn find(&mut self, x: u64) -> (u64, bool) {
        let Some(&(p, par)) = self.parent.get(&x) else {
            return (x, false);
        };
        if p == x {
            return (x, false);
        }
        let (r, pr) = self.find(p);
        let total = par ^ pr;
        self.parent.insert(x, (r, total));
        (r, total)
    }

    fn term(&mut self, a: u64) -> (u64, bool) {
        assert!(a != ZERO, "coordinate u64::MAX is reserved");
        if (a as u128) < self.base.len() as u128 {
            (ZERO, self.base.get(a as usize))
        } else {
            self.find(a)
        }
    }

    // ZERO wins as a root, otherwise the smaller coordinate
    fn union(&mut self, a: (u64, bool), b: (u64, bool), differs: bool) {
        let (ra, pa) = a;
        let (rb, pb) = b;
        let d = pa ^ pb ^ differs;
        if ra == rb {
            if d {
                self.ok = false;
            }
            return;
        }
        let (root, child) = if ra == ZERO || (rb != ZERO && ra < rb) { (ra, rb) } else { (rb, ra) };
        self.parent.entry(root).or_insert((root, false));
        self.parent.insert(child, (root, d));
    }

    pub fn fix(&mut self, a: u64, v: bool) -> &mut Self {
        let t = self.term(a);
        self.union(t, (ZERO, false), v);
        self
    }

    pub fn relate(&mut self, a: u64, b: u64, differs: bool) -> &mut Self {
        let ta = self.term(a);
        let tb = self.term(b);
        self.union(ta, tb, differs);
        self
    }

    pub fn atom(&mut self, atom: Atom) -> &mut Self {
        match atom {
            Atom::Fix(a, v) => self.fix(a, v),
            Atom::Rel(a, b, d) => self.relate(a, b, d),
        }
    }

    /// The canonical clopen, or `None` if the atoms are contradictory.
    pub fn build(&mut self) -> Option<SymbolicClopen> {
        if !self.ok {
            return None;
        }
        let keys: Vec<u64> = self.parent.keys().copied().filter(|&k| k != ZERO).collect();
        let mut fixed = BTreeMap::new();
        let mut links = BTreeMap::new();
        for k in keys {
            let (r, p) = self.find(k);
            if r == ZERO {
                fixed.insert(k, p);
            } else if r != k {
                links.insert(k, (r, p));
            }
        }
        let mut base = self.base.clone();
        while let Some(b) = fixed.remove(&(base.len() as u64)) {
            base.push(b);
        }
        Some(SymbolicClopen { base, fixed, links })
    }
}

impl SymbolicClopen {
    /// The whole space `N_∅`.
    pub fn full() -> SymbolicClopen {
        SymbolicClopen::cylinder(BinWord::empty())
    }

    pub fn cylinder(base: BinWord) -> SymbolicClopen {
        SymbolicClopen { base, fixed: BTreeMap::new(), links: BTreeMap::new() }
    }

    pub fn from_atoms(base: BinWord, atoms: &[Atom]) -> Option<SymbolicClopen> {
        let mut b = ClopenBuilder::new(base);
        for &a in atoms {
            b.atom(a);
        }
        b.build()
    }

    pub fn base(&self) -> &BinWord {
        &self.base
    }

    pub fn fixed(&self) -> &BTreeMap<u64, bool> {
        &self.fixed
    }

    pub fn links(&self) -> &BTreeMap<u64, (u64, bool)> {
        &self.links
    }

    pub fn is_cylinder(&self) -> bool {
        self.fixed.is_empty() && self.links.is_empty()
    }

    /// A builder preloaded with this set's constraints.
    pub fn builder(&self) -> ClopenBuilder {
        let mut b = ClopenBuilder::new(self.base.clone());
        for a in self.atoms() {
            b.atom(a);
        }
        b
    }

    /// The canonical atoms beyond the base, sorted by coordinate.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut v: Vec<(u64, Atom)> = self
            .fixed
            .iter()
            .map(|(&a, &b)| (a, Atom::Fix(a, b)))
            .chain(self.links.iter().map(|(&a, &(r, d))| (a, Atom::Rel(r, a, d))))
            .collect();
        v.sort();
        v.into_iter().map(|(_, a)| a).collect()
    }

    /// Coordinates beyond the base that the atoms mention.
    pub fn constrained_coords(&self) -> BTreeSet<u64> {
        let mut s: BTreeSet<u64> = self.fixed.keys().copied().collect();
        for (&a, &(r, _)) in &self.links {
            s.insert(a);
            s.insert(r);
        }
        s
    }

    /// Every coordinate at or beyond the returned bound is unconstrained.
    pub fn support_end(&self) -> u64 {
        let last = self.constrained_coords().last().map_or(0, |&c| c + 1);
        last.max(self.base.len() as u64)
    }

    pub fn term(&self, a: u64) -> Term {
        if (a as u128) < self.base.len() as u128 {
            return Term::Const(self.base.get(a as usize));
        }
        if let Some(&v) = self.fixed.get(&a) {
            return Term::Const(v);
        }
        match self.links.get(&a) {
            Some(&(r, d)) => Term::Var(r, d),
            None => Term::Var(a, false),
        }
    }

    /// Whether every point of the set satisfies the atom.
    pub fn forces(&self, atom: Atom) -> bool {
        match atom {
            Atom::Fix(a, v) => self.term(a) == Term::Const(v),
            Atom::Rel(a, b, d) => match (self.term(a), self.term(b)) {
                (Term::Const(x), Term::Const(y)) => x ^ y == d,
                (Term::Var(r, x), Term::Var(s, y)) => r == s && x ^ y == d,
                _ => false,
            },
        }
    }

    /// `self ∩ other`.
    pub fn meet(&self, other: &SymbolicClopen) -> Option<SymbolicClopen> {
        if self.base.incompatible(&other.base) {
            return None;
        }
        let (long, short) = if self.base.len() >= other.base.len() { (self, other) } else { (other, self) };
        if long.is_cylinder() && short.is_cylinder() {
            return Some(long.clone());
        }
        let mut b = long.builder();
        for a in short.atoms() {
            b.atom(a);
        }
        b.build()
    }

    pub fn meets(&self, other: &SymbolicClopen) -> bool {
        self.meet(other).is_some()
    }

    pub fn with_atom(&self, atom: Atom) -> Option<SymbolicClopen> {
        let mut b = self.builder();
        b.atom(atom);
        b.build()
    }

    pub fn with_fixed(&self, a: u64, v: bool) -> Option<SymbolicClopen> {
        self.with_atom(Atom::Fix(a, v))
    }

    /// `self ∩ N_w`.
    pub fn restrict_to(&self, w: &BinWord) -> Option<SymbolicClopen> {
        self.meet(&SymbolicClopen::cylinder(w.clone()))
    }

    pub fn is_subset_of(&self, other: &SymbolicClopen) -> bool {
        if !other.base.is_prefix_of(&self.base) {
            // `self` pins its whole base, so it can sit inside `other` only if
            // the atoms of `self` pin the rest of `other.base`
            if self.base.incompatible(&other.base) {
                return false;
            }
            for i in self.base.len()..other.base.len() {
                if self.term(i as u64) != Term::Const(other.base.get(i)) {
                    return false;
                }
            }
        }
        other.atoms().into_iter().all(|a| self.forces(a))
    }

    /// The atoms of `self`, base bits first, as a list whose conjunction is
    /// `self`. Used to carve complements.
    fn carving_atoms(&self, from: usize) -> impl Iterator<Item = Atom> + '_ {
        (from..self.base.len()).map(|i| Atom::Fix(i as u64, self.base.get(i))).chain(self.atoms())
    }

    /// `self \ other` as pairwise disjoint pieces.
    pub fn minus(&self, other: &SymbolicClopen) -> Vec<SymbolicClopen> {
        if self.base.incompatible(&other.base) {
            return vec![self.clone()];
        }
        if self.is_subset_of(other) {
            return Vec::new();
        }
        let mut out = Vec::new();
        // `acc` is `self` ∩ (the atoms of `other` seen so far)
        let mut acc = self.builder();
        // base positions inside `self.base` already agree with `other`
        for atom in other.carving_atoms(self.base.len().min(other.base.len())) {
            let mut piece = acc.clone();
            piece.atom(negate(atom));
            if let Some(c) = piece.build() {
                out.push(c);
            }
            acc.atom(atom);
            if acc.clone().build().is_none() {
                break;
            }
        }
        out
    }

    pub fn diameter(&self) -> Dyadic {
        Dyadic::pow2_neg(self.base.len() as u64)
    }

    pub fn contains(&self, p: &LazyPoint) -> bool {
        if !p.in_cylinder(&self.base) {
            return false;
        }
        let bit = |a: u64| p.eval_u64(a);
        self.fixed.iter().all(|(&a, &v)| bit(a) == v) && self.links.iter().all(|(&a, &(r, d))| bit(a) ^ bit(r) == d)
    }

    /// A point of the set: free coordinates read `tail`.
    pub fn sample_point(&self, tail: bool) -> LazyPoint {
        let mut p = LazyPoint::from_word(&self.base, tail);
        for (&a, &v) in &self.fixed {
            p.set(a, v);
        }
        for (&a, &(_, d)) in &self.links {
            p.set(a, tail ^ d);
        }
        p
    }

    /// The set shrunk to a single cylinder of length `d` around a point.
    pub fn shrink_around(&self, p: &LazyPoint, d: usize) -> Option<SymbolicClopen> {
        let d = d.max(self.base.len());
        self.restrict_to(&p.prefix(d))
    }

    /// Split into the parts where the free coordinate `a` is 0 and 1.
    pub fn split_at(&self, a: u64) -> Option<(SymbolicClopen, SymbolicClopen)> {
        match self.term(a) {
            Term::Const(_) => None,
            Term::Var(..) => Some((self.with_fixed(a, false)?, self.with_fixed(a, true)?)),
        }
    }

    /// Canonical text: `N=<base>; bit(a)=v; bit(a)!=bit(b)`.
    pub fn render(&self) -> String {
        let mut s = format!("N={}", self.base);
        for a in self.atoms() {
            match a {
                Atom::Fix(a, v) => s.push_str(&format!("; bit({a})={}", u8::from(v))),
                Atom::Rel(a, b, true) => s.push_str(&format!("; bit({a})!=bit({b})")),
                Atom::Rel(a, b, false) => s.push_str(&format!("; bit({a})=bit({b})")),
            }
        }
        s
    }
}

fn negate(a: Atom) -> Atom {
    match a {
        Atom::Fix(c, v) => Atom::Fix(c, !v),
        Atom::Rel(x, y, d) => Atom::Rel(x, y, !d),
    }
}

impl fmt::Display for SymbolicClopen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for SymbolicClopen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Clopen({})", self.render())
    }
}

impl serde::Serialize for SymbolicClopen {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

fn parse_base(s: &str) -> Result<BinWord> {
    s.parse()
}

fn parse_bit_ref(s: &str) -> Result<u64> {
    s.trim()
        .strip_prefix("bit(")
        .and_then(|r| r.strip_suffix(')'))
        .and_then(|c| c.parse().ok())
        .ok_or_else(|| Error::Parse(format!("expected bit(<coord>), got {s:?}")))
}

impl FromStr for SymbolicClopen {
    type Err = Error;

    /// Parses the canonical text; the result is canonicalized, so redundant
    /// or non-canonical atoms are accepted. A contradictory set is an error.
    fn from_str(s: &str) -> Result<SymbolicClopen> {
        let mut parts = s.split(';');
        let head = parts.next().unwrap_or("").trim();
        let base = head.strip_prefix("N=").ok_or_else(|| Error::Parse(format!("clopen must start with N=, got {head:?}")))?;
        let mut b = ClopenBuilder::new(parse_base(base.trim())?);
        for atom in parts {
            let atom = atom.trim();
            if atom.is_empty() {
                continue;
            }
            if let Some((l, r)) = atom.split_once("!=") {
                b.relate(parse_bit_ref(l)?, parse_bit_ref(r)?, true);
            } else if let Some((l, r)) = atom.split_once('=') {
                let a = parse_bit_ref(l)?;
                match r.trim() {
                    "0" => b.fix(a, false),
                    "1" => b.fix(a, true),
                    other => b.relate(a, parse_bit_ref(other)?, false),
                };
            } else {
                return Err(Error::Parse(format!("bad atom {atom:?}")));
            }
        }
        b.build().ok_or(Error::EmptySet)
    }
}

/// Index of a coordinate as `u64`, for the clopen layer.
pub fn coord(k: &Index) -> Result<u64> {
    k.to_u64().filter(|&c| c != ZERO).ok_or_else(|| Error::InvalidArgument(format!("coordinate {k} is beyond the clopen layer")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::w;

    fn c(s: &str) -> SymbolicClopen {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_absorbs_pinned_prefix() {
        let x = c("N=0; bit(1)=0");
        assert_eq!(x.base(), &w("00"));
        assert_eq!(x.diameter(), Dyadic::pow2_neg(2));
        assert_eq!(c("N=00; bit(1)!=bit(3)").render(), "N=00; bit(3)=1");
        assert_eq!(c("N=; bit(9)!=bit(3); bit(3)=bit(4)").render(), "N=; bit(3)=bit(4); bit(3)!=bit(9)");
    }

    #[test]
    fn meet_and_subset() {
        assert_eq!(SymbolicClopen::cylinder(w("01")).meet(&SymbolicClopen::cylinder(w("0"))), Some(SymbolicClopen::cylinder(w("01"))));
        assert!(SymbolicClopen::cylinder(w("00")).meet(&SymbolicClopen::cylinder(w("1"))).is_none());
        assert!(c("N=0; bit(3)=1").is_subset_of(&c("N=; bit(3)=1")));
        assert!(c("N=01").is_subset_of(&c("N=; bit(1)!=bit(0)")));
        assert!(!c("N=0").is_subset_of(&c("N=01")));
        assert!(c("N=; bit(2)=bit(5); bit(5)=bit(7)").is_subset_of(&c("N=; bit(2)=bit(7)")));
        assert!(c("N=; bit(2)=bit(2)").is_cylinder());
        assert!("N=; bit(2)!=bit(2)".parse::<SymbolicClopen>().is_err());
    }

    #[test]
    fn contains_points() {
        let p = LazyPoint::zeros();
        assert!(!c("N=0; bit(3)!=bit(9)").contains(&p));
        assert!(c("N=0; bit(3)!=bit(9)").contains(&p.clone().with(9u64, true)));
    }

    #[test]
    fn long_base_renders_runs() {
        let mut b = BinWord::zeros(5000);
        b.push(true);
        let x = SymbolicClopen::cylinder(b.clone()).with_fixed(6000, true).unwrap();
        let back: SymbolicClopen = x.render().parse().unwrap();
        assert_eq!(back, x);
    }
}
