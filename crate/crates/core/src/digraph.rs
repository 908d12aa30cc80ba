//! The maps `g_n^L`, their domains `𝔻_n^L`, compositions `g_s`, clopen
//! images and preimages, and the edge tests of `𝔾_L` and `𝔾_0`.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;

use crate::cylinder::{coord, Atom, ClopenBuilder, Derivation, LazyPoint, SymbolicClopen, Term};
use crate::error::{Error, Result};
use crate::index::Index;
use crate::seq::{compatible_with_t_then, is_pow2_q, pow2_q, pow2_q_u64, s_seq, t_seq, FamilyLevel, ThetaRule, DEFAULT_MATERIALIZE_CAP};
use crate::word::BinWord;

/// A single map `g_n^L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct MapId {
    pub level: FamilyLevel,
    pub n: usize,
}

/// A finite sequence `s` indexing the composition
/// `g_s = g_{s(0)} ∘ … ∘ g_{s(|s|-1)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct PathSpec(pub Vec<usize>);

impl PathSpec {
    /// `s* = (s(1), …, s(|s|-1))`.
    pub fn star(&self) -> PathSpec {
        PathSpec(self.0.get(1..).unwrap_or(&[]).to_vec())
    }

    /// `s⁻ = (s(0), …, s(|s|-2))`.
    pub fn minus(&self) -> PathSpec {
        let n = self.0.len().saturating_sub(1);
        PathSpec(self.0[..n].to_vec())
    }

    /// `s^{-1}`, the reversed sequence.
    pub fn inverse(&self) -> PathSpec {
        PathSpec(self.0.iter().rev().copied().collect())
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] > w[1])
    }
}

/// The family `(g_n^L)_n` at one level.
#[derive(Clone, Debug)]
pub struct Family {
    rule: ThetaRule,
    cap: u64,
    words: Arc<[OnceLock<(BinWord, BinWord)>; 3]>,
}

impl Family {
    pub fn new(level: FamilyLevel) -> Family {
        Family::with_rule(ThetaRule::new(level))
    }

    /// Level 1, the reference instance.
    pub fn g1() -> Family {
        Family::new(FamilyLevel::new(1).unwrap())
    }

    pub fn with_rule(rule: ThetaRule) -> Family {
        Family { rule, cap: DEFAULT_MATERIALIZE_CAP, words: Arc::default() }
    }

    pub fn with_cap(mut self, cap: u64) -> Family {
        self.cap = cap;
        self.words = Arc::default();
        self
    }

    pub fn level(&self) -> FamilyLevel {
        self.rule.level()
    }

    pub fn rule(&self) -> &ThetaRule {
        &self.rule
    }

    pub fn id(&self, n: usize) -> MapId {
        MapId { level: self.level(), n }
    }

    fn tw(&self, n: usize) -> Result<&(BinWord, BinWord)> {
        let slot = self.words.get(n).ok_or_else(|| t_seq(n, self.cap).unwrap_err())?;
        if let Some(v) = slot.get() {
            return Ok(v);
        }
        let t = t_seq(n, self.cap)?;
        Ok(slot.get_or_init(|| (t.child(false), t.child(true))))
    }

    /// `t_n 0`.
    pub fn t0(&self, n: usize) -> Result<&BinWord> {
        Ok(&self.tw(n)?.0)
    }

    /// `t_n 1`.
    pub fn t1(&self, n: usize) -> Result<&BinWord> {
        Ok(&self.tw(n)?.1)
    }

    fn p(&self, n: usize) -> Result<u64> {
        self.tw(n)?;
        Ok(pow2_q_u64(n).expect("materialized t-words have machine-sized length"))
    }

    /// `N_{t_n 0}`, the domain of `g_n` as a map.
    pub fn domain_cylinder(&self, n: usize) -> Result<SymbolicClopen> {
        Ok(SymbolicClopen::cylinder(self.t0(n)?.clone()))
    }

    /// The atoms `α(2^{q_n} 3^m) ≠ α(2^{q_n} 3^{m+1})` for `m ≤ n`; none at
    /// level 1.
    pub fn domain_atoms(&self, n: usize) -> Result<Vec<Atom>> {
        if self.level().get() == 1 {
            return Ok(Vec::new());
        }
        let p = self.p(n)?;
        let mut out = Vec::new();
        let mut a = p;
        for _ in 0..=n {
            let b = a.checked_mul(3).ok_or_else(|| Error::InvalidArgument("domain coordinate overflow".into()))?;
            out.push(Atom::Rel(a, b, true));
            a = b;
        }
        Ok(out)
    }

    /// `𝔻_n^L`.
    pub fn domain(&self, n: usize) -> Result<SymbolicClopen> {
        let atoms = self.domain_atoms(n)?;
        Ok(SymbolicClopen::from_atoms(self.t0(n)?.clone(), &atoms).expect("the domain is nonempty"))
    }

    pub fn in_domain_cylinder(&self, n: usize, p: &LazyPoint) -> Result<bool> {
        Ok(p.in_cylinder(self.t0(n)?))
    }

    /// `p ∈ 𝔻_n^L`.
    pub fn in_domain(&self, n: usize, p: &LazyPoint) -> Result<bool> {
        if !self.in_domain_cylinder(n, p)? {
            return Ok(false);
        }
        Ok(self.domain_atoms(n)?.into_iter().all(|a| match a {
            Atom::Rel(x, y, d) => (p.eval_u64(x) ^ p.eval_u64(y)) == d,
            Atom::Fix(x, v) => p.eval_u64(x) == v,
        }))
    }

    /// `g_n(p)(k)`; `p` must lie in `N_{t_n 0}`.
    pub fn g_eval_coord(&self, n: usize, p: &LazyPoint, k: &Index) -> Result<bool> {
        if !self.in_domain_cylinder(n, p)? {
            return Err(Error::OutsideDomain { stage: 0 });
        }
        Ok(is_pow2_q(n, k) || p.eval(&self.rule.theta_n(n, k)))
    }

    /// `g_n(p)` as a lazily evaluated point.
    pub fn g_point(&self, n: usize, p: &LazyPoint) -> Result<LazyPoint> {
        if !self.in_domain_cylinder(n, p)? {
            return Err(Error::OutsideDomain { stage: 0 });
        }
        Ok(self.g_point_unchecked(n, p))
    }

    fn g_point_unchecked(&self, n: usize, p: &LazyPoint) -> LazyPoint {
        LazyPoint::derived(Derivation::Image { rule: self.rule, n, source: p.clone() }, false)
    }

    /// `g_s(p)`, checking at every stage that the running point lies in the
    /// next map's domain cylinder. The error names the position in `s` whose
    /// domain was missed.
    pub fn g_compose_point(&self, s: &[usize], p: &LazyPoint) -> Result<LazyPoint> {
        let mut cur = p.clone();
        for (stage, &n) in s.iter().enumerate().rev() {
            if !self.in_domain_cylinder(n, &cur)? {
                return Err(Error::OutsideDomain { stage });
            }
            cur = self.g_point_unchecked(n, &cur);
        }
        Ok(cur)
    }

    /// `g_s(p)(k)` with the coordinates read along the way: `k`, then
    /// `θ_{s(0)}(k)`, and so on until a forced coordinate or the input point.
    pub fn g_compose_trace(&self, s: &[usize], p: &LazyPoint, k: &Index) -> Result<(bool, Vec<Index>)> {
        self.g_compose_point(s, p)?;
        let mut trace = vec![k.clone()];
        let mut cur = k.clone();
        for &n in s {
            if is_pow2_q(n, &cur) {
                return Ok((true, trace));
            }
            cur = self.rule.theta_n(n, &cur);
            trace.push(cur.clone());
        }
        Ok((p.eval(&cur), trace))
    }

    pub fn g_compose_eval(&self, s: &[usize], p: &LazyPoint, k: &Index) -> Result<bool> {
        Ok(self.g_compose_trace(s, p, k)?.0)
    }

    /// `θ_n^{-1}(a)` when it exists and is not the forced coordinate.
    fn beta_of(&self, n: usize, p: u64, a: u64) -> Option<u64> {
        self.rule.theta_n_inv_u64(n, a).filter(|&k| k != p)
    }

    /// `g_n[C]` for `C ⊆ N_{t_n 0}`.
    ///
    /// Coordinates of `C` outside `θ_n[ω]`, together with `θ_n(2^{q_n})`,
    /// never reach the image, so their constraints are projected away; the
    /// rest move to `θ_n^{-1}` of their position and `2^{q_n}` is pinned to 1.
    pub fn image(&self, n: usize, c: &SymbolicClopen) -> Result<SymbolicClopen> {
        let p = self.p(n)?;
        if !c.is_subset_of(&self.domain_cylinder(n)?) {
            return Err(Error::OutsideDomain { stage: 0 });
        }
        let base = c.base();
        let mut b = ClopenBuilder::new(self.t1(n)?.clone());
        for a in p + 1..base.len() as u64 {
            if let Some(k) = self.beta_of(n, p, a) {
                b.fix(k, base.get(a as usize));
            }
        }
        for (&a, &v) in c.fixed() {
            if let Some(k) = self.beta_of(n, p, a) {
                b.fix(k, v);
            }
        }
        let mut classes: BTreeMap<u64, Vec<(u64, bool)>> = BTreeMap::new();
        for (&a, &(r, d)) in c.links() {
            classes.entry(r).or_insert_with(|| vec![(r, false)]).push((a, d));
        }
        for members in classes.values() {
            let kept: Vec<(u64, bool)> = members.iter().filter_map(|&(a, d)| self.beta_of(n, p, a).map(|k| (k, d))).collect();
            for w in kept.windows(2) {
                b.relate(w[0].0, w[1].0, w[0].1 ^ w[1].1);
            }
        }
        Ok(b.build().expect("the image of a nonempty set is nonempty"))
    }

    fn alpha_term(&self, n: usize, p: u64, k: u64) -> Result<Term> {
        if k == p {
            return Ok(Term::Const(true));
        }
        let a = self.rule.theta_n(n, &Index::from(k));
        Ok(Term::Var(coord(&a)?, false))
    }

    /// `N_{t_n 0} ∩ g_n^{-1}(C)`, or `None` if empty.
    pub fn preimage(&self, n: usize, c: &SymbolicClopen) -> Result<Option<SymbolicClopen>> {
        let p = self.p(n)?;
        let t1 = self.t1(n)?;
        let base = c.base();
        let m = base.len().min(t1.len());
        if base.prefix(m) != t1.prefix(m) {
            return Ok(None);
        }
        let mut b = ClopenBuilder::new(self.t0(n)?.clone());
        let mut ok = true;
        let mut add = |b: &mut ClopenBuilder, x: Term, y: Term, d: bool| match (x, y) {
            (Term::Const(u), Term::Const(v)) => ok &= u ^ v == d,
            (Term::Var(a, _), Term::Const(v)) | (Term::Const(v), Term::Var(a, _)) => {
                b.fix(a, v ^ d);
            }
            (Term::Var(a, _), Term::Var(c, _)) => {
                b.relate(a, c, d);
            }
        };
        for k in t1.len() as u64..base.len() as u64 {
            let t = self.alpha_term(n, p, k)?;
            add(&mut b, t, Term::Const(false), base.get(k as usize));
        }
        for (&k, &v) in c.fixed() {
            let t = self.alpha_term(n, p, k)?;
            add(&mut b, t, Term::Const(false), v);
        }
        for (&k, &(r, d)) in c.links() {
            let x = self.alpha_term(n, p, k)?;
            let y = self.alpha_term(n, p, r)?;
            add(&mut b, x, y, d);
        }
        if !ok {
            return Ok(None);
        }
        Ok(b.build())
    }

    /// `𝔻_n^L ∩ g_n^{-1}(C)`.
    pub fn preimage_in_domain(&self, n: usize, c: &SymbolicClopen) -> Result<Option<SymbolicClopen>> {
        let Some(pre) = self.preimage(n, c)? else {
            return Ok(None);
        };
        Ok(pre.meet(&self.domain(n)?))
    }

    /// `g_n^{-1}(C) ∩ C'` for an arbitrary `C'`, the form the refinement
    /// lemmas use.
    pub fn pull_back_within(&self, n: usize, within: &SymbolicClopen, c: &SymbolicClopen) -> Result<Option<SymbolicClopen>> {
        Ok(self.preimage(n, c)?.and_then(|pre| pre.meet(within)))
    }

    /// Whether `(N_y × N_x) ∩ Graph(g_n|𝔻_n^L)` is nonempty.
    pub fn graph_meets(&self, n: usize, y: &BinWord, x: &BinWord) -> Result<bool> {
        if !compatible_with_t_then(n, false, y) || !compatible_with_t_then(n, true, x) {
            return Ok(false);
        }
        let p = match pow2_q_u64(n) {
            Some(p) => p,
            None => return Err(t_seq(n, self.cap).unwrap_err()),
        };
        if y.len() as u64 <= p + 1 && x.len() as u64 <= p + 1 {
            return Ok(true);
        }
        let Some(dom) = self.domain(n)?.restrict_to(y) else {
            return Ok(false);
        };
        Ok(self.pull_back_within(n, &dom, &SymbolicClopen::cylinder(x.clone()))?.is_some())
    }

    /// Whether `g_m(g_n(p))` and `g_m(p)` agree on `coords`, for `m < n`.
    pub fn check_condition_d(&self, m: usize, n: usize, p: &LazyPoint, coords: &[Index]) -> Result<bool> {
        if m >= n {
            return Err(Error::InvalidArgument(format!("condition (d) needs m < n, got {m} >= {n}")));
        }
        let lhs = self.g_compose_point(&[m, n], p)?;
        let rhs = self.g_compose_point(&[m], p)?;
        Ok(coords.iter().all(|k| lhs.eval(k) == rhs.eval(k)))
    }
}

/// Answer of a finite-precision edge test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

/// Whether `N_a × N_b` meets `𝔾_0 = {(s_n 0 γ, s_n 1 γ)}`, when the words
/// decide it.
///
/// For incompatible words the only candidate is `n = |a ∧ b|`, and the
/// answer is exact. Compatible words always admit an edge further out but no
/// decision is made at this precision.
pub fn is_g0_edge(a: &BinWord, b: &BinWord) -> Tri {
    if !a.incompatible(b) {
        return Tri::Unknown;
    }
    let n = a.lcp(b);
    if a.get(n) || !b.get(n) || a.prefix(n) != s_seq(n) {
        return Tri::No;
    }
    let end = a.len().min(b.len());
    if (n + 1..end).all(|i| a.get(i) == b.get(i)) {
        Tri::Yes
    } else {
        Tri::No
    }
}

fn first_primes(k: usize) -> Vec<u64> {
    let mut ps: Vec<u64> = Vec::with_capacity(k);
    let mut c = 2u64;
    while ps.len() < k {
        if ps.iter().take_while(|&&p| p * p <= c).all(|&p| !c.is_multiple_of(p)) {
            ps.push(c);
        }
        c += 1;
    }
    ps
}

/// The first `|prefix|` elements of `E_α = {p_0^{α(0)+1} ⋯ p_n^{α(n)+1}}`.
pub fn sum_tag_set(prefix: &BinWord) -> Vec<Index> {
    let primes = first_primes(prefix.len());
    let mut acc = BigUint::from(1u32);
    let mut out = Vec::with_capacity(prefix.len());
    for (i, &p) in primes.iter().enumerate() {
        let e = 1 + u32::from(prefix.get(i));
        acc *= BigUint::from(p).pow(e);
        out.push(Index::from_biguint(&acc));
    }
    out
}

/// A direct sum of copies of `2^ω`, one per tag; the copy tagged `L` carries
/// `𝔾_L`, and edges never cross copies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedSumSpace {
    tags: Vec<Index>,
}

impl TaggedSumSpace {
    pub fn new(mut tags: Vec<Index>) -> Result<TaggedSumSpace> {
        let n = tags.len();
        tags.sort();
        tags.dedup();
        if tags.len() != n {
            return Err(Error::InvalidArgument("tags must be distinct".into()));
        }
        Ok(TaggedSumSpace { tags })
    }

    /// Tags `1..=n`: the sum of `𝔾_L` for `L ≤ n`.
    pub fn up_to(n: usize) -> TaggedSumSpace {
        TaggedSumSpace { tags: (1..=n as u64).map(Index::from).collect() }
    }

    /// Tags from `E_α`, read off a finite prefix of `α`.
    pub fn from_alpha(prefix: &BinWord) -> TaggedSumSpace {
        TaggedSumSpace { tags: sum_tag_set(prefix) }
    }

    pub fn tags(&self) -> &[Index] {
        &self.tags
    }

    pub fn has_tag(&self, t: &Index) -> bool {
        self.tags.binary_search(t).is_ok()
    }

    /// Whether the tagged cylinders `(ty, N_y)` and `(tx, N_x)` carry an edge
    /// through `g_n` of the copy's level.
    pub fn edge_meets(&self, ty: &Index, y: &BinWord, tx: &Index, x: &BinWord, n: usize) -> Result<bool> {
        if ty != tx || !self.has_tag(ty) {
            return Ok(false);
        }
        let level = ty
            .to_u64()
            .and_then(|l| usize::try_from(l).ok())
            .ok_or_else(|| Error::InvalidArgument(format!("tag {ty} is too large for a level")))?;
        Family::new(FamilyLevel::new(level)?).graph_meets(n, y, x)
    }
}

/// `2^{q_n}` as an index, re-exported for callers threading coordinates.
pub fn special_coord(n: usize) -> Result<Index> {
    pow2_q(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::w;

    fn lv(l: usize) -> Family {
        Family::new(FamilyLevel::new(l).unwrap())
    }

    #[test]
    fn domains() {
        assert_eq!(lv(1).domain(0).unwrap(), SymbolicClopen::cylinder(w("00")));
        let d = lv(2).domain(0).unwrap();
        let expect = SymbolicClopen::from_atoms(w("00"), &[Atom::Rel(1, 3, true)]).unwrap();
        assert_eq!(d, expect);
        assert_eq!(lv(1).domain(1).unwrap(), SymbolicClopen::cylinder(w("000000000")));
    }

    #[test]
    fn images() {
        let f = lv(1);
        assert_eq!(f.image(0, &SymbolicClopen::cylinder(w("00"))).unwrap(), SymbolicClopen::cylinder(w("01")));
        assert_eq!(f.preimage(0, &SymbolicClopen::cylinder(w("01"))).unwrap(), Some(SymbolicClopen::cylinder(w("00"))));
        // α(2) is not read by g_0, so its constraint is projected away
        let img = f.image(0, &SymbolicClopen::cylinder(w("001"))).unwrap();
        assert_eq!(img.render(), "N=01");
        let pre = f.preimage(0, &SymbolicClopen::cylinder(w("011"))).unwrap().unwrap();
        assert_eq!(pre.render(), "N=00; bit(5)=1");
        assert_eq!(f.preimage(0, &SymbolicClopen::cylinder(w("001"))).unwrap(), None);
    }

    #[test]
    fn meets() {
        let f = lv(1);
        assert!(f.graph_meets(0, &w("00"), &w("01")).unwrap());
        assert!(!f.graph_meets(0, &w("01"), &w("11")).unwrap());
        assert!(!f.graph_meets(0, &w("00"), &w("00")).unwrap());
    }

    #[test]
    fn g0_edges() {
        assert_eq!(is_g0_edge(&w("00"), &w("01")), Tri::Yes);
        assert_eq!(is_g0_edge(&w("01"), &w("00")), Tri::No);
        assert_eq!(is_g0_edge(&w("0"), &w("0")), Tri::Unknown);
    }

    #[test]
    fn tags() {
        assert_eq!(sum_tag_set(&w("0")), vec![Index::from(2u64)]);
        assert_eq!(sum_tag_set(&w("11")), vec![Index::from(4u64), Index::from(36u64)]);
        assert_eq!(sum_tag_set(&w("01")), vec![Index::from(2u64), Index::from(18u64)]);
    }
}
