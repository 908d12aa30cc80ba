//! The finite approximation system `(X_l, B_l, φ_{l-1}, A_l, E_l, l_y)`.
//!
//! Stage `l` holds a maximal antichain `X_l` of words of length at most `l`,
//! the graph `B_l` of pairs of cells that meet the digraph, the uogas
//! `A_l ⊆ B_l`, and the set `E_l` of cells split at the next stage.
//! Words are stored packed (at most 64 bits), which bounds the depth by 64.

mod checks;
mod dump;

pub use checks::{
    check_corollary_56, check_invariants, check_lemma_53_54, check_lemma_55, check_lemma_57, check_lemma_58, detect_l_n, Lemma58Chain,
};

use std::collections::{HashMap, HashSet};

use crate::digraph::Family;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::seq::{pow2_q_u64, t_len, t_seq, FamilyLevel};
use crate::uogas::IndexedUogas;
use crate::word::BinWord;

/// Default bound on `|X_l|`.
pub const DEFAULT_X_CAP: usize = 200_000;
/// Default number of stages computed by the CLI.
pub const DEFAULT_DEPTH: usize = 64;
/// Longest word the packed representation holds.
pub const MAX_DEPTH: usize = 64;

/// A word of at most 64 bits; bit `i` sits at bit `63 - i` of `v`, so the
/// derived order is lexicographic with prefixes first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub(crate) struct Cw {
    v: u64,
    len: u8,
}

impl Cw {
    pub(crate) fn len(self) -> usize {
        self.len as usize
    }

    pub(crate) fn get(self, i: usize) -> bool {
        debug_assert!(i < self.len());
        self.v >> (63 - i) & 1 == 1
    }

    pub(crate) fn child(self, b: bool) -> Cw {
        debug_assert!(self.len() < MAX_DEPTH);
        Cw { v: self.v | (u64::from(b) << (63 - self.len())), len: self.len + 1 }
    }

    pub(crate) fn prefix(self, n: usize) -> Cw {
        if n >= self.len() {
            return self;
        }
        let mask = if n == 0 { 0 } else { !0u64 << (64 - n) };
        Cw { v: self.v & mask, len: n as u8 }
    }

    pub(crate) fn lcp(self, o: Cw) -> usize {
        let m = self.len.min(o.len) as usize;
        ((self.v ^ o.v).leading_zeros() as usize).min(m)
    }

    pub(crate) fn is_prefix_of(self, o: Cw) -> bool {
        self.len <= o.len && o.prefix(self.len()) == self
    }

    pub(crate) fn incompatible(self, o: Cw) -> bool {
        self.lcp(o) < self.len.min(o.len) as usize
    }

    pub(crate) fn to_word(self) -> BinWord {
        BinWord::from_bits((0..self.len()).map(|i| self.get(i)))
    }

    pub(crate) fn from_word(w: &BinWord) -> Option<Cw> {
        (w.len() <= MAX_DEPTH).then(|| w.iter().fold(Cw::default(), |c, b| c.child(b)))
    }
}

/// One stage of the system. Vertices are indices into the lexicographically
/// sorted `X_l`.
#[derive(Clone, Debug)]
pub struct ApproxState {
    pub(crate) level: usize,
    pub(crate) words: Vec<Cw>,
    index: HashMap<Cw, u32>,
    pub(crate) b: Vec<(u32, u32, u32)>,
    pub(crate) a: IndexedUogas,
    pub(crate) e: Vec<bool>,
}

impl ApproxState {
    pub fn level(&self) -> usize {
        self.level
    }

    /// `|X_l|`.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, i: u32) -> BinWord {
        self.words[i as usize].to_word()
    }

    pub fn word_len(&self, i: u32) -> usize {
        self.words[i as usize].len()
    }

    pub(crate) fn cw(&self, i: u32) -> Cw {
        self.words[i as usize]
    }

    pub fn words(&self) -> Vec<BinWord> {
        self.words.iter().map(|w| w.to_word()).collect()
    }

    pub fn index_of(&self, w: &BinWord) -> Option<u32> {
        self.index.get(&Cw::from_word(w)?).copied()
    }

    pub(crate) fn index_of_cw(&self, w: Cw) -> Option<u32> {
        self.index.get(&w).copied()
    }

    pub fn contains(&self, w: &BinWord) -> bool {
        self.index_of(w).is_some()
    }

    /// The cell of `X_l` containing the point with this prefix, when the
    /// prefix is long enough to decide it.
    pub fn cell_of_prefix(&self, w: &BinWord) -> Option<u32> {
        (0..=w.len().min(self.level)).find_map(|k| self.index_of(&w.prefix(k)))
    }

    /// `B_l` as `(y, x, φ_{l-1}(y, x))`, sorted.
    pub fn b_edges(&self) -> &[(u32, u32, u32)] {
        &self.b
    }

    /// `A_l` as an indexed uogas.
    pub fn a(&self) -> &IndexedUogas {
        &self.a
    }

    pub fn a_edges(&self) -> Vec<(u32, u32)> {
        self.a.edges().collect()
    }

    pub fn in_e(&self, i: u32) -> bool {
        self.e[i as usize]
    }

    pub fn e_count(&self) -> usize {
        self.e.iter().filter(|&&b| b).count()
    }

    pub fn e_words(&self) -> Vec<BinWord> {
        (0..self.len() as u32).filter(|&i| self.in_e(i)).map(|i| self.word(i)).collect()
    }

    /// `l_y`.
    pub fn l_of(&self, i: u32) -> usize {
        self.word_len(i) + usize::from(self.in_e(i))
    }

    /// `φ_{l-1}(y, x)` for a pair of incompatible cells: the `n` with
    /// `2^{q_n} = |y ∧ x|`. Meaningful on `B_l`.
    pub fn phi_of_pair(&self, y: u32, x: u32) -> Option<usize> {
        let c = self.cw(y).lcp(self.cw(x)) as u64;
        (0..=2).find(|&n| pow2_q_u64(n) == Some(c))
    }
}

/// Parameters and cached `t_n` words for one family level.
#[derive(Clone, Debug)]
pub struct ApproxSystem {
    family: Family,
    cap: usize,
    pub(crate) exec: Exec,
    /// `t_n` for every `n` short enough to appear in a stage.
    pub(crate) t: Vec<Cw>,
}

impl ApproxSystem {
    pub fn new(level: FamilyLevel) -> ApproxSystem {
        ApproxSystem::with_family(Family::new(level))
    }

    pub fn with_family(family: Family) -> ApproxSystem {
        let t = (0..)
            .map_while(|n| {
                let len = t_len(n)?;
                (len < MAX_DEPTH as u64).then(|| Cw::from_word(&t_seq(n, len).expect("short t-word")).unwrap())
            })
            .collect();
        ApproxSystem { family, cap: DEFAULT_X_CAP, exec: Exec::default(), t }
    }

    pub fn with_cap(mut self, cap: usize) -> ApproxSystem {
        self.cap = cap;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> ApproxSystem {
        self.exec = exec;
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// `t_n` for the indices that fit a stage.
    pub fn t_words(&self) -> Vec<BinWord> {
        self.t.iter().map(|w| w.to_word()).collect()
    }

    pub(crate) fn t_cw(&self) -> &[Cw] {
        &self.t
    }

    /// Stage 0: `X_0 = E_0 = {∅}`, no edges.
    pub fn init(&self) -> ApproxState {
        let root = Cw::default();
        ApproxState {
            level: 0,
            words: vec![root],
            index: HashMap::from([(root, 0)]),
            b: Vec::new(),
            a: IndexedUogas::from_valid_succ(vec![None]),
            e: vec![true],
        }
    }

    /// Stages `0..=depth`. Errors carry the level that failed.
    pub fn run(&self, depth: usize) -> Result<Vec<ApproxState>> {
        let mut out = vec![self.init()];
        for l in 0..depth {
            let next = self.step(&out[l]).map_err(|e| e.at_level(l + 1))?;
            out.push(next);
        }
        Ok(out)
    }

    /// Stage `l + 1` from stage `l`.
    pub fn step(&self, st: &ApproxState) -> Result<ApproxState> {
        let l = st.level;
        if l >= MAX_DEPTH {
            return Err(Error::InvalidArgument(format!("stages beyond {MAX_DEPTH} are not supported")));
        }
        let requested = st.len() + st.e_count();
        if requested > self.cap {
            return Err(Error::CapExceeded { what: format!("|X_{}|", l + 1), requested: requested.to_string(), cap: self.cap.to_string() });
        }

        // X_{l+1}, in order; `first[i]` is the new index of the cell `i`
        // (or of its child `0`)
        let mut words = Vec::with_capacity(requested);
        let mut first = Vec::with_capacity(st.len());
        for (i, &w) in st.words.iter().enumerate() {
            first.push(words.len() as u32);
            if st.e[i] {
                words.push(w.child(false));
                words.push(w.child(true));
            } else {
                words.push(w);
            }
        }
        let index: HashMap<Cw, u32> = words.iter().enumerate().map(|(i, &w)| (w, i as u32)).collect();

        let a_edges = self.next_a(st, &first)?;
        let a = IndexedUogas::new(words.len(), &a_edges).map_err(|v| Error::Invariant(format!("A_{} is not an uogas: {v:?}", l + 1)))?;
        let mut next = ApproxState { level: l + 1, words, index, b: Vec::new(), a, e: Vec::new() };
        next.b = self.compute_b(&next)?;
        next.e = self.decide_e(&next)?;
        Ok(next)
    }

    fn t_index(&self, st: &ApproxState, w: Cw) -> Option<usize> {
        self.t.iter().position(|&t| t == w).filter(|_| st.index.contains_key(&w))
    }

    fn theta(&self, n: usize, k: usize) -> Result<usize> {
        self.family.rule().theta_n_u64(n, k as u64).map(|v| v as usize).ok_or_else(|| Error::Invariant(format!("θ_{n}({k}) overflows")))
    }

    fn next_a(&self, st: &ApproxState, first: &[u32]) -> Result<Vec<(u32, u32)>> {
        let is_t = |i: u32| self.t_index(st, st.cw(i)).is_some();
        let kids = |i: u32| -> Vec<(u32, Cw)> {
            let f = first[i as usize];
            let w = st.cw(i);
            if st.e[i as usize] {
                vec![(f, w.child(false)), (f + 1, w.child(true))]
            } else {
                vec![(f, w)]
            }
        };
        let mut edges = Vec::new();
        for &t in &self.t {
            if let Some(i) = st.index_of_cw(t) {
                if st.a.is_max(i) && st.e[i as usize] {
                    edges.push((first[i as usize], first[i as usize] + 1));
                }
            }
        }
        for y in 0..st.len() as u32 {
            let Some(x) = st.a.succ(y) else { continue };
            let n =
                st.phi_of_pair(y, x).ok_or_else(|| Error::Invariant(format!("A-edge ({}, {}) has no witness", st.word(y), st.word(x))))?;
            let (fy, fx) = (first[y as usize], first[x as usize]);
            if !st.e[x as usize] {
                match (st.e[y as usize], is_t(y)) {
                    (false, _) => edges.push((fy, fx)),
                    (true, false) => edges.extend([(fy, fx), (fy + 1, fx)]),
                    (true, true) => edges.extend([(fy + 1, fx), (fy, fy + 1)]),
                }
                continue;
            }
            if is_t(y) {
                return Err(Error::Invariant(format!("t-word {} points to a split cell", st.word(y))));
            }
            let a = self.theta(n, st.word_len(x))?;
            for (iy, wy) in kids(y) {
                if a >= wy.len() {
                    return Err(Error::Invariant(format!("{} is not long enough to decide θ_{n}", wy.to_word())));
                }
                edges.push((iy, fx + u32::from(wy.get(a))));
            }
        }
        Ok(edges)
    }

    /// Whether `N_y × N_w` meets the graph of `g_n` restricted to its domain,
    /// given that `N_y × N_{w⁻}` does (`w⁻` is `w` minus its last bit).
    fn meets_extended(&self, n: usize, y: Cw, w: Cw) -> Result<bool> {
        if self.family.level().get() != 1 {
            return self.family.graph_meets(n, &y.to_word(), &w.to_word());
        }
        // with L = 1 the domain is a cylinder and g_n reads one fresh
        // coordinate per output bit
        let k = w.len() - 1;
        let p = pow2_q_u64(n).unwrap() as usize;
        let bit = w.get(k);
        Ok(match k.cmp(&p) {
            std::cmp::Ordering::Less => bit == self.t[n].get(k),
            std::cmp::Ordering::Equal => bit,
            std::cmp::Ordering::Greater => {
                let a = self.theta(n, k)?;
                a >= y.len() || y.get(a) == bit
            }
        })
    }

    fn compute_b(&self, st: &ApproxState) -> Result<Vec<(u32, u32, u32)>> {
        let mut internal: HashSet<Cw> = HashSet::new();
        for &w in &st.words {
            for k in (0..w.len()).rev() {
                if !internal.insert(w.prefix(k)) {
                    break;
                }
            }
        }
        let rows: Vec<Result<Vec<(u32, u32, u32)>>> = self.exec.map_range(st.len() as u64, |yi| {
            let yi = yi as u32;
            let y = st.cw(yi);
            let mut out = Vec::new();
            for (n, &t) in self.t.iter().enumerate() {
                let p = t.len();
                if y.len() <= p || y.prefix(p + 1) != t.child(false) {
                    continue;
                }
                let mut stack = vec![Cw::default()];
                while let Some(w) = stack.pop() {
                    if let Some(xi) = st.index_of_cw(w) {
                        if y.incompatible(w) {
                            out.push((yi, xi, n as u32));
                        }
                    } else if internal.contains(&w) {
                        for b in [true, false] {
                            let wb = w.child(b);
                            if self.meets_extended(n, y, wb)? {
                                stack.push(wb);
                            }
                        }
                    }
                }
            }
            out.sort_unstable();
            Ok(out)
        });
        let mut b = Vec::new();
        for r in rows {
            b.extend(r?);
        }
        Ok(b)
    }

    fn decide_e(&self, st: &ApproxState) -> Result<Vec<bool>> {
        let n = st.len();
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_by_key(|&x| (st.a.m_of(x), x));
        let ts: Vec<u32> = self.t.iter().filter_map(|&t| st.index_of_cw(t)).collect();
        let mut e = vec![false; n];
        for x in order {
            let preds = st.a.preds(x);
            if preds.is_empty() {
                e[x as usize] = true;
                continue;
            }
            let mut ok = true;
            for &y in preds {
                let ph = st
                    .phi_of_pair(y, x)
                    .ok_or_else(|| Error::Invariant(format!("A-edge ({}, {}) has no witness", st.word(y), st.word(x))))?;
                let ly = st.word_len(y) + usize::from(e[y as usize]);
                if self.theta(ph, st.word_len(x))? >= ly {
                    ok = false;
                    break;
                }
            }
            // t_q has smaller M than every vertex above it, so it is
            // already decided here
            if ok && ts.iter().any(|&t| t != x && e[t as usize] && st.a.on_p(t, x)) {
                ok = false;
            }
            e[x as usize] = ok;
        }
        Ok(e)
    }
}

/// Stage 0 for a family level.
pub fn init(level: FamilyLevel) -> ApproxState {
    ApproxSystem::new(level).init()
}

/// Stages `0..=depth` with default parameters.
pub fn run(level: FamilyLevel, depth: usize) -> Result<Vec<ApproxState>> {
    ApproxSystem::new(level).run(depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::w;

    fn sys() -> ApproxSystem {
        ApproxSystem::new(FamilyLevel::new(1).unwrap())
    }

    #[test]
    fn packed_words() {
        let a = Cw::from_word(&w("0110")).unwrap();
        assert_eq!(a.to_word(), w("0110"));
        assert_eq!(a.prefix(2).to_word(), w("01"));
        assert_eq!(a.lcp(Cw::from_word(&w("0101")).unwrap()), 2);
        let mut ws: Vec<Cw> = ["1", "01", "0", "00", ""].iter().map(|s| Cw::from_word(&w(s)).unwrap()).collect();
        ws.sort();
        let back: Vec<String> = ws.iter().map(|c| c.to_word().to_string()).collect();
        assert_eq!(back, vec!["", "0", "00", "01", "1"]);
    }

    #[test]
    fn first_stages() {
        let s = sys();
        let st = s.run(2).unwrap();
        assert_eq!(st[0].words(), vec![BinWord::empty()]);
        assert_eq!(st[0].e_words(), vec![BinWord::empty()]);
        assert_eq!(st[1].words(), vec![w("0"), w("1")]);
        assert!(st[1].a_edges().is_empty());
        assert_eq!(st[1].e_words(), vec![w("0"), w("1")]);
        assert_eq!(st[2].words(), vec![w("00"), w("01"), w("10"), w("11")]);
        assert_eq!(st[2].a_edges(), vec![(0, 1)]);
        assert_eq!(st[2].b_edges(), &[(0, 1, 0)]);
        assert_eq!(s.run(0).unwrap().len(), 1);
    }

    #[test]
    fn cap_is_reported_with_level() {
        let err = sys().with_cap(10).run(10).unwrap_err();
        let Error::AtLevel { level, source } = err else { panic!() };
        assert!(level > 2);
        assert!(matches!(*source, Error::CapExceeded { .. }));
    }
}
