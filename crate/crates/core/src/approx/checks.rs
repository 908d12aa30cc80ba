//! Check suites over computed stages. Each returns a [`SuiteReport`] whose
//! failures carry witnesses.

use std::collections::{BTreeMap, HashSet};

use super::{ApproxState, ApproxSystem, Cw};
use crate::cylinder::LazyPoint;
use crate::error::{Error, Result};
use crate::report::SuiteReport;
use crate::seq::pow2_q_u64;
use crate::uogas::validate_indexed;
use crate::word::BinWord;

/// Partition, word lengths, growth, and the witness of every `B`-edge
/// (recomputed with the clopen algebra for all candidate `n`).
pub fn check_invariants(sys: &ApproxSystem, states: &[ApproxState]) -> SuiteReport {
    let mut r = SuiteReport::new("stage invariants");
    for (i, st) in states.iter().enumerate() {
        let l = st.level;
        r.check(st.words.windows(2).all(|p| p[0] < p[1] && !p[0].is_prefix_of(p[1])), || format!("X_{l} is not a sorted antichain"));
        let kraft: u128 = st.words.iter().map(|w| 1u128 << (64 - w.len())).sum();
        r.check(kraft == 1u128 << 64, || format!("X_{l} does not cover 2^ω (Kraft sum {kraft} / 2^64)"));
        r.check(st.words.iter().all(|w| w.len() <= l), || format!("X_{l} has a word longer than {l}"));
        if let Some(prev) = i.checked_sub(1).map(|j| &states[j]) {
            r.check(st.len() == prev.len() + prev.e_count(), || {
                format!("|X_{l}| = {} but |X_{}| + |E_{}| = {}", st.len(), l - 1, l - 1, prev.len() + prev.e_count())
            });
            let expect: Vec<Cw> = prev
                .words
                .iter()
                .enumerate()
                .flat_map(|(k, &w)| if prev.e[k] { vec![w.child(false), w.child(true)] } else { vec![w] })
                .collect();
            r.check(expect == st.words, || format!("X_{l} is not the split of X_{}", l - 1));
        }
        let fam = sys.family();
        let bad: Vec<String> = sys
            .exec
            .map(&st.b, |&(y, x, n)| {
                let (wy, wx) = (st.word(y), st.word(x));
                let t = sys.t[n as usize];
                let contains = t.child(false).is_prefix_of(st.cw(y)) && t.child(true).is_prefix_of(st.cw(x));
                let witnesses: Vec<usize> = (0..sys.t.len()).filter(|&m| fam.graph_meets(m, &wy, &wx).unwrap_or(false)).collect();
                (!contains || witnesses != [n as usize]).then(|| format!("B_{l} edge ({wy}, {wx}) φ={n}: witnesses {witnesses:?}"))
            })
            .into_iter()
            .flatten()
            .collect();
        r.checked += st.b.len() as u64;
        for b in bad {
            r.fail(b);
        }
    }
    r
}

/// `A_l` is an uogas inside `B_l ⊆ <_lex`, and `|p_x| ≤ l` on `X_l` for
/// `l ≥ 1`.
pub fn check_lemma_53_54(states: &[ApproxState]) -> SuiteReport {
    let mut r = SuiteReport::new("uogas A_l ⊆ B_l and path bound");
    for st in states {
        let l = st.level;
        let a = st.a_edges();
        let v = validate_indexed(st.len(), &a);
        r.check(v.is_empty(), || format!("A_{l} violations: {v:?}"));
        let b: HashSet<(u32, u32)> = st.b.iter().map(|&(y, x, _)| (y, x)).collect();
        for &(y, x) in &a {
            r.check(b.contains(&(y, x)), || format!("A_{l} edge ({}, {}) is not in B_{l}", st.word(y), st.word(x)));
        }
        for &(y, x, _) in &st.b {
            r.check(y < x, || format!("B_{l} edge ({}, {}) is not lexicographically increasing", st.word(y), st.word(x)));
        }
        if l >= 1 {
            for x in 0..st.len() as u32 {
                let pl = st.a.p_len(x);
                r.check(pl as usize <= l, || format!("|p_{}| = {pl} > {l} in X_{l}", st.word(x)));
            }
        }
    }
    r
}

/// For every `(y, x) ∈ B_l`, `x` sits at some position `j ≥ 1` of `p_y`,
/// the last edge before it carries the minimum witness, and the witnesses
/// up to `j` are distinct. Only meaningful for `L = 1`.
pub fn check_lemma_57(sys: &ApproxSystem, states: &[ApproxState]) -> Result<SuiteReport> {
    if sys.family().level().get() != 1 {
        return Err(Error::InvalidArgument("the path-witness lemma is stated for L = 1".into()));
    }
    let mut r = SuiteReport::new("B-edges lie on A-paths with minimal distinct witnesses");
    for st in states {
        let l = st.level;
        let fails: Vec<String> = sys
            .exec
            .map(&st.b, |&(y, x, n)| {
                let p = st.a.p(y);
                let name = || format!("B_{l} edge ({}, {})", st.word(y), st.word(x));
                let Some(j) = p.iter().position(|&v| v == x).filter(|&j| j >= 1) else {
                    return Some(format!("{}: x is not on p_y", name()));
                };
                let phis: Vec<Option<usize>> = (0..j).map(|i| st.phi_of_pair(p[i], p[i + 1])).collect();
                if phis.iter().any(Option::is_none) {
                    return Some(format!("{}: an A-edge on p_y has no witness", name()));
                }
                let phis: Vec<usize> = phis.into_iter().flatten().collect();
                let min = *phis.iter().min().unwrap();
                if phis[j - 1] != n as usize || min != n as usize {
                    return Some(format!("{}: φ = {n}, path witnesses {phis:?}", name()));
                }
                let distinct: HashSet<usize> = phis.iter().copied().collect();
                (distinct.len() != phis.len()).then(|| format!("{}: repeated witnesses {phis:?}", name()))
            })
            .into_iter()
            .flatten()
            .collect();
        r.checked += st.b.len() as u64;
        for f in fails {
            r.fail(f);
        }
    }
    Ok(r)
}

/// `n ↦ L_n`, the first level with `t_n ∈ E_l`.
pub fn detect_l_n(sys: &ApproxSystem, states: &[ApproxState]) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for (n, &t) in sys.t_cw().iter().enumerate() {
        if let Some(st) = states.iter().find(|st| st.index_of_cw(t).is_some_and(|i| st.in_e(i))) {
            out.insert(n, st.level);
        }
    }
    out
}

/// The clean parts of the `L_n` lemma: `L_0 = 1`, `2^{q_n} ≤ L_n`,
/// strict growth, and `X_{L_n} ∩ X_{L_{n+1}} = ∅` when both are computed.
pub fn check_lemma_55(sys: &ApproxSystem, states: &[ApproxState]) -> SuiteReport {
    let mut r = SuiteReport::new("first appearances L_n");
    let ln = detect_l_n(sys, states);
    r.note(format!("detected {ln:?} over {} stages", states.len()));
    if let Some(&l0) = ln.get(&0) {
        r.check(l0 == 1, || format!("L_0 = {l0}, expected 1"));
    } else if states.len() > 1 {
        r.fail("t_0 never entered E".into());
    }
    for (&n, &l) in &ln {
        let p = pow2_q_u64(n).unwrap() as usize;
        r.check(p <= l, || format!("2^q_{n} = {p} > L_{n} = {l}"));
        if let Some(&l1) = ln.get(&(n + 1)) {
            r.check(l < l1, || format!("L_{n} = {l} is not below L_{} = {l1}", n + 1));
            let a: HashSet<Cw> = states[l].words.iter().copied().collect();
            let shared = states[l1].words.iter().filter(|w| a.contains(w)).count();
            r.check(shared == 0, || format!("X_{l} and X_{l1} share {shared} cells"));
        }
    }
    r
}

/// Every word of length at most `max_len` is a cell of some computed stage.
pub fn check_corollary_56(states: &[ApproxState], max_len: usize) -> SuiteReport {
    let mut r = SuiteReport::new(format!("every word of length ≤ {max_len} is eventually a cell"));
    let seen: HashSet<Cw> = states.iter().flat_map(|st| st.words.iter().copied()).collect();
    for len in 0..=max_len.min(super::MAX_DEPTH) {
        for v in 0..1u64 << len {
            let w = BinWord::from_bits((0..len).rev().map(|i| v >> i & 1 == 1));
            r.check(seen.contains(&Cw::from_word(&w).unwrap()), || format!("{w} never appears"));
        }
    }
    r
}

/// The chain `y_k` approximating `g_n(α)` for `α` with the given prefix
/// followed by zeros: `(k, l_k, y_k)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct Lemma58Chain {
    pub links: Vec<(usize, usize, BinWord)>,
}

/// Build the chain for `k = |t_n| + 1, …` while `α|k` appears in the
/// computed stages, checking `(α|k, y_k) ∈ B_{l_k}`, `y_{k-1} ⊆ y_k`, and
/// `y_k ⊆ g_n(α)`.
pub fn check_lemma_58(sys: &ApproxSystem, states: &[ApproxState], n: usize, alpha_prefix: &BinWord) -> Result<(SuiteReport, Lemma58Chain)> {
    let fam = sys.family();
    let t = sys.t_cw().get(n).ok_or_else(|| Error::InvalidArgument(format!("t_{n} is too long for the computed stages")))?;
    let alpha = LazyPoint::from_word(alpha_prefix, false);
    let t0 = t.child(false).to_word();
    if !t0.is_prefix_of(alpha_prefix) {
        return Err(Error::InvalidArgument(format!("α-prefix must extend t_{n}0 = {t0}")));
    }
    let beta = fam.g_point(n, &alpha)?;
    let mut r = SuiteReport::new(format!("cell chain converging to g_{n}(α)"));
    let start = t.len() + 1;
    let mut chain = Lemma58Chain { links: vec![(start, 0, t.child(true).to_word())] };
    let max_len = states.last().map_or(0, |s| s.level);
    for k in start + 1..=max_len {
        let ak = alpha.prefix(k);
        let Some(st) = states.iter().find(|st| st.contains(&ak)) else { break };
        let lk = st.level;
        let bp = beta.prefix(lk);
        let Some(yi) = st.cell_of_prefix(&bp) else {
            r.fail(format!("no cell of X_{lk} contains g_{n}(α)"));
            break;
        };
        let yk = st.word(yi);
        let ai = st.index_of(&ak).unwrap();
        r.check(st.b.binary_search_by(|e| (e.0, e.1).cmp(&(ai, yi))).is_ok(), || format!("({ak}, {yk}) is not in B_{lk}"));
        let prev = &chain.links.last().unwrap().2;
        r.check(prev.is_prefix_of(&yk), || format!("y_{} = {prev} is not a prefix of y_{k} = {yk}", k - 1));
        r.check(yk.is_prefix_of(&bp), || format!("y_{k} = {yk} is not a prefix of g_{n}(α)"));
        chain.links.push((k, lk, yk));
    }
    let last = chain.links.last().map_or(0, |(_, _, y)| y.len());
    r.note(format!("{} links, last cell has length {last}", chain.links.len()));
    Ok((r, chain))
}
