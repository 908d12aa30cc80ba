//! The finite-depth Cantor scheme: clopen cells `U^l_x` for `x ∈ X_l` and
//! the map indices `φ(n)`, built level by level on top of the approximation
//! system and checked against the six scheme conditions.

use std::collections::BTreeMap;

use super::instance::ComplexInstance;
use super::lemma2::lemma26_find;
use super::shrink::{shrink_47_hinted, Hints, Strategy};
use super::tuple::{in_u, refine_45, Assignment};
use crate::approx::{ApproxState, ApproxSystem};
use crate::cylinder::SymbolicClopen;
use crate::error::{Error, Result};
use crate::report::SuiteReport;
use crate::word::BinWord;

/// Constrained-coordinate budget for scheme runs. Cells pick up one fixed
/// coordinate per pullback, so the interactive default is far too small.
pub const SCHEME_MAX_FREE_COORDS: usize = 1 << 14;

/// The reference instance with the scheme's budget.
pub fn scheme_instance() -> super::ReferenceInstance {
    super::ReferenceInstance::new().with_algebra(crate::cylinder::Algebra::new(SCHEME_MAX_FREE_COORDS))
}

/// `(U^l_x)_{x ∈ X_l}` indexed like the approximation stage, and `φ` so far.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeState {
    pub level: usize,
    pub cells: Vec<SymbolicClopen>,
    pub phi: BTreeMap<usize, usize>,
}

impl SchemeState {
    /// `{level, phi, cells: {word: rendering}}`, given the matching stage.
    pub fn to_json(&self, st: &ApproxState) -> serde_json::Value {
        let cells: serde_json::Map<String, serde_json::Value> = (0..st.len() as u32)
            .map(|i| {
                let w = st.word(i);
                let key = if w.is_empty() { "∅".to_string() } else { w.to_string() };
                (key, self.cells[i as usize].render().into())
            })
            .collect();
        let phi: serde_json::Map<String, serde_json::Value> = self.phi.iter().map(|(n, v)| (n.to_string(), (*v).into())).collect();
        serde_json::json!({ "level": self.level, "phi": phi, "cells": cells })
    }
}

/// Options for [`build_scheme`].
#[derive(Clone, Copy, Debug)]
pub struct SchemeOptions {
    pub strategy: Strategy,
    /// Verify `U_𝒯` membership of the assembled tuple before shrinking.
    pub check_tuples: bool,
}

impl Default for SchemeOptions {
    fn default() -> Self {
        SchemeOptions { strategy: Strategy::default(), check_tuples: true }
    }
}

/// `u(y) = φ(φ(y, succ y))` on the non-maximal vertices of a stage.
fn labels<I: ComplexInstance + ?Sized>(st: &ApproxState, phi: &BTreeMap<usize, usize>, _inst: &I) -> Result<Vec<usize>> {
    (0..st.len() as u32)
        .map(|y| {
            let Some(x) = st.a().succ(y) else { return Ok(0) };
            let n =
                st.phi_of_pair(y, x).ok_or_else(|| Error::Invariant(format!("A-edge ({}, {}) has no witness", st.word(y), st.word(x))))?;
            phi.get(&n)
                .copied()
                .ok_or_else(|| Error::Invariant(format!("φ({n}) is needed on ({}, {}) before it is assigned", st.word(y), st.word(x))))
        })
        .collect()
}

/// The `r` with `l = L_r`: `t_r` is a cell of `X_l` that splits.
fn split_index(sys: &ApproxSystem, st: &ApproxState) -> Option<(usize, u32)> {
    sys.t_words().iter().enumerate().find_map(|(r, t)| st.index_of(t).filter(|&i| st.in_e(i)).map(|i| (r, i)))
}

/// The parent cell in `X_l` of each cell of `X_{l+1}`.
fn parents(st: &ApproxState, next: &ApproxState) -> Result<Vec<u32>> {
    (0..next.len() as u32)
        .map(|i| {
            let w = next.word(i);
            st.index_of(&w)
                .or_else(|| (!w.is_empty()).then(|| st.index_of(&w.prefix(w.len() - 1))).flatten())
                .ok_or_else(|| Error::Invariant(format!("{w} has no parent in X_{}", st.level())))
        })
        .collect()
}

/// Levels `0..=depth` of the scheme over `states[0..=depth]`.
pub fn build_scheme<I: ComplexInstance + ?Sized>(
    sys: &ApproxSystem,
    states: &[ApproxState],
    inst: &I,
    depth: usize,
    opts: SchemeOptions,
) -> Result<Vec<SchemeState>> {
    if states.len() <= depth {
        return Err(Error::InvalidArgument(format!("{} approximation stages for depth {depth}", states.len())));
    }
    let mut out = vec![SchemeState { level: 0, cells: vec![SymbolicClopen::full()], phi: BTreeMap::new() }];
    for l in 0..depth {
        let next = scheme_step(sys, &states[l], &states[l + 1], inst, &out[l], opts).map_err(|e| e.at_level(l + 1))?;
        out.push(next);
    }
    Ok(out)
}

fn scheme_step<I: ComplexInstance + ?Sized>(
    sys: &ApproxSystem,
    st: &ApproxState,
    next: &ApproxState,
    inst: &I,
    cur: &SchemeState,
    opts: SchemeOptions,
) -> Result<SchemeState> {
    let l = st.level();
    let ul = labels(st, &cur.phi, inst)?;
    let w = refine_45(inst, &Assignment::new(st.a().clone(), ul.clone(), cur.cells.clone())?)?.v;
    let mut phi = cur.phi.clone();
    let split = match split_index(sys, st) {
        Some((r, t)) if !phi.contains_key(&r) => {
            let m = phi.range(..r).map(|(_, &v)| v).max();
            let found = lemma26_find(inst, &w[t as usize], m)?;
            phi.insert(r, found.n);
            Some((t, found))
        }
        _ => None,
    };
    let up = parents(st, next)?;
    let u = labels(next, &phi, inst)?;
    let mut v: Vec<Option<SymbolicClopen>> = up.iter().map(|&p| Some(cur.cells[p as usize].clone())).collect();
    if let Some((t, found)) = split {
        let t0 = next.index_of(&st.word(t).child(false)).expect("t_r splits");
        let t1 = t0 + 1;
        v[t0 as usize] = Some(found.v0.clone());
        v[t1 as usize] = Some(found.v1.clone());
        // push V_{t_r 1} up its path to the top of its component
        let q = next.a().p(t1);
        for win in q.windows(2) {
            let (a, b) = (win[0], win[1]);
            let pa = up[a as usize];
            if st.a().succ(pa) != Some(up[b as usize]) {
                return Err(Error::Invariant(format!("the path above {} does not descend from A_{l}", next.word(t1))));
            }
            let img = inst.image(ul[pa as usize], v[a as usize].as_ref().unwrap())?;
            v[b as usize] = Some(img);
        }
    }
    let a = Assignment::new(next.a().clone(), u, v.into_iter().map(Option::unwrap).collect())?;
    if opts.check_tuples && !in_u(inst, &a)? {
        return Err(Error::Invariant(format!("the assembled tuple at level {} is not in U", l + 1)));
    }
    let d = (0..next.len() as u32).map(|i| next.word_len(i)).max().unwrap_or(0).max(l + 1);
    // steer each cell into its own cylinder, so the split cells stay big
    // enough for the next graph search
    // and keep the cylinders of the t-words that split later clear
    let prefer: Vec<SymbolicClopen> = (0..next.len() as u32).map(|i| SymbolicClopen::cylinder(next.word(i))).collect();
    let reserved = sys
        .t_words()
        .iter()
        .enumerate()
        .filter(|(r, _)| !phi.contains_key(r))
        .filter_map(|(_, t)| next.cell_of_prefix(t).map(|i| (i, SymbolicClopen::cylinder(t.clone()))))
        .collect();
    let hints = Hints { prefer, reserved };
    let (shrunk, _) = shrink_47_hinted(inst, &a, d, opts.strategy, Some(&hints))?;
    Ok(SchemeState { level: l + 1, cells: shrunk.v, phi })
}

/// Nesting, diameter, sibling disjointness, domain, path and monotonicity
/// conditions across consecutive levels, pairwise disjointness of
/// every level, and the edge inclusions on every `B_{l+1}`.
pub fn check_scheme<I: ComplexInstance + ?Sized>(inst: &I, states: &[ApproxState], scheme: &[SchemeState]) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("scheme");
    for s in scheme {
        let l = s.level;
        let st = &states[l];
        // diameter and disjointness
        for (i, c) in s.cells.iter().enumerate() {
            rep.check(c.base().len() >= l, || format!("diameter: diam U^{l}_{} = {}", st.word(i as u32), c.diameter()));
            for (j, d) in s.cells[..i].iter().enumerate() {
                rep.check(!c.meets(d), || format!("U^{l}_{} meets U^{l}_{}", st.word(j as u32), st.word(i as u32)));
            }
        }
        // φ increasing
        let vals: Vec<usize> = s.phi.values().copied().collect();
        rep.check(vals.windows(2).all(|w| w[0] < w[1]), || format!("φ is not increasing at level {l}: {:?}", s.phi));
        rep.check(s.phi.keys().copied().eq(0..s.phi.len()), || format!("φ has gaps at level {l}: {:?}", s.phi));
        if l == 0 {
            continue;
        }
        let (prev, pst) = (&scheme[l - 1], &states[l - 1]);
        let up = parents(pst, st)?;
        // nesting
        for (i, &u) in up.iter().enumerate() {
            rep.check(s.cells[i].is_subset_of(&prev.cells[u as usize]), || {
                format!("nesting: U^{l}_{} ⊄ U^{}_{}", st.word(i as u32), l - 1, pst.word(u))
            });
        }
        // domains on A_l and the homomorphism inclusion on B_l
        for (y, x) in st.a_edges() {
            edge_inclusion(inst, st, s, y, x, "domain", &mut rep)?;
        }
        for &(y, x, _) in st.b_edges() {
            edge_inclusion(inst, st, s, y, x, "B", &mut rep)?;
            path_condition(inst, st, s, y, x, &mut rep)?;
        }
    }
    rep.note(format!("levels 0..={}", scheme.len().saturating_sub(1)));
    Ok(rep)
}

/// `U_y ⊆ D_{φ(n)}` and `U_x ⊆ f_{φ(n)}[U_y]` for `n = φ(y, x)`.
fn edge_inclusion<I: ComplexInstance + ?Sized>(
    inst: &I,
    st: &ApproxState,
    s: &SchemeState,
    y: u32,
    x: u32,
    tag: &str,
    rep: &mut SuiteReport,
) -> Result<()> {
    let name = || format!("{tag} ({}, {}) at level {}", st.word(y), st.word(x), s.level);
    let Some(n) = st.phi_of_pair(y, x) else {
        rep.fail(format!("{} has no witness", name()));
        return Ok(());
    };
    let Some(&f) = s.phi.get(&n) else {
        rep.fail(format!("{}: φ({n}) is not assigned", name()));
        return Ok(());
    };
    let uy = &s.cells[y as usize];
    let inside = uy.is_subset_of(&inst.domain(f)?);
    rep.check(inside, || format!("{}: U_y ⊄ D_{f}", name()));
    if inside {
        let img = inst.image(f, uy)?;
        rep.check(s.cells[x as usize].is_subset_of(&img), || format!("{}: U_x ⊄ f_{f}[U_y]", name()));
    }
    Ok(())
}

/// Path condition: along `p = p_y` with `x = p(j)`, if the label of the last step is
/// the minimum so far then every `U_{p(m)}`, `m < j`, lies in `D_{φ(n)}`.
fn path_condition<I: ComplexInstance + ?Sized>(
    inst: &I,
    st: &ApproxState,
    s: &SchemeState,
    y: u32,
    x: u32,
    rep: &mut SuiteReport,
) -> Result<()> {
    let p = st.a().p(y);
    let Some(j) = p.iter().position(|&v| v == x) else {
        rep.fail(format!("path: {} is not on the path of {} at level {}", st.word(x), st.word(y), s.level));
        return Ok(());
    };
    let lab: Vec<Option<usize>> = p.windows(2).take(j).map(|w| st.phi_of_pair(w[0], w[1])).collect();
    let n = st.phi_of_pair(y, x);
    if j == 0 || lab[j - 1] != n || lab.iter().min() != Some(&n) {
        return Ok(());
    }
    let Some(&f) = n.and_then(|n| s.phi.get(&n)) else { return Ok(()) };
    let dom = inst.domain(f)?;
    for &pm in &p[..j] {
        rep.check(s.cells[pm as usize].is_subset_of(&dom), || {
            format!("path: U_{} ⊄ D_{f} for the B-edge ({}, {}) at level {}", st.word(pm), st.word(y), st.word(x), s.level)
        });
    }
    Ok(())
}

/// The nested cells `U^l_{α|k_l}` for `l = 0..scheme.len()`.
pub fn h_eval(states: &[ApproxState], scheme: &[SchemeState], alpha: &BinWord) -> Result<Vec<SymbolicClopen>> {
    scheme
        .iter()
        .map(|s| {
            let st = &states[s.level];
            let i = st.cell_of_prefix(alpha).ok_or(Error::PrefixTooShort { need: s.level, got: alpha.len() })?;
            Ok(s.cells[i as usize].clone())
        })
        .collect()
}
