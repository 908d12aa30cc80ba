//! Finite oriented graphs: the validator against an independent forest
//! test, the path lemma, and the duplication construction.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exec::Exec;
use crate::report::SuiteReport;
use crate::uogas::enumerate::{labeled_uogas, oriented_graph, oriented_graph_count, random_uogas, uogas_up_to_iso};
use crate::uogas::{
    all_valid_enumerations, default_enumeration, duplication_stages, lemma42_suite, predicted_size, validate_uogas, DupState,
    FiniteOrientedGraph, IndexedUogas, Stage,
};

/// The definition read directly: out-degree at most one, and the
/// symmetrization is a forest (as many edges as vertices minus components).
/// Expects an oriented relation, as produced by the enumerator.
pub fn is_uogas_oracle(n: usize, edges: &[(u32, u32)]) -> bool {
    let mut out = vec![0u8; n];
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(a, b) in edges {
        out[a as usize] += 1;
        if out[a as usize] > 1 {
            return false;
        }
        let (ra, rb) = (root(&mut parent, a as usize), root(&mut parent, b as usize));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}

/// Every oriented graph on at most `max_n` vertices: the validator agrees
/// with [`is_uogas_oracle`], and the path lemma holds on each uogas.
pub fn path_lemma_suite(max_n: usize, exec: Exec) -> SuiteReport {
    let mut r = SuiteReport::new(format!("uogas validation and path lemma, ≤ {max_n} vertices"));
    for n in 0..=max_n {
        let total = oriented_graph_count(n);
        let res = exec.filter_map_range(total, |code| {
            let e = &oriented_graph(n, code);
            let g = FiniteOrientedGraph::new((0..n as u32).collect(), e.clone()).expect("edges are on 0..n");
            let valid = validate_uogas(&g).is_ok();
            let mut fails = Vec::new();
            if valid != is_uogas_oracle(n, e) {
                fails.push(format!("validator says {valid} on {e:?}"));
            }
            if valid {
                fails.extend(lemma42_suite(n, e).failures.into_iter().map(|f| format!("{e:?}: {f}")));
            }
            (valid || !fails.is_empty()).then_some((valid, fails))
        });
        let valid = res.iter().filter(|(v, _)| *v).count();
        r.checked += total + valid as u64;
        res.into_iter().flat_map(|(_, f)| f).for_each(|m| r.fail(m));
        let expect = (n as u64 + 1).pow(n.saturating_sub(1) as u32);
        r.check(valid as u64 == expect, || format!("{valid} uogas on {n} vertices, expected {expect}"));
    }
    r
}

/// Checks on one stage of the duplication of `g`: it is an uogas, label
/// blocks only meet along duplicated edges, and forgetting labels maps
/// edges to edges of `g`.
fn check_stage(g: &IndexedUogas, stage: Stage, st: &DupState) -> Vec<String> {
    let mut out = Vec::new();
    let v = st.validate();
    if !v.is_empty() {
        out.push(format!("{stage:?} is not an uogas: {v:?}"));
    }
    if !st.blocks_separated() {
        out.push(format!("{stage:?} joins unrelated label blocks"));
    }
    for &(a, b) in &st.edges {
        let (x, y) = (st.vertices[a as usize].0, st.vertices[b as usize].0);
        if !g.has_edge(x, y) {
            out.push(format!("{stage:?}: edge over ({x}, {y}) which is not an edge"));
        }
    }
    out
}

/// Every stage for one enumeration, plus the size of the last stage.
pub fn duplication_checks(g: &IndexedUogas, ord: &[u32]) -> Vec<String> {
    let mut out = Vec::new();
    let mut last = None;
    let res = duplication_stages(g, ord, |stage, st| {
        out.extend(check_stage(g, stage, st));
        if let Stage::Full(_) = stage {
            last = Some(st.vertices.len());
        }
    });
    if let Err(e) = res {
        out.push(format!("construction failed: {e}"));
    }
    if let Some(size) = last {
        if size as u128 != predicted_size(g) {
            out.push(format!("last stage has {size} vertices, predicted {}", predicted_size(g)));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct DuplicationConfig {
    /// Every labeled uogas up to this size with the default enumeration.
    pub labeled_max: usize,
    /// Every shape up to this size with every admissible enumeration.
    pub iso_max: usize,
    pub random_count: usize,
    pub random_vertices: usize,
    /// Random graphs whose last stage would exceed this are redrawn.
    pub random_budget: u128,
    pub seed: u64,
}

impl Default for DuplicationConfig {
    fn default() -> Self {
        DuplicationConfig { labeled_max: 5, iso_max: 6, random_count: 1000, random_vertices: 12, random_budget: 5000, seed: 0 }
    }
}

/// The duplication of an uogas is an uogas, on every stage.
pub fn duplication_suite(cfg: &DuplicationConfig, exec: Exec) -> SuiteReport {
    let mut r = SuiteReport::new("duplication stages are uogas");
    for n in 1..=cfg.labeled_max {
        let gs = labeled_uogas(n);
        let fails = exec.map(&gs, |g| duplication_checks(g, &default_enumeration(g)));
        r.checked += gs.len() as u64;
        fails.into_iter().flatten().for_each(|m| r.fail(m));
    }
    for n in 1..=cfg.iso_max {
        let gs = uogas_up_to_iso(n);
        let jobs: Vec<(&IndexedUogas, Vec<u32>)> =
            gs.iter().flat_map(|g| all_valid_enumerations(g).into_iter().map(move |o| (g, o))).collect();
        let fails = exec.map(&jobs, |(g, o)| duplication_checks(g, o));
        r.checked += jobs.len() as u64;
        fails.into_iter().flatten().for_each(|m| r.fail(m));
        r.note(format!("{n} vertices: {} shapes, {} enumerations", gs.len(), jobs.len()));
    }
    if cfg.random_count > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut gs = Vec::new();
        let mut redrawn = 0;
        while gs.len() < cfg.random_count {
            let g = random_uogas(&mut rng, cfg.random_vertices, 0.35);
            if predicted_size(&g) <= cfg.random_budget {
                gs.push(g);
            } else {
                redrawn += 1;
            }
        }
        let fails = exec.map(&gs, |g| duplication_checks(g, &default_enumeration(g)));
        r.checked += gs.len() as u64;
        fails.into_iter().flatten().for_each(|m| r.fail(m));
        let depth = gs.iter().map(|g| (0..g.len() as u32).map(|x| g.p_len(x)).max().unwrap_or(0)).max().unwrap_or(0);
        r.note(format!(
            "{} random graphs on {} vertices (last stage ≤ {}, {redrawn} redrawn, longest path {depth})",
            gs.len(),
            cfg.random_vertices,
            cfg.random_budget
        ));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_on_examples() {
        assert!(is_uogas_oracle(3, &[(0, 1), (2, 1)]));
        assert!(!is_uogas_oracle(3, &[(0, 1), (0, 2)]));
        assert!(!is_uogas_oracle(3, &[(0, 1), (1, 2), (2, 0)]));
        assert!(!is_uogas_oracle(4, &[(0, 1), (2, 1), (2, 3)]));
    }

    #[test]
    fn small_exhaustive() {
        assert!(path_lemma_suite(4, Exec::Parallel).is_ok());
        let cfg = DuplicationConfig { labeled_max: 4, iso_max: 4, random_count: 20, random_vertices: 7, ..Default::default() };
        let r = duplication_suite(&cfg, Exec::Parallel);
        assert!(r.is_ok(), "{r}");
    }
}
