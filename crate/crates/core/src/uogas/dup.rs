//! The labeled duplication of an uogas: stages `𝒳_m` and the intermediate
//! stages `𝒳^p_{m+1}` with their edge sets.
//!
//! Vertices are enumerated `x_0, …, x_{L-1}` by nondecreasing `|p_x|`, so the
//! maximal vertices come first (there are `L_0` of them). Each later `x_{m+1}`
//! is duplicated `L = |X|` times, one label block at a time, together with
//! every vertex whose path to the top passes through it.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::uogas::{validate_indexed, IndexedUogas, Uogas, VertexId, Violation};

/// A vertex of the duplicated graph: an original vertex and a label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct Labeled<V> {
    pub base: V,
    pub label: Vec<u32>,
}

/// Which structure to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Stage {
    /// `(𝒳_m, 𝒜_m)`.
    Full(usize),
    /// `(𝒳^p_{m+1}, 𝒜^p_{m+1})`, named by `m + 1` and `p`.
    Intermediate { m1: usize, p: usize },
}

/// A stage on indices: vertex `i` is `(x, label)` with `x` an index into
/// the original graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DupState {
    pub vertices: Vec<(u32, Vec<u32>)>,
    pub edges: Vec<(u32, u32)>,
}

impl DupState {
    pub fn validate(&self) -> Vec<Violation<u32>> {
        validate_indexed(self.vertices.len(), &self.edges)
    }

    /// Edges never join two different label blocks except a duplicated
    /// vertex to its successor in the parent block.
    pub fn blocks_separated(&self) -> bool {
        self.edges.iter().all(|&(a, b)| {
            let (la, lb) = (&self.vertices[a as usize].1, &self.vertices[b as usize].1);
            la == lb || (la.len() == lb.len() + 1 && la.starts_with(lb))
        })
    }
}

/// Validated enumeration data shared by every stage.
struct Plan<'a> {
    g: &'a IndexedUogas,
    ord: Vec<u32>,
    l0: usize,
    copies: u32,
}

impl<'a> Plan<'a> {
    fn new(g: &'a IndexedUogas, ord: Vec<u32>) -> Result<Plan<'a>> {
        let n = g.len();
        let mut seen = vec![false; n];
        if ord.len() != n {
            return Err(Error::BadEnumeration(format!("{} entries for {n} vertices", ord.len())));
        }
        for &x in &ord {
            if x as usize >= n || std::mem::replace(&mut seen[x as usize], true) {
                return Err(Error::BadEnumeration(format!("vertex {x} repeated or unknown")));
            }
        }
        if let Some(w) = ord.windows(2).find(|w| g.p_len(w[0]) > g.p_len(w[1])) {
            return Err(Error::BadEnumeration(format!("|p| decreases from vertex {} to vertex {}", w[0], w[1])));
        }
        let l0 = ord.iter().take_while(|&&x| g.is_max(x)).count();
        Ok(Plan { g, ord, l0, copies: n as u32 })
    }

    fn base(&self) -> DupState {
        let n = self.g.len();
        DupState { vertices: (0..n as u32).map(|x| (x, vec![0])).collect(), edges: self.g.edges().collect() }
    }

    /// Sorted labels `σ_0 < σ_1 < …` carried by `x` in a state.
    fn labels_of(st: &DupState, x: u32) -> Vec<Vec<u32>> {
        let mut v: Vec<Vec<u32>> = st.vertices.iter().filter(|(k, _)| *k == x).map(|(_, l)| l.clone()).collect();
        v.sort();
        v
    }

    fn dup_one(&self, st: &DupState, x: u32, sigma: &[u32]) -> DupState {
        self.dup_one_mapped(st, x, sigma).0
    }

    /// Replace the block of `x` with label `sigma` by `copies` labeled
    /// copies. Also returns, per old vertex, its first new index and
    /// whether it was copied (copies are consecutive).
    fn dup_one_mapped(&self, st: &DupState, x: u32, sigma: &[u32]) -> (DupState, Vec<u32>, Vec<bool>) {
        let dup: Vec<bool> = st.vertices.iter().map(|(k, l)| l.as_slice() == sigma && self.g.on_p(*k, x)).collect();
        let mut vertices = Vec::new();
        // new indices of each old vertex: one, or `copies` if duplicated
        let mut first = Vec::with_capacity(st.vertices.len());
        for (i, (k, l)) in st.vertices.iter().enumerate() {
            first.push(vertices.len() as u32);
            if dup[i] {
                for j in 0..self.copies {
                    let mut lj = l.clone();
                    lj.push(j);
                    vertices.push((*k, lj));
                }
            } else {
                vertices.push((*k, l.clone()));
            }
        }
        let mut edges = Vec::new();
        for &(a, b) in &st.edges {
            let (fa, fb) = (first[a as usize], first[b as usize]);
            match (dup[a as usize], dup[b as usize]) {
                (false, false) => edges.push((fa, fb)),
                (true, false) => {
                    // only x itself leaves its block
                    assert_eq!(st.vertices[a as usize].0, x, "duplicated source outside x reaches an undup target");
                    edges.extend((0..self.copies).map(|j| (fa + j, fb)));
                }
                (true, true) => edges.extend((0..self.copies).map(|j| (fa + j, fb + j))),
                (false, true) => panic!("a duplicated target forces a duplicated source"),
            }
        }
        (DupState { vertices, edges }, first, dup)
    }

    fn full_step(&self, st: &DupState, m1: usize, mut visit: impl FnMut(Stage, &DupState)) -> DupState {
        let x = self.ord[m1];
        let mut cur = st.clone();
        for (p, sigma) in Self::labels_of(st, x).iter().enumerate() {
            cur = self.dup_one(&cur, x, sigma);
            visit(Stage::Intermediate { m1, p: p + 1 }, &cur);
        }
        cur
    }

    fn build(&self, stage: Stage) -> Result<DupState> {
        let n = self.g.len();
        let (upto, partial) = match stage {
            Stage::Full(m) if m < n => (m, None),
            Stage::Intermediate { m1, p } if self.l0 <= m1 && m1 < n => (m1 - 1, Some((m1, p))),
            _ => return Err(Error::InvalidArgument(format!("stage {stage:?} is out of range for {n} vertices with L_0 = {}", self.l0))),
        };
        let mut st = self.base();
        for m1 in self.l0..=upto {
            st = self.full_step(&st, m1, |_, _| {});
        }
        if let Some((m1, p)) = partial {
            let x = self.ord[m1];
            let labels = Self::labels_of(&st, x);
            if p > labels.len() {
                return Err(Error::InvalidArgument(format!("p = {p} exceeds N = {}", labels.len())));
            }
            for sigma in &labels[..p] {
                st = self.dup_one(&st, x, sigma);
            }
        }
        Ok(st)
    }
}

/// Step-by-step access to the construction, for procedures that carry data
/// along the labeled vertices.
pub struct Duplicator<'a> {
    plan: Plan<'a>,
}

impl<'a> Duplicator<'a> {
    pub fn new(g: &'a IndexedUogas, ord: &[u32]) -> Result<Duplicator<'a>> {
        Ok(Duplicator { plan: Plan::new(g, ord.to_vec())? })
    }

    /// Number of maximal vertices at the front of the enumeration.
    pub fn l0(&self) -> usize {
        self.plan.l0
    }

    pub fn enumeration(&self) -> &[u32] {
        &self.plan.ord
    }

    /// `L = |X|`.
    pub fn copies(&self) -> u32 {
        self.plan.copies
    }

    /// `𝒳_m` for `m < L_0`.
    pub fn base(&self) -> DupState {
        self.plan.base()
    }

    pub fn labels_of(&self, st: &DupState, x: u32) -> Vec<Vec<u32>> {
        Plan::labels_of(st, x)
    }

    /// One block duplication; see [`Plan::dup_one_mapped`].
    pub fn duplicate_block(&self, st: &DupState, x: u32, sigma: &[u32]) -> (DupState, Vec<u32>, Vec<bool>) {
        self.plan.dup_one_mapped(st, x, sigma)
    }
}

impl DupState {
    /// The indexed uogas on the labeled vertices.
    pub fn graph(&self) -> std::result::Result<IndexedUogas, Vec<Violation<u32>>> {
        IndexedUogas::new(self.vertices.len(), &self.edges)
    }

    pub fn find(&self, x: u32, label: &[u32]) -> Option<u32> {
        self.vertices.iter().position(|(k, l)| *k == x && l.as_slice() == label).map(|i| i as u32)
    }
}

/// Build one stage of the duplication on an indexed uogas.
pub fn duplicate_indexed(g: &IndexedUogas, ord: &[u32], stage: Stage) -> Result<DupState> {
    Plan::new(g, ord.to_vec())?.build(stage)
}

/// Visit every stage in construction order: `𝒳_{L_0-1}` (as `Full`), each
/// intermediate `𝒳^p_{m+1}` for `p ≥ 1`, and each completed `𝒳_{m+1}`.
pub fn duplication_stages(g: &IndexedUogas, ord: &[u32], mut visit: impl FnMut(Stage, &DupState)) -> Result<()> {
    let plan = Plan::new(g, ord.to_vec())?;
    let mut st = plan.base();
    if plan.l0 == 0 {
        return Ok(());
    }
    visit(Stage::Full(plan.l0 - 1), &st);
    for m1 in plan.l0..g.len() {
        visit(Stage::Intermediate { m1, p: 0 }, &st);
        st = plan.full_step(&st, m1, &mut visit);
        visit(Stage::Full(m1), &st);
    }
    Ok(())
}

/// `Σ_x L^{|p_x| - 1}`, the size of the last stage.
pub fn predicted_size(g: &IndexedUogas) -> u128 {
    let l = g.len() as u128;
    (0..g.len() as u32).map(|x| l.saturating_pow(g.p_len(x) - 1)).fold(0u128, u128::saturating_add)
}

/// [`duplicate_indexed`] on named vertices; `enumeration` lists every vertex.
pub fn duplicate<V: VertexId>(g: &Uogas<V>, enumeration: &[V], stage: Stage) -> Result<Uogas<Labeled<V>>> {
    let ord: Vec<u32> = enumeration
        .iter()
        .map(|v| g.index_of(v).ok_or_else(|| Error::BadEnumeration(format!("{v:?} is not a vertex"))))
        .collect::<Result<_>>()?;
    let st = duplicate_indexed(g.indexed(), &ord, stage)?;
    let named: Vec<Labeled<V>> = st.vertices.iter().map(|(k, l)| Labeled { base: g.vertex(*k).clone(), label: l.clone() }).collect();
    let mut sorted: Vec<(Labeled<V>, u32)> = named.into_iter().zip(0u32..).collect();
    sorted.sort();
    let mut new_ix = vec![0u32; sorted.len()];
    for (i, (_, old)) in sorted.iter().enumerate() {
        new_ix[*old as usize] = i as u32;
    }
    let edges: Vec<(u32, u32)> = st.edges.iter().map(|&(a, b)| (new_ix[a as usize], new_ix[b as usize])).collect();
    let inner =
        IndexedUogas::new(sorted.len(), &edges).map_err(|v| Error::InvalidArgument(format!("duplication produced a non-uogas: {v:?}")))?;
    Ok(Uogas::from_indexed(sorted.into_iter().map(|(v, _)| v).collect(), inner))
}

/// Enumerations of `g` that are nondecreasing in `|p|`, each value class
/// permuted every way (for exhaustive checks on small graphs).
pub fn all_valid_enumerations(g: &IndexedUogas) -> Vec<Vec<u32>> {
    let mut classes: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for x in 0..g.len() as u32 {
        classes.entry(g.p_len(x)).or_default().push(x);
    }
    let mut out: Vec<Vec<u32>> = vec![Vec::new()];
    for class in classes.values() {
        let perms = permutations(class);
        out = out.iter().flat_map(|pre| perms.iter().map(move |p| pre.iter().chain(p).copied().collect())).collect();
    }
    out
}

fn permutations(xs: &[u32]) -> Vec<Vec<u32>> {
    if xs.len() <= 1 {
        return vec![xs.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..xs.len() {
        let mut rest = xs.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// The canonical enumeration: by `|p|`, ties by index.
pub fn default_enumeration(g: &IndexedUogas) -> Vec<u32> {
    let mut ord: Vec<u32> = (0..g.len() as u32).collect();
    ord.sort_by_key(|&x| (g.p_len(x), x));
    ord
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(base: char, label: &[u32]) -> Labeled<char> {
        Labeled { base, label: label.to_vec() }
    }

    #[test]
    fn two_vertex_example() {
        let g = Uogas::new(vec!['a', 'b'], vec![('a', 'b')]).unwrap();
        let d = duplicate(&g, &['b', 'a'], Stage::Full(1)).unwrap();
        assert_eq!(d.vertices(), &[l('a', &[0, 0]), l('a', &[0, 1]), l('b', &[0])]);
        assert_eq!(d.edges(), vec![(l('a', &[0, 0]), l('b', &[0])), (l('a', &[0, 1]), l('b', &[0]))]);
        let s0 = duplicate(&g, &['b', 'a'], Stage::Full(0)).unwrap();
        assert_eq!(s0.edges(), vec![(l('a', &[0]), l('b', &[0]))]);
        let p0 = duplicate(&g, &['b', 'a'], Stage::Intermediate { m1: 1, p: 0 }).unwrap();
        assert_eq!(p0, s0);
        assert!(matches!(duplicate(&g, &['a', 'b'], Stage::Full(1)), Err(Error::BadEnumeration(_))));
    }

    #[test]
    fn chain_sizes_match_prediction() {
        let g = IndexedUogas::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let ord = default_enumeration(&g);
        let last = duplicate_indexed(&g, &ord, Stage::Full(3)).unwrap();
        assert_eq!(last.vertices.len() as u128, predicted_size(&g));
        assert!(last.validate().is_empty());
        assert!(last.blocks_separated());
    }
}
