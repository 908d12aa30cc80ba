//! Finite unambiguously oriented graphs with acyclic symmetrization.
//!
//! Every vertex has at most one successor and `A ∪ A^{-1}` has no cycles, so
//! each component is a tree whose root is its unique maximal vertex and whose
//! parent pointers are the successors.

pub mod dot;
pub mod dup;
pub mod enumerate;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

pub use dot::{to_dot, DotLabel};
pub use dup::{
    all_valid_enumerations, default_enumeration, duplicate, duplicate_indexed, duplication_stages, predicted_size, DupState, Duplicator,
    Labeled, Stage,
};

/// Requirements on vertex identifiers.
pub trait VertexId: Clone + Ord + fmt::Debug + Send + Sync {}
impl<T: Clone + Ord + fmt::Debug + Send + Sync> VertexId for T {}

/// A finite relation on a vertex set; not necessarily oriented.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteOrientedGraph<V> {
    vertices: Vec<V>,
    edges: Vec<(V, V)>,
}

impl<V: VertexId> FiniteOrientedGraph<V> {
    /// Vertices are deduplicated; every edge endpoint must be a vertex.
    pub fn new(vertices: Vec<V>, edges: Vec<(V, V)>) -> Result<FiniteOrientedGraph<V>> {
        let mut vertices = vertices;
        vertices.sort();
        vertices.dedup();
        for (a, b) in &edges {
            if vertices.binary_search(a).is_err() || vertices.binary_search(b).is_err() {
                return Err(Error::InvalidArgument(format!("edge ({a:?}, {b:?}) leaves the vertex set")));
            }
        }
        let mut edges = edges;
        edges.sort();
        edges.dedup();
        Ok(FiniteOrientedGraph { vertices, edges })
    }

    /// The graph on the endpoints of `edges`.
    pub fn from_edges(edges: Vec<(V, V)>) -> FiniteOrientedGraph<V> {
        let vertices = edges.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
        FiniteOrientedGraph::new(vertices, edges).expect("endpoints are vertices")
    }

    pub fn vertices(&self) -> &[V] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(V, V)] {
        &self.edges
    }

    fn index_of(&self, v: &V) -> u32 {
        self.vertices.binary_search(v).expect("vertex") as u32
    }

    fn indexed_edges(&self) -> Vec<(u32, u32)> {
        self.edges.iter().map(|(a, b)| (self.index_of(a), self.index_of(b))).collect()
    }
}

/// One way a relation fails to be an uogas.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Violation<V> {
    Reflexive(V),
    /// Both `(a, b)` and `(b, a)` are edges.
    Symmetric(V, V),
    MultipleSuccessors(V, Vec<V>),
    /// A cycle of `s(A)`, listed in order; it closes back to the first vertex.
    Cycle(Vec<V>),
}

impl<V> Violation<V> {
    pub fn map<W>(self, f: &impl Fn(V) -> W) -> Violation<W> {
        match self {
            Violation::Reflexive(a) => Violation::Reflexive(f(a)),
            Violation::Symmetric(a, b) => Violation::Symmetric(f(a), f(b)),
            Violation::MultipleSuccessors(a, s) => Violation::MultipleSuccessors(f(a), s.into_iter().map(f).collect()),
            Violation::Cycle(c) => Violation::Cycle(c.into_iter().map(f).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ValidationReport<V> {
    pub violations: Vec<Violation<V>>,
}

impl<V> ValidationReport<V> {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every violated clause of the uogas definition.
pub fn validate_uogas<V: VertexId>(g: &FiniteOrientedGraph<V>) -> ValidationReport<V> {
    let vs = g.vertices();
    let violations = validate_indexed(vs.len(), &g.indexed_edges()).into_iter().map(|v| v.map(&|i: u32| vs[i as usize].clone())).collect();
    ValidationReport { violations }
}

/// [`validate_uogas`] on vertices `0..n`.
pub fn validate_indexed(n: usize, edges: &[(u32, u32)]) -> Vec<Violation<u32>> {
    let mut out = Vec::new();
    let set: BTreeSet<(u32, u32)> = edges.iter().copied().collect();
    let mut succs: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &(a, b) in &set {
        if a == b {
            out.push(Violation::Reflexive(a));
            continue;
        }
        if a < b && set.contains(&(b, a)) {
            out.push(Violation::Symmetric(a, b));
        }
        succs.entry(a).or_default().push(b);
    }
    for (a, s) in succs {
        if s.len() > 1 {
            out.push(Violation::MultipleSuccessors(a, s));
        }
    }
    // s(A) as a simple undirected graph; every edge closing a forest cycle
    // yields a witness
    let mut uf = UnionFind::new(n);
    let mut forest: Vec<Vec<u32>> = vec![Vec::new(); n];
    let undirected: BTreeSet<(u32, u32)> = set.iter().filter(|(a, b)| a != b).map(|&(a, b)| (a.min(b), a.max(b))).collect();
    for (a, b) in undirected {
        if uf.union(a, b) {
            forest[a as usize].push(b);
            forest[b as usize].push(a);
        } else {
            out.push(Violation::Cycle(bfs_path(&forest, a, b).expect("same component")));
        }
    }
    out
}

/// Path between two vertices of an undirected adjacency list, by BFS.
pub(crate) fn bfs_path(adj: &[Vec<u32>], from: u32, to: u32) -> Option<Vec<u32>> {
    let mut parent = vec![u32::MAX; adj.len()];
    let mut q = VecDeque::from([from]);
    parent[from as usize] = from;
    while let Some(x) = q.pop_front() {
        if x == to {
            break;
        }
        for &y in &adj[x as usize] {
            if parent[y as usize] == u32::MAX {
                parent[y as usize] = x;
                q.push_back(y);
            }
        }
    }
    if parent[to as usize] == u32::MAX {
        return None;
    }
    let mut path = vec![to];
    let mut c = to;
    while c != from {
        c = parent[c as usize];
        path.push(c);
    }
    path.reverse();
    Some(path)
}

pub(crate) struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n as u32).collect() }
    }

    pub(crate) fn find(&mut self, x: u32) -> u32 {
        let mut r = x;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut c = x;
        while self.parent[c as usize] != r {
            let next = self.parent[c as usize];
            self.parent[c as usize] = r;
            c = next;
        }
        r
    }

    /// Merge; `false` if already in one class.
    pub(crate) fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb) as usize] = ra.min(rb);
        true
    }
}

/// An uogas on vertices `0..n` with precomputed paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedUogas {
    succ: Vec<Option<u32>>,
    pred_off: Vec<u32>,
    pred: Vec<u32>,
    comp_max: Vec<u32>,
    p_len: Vec<u32>,
    m: Vec<u32>,
}

impl IndexedUogas {
    pub fn new(n: usize, edges: &[(u32, u32)]) -> std::result::Result<IndexedUogas, Vec<Violation<u32>>> {
        let v = validate_indexed(n, edges);
        if !v.is_empty() {
            return Err(v);
        }
        let mut succ = vec![None; n];
        for &(a, b) in edges {
            succ[a as usize] = Some(b);
        }
        Ok(IndexedUogas::from_valid_succ(succ))
    }

    /// From a successor map that is already known to be acyclic.
    pub fn from_valid_succ(succ: Vec<Option<u32>>) -> IndexedUogas {
        let n = succ.len();
        let mut counts = vec![0u32; n + 1];
        for s in succ.iter().flatten() {
            counts[*s as usize + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let pred_off = counts.clone();
        let mut fill = counts;
        let mut pred = vec![0u32; pred_off[n] as usize];
        for (x, s) in succ.iter().enumerate() {
            if let Some(s) = s {
                pred[fill[*s as usize] as usize] = x as u32;
                fill[*s as usize] += 1;
            }
        }
        // p_len and comp_max by walking up with memoization
        let mut p_len = vec![0u32; n];
        let mut comp_max = vec![u32::MAX; n];
        for start in 0..n {
            let mut chain = Vec::new();
            let mut c = start as u32;
            while p_len[c as usize] == 0 {
                chain.push(c);
                match succ[c as usize] {
                    Some(s) => c = s,
                    None => {
                        p_len[c as usize] = 1;
                        comp_max[c as usize] = c;
                        chain.pop();
                        break;
                    }
                }
                assert!(chain.len() <= n, "successor map has a cycle");
            }
            while let Some(x) = chain.pop() {
                let s = succ[x as usize].unwrap() as usize;
                p_len[x as usize] = p_len[s] + 1;
                comp_max[x as usize] = comp_max[s];
            }
        }
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_by_key(|&x| std::cmp::Reverse(p_len[x as usize]));
        let mut m = vec![1u32; n];
        for x in order {
            if let Some(s) = succ[x as usize] {
                m[s as usize] = m[s as usize].max(m[x as usize] + 1);
            }
        }
        IndexedUogas { succ, pred_off, pred, comp_max, p_len, m }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn succ(&self, x: u32) -> Option<u32> {
        self.succ[x as usize]
    }

    pub fn preds(&self, x: u32) -> &[u32] {
        &self.pred[self.pred_off[x as usize] as usize..self.pred_off[x as usize + 1] as usize]
    }

    pub fn is_max(&self, x: u32) -> bool {
        self.succ[x as usize].is_none()
    }

    pub fn is_min(&self, x: u32) -> bool {
        self.preds(x).is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.succ.iter().enumerate().filter_map(|(x, s)| s.map(|s| (x as u32, s)))
    }

    pub fn edge_count(&self) -> usize {
        self.pred.len()
    }

    pub fn has_edge(&self, y: u32, x: u32) -> bool {
        self.succ(y) == Some(x)
    }

    /// The maximal vertex `x_{C(x)}` of the component.
    pub fn comp_max(&self, x: u32) -> u32 {
        self.comp_max[x as usize]
    }

    /// `|p_x|`.
    pub fn p_len(&self, x: u32) -> u32 {
        self.p_len[x as usize]
    }

    /// `M_x`: the longest backward chain ending at `x`, counting `x`.
    pub fn m_of(&self, x: u32) -> u32 {
        self.m[x as usize]
    }

    /// `p_x`, the path from `x` to the maximal vertex of its component.
    pub fn p(&self, x: u32) -> Vec<u32> {
        let mut out = vec![x];
        let mut c = x;
        while let Some(s) = self.succ(c) {
            out.push(s);
            c = s;
        }
        out
    }

    /// Whether `v` lies on `p_x`.
    pub fn on_p(&self, x: u32, v: u32) -> bool {
        // `v` is on the path iff walking up from `x` for the length
        // difference lands on `v`
        let (lx, lv) = (self.p_len(x), self.p_len(v));
        if lv > lx || self.comp_max(x) != self.comp_max(v) {
            return false;
        }
        let mut c = x;
        for _ in 0..lx - lv {
            c = self.succ(c).unwrap();
        }
        c == v
    }

    /// The unique injective `s(A)`-path from `x` to `y`.
    pub fn unique_path(&self, x: u32, y: u32) -> Result<Vec<u32>> {
        if self.comp_max(x) != self.comp_max(y) {
            return Err(Error::NotConnected);
        }
        let (mut a, mut b) = (x, y);
        let mut left = vec![];
        let mut right = vec![];
        while self.p_len(a) > self.p_len(b) {
            left.push(a);
            a = self.succ(a).unwrap();
        }
        while self.p_len(b) > self.p_len(a) {
            right.push(b);
            b = self.succ(b).unwrap();
        }
        while a != b {
            left.push(a);
            right.push(b);
            a = self.succ(a).unwrap();
            b = self.succ(b).unwrap();
        }
        left.push(a);
        left.extend(right.into_iter().rev());
        Ok(left)
    }

    /// Components as vertex lists, ordered by their least vertex.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let mut by_max: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for x in 0..self.len() as u32 {
            by_max.entry(self.comp_max(x)).or_default().push(x);
        }
        let mut comps: Vec<Vec<u32>> = by_max.into_values().collect();
        comps.sort();
        comps
    }
}

/// An uogas on arbitrary vertex identifiers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Uogas<V> {
    vertices: Vec<V>,
    inner: IndexedUogas,
}

impl<V: VertexId> Uogas<V> {
    pub fn from_graph(g: &FiniteOrientedGraph<V>) -> std::result::Result<Uogas<V>, ValidationReport<V>> {
        match IndexedUogas::new(g.vertices().len(), &g.indexed_edges()) {
            Ok(inner) => Ok(Uogas { vertices: g.vertices().to_vec(), inner }),
            Err(_) => Err(validate_uogas(g)),
        }
    }

    pub fn new(vertices: Vec<V>, edges: Vec<(V, V)>) -> Result<Uogas<V>> {
        let g = FiniteOrientedGraph::new(vertices, edges)?;
        Uogas::from_graph(&g).map_err(|r| Error::InvalidArgument(format!("not an uogas: {:?}", r.violations)))
    }

    /// Vertices must be sorted and distinct.
    pub fn from_indexed(vertices: Vec<V>, inner: IndexedUogas) -> Uogas<V> {
        assert_eq!(vertices.len(), inner.len());
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Uogas { vertices, inner }
    }

    pub fn indexed(&self) -> &IndexedUogas {
        &self.inner
    }

    pub fn vertices(&self) -> &[V] {
        &self.vertices
    }

    pub fn index_of(&self, v: &V) -> Option<u32> {
        self.vertices.binary_search(v).ok().map(|i| i as u32)
    }

    fn ix(&self, v: &V) -> u32 {
        self.index_of(v).unwrap_or_else(|| panic!("{v:?} is not a vertex"))
    }

    pub fn vertex(&self, i: u32) -> &V {
        &self.vertices[i as usize]
    }

    fn lift(&self, path: Vec<u32>) -> Vec<V> {
        path.into_iter().map(|i| self.vertex(i).clone()).collect()
    }

    pub fn edges(&self) -> Vec<(V, V)> {
        self.inner.edges().map(|(a, b)| (self.vertex(a).clone(), self.vertex(b).clone())).collect()
    }

    pub fn graph(&self) -> FiniteOrientedGraph<V> {
        FiniteOrientedGraph { vertices: self.vertices.clone(), edges: self.edges() }
    }

    pub fn succ(&self, x: &V) -> Option<&V> {
        self.inner.succ(self.ix(x)).map(|s| self.vertex(s))
    }

    pub fn pred(&self, x: &V) -> Vec<V> {
        let mut v = self.lift(self.inner.preds(self.ix(x)).to_vec());
        v.sort();
        v
    }

    pub fn max_set(&self) -> Vec<V> {
        (0..self.vertices.len() as u32).filter(|&x| self.inner.is_max(x)).map(|x| self.vertex(x).clone()).collect()
    }

    pub fn min_set(&self) -> Vec<V> {
        (0..self.vertices.len() as u32).filter(|&x| self.inner.is_min(x)).map(|x| self.vertex(x).clone()).collect()
    }

    pub fn components(&self) -> Vec<Vec<V>> {
        self.inner.components().into_iter().map(|c| self.lift(c)).collect()
    }

    pub fn unique_path(&self, x: &V, y: &V) -> Result<Vec<V>> {
        let (x, y) = (self.index_of(x).ok_or(Error::NotConnected)?, self.index_of(y).ok_or(Error::NotConnected)?);
        Ok(self.lift(self.inner.unique_path(x, y)?))
    }

    /// `p_y`.
    pub fn p_to_max(&self, y: &V) -> Vec<V> {
        self.lift(self.inner.p(self.ix(y)))
    }

    pub fn m_of(&self, x: &V) -> u32 {
        self.inner.m_of(self.ix(x))
    }
}

/// Outcome of checking the four clauses of the path lemma on one graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct Lemma42Report {
    pub checked_vertices: usize,
    pub failures: Vec<String>,
}

impl Lemma42Report {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks, from the raw edge list and BFS paths only:
/// (a) successor chains are injective and are the `s(A)`-path between
/// their ends; (b) the path from any vertex to a maximal vertex of its
/// component runs forward along `A`; (c) each component has exactly one
/// maximal vertex; (d) for an edge `(y, x)` the path from `y` to that vertex
/// starts `y, x`.
pub fn lemma42_suite(n: usize, edges: &[(u32, u32)]) -> Lemma42Report {
    let mut rep = Lemma42Report { checked_vertices: n, failures: Vec::new() };
    let set: BTreeSet<(u32, u32)> = edges.iter().copied().collect();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut succ: Vec<Option<u32>> = vec![None; n];
    for &(a, b) in &set {
        adj[a as usize].push(b);
        adj[b as usize].push(a);
        succ[a as usize] = Some(b);
    }
    let mut uf = UnionFind::new(n);
    for &(a, b) in &set {
        uf.union(a, b);
    }
    // (a)
    for y0 in 0..n as u32 {
        let mut chain = vec![y0];
        let mut c = y0;
        while let Some(s) = succ[c as usize] {
            if chain.contains(&s) {
                rep.failures.push(format!("(a) successor chain from {y0} repeats {s}"));
                break;
            }
            chain.push(s);
            c = s;
            if chain.len() > n {
                break;
            }
        }
        for l in 1..chain.len() {
            if bfs_path(&adj, y0, chain[l]).as_deref() != Some(&chain[..=l]) {
                rep.failures.push(format!("(a) chain {:?} is not the s(A)-path", &chain[..=l]));
            }
        }
    }
    // (c)
    let mut maxes: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for x in 0..n as u32 {
        let r = uf.find(x);
        maxes.entry(r).or_default();
        if succ[x as usize].is_none() {
            maxes.get_mut(&r).unwrap().push(x);
        }
    }
    for (r, m) in &maxes {
        if m.len() != 1 {
            rep.failures.push(format!("(c) component of {r} has maximal vertices {m:?}"));
        }
    }
    // (b), (d)
    for y in 0..n as u32 {
        let Some(&[x]) = maxes.get(&uf.find(y)).map(Vec::as_slice) else {
            continue;
        };
        let p = bfs_path(&adj, y, x).expect("same component");
        for w in p.windows(2) {
            if !set.contains(&(w[0], w[1])) {
                rep.failures.push(format!("(b) path {p:?} uses ({}, {}) backwards", w[0], w[1]));
            }
        }
        if let Some(s) = succ[y as usize] {
            if p.len() < 2 || p[1] != s {
                rep.failures.push(format!("(d) edge ({y}, {s}) but p_y = {p:?}"));
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(edges: &[(char, char)], extra: &[char]) -> FiniteOrientedGraph<char> {
        let mut vs: Vec<char> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        vs.extend(extra);
        FiniteOrientedGraph::new(vs, edges.to_vec()).unwrap()
    }

    #[test]
    fn validation_clauses() {
        assert!(validate_uogas(&g(&[], &[])).is_ok());
        let r = validate_uogas(&g(&[('a', 'b'), ('b', 'a')], &[]));
        assert!(r.violations.contains(&Violation::Symmetric('a', 'b')));
        let r = validate_uogas(&g(&[('a', 'b'), ('a', 'c')], &[]));
        assert_eq!(r.violations, vec![Violation::MultipleSuccessors('a', vec!['b', 'c'])]);
        let r = validate_uogas(&g(&[('a', 'b'), ('b', 'c'), ('d', 'c'), ('d', 'a')], &[]));
        assert!(r.violations.iter().any(|v| matches!(v, Violation::Cycle(c) if c.len() == 4)));
        let r = validate_uogas(&g(&[('a', 'a')], &[]));
        assert_eq!(r.violations, vec![Violation::Reflexive('a')]);
    }

    #[test]
    fn structure() {
        let u = Uogas::from_graph(&g(&[('a', 'b')], &[])).unwrap();
        assert_eq!(u.max_set(), vec!['b']);
        assert_eq!(u.min_set(), vec!['a']);
        let u = Uogas::from_graph(&g(&[('a', 'b'), ('c', 'd')], &[])).unwrap();
        assert_eq!(u.components(), vec![vec!['a', 'b'], vec!['c', 'd']]);
        let u = Uogas::from_graph(&g(&[('a', 'b'), ('c', 'b')], &[])).unwrap();
        assert_eq!(u.pred(&'b'), vec!['a', 'c']);
        assert_eq!(u.unique_path(&'a', &'c').unwrap(), vec!['a', 'b', 'c']);
        assert_eq!(u.unique_path(&'a', &'a').unwrap(), vec!['a']);
        let u = Uogas::from_graph(&g(&[('a', 'b'), ('b', 'c')], &['v'])).unwrap();
        assert_eq!(u.unique_path(&'a', &'c').unwrap(), vec!['a', 'b', 'c']);
        assert_eq!(u.p_to_max(&'a'), vec!['a', 'b', 'c']);
        assert_eq!(u.m_of(&'c'), 3);
        assert_eq!(u.m_of(&'v'), 1);
        assert_eq!(u.unique_path(&'a', &'v'), Err(Error::NotConnected));
    }

    #[test]
    fn path_lemma_examples() {
        let chain: Vec<(u32, u32)> = (0..4).map(|i| (i, i + 1)).collect();
        assert!(lemma42_suite(5, &chain).is_ok());
        assert!(lemma42_suite(3, &[(0, 2), (1, 2)]).is_ok());
        // two maximal vertices in one component is caught by (c)
        let bad = lemma42_suite(3, &[(0, 1), (0, 2)]);
        assert!(bad.failures.iter().any(|f| f.starts_with("(c)")));
    }
}
