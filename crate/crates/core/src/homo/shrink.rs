//! Shrinking an assignment to pairwise disjoint small clopens while staying
//! in `E_𝒯`.
//!
//! [`Strategy::Duplication`] follows the labeled-copy construction: the copies
//! guarantee that when the point of `x_{m+1}` is chosen, some copy of its cell
//! avoids every point chosen so far. [`Strategy::FiberSelection`] skips the
//! copies and picks each point directly in the fiber over its successor's
//! point, avoiding earlier points at a fresh coordinate; the reference
//! instance always allows this because fibers over open sets are uncountable.
//! Both finish with the same separation and pullback passes.

use super::instance::ComplexInstance;
use super::tuple::{refine_45, refine_46, Assignment};
use crate::cylinder::{LazyPoint, SymbolicClopen};
use crate::error::{Error, Result};
use crate::uogas::{default_enumeration, predicted_size, DupState, Duplicator, IndexedUogas};

/// Default bound on the size of the last duplication stage before
/// [`Strategy::Auto`] falls back to fiber selection.
pub const DEFAULT_DUPLICATION_BUDGET: u128 = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Duplication,
    FiberSelection,
    /// Duplication when its last stage has at most this many vertices.
    Auto(u128),
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy::Auto(DEFAULT_DUPLICATION_BUDGET)
    }
}

/// Which strategy a run actually used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Used {
    Duplication,
    FiberSelection,
}

/// Shrinking: an assignment in `E_𝒯` with `W ⊆ V`, clopen cells of diameter
/// at most `2^{-d}`, pairwise disjoint.
pub fn shrink_47<I: ComplexInstance + ?Sized>(inst: &I, a: &Assignment, d: usize, strategy: Strategy) -> Result<(Assignment, Used)> {
    shrink_47_hinted(inst, a, d, strategy, None)
}

/// Where points should go when the construction leaves the choice open.
/// Hints only steer choices; the postconditions are the same.
#[derive(Clone, Debug, Default)]
pub struct Hints {
    /// Per vertex, a preferred region.
    pub prefer: Vec<SymbolicClopen>,
    /// Regions kept free of other vertices' points when possible, with
    /// the vertex they belong to.
    pub reserved: Vec<(u32, SymbolicClopen)>,
}

impl Hints {
    /// Candidate regions for the point of `x` inside `cell`, best first.
    fn candidates(&self, x: u32, cell: &SymbolicClopen) -> Vec<SymbolicClopen> {
        let mut out: Vec<SymbolicClopen> = self.prefer.get(x as usize).and_then(|h| cell.meet(h)).into_iter().collect();
        let mut free = vec![cell.clone()];
        for (_, r) in self.reserved.iter().filter(|(v, _)| *v != x) {
            free = free.iter().flat_map(|c| c.minus(r)).collect();
        }
        out.extend(free);
        out.push(cell.clone());
        out
    }
}

/// [`shrink_47`] steered by [`Hints`].
pub fn shrink_47_hinted<I: ComplexInstance + ?Sized>(
    inst: &I,
    a: &Assignment,
    d: usize,
    strategy: Strategy,
    hints: Option<&Hints>,
) -> Result<(Assignment, Used)> {
    if hints.is_some_and(|h| h.prefer.len() != a.len()) {
        return Err(Error::InvalidArgument("one preferred region per vertex".into()));
    }
    let used = match strategy {
        Strategy::Duplication => Used::Duplication,
        Strategy::FiberSelection => Used::FiberSelection,
        Strategy::Auto(budget) if predicted_size(&a.graph) <= budget => Used::Duplication,
        Strategy::Auto(_) => Used::FiberSelection,
    };
    if a.is_empty() {
        return Ok((a.clone(), used));
    }
    let ord = default_enumeration(&a.graph);
    let source = match used {
        Used::Duplication => {
            let lab = duplication_family(inst, a, d, &ord, hints)?;
            Source::Family(lab.st, lab.sets)
        }
        Used::FiberSelection => Source::Cells(refine_45(inst, a)?.v),
    };
    let (points, cells) = select_points(inst, a, &ord, &source, hints)?;
    let out = separate_and_close(inst, a, d, &points, &cells)?;
    Ok((out, used))
}

/// Where the point of each vertex is drawn from.
enum Source {
    /// One cell per vertex.
    Cells(Vec<SymbolicClopen>),
    /// The last duplication stage: a cell per labeled vertex.
    Family(DupState, Vec<SymbolicClopen>),
}

/// A labeled stage with one set per labeled vertex.
struct Labeled {
    st: DupState,
    g: IndexedUogas,
    sets: Vec<SymbolicClopen>,
}

fn labeled_assignment(a: &Assignment, lab: &Labeled) -> Assignment {
    let u = lab.st.vertices.iter().map(|&(k, _)| a.u[k as usize]).collect();
    Assignment { graph: lab.g.clone(), u, v: lab.sets.clone() }
}

fn graph_of(st: &DupState) -> Result<IndexedUogas> {
    st.graph().map_err(|v| Error::Invariant(format!("a duplication stage is not an uogas: {v:?}")))
}

fn small_cell<I: ComplexInstance + ?Sized>(
    inst: &I,
    c: &SymbolicClopen,
    d: usize,
    hint: Option<&SymbolicClopen>,
) -> Result<SymbolicClopen> {
    let steered = hint.and_then(|h| c.meet(h));
    let sample = steered.as_ref().unwrap_or(c).sample_point(false);
    inst.split_below_diameter(c, d, &sample).ok_or_else(|| Error::Invariant("a cell does not contain its own sample".into()))
}

/// Runs the stages `𝒳_m` and `𝒳^p_{m+1}`, carrying an `E`-assignment on the
/// labeled vertices. Each block duplication of `x_{m+1}` gives its copies
/// pairwise disjoint cells over one common point of the successor.
fn duplication_family<I: ComplexInstance + ?Sized>(
    inst: &I,
    a: &Assignment,
    d: usize,
    ord: &[u32],
    hints: Option<&Hints>,
) -> Result<Labeled> {
    let dup = Duplicator::new(&a.graph, ord)?;
    let l0 = dup.l0();
    let base = dup.base();
    let g = graph_of(&base)?;
    let mut lab = Labeled { st: base, g, sets: refine_45(inst, a)?.v };
    for &xm in &ord[..l0] {
        let i = lab.st.find(xm, &[0]).expect("maximal vertices carry label (0)") as usize;
        let small = small_cell(inst, &lab.sets[i], d, hints.map(|h| &h.prefer[xm as usize]))?;
        lab.sets = refine_46(inst, &labeled_assignment(a, &lab), i as u32, small)?.v;
    }
    let copies = dup.copies() as usize;
    for (m1, &x) in ord.iter().enumerate().skip(l0) {
        let n = a.u[x as usize];
        for sigma in dup.labels_of(&lab.st, x) {
            let qx = lab.st.find(x, &sigma).unwrap();
            let qi = lab.g.succ(qx).expect("x_{m+1} is not maximal");
            let zx = lab.sets[qx as usize].clone();
            let (_, zs) = inst.pick_distinct_preimages(n, &zx, copies)?;
            let depth = separation_depth(inst, &zs)?.max(d);
            let vj: Vec<SymbolicClopen> = zs
                .iter()
                .map(|z| inst.split_below_diameter(&zx, depth, z).ok_or_else(|| Error::Invariant("lost a chosen point".into())))
                .collect::<Result<_>>()?;
            let mut vi = lab.sets[qi as usize].clone();
            for c in &vj {
                vi = vi.meet(&inst.image(n, c)?).ok_or_else(|| Error::EmptyRefinement(format!("common image at stage {m1}")))?;
            }
            let y = refine_46(inst, &labeled_assignment(a, &lab), qi, vi)?.v;
            let (next, _, dupd) = dup.duplicate_block(&lab.st, x, &sigma);
            let mut sets = Vec::with_capacity(next.vertices.len());
            for (old, &(k, _)) in lab.st.vertices.iter().enumerate() {
                if dupd[old] {
                    sets.extend((0..copies).map(|j| if k == x { vj[j].clone() } else { lab.sets[old].clone() }));
                } else {
                    sets.push(y[old].clone());
                }
            }
            let g = graph_of(&next)?;
            lab = Labeled { st: next, g, sets };
            lab.sets = refine_45(inst, &labeled_assignment(a, &lab))?.v;
        }
    }
    Ok(lab)
}

/// A depth past every pairwise separating coordinate.
fn separation_depth<I: ComplexInstance + ?Sized>(inst: &I, pts: &[LazyPoint]) -> Result<usize> {
    let mut depth = 0;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[..i] {
            let c = inst.separating_coord(a, b).ok_or_else(|| Error::BudgetExceeded("two chosen points could not be told apart".into()))?;
            depth = depth.max(c as usize + 1);
        }
    }
    Ok(depth)
}

/// Points `z_m` with `(α)` injectivity and `(δ)` `f_{u(x_{m+1})}(z_{m+1}) =
/// z_i` for the successor `x_i`, plus the cell each was drawn from.
fn select_points<I: ComplexInstance + ?Sized>(
    inst: &I,
    a: &Assignment,
    ord: &[u32],
    source: &Source,
    hints: Option<&Hints>,
) -> Result<(Vec<LazyPoint>, Vec<SymbolicClopen>)> {
    let n = a.len();
    let mut z: Vec<Option<LazyPoint>> = vec![None; n];
    let mut chosen: Vec<Option<SymbolicClopen>> = vec![None; n];
    let mut sigma: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut earlier: Vec<LazyPoint> = Vec::new();
    for &x in ord {
        let cell = match (source, a.graph.succ(x)) {
            (Source::Cells(cells), _) => cells[x as usize].clone(),
            (Source::Family(st, sets), None) => {
                sigma[x as usize] = vec![0];
                sets[st.find(x, &[0]).unwrap() as usize].clone()
            }
            (Source::Family(st, sets), Some(xi)) => {
                // fewer earlier points than copies: some copy misses them all
                let pick = (0..n as u32).find_map(|j| {
                    let mut lab = sigma[xi as usize].clone();
                    lab.push(j);
                    let q = st.find(x, &lab)? as usize;
                    earlier.iter().all(|p| !inst.contains(&sets[q], p)).then(|| (lab, sets[q].clone()))
                });
                let (lab, c) = pick.ok_or_else(|| Error::Invariant(format!("every copy of vertex {x} holds an earlier point")))?;
                sigma[x as usize] = lab;
                c
            }
        };
        let regions = match hints {
            Some(h) => h.candidates(x, &cell),
            None => vec![cell.clone()],
        };
        let p = match a.graph.succ(x) {
            None => inst.point_avoiding(&regions[0], &earlier)?,
            Some(xi) => {
                let zi = z[xi as usize].as_ref().expect("successors are enumerated first");
                let n = a.u[x as usize];
                let mut found = None;
                for r in &regions {
                    if let Some(p) = inst.preimage_point(n, r, zi, &earlier)? {
                        found = Some(p);
                        break;
                    }
                }
                found.ok_or_else(|| Error::Invariant(format!("no preimage of the point of {xi} in the cell of {x}")))?
            }
        };
        earlier.push(p.clone());
        z[x as usize] = Some(p);
        chosen[x as usize] = Some(cell);
    }
    Ok((z.into_iter().map(Option::unwrap).collect(), chosen.into_iter().map(Option::unwrap).collect()))
}

/// Disjoint clopens `O_x ∋ z_x` inside the chosen cells, then
/// `U_y := O_y ∩ ⋂_{x ∈ Pred(y)} f_{u(x)}[U_x]` by increasing `M_y`, then
/// a last pullback pass.
fn separate_and_close<I: ComplexInstance + ?Sized>(
    inst: &I,
    a: &Assignment,
    d: usize,
    z: &[LazyPoint],
    cells: &[SymbolicClopen],
) -> Result<Assignment> {
    // each point only needs to be cut past its own separating coordinates
    let mut depth = vec![d; z.len()];
    for i in 0..z.len() {
        for j in 0..i {
            let c = inst
                .separating_coord(&z[i], &z[j])
                .ok_or_else(|| Error::BudgetExceeded("two chosen points could not be told apart".into()))?;
            let c = c as usize + 1;
            depth[i] = depth[i].max(c);
            depth[j] = depth[j].max(c);
        }
    }
    let o: Vec<SymbolicClopen> = z
        .iter()
        .zip(cells)
        .zip(&depth)
        .map(|((p, c), &k)| inst.split_below_diameter(c, k, p).ok_or_else(|| Error::Invariant("lost a chosen point".into())))
        .collect::<Result<_>>()?;
    let g = &a.graph;
    let mut order: Vec<u32> = (0..g.len() as u32).collect();
    order.sort_by_key(|&y| (g.m_of(y), y));
    let mut u: Vec<Option<SymbolicClopen>> = vec![None; g.len()];
    for y in order {
        let mut c = o[y as usize].clone();
        for &x in g.preds(y) {
            let ux = u[x as usize].as_ref().expect("predecessors have smaller M");
            c = c.meet(&inst.image(a.u[x as usize], ux)?).ok_or_else(|| Error::EmptyRefinement(format!("vertex {y} lost its point")))?;
        }
        u[y as usize] = Some(c);
    }
    refine_45(inst, &a.with_sets(u.into_iter().map(Option::unwrap).collect()))
}

/// The postconditions: `E_𝒯`, `W ⊆ V`, diameter, pairwise disjointness.
pub fn verify_47<I: ComplexInstance + ?Sized>(inst: &I, input: &Assignment, out: &Assignment, d: usize) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    if !super::tuple::in_e(inst, out)? {
        bad.push("output is not in E".to_string());
    }
    for x in 0..out.len() {
        if !out.v[x].is_subset_of(&input.v[x]) {
            bad.push(format!("W_{x} ⊄ V_{x}"));
        }
        if out.v[x].base().len() < d {
            bad.push(format!("diam W_{x} = {} > 2^-{d}", out.v[x].diameter()));
        }
        for y in 0..x {
            if out.v[x].meets(&out.v[y]) {
                bad.push(format!("W_{y} ∩ W_{x} ≠ ∅"));
            }
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homo::ReferenceInstance;

    fn c(s: &str) -> SymbolicClopen {
        s.parse().unwrap()
    }

    #[test]
    fn overlapping_chain_is_separated() {
        let inst = ReferenceInstance::new();
        let g = IndexedUogas::new(3, &[(0, 1), (2, 1)]).unwrap();
        let a = Assignment::new(g, vec![0, 0, 0], vec![c("N=00"), c("N=01"), c("N=00")]).unwrap();
        for s in [Strategy::Duplication, Strategy::FiberSelection] {
            for d in [3, 5] {
                let (w, _) = shrink_47(&inst, &a, d, s).unwrap();
                assert_eq!(verify_47(&inst, &a, &w, d).unwrap(), Vec::<String>::new(), "{s:?} d={d}");
            }
        }
    }

    #[test]
    fn single_vertex_only_shrinks() {
        let inst = ReferenceInstance::new();
        let a = Assignment::new(IndexedUogas::new(1, &[]).unwrap(), vec![0], vec![SymbolicClopen::full()]).unwrap();
        let (w, used) = shrink_47(&inst, &a, 4, Strategy::default()).unwrap();
        assert_eq!(used, Used::Duplication);
        assert_eq!(w.v[0].base().len(), 4);
    }
}
