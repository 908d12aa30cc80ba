//! Assignments `(u, (V_x))` on a mapping tuple, the classes `E_𝒯 ⊆ U_𝒯`,
//! and the two refinement procedures.

use std::collections::VecDeque;

use super::instance::ComplexInstance;
use crate::cylinder::SymbolicClopen;
use crate::error::{Error, Result};
use crate::uogas::IndexedUogas;

/// `u` and `V` over the vertices of an indexed uogas. `u[x]` names the map
/// used on the edge out of `x` and is ignored on maximal vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub graph: IndexedUogas,
    pub u: Vec<usize>,
    pub v: Vec<SymbolicClopen>,
}

impl Assignment {
    pub fn new(graph: IndexedUogas, u: Vec<usize>, v: Vec<SymbolicClopen>) -> Result<Assignment> {
        if u.len() != graph.len() || v.len() != graph.len() {
            return Err(Error::InvalidArgument(format!("{} vertices but {} map indices and {} sets", graph.len(), u.len(), v.len())));
        }
        Ok(Assignment { graph, u, v })
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    pub fn with_sets(&self, v: Vec<SymbolicClopen>) -> Assignment {
        Assignment { graph: self.graph.clone(), u: self.u.clone(), v }
    }
}

/// How an edge `(x, y)` relates `V_y` to `f_{u(x)}[V_x]`.
fn edge_relation<I: ComplexInstance + ?Sized>(inst: &I, a: &Assignment, x: u32, y: u32) -> Result<Option<bool>> {
    let n = a.u[x as usize];
    let vx = &a.v[x as usize];
    if !vx.is_subset_of(&inst.domain(n)?) {
        return Ok(None);
    }
    let img = inst.image(n, vx)?;
    let vy = &a.v[y as usize];
    if !vy.is_subset_of(&img) {
        return Ok(None);
    }
    Ok(Some(*vy == img))
}

/// Every edge satisfies `V_x ⊆ D_{u(x)}` and `V_y = f_{u(x)}[V_x]`.
pub fn in_e<I: ComplexInstance + ?Sized>(inst: &I, a: &Assignment) -> Result<bool> {
    for (x, y) in a.graph.edges() {
        if edge_relation(inst, a, x, y)? != Some(true) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every edge satisfies `V_x ⊆ D_{u(x)}` and `V_y ⊆ f_{u(x)}[V_x]`.
pub fn in_u<I: ComplexInstance + ?Sized>(inst: &I, a: &Assignment) -> Result<bool> {
    for (x, y) in a.graph.edges() {
        if edge_relation(inst, a, x, y)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn nonempty(set: Option<SymbolicClopen>, what: impl FnOnce() -> String) -> Result<SymbolicClopen> {
    set.ok_or_else(|| Error::EmptyRefinement(what()))
}

/// From `U_𝒯` to `E_𝒯`: keep `V` on maximal vertices and pull back along
/// the edges, `W_x := V_x ∩ f_{u(x)}^{-1}(W_{succ x})`, by increasing `|p_x|`.
pub fn refine_45<I: ComplexInstance + ?Sized>(inst: &I, a: &Assignment) -> Result<Assignment> {
    let g = &a.graph;
    let mut order: Vec<u32> = (0..g.len() as u32).collect();
    order.sort_by_key(|&x| (g.p_len(x), x));
    let mut w: Vec<Option<SymbolicClopen>> = vec![None; g.len()];
    for x in order {
        let vx = &a.v[x as usize];
        let wx = match g.succ(x) {
            None => vx.clone(),
            Some(y) => {
                let wy = w[y as usize].as_ref().expect("successors come first");
                let pre = inst.preimage(a.u[x as usize], wy)?;
                nonempty(pre.and_then(|p| p.meet(vx)), || format!("vertex {x}"))?
            }
        };
        w[x as usize] = Some(wx);
    }
    Ok(a.with_sets(w.into_iter().map(Option::unwrap).collect()))
}

/// Inside `E_𝒯`, shrink `V_{x0}` to `w0` and propagate through the
/// component of `x0`: images towards successors, pullbacks towards
/// predecessors, in breadth-first order from `x0`.
pub fn refine_46<I: ComplexInstance + ?Sized>(inst: &I, a: &Assignment, x0: u32, w0: SymbolicClopen) -> Result<Assignment> {
    let g = &a.graph;
    let mut w = a.v.clone();
    let mut seen = vec![false; g.len()];
    w[x0 as usize] = w0;
    seen[x0 as usize] = true;
    let mut queue = VecDeque::from([x0]);
    while let Some(y) = queue.pop_front() {
        let wy = w[y as usize].clone();
        if let Some(x) = g.succ(y).filter(|&x| !seen[x as usize]) {
            // (y, x) ∈ A
            w[x as usize] = inst.image(a.u[y as usize], &wy)?;
            seen[x as usize] = true;
            queue.push_back(x);
        }
        for &x in g.preds(y) {
            if seen[x as usize] {
                continue;
            }
            // (x, y) ∈ A
            let pre = inst.preimage(a.u[x as usize], &wy)?;
            w[x as usize] = nonempty(pre.and_then(|p| p.meet(&a.v[x as usize])), || format!("vertex {x}"))?;
            seen[x as usize] = true;
            queue.push_back(x);
        }
    }
    Ok(a.with_sets(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homo::ReferenceInstance;

    fn c(s: &str) -> SymbolicClopen {
        s.parse().unwrap()
    }

    fn edge(va: &str, vb: &str) -> Assignment {
        let g = IndexedUogas::new(2, &[(0, 1)]).unwrap();
        Assignment::new(g, vec![0, 0], vec![c(va), c(vb)]).unwrap()
    }

    #[test]
    fn membership() {
        let inst = ReferenceInstance::new();
        assert!(in_e(&inst, &edge("N=00", "N=01")).unwrap());
        let a = edge("N=00", "N=011");
        assert!(!in_e(&inst, &a).unwrap());
        assert!(in_u(&inst, &a).unwrap());
        let lone = Assignment::new(IndexedUogas::new(1, &[]).unwrap(), vec![0], vec![c("N=1")]).unwrap();
        assert!(in_e(&inst, &lone).unwrap());
        assert_eq!(refine_45(&inst, &lone).unwrap(), lone);
    }

    #[test]
    fn pullback_refinement() {
        let inst = ReferenceInstance::new();
        let w = refine_45(&inst, &edge("N=00", "N=011")).unwrap();
        assert_eq!(w.v, vec![c("N=00; bit(5)=1"), c("N=011")]);
        assert!(in_e(&inst, &w).unwrap());
        let e = edge("N=00", "N=01");
        assert_eq!(refine_45(&inst, &e).unwrap(), e);
    }

    #[test]
    fn propagation_both_ways() {
        let inst = ReferenceInstance::new();
        let e = edge("N=00", "N=01");
        // shrink the maximal end: the predecessor is pulled back
        let top = refine_46(&inst, &e, 1, c("N=011")).unwrap();
        assert_eq!(top.v[0], c("N=00; bit(5)=1"));
        // shrink the minimal end: the successor is pushed forward
        let bottom = refine_46(&inst, &e, 0, c("N=001")).unwrap();
        assert_eq!(bottom.v[1], c("N=01"));
        let low = refine_46(&inst, &e, 0, c("N=000001")).unwrap();
        assert_eq!(low.v[1], c("N=011"));
        assert!(in_e(&inst, &low).unwrap());
        assert_eq!(refine_46(&inst, &e, 0, c("N=00")).unwrap(), e);
    }
}
