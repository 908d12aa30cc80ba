//! The two graph lemmas the scheme leans on: transporting an image inclusion
//! from `f_n` to `f_m` (condition (d) at work), and finding a map whose graph
//! meets `V²`.

use super::instance::ComplexInstance;
use crate::cylinder::SymbolicClopen;
use crate::error::{Error, Result};

/// For `m < n`, `V_0 ⊆ D_m ∩ D_n` and `V_1 ⊆ f_n[V_0] ∩ D_m`: whether
/// `f_m[V_1] ⊆ f_m[V_0]`.
pub fn lemma25_check<I: ComplexInstance + ?Sized>(inst: &I, v0: &SymbolicClopen, v1: &SymbolicClopen, m: usize, n: usize) -> Result<bool> {
    if m >= n {
        return Err(Error::InvalidArgument(format!("need m < n, got m = {m}, n = {n}")));
    }
    let (dm, dn) = (inst.domain(m)?, inst.domain(n)?);
    if !v0.is_subset_of(&dm) || !v0.is_subset_of(&dn) {
        return Err(Error::InvalidArgument(format!("V_0 = {} is not inside D_{m} ∩ D_{n}", short(v0))));
    }
    if !v1.is_subset_of(&dm) || !v1.is_subset_of(&inst.image(n, v0)?) {
        return Err(Error::InvalidArgument(format!("V_1 = {} is not inside f_{n}[V_0] ∩ D_{m}", short(v1))));
    }
    Ok(inst.image(m, v1)?.is_subset_of(&inst.image(m, v0)?))
}

/// A rendering cut to a readable length for error messages.
pub(crate) fn short(c: &SymbolicClopen) -> String {
    let r = c.render();
    match r.char_indices().nth(160) {
        Some((i, _)) => format!("{}… ({} constrained coordinates)", &r[..i], c.constrained_coords().len()),
        None => r,
    }
}

/// A witness that `Graph(f_n)` meets `V²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma26 {
    pub n: usize,
    /// `⊆ V ∩ D_n`.
    pub v0: SymbolicClopen,
    /// `⊆ V ∩ f_n[V_0]`.
    pub v1: SymbolicClopen,
}

/// The least `n` above `m` (any `n` when `m` is `None`) among the
/// instance's maps with `V_0 := V ∩ D_n ∩ f_n^{-1}(V)` nonempty, and
/// `V_1 := f_n[V_0]`.
pub fn lemma26_find<I: ComplexInstance + ?Sized>(inst: &I, v: &SymbolicClopen, m: Option<usize>) -> Result<Lemma26> {
    let from = m.map_or(0, |m| m + 1);
    for n in from..inst.map_count() {
        let Some(pre) = inst.preimage(n, v)? else { continue };
        let Some(v0) = pre.meet(v) else { continue };
        let v1 = inst.image(n, &v0)?;
        return Ok(Lemma26 { n, v0, v1 });
    }
    Err(Error::NotFoundWithinBudget(format!(
        "no map with index in {from}..{} has a graph meeting V² for V = {}",
        inst.map_count(),
        short(v)
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homo::ReferenceInstance;

    fn c(s: &str) -> SymbolicClopen {
        s.parse().unwrap()
    }

    #[test]
    fn full_space_uses_the_first_map() {
        let inst = ReferenceInstance::new();
        let r = lemma26_find(&inst, &SymbolicClopen::full(), None).unwrap();
        assert_eq!(r.n, 0);
        assert!(r.v0.is_subset_of(&c("N=00")));
        assert!(r.v1.is_subset_of(&inst.image(0, &r.v0).unwrap()));
        let r1 = lemma26_find(&inst, &SymbolicClopen::full(), Some(0)).unwrap();
        assert_eq!(r1.n, 1);
        assert!(matches!(lemma26_find(&inst, &SymbolicClopen::full(), Some(1)), Err(Error::NotFoundWithinBudget(_))));
    }

    #[test]
    fn transported_inclusion() {
        let inst = ReferenceInstance::new();
        let v0 = inst.domain(0).unwrap().meet(&inst.domain(1).unwrap()).unwrap();
        let v1 = inst.image(1, &v0).unwrap().meet(&inst.domain(0).unwrap()).unwrap();
        assert!(lemma25_check(&inst, &v0, &v1, 0, 1).unwrap());
        assert!(lemma25_check(&inst, &v0, &v1, 1, 0).is_err());
    }
}
