//! Concrete spaces with countably many partial maps on which the
//! refinement lemmas and the scheme run.

use crate::cylinder::{Algebra, Derivation, LazyPoint, SymbolicClopen};
use crate::digraph::Family;
use crate::error::{Error, Result};
use crate::index::Index;
use crate::seq::{pow2_q_u64, FamilyLevel};

/// A space `Z ⊆ 2^ω` with partial continuous open maps `f_0, f_1, …`
/// whose domains and ranges are represented clopens.
pub trait ComplexInstance: Sync {
    /// Maps `0..map_count()` are available.
    fn map_count(&self) -> usize;

    /// `D_n`.
    fn domain(&self, n: usize) -> Result<SymbolicClopen>;

    /// `f_n[C]` for `C ⊆ D_n`, exactly.
    fn image(&self, n: usize, c: &SymbolicClopen) -> Result<SymbolicClopen>;

    /// `D_n ∩ f_n^{-1}(C)`, or `None` when empty.
    fn preimage(&self, n: usize, c: &SymbolicClopen) -> Result<Option<SymbolicClopen>>;

    /// `f_n(p)`.
    fn apply(&self, n: usize, p: &LazyPoint) -> Result<LazyPoint>;

    /// A point of `C ∩ D_n` mapped to `target`, different from every point
    /// in `avoid` at an explicit coordinate. `None` if `target ∉ f_n[C]`.
    fn preimage_point(&self, n: usize, c: &SymbolicClopen, target: &LazyPoint, avoid: &[LazyPoint]) -> Result<Option<LazyPoint>>;

    /// A point of `C` different from every point in `avoid`.
    fn point_avoiding(&self, c: &SymbolicClopen, avoid: &[LazyPoint]) -> Result<LazyPoint>;

    /// A coordinate where two points differ, searched within their supports.
    fn separating_coord(&self, a: &LazyPoint, b: &LazyPoint) -> Option<u64>;

    fn algebra(&self) -> Algebra {
        Algebra::default()
    }

    /// A point `z` and `count` distinct points of `C` all mapped to `z`.
    fn pick_distinct_preimages(&self, n: usize, c: &SymbolicClopen, count: usize) -> Result<(LazyPoint, Vec<LazyPoint>)> {
        let inside = c.meet(&self.domain(n)?).ok_or_else(|| Error::EmptyRefinement(format!("{c} misses the domain of f_{n}")))?;
        let z = self.apply(n, &inside.sample_point(false))?;
        let mut out: Vec<LazyPoint> = Vec::with_capacity(count);
        for _ in 0..count {
            let p = self
                .preimage_point(n, &inside, &z, &out)?
                .ok_or_else(|| Error::Invariant("a sampled image point has no preimage".into()))?;
            out.push(p);
        }
        Ok((z, out))
    }

    /// A clopen `⊆ C` containing `p` of diameter at most `2^{-d}`.
    fn split_below_diameter(&self, c: &SymbolicClopen, d: usize, p: &LazyPoint) -> Option<SymbolicClopen> {
        c.shrink_around(p, d)
    }

    fn contains(&self, c: &SymbolicClopen, p: &LazyPoint) -> bool {
        c.contains(p)
    }
}

/// `(2^ω, (g_n|𝔻_n))` for `n < map_count`.
#[derive(Clone, Debug)]
pub struct ReferenceInstance {
    family: Family,
    maps: usize,
    algebra: Algebra,
}

impl ReferenceInstance {
    /// Level 1 with `g_0` and `g_1`, the materializable maps.
    pub fn new() -> ReferenceInstance {
        ReferenceInstance::with_family(Family::g1(), 2)
    }

    pub fn with_family(family: Family, maps: usize) -> ReferenceInstance {
        ReferenceInstance { family, maps, algebra: Algebra::default() }
    }

    pub fn with_algebra(mut self, algebra: Algebra) -> ReferenceInstance {
        self.algebra = algebra;
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn level(&self) -> FamilyLevel {
        self.family.level()
    }

    fn check_map(&self, n: usize) -> Result<()> {
        if n >= self.maps {
            return Err(Error::InvalidArgument(format!("map {n} is outside the instance (0..{})", self.maps)));
        }
        Ok(())
    }

    /// Coordinates never read by `g_n`: outside `θ_n[ω]`, or `θ_n(2^{q_n})`.
    fn unread(&self, n: usize, a: u64) -> bool {
        let p = pow2_q_u64(n).unwrap();
        self.family.rule().theta_n_inv_u64(n, a).is_none_or(|k| k == p)
    }

    /// Past this coordinate the point only repeats its derivation pattern.
    fn support_bound(&self, p: &LazyPoint) -> u64 {
        let own = p.explicit().keys().next_back().and_then(Index::to_u64).map_or(0, |k| k + 1);
        let derived = match p.derivation() {
            None => 0,
            Some(Derivation::Image { n, source, .. }) => self.support_bound(source).max(pow2_q_u64(*n).unwrap_or(0) + 1),
            Some(Derivation::Preimage { n, target, .. }) => {
                let q = pow2_q_u64(*n).unwrap_or(0);
                self.support_bound(target).saturating_add(q).saturating_mul(3).saturating_add(3)
            }
        };
        own.max(derived)
    }
}

impl Default for ReferenceInstance {
    fn default() -> Self {
        ReferenceInstance::new()
    }
}

impl ComplexInstance for ReferenceInstance {
    fn map_count(&self) -> usize {
        self.maps
    }

    fn domain(&self, n: usize) -> Result<SymbolicClopen> {
        self.check_map(n)?;
        self.family.domain(n)
    }

    fn image(&self, n: usize, c: &SymbolicClopen) -> Result<SymbolicClopen> {
        self.check_map(n)?;
        self.algebra.check(c)?;
        if !c.is_subset_of(&self.family.domain(n)?) {
            return Err(Error::OutsideDomain { stage: 0 });
        }
        self.family.image(n, c)
    }

    fn preimage(&self, n: usize, c: &SymbolicClopen) -> Result<Option<SymbolicClopen>> {
        self.check_map(n)?;
        self.algebra.check(c)?;
        self.family.preimage_in_domain(n, c)
    }

    fn apply(&self, n: usize, p: &LazyPoint) -> Result<LazyPoint> {
        self.check_map(n)?;
        if !self.family.in_domain(n, p)? {
            return Err(Error::OutsideDomain { stage: 0 });
        }
        self.family.g_point(n, p)
    }

    fn preimage_point(&self, n: usize, c: &SymbolicClopen, target: &LazyPoint, avoid: &[LazyPoint]) -> Result<Option<LazyPoint>> {
        self.check_map(n)?;
        let p = pow2_q_u64(n).unwrap();
        let Some(inside) = c.meet(&self.family.domain(n)?) else {
            return Ok(None);
        };
        // every read coordinate the set constrains must copy the target
        let rule = self.family.rule();
        let mut b = inside.builder();
        let constrained = (0..inside.base().len() as u64).chain(inside.constrained_coords());
        for a in constrained {
            if let Some(k) = rule.theta_n_inv_u64(n, a).filter(|&k| k != p) {
                b.fix(a, target.eval_u64(k));
            }
        }
        if !target.in_cylinder(self.family.t1(n)?) {
            return Ok(None);
        }
        let Some(solved) = b.build() else {
            return Ok(None);
        };
        let sample = solved.sample_point(false);
        let mut pt = LazyPoint::derived(Derivation::Preimage { rule: *rule, n, target: target.clone() }, false);
        let end = solved.support_end().max(solved.base().len() as u64);
        for a in 0..end {
            pt.set(a, sample.eval_u64(a));
        }
        let mut fresh = end;
        for q in avoid {
            if (0..end).any(|a| pt.eval_u64(a) != q.eval_u64(a)) {
                continue;
            }
            while !self.unread(n, fresh) {
                fresh += 1;
            }
            pt.set(fresh, !q.eval_u64(fresh));
            fresh += 1;
        }
        Ok(Some(pt))
    }

    fn point_avoiding(&self, c: &SymbolicClopen, avoid: &[LazyPoint]) -> Result<LazyPoint> {
        let mut pt = c.sample_point(false);
        let end = c.support_end().max(c.base().len() as u64);
        let mut fresh = end;
        for q in avoid {
            if (0..end).any(|a| pt.eval_u64(a) != q.eval_u64(a)) {
                continue;
            }
            pt.set(fresh, !q.eval_u64(fresh));
            fresh += 1;
        }
        Ok(pt)
    }

    fn separating_coord(&self, a: &LazyPoint, b: &LazyPoint) -> Option<u64> {
        let bound = self.support_bound(a).max(self.support_bound(b));
        (0..=bound).find(|&k| a.eval_u64(k) != b.eval_u64(k))
    }

    fn algebra(&self) -> Algebra {
        self.algebra
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::w;

    #[test]
    fn distinct_preimages_share_an_image() {
        let inst = ReferenceInstance::new();
        let c: SymbolicClopen = "N=001".parse().unwrap();
        let (z, pts) = inst.pick_distinct_preimages(0, &c, 4).unwrap();
        for (i, a) in pts.iter().enumerate() {
            assert!(c.contains(a));
            let img = inst.apply(0, a).unwrap();
            assert_eq!(inst.separating_coord(&img, &z), None);
            for b in &pts[..i] {
                assert!(inst.separating_coord(a, b).is_some());
            }
        }
        assert!(z.in_cylinder(&w("01")));
    }

    #[test]
    fn preimage_point_respects_constraints() {
        let inst = ReferenceInstance::new();
        let c: SymbolicClopen = "N=00; bit(5)=1".parse().unwrap();
        let target = LazyPoint::from_word(&w("0110"), false);
        let p = inst.preimage_point(0, &c, &target, &[]).unwrap().unwrap();
        assert!(c.contains(&p));
        assert_eq!(inst.separating_coord(&inst.apply(0, &p).unwrap(), &target), None);
        let bad = LazyPoint::from_word(&w("0100"), false);
        assert!(inst.preimage_point(0, &c, &bad, &[]).unwrap().is_none());
    }
}
