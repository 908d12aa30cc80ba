//! Random assignments in `U_𝒯` on the reference instance, shrunk to
//! pairwise disjoint small cells.
//!
//! On level 1 with `g_0, g_1` the only image that meets a domain is
//! `g_1[𝔻_1] ⊆ N_{00}`, so assignments exist only on graphs of height at
//! most 2: every vertex below the top has `u = 0`, and its predecessors use
//! `g_1`. The generator builds those from the top down.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cylinder::SymbolicClopen;
use crate::error::Result;
use crate::exec::Exec;
use crate::homo::{in_u, scheme_instance, shrink_47, verify_47, Assignment, ComplexInstance, ReferenceInstance, Strategy};
use crate::report::SuiteReport;
use crate::seq::pow2_q_u64;
use crate::uogas::enumerate::random_uogas;
use crate::uogas::IndexedUogas;

/// Coordinates that `g_n` never reads, so fixing them in `V_x` keeps
/// `f_n[V_x]`.
fn unread(inst: &ReferenceInstance, n: usize, a: u64) -> bool {
    let p = pow2_q_u64(n).unwrap();
    inst.family().rule().theta_n_inv_u64(n, a).is_none_or(|k| k == p)
}

/// Fix a few random free coordinates of `c`, only where `keep` allows.
fn shrink_randomly<R: Rng + ?Sized>(rng: &mut R, c: SymbolicClopen, keep: impl Fn(u64) -> bool) -> SymbolicClopen {
    let mut c = c;
    for _ in 0..rng.gen_range(0..=4) {
        let a = c.base().len() as u64 + rng.gen_range(0..40);
        if keep(a) && !c.constrained_coords().contains(&a) {
            c = c.with_fixed(a, rng.gen_bool(0.5)).expect("a free coordinate");
        }
    }
    c
}

/// A random uogas on at most `max_vertices` vertices of height at most 2.
pub fn random_low_uogas<R: Rng + ?Sized>(rng: &mut R, max_vertices: usize) -> IndexedUogas {
    loop {
        let n = rng.gen_range(1..=max_vertices);
        let p_root = rng.gen_range(0.1..0.6);
        let g = random_uogas(rng, n, p_root);
        if (0..n as u32).all(|x| g.p_len(x) <= 3) {
            return g;
        }
    }
}

/// A random assignment in `U_𝒯` over `g`, which must have height at most 2.
pub fn random_u_assignment<R: Rng + ?Sized>(rng: &mut R, inst: &ReferenceInstance, g: &IndexedUogas) -> Result<Assignment> {
    let n = g.len();
    let has_preds = |x: u32| !g.preds(x).is_empty();
    // map used into each target
    let mut into = vec![0usize; n];
    for y in 0..n as u32 {
        if g.is_max(y) {
            into[y as usize] = if g.preds(y).iter().any(|&x| has_preds(x)) { 0 } else { rng.gen_range(0..2) };
        } else {
            into[y as usize] = 1;
        }
    }
    let u: Vec<usize> = (0..n as u32).map(|x| g.succ(x).map_or(0, |y| into[y as usize])).collect();
    // middle vertices must also lie in g_1[𝔻_1]
    let lower = inst.image(1, &inst.domain(1)?)?;
    let region = |x: u32| -> Result<SymbolicClopen> {
        if has_preds(x) && !g.is_max(x) {
            Ok(lower.clone())
        } else {
            Ok(SymbolicClopen::full())
        }
    };
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by_key(|&x| (g.p_len(x), x));
    let mut v: Vec<Option<SymbolicClopen>> = vec![None; n];
    for x in order {
        let set = match g.succ(x) {
            None => {
                let m = into[x as usize];
                let mut top = SymbolicClopen::full();
                if has_preds(x) {
                    // sources of middle predecessors must lie in g_1[𝔻_1]
                    let mut src = inst.domain(m)?;
                    if g.preds(x).iter().any(|&p| has_preds(p)) {
                        src = src.meet(&lower).expect("g_1 lands in 𝔻_0");
                    }
                    top = inst.image(m, &src)?;
                }
                shrink_randomly(rng, top, |_| true)
            }
            Some(y) => {
                let m = u[x as usize];
                let pre = inst.preimage(m, v[y as usize].as_ref().unwrap())?.expect("targets lie in the image");
                let base = pre.meet(&region(x)?).expect("the region covers the target");
                shrink_randomly(rng, base, |a| unread(inst, m, a))
            }
        };
        v[x as usize] = Some(set);
    }
    Assignment::new(g.clone(), u, v.into_iter().map(Option::unwrap).collect())
}

#[derive(Clone, Debug)]
pub struct ShrinkConfig {
    pub count: usize,
    pub max_vertices: usize,
    pub ds: Vec<usize>,
    pub seed: u64,
}

impl Default for ShrinkConfig {
    fn default() -> Self {
        ShrinkConfig { count: 200, max_vertices: 5, ds: vec![3, 5], seed: 0 }
    }
}

/// Both strategies of the shrinking lemma on random assignments in `U_𝒯`.
pub fn shrink_suite(cfg: &ShrinkConfig, exec: Exec) -> SuiteReport {
    let mut r = SuiteReport::new(format!("shrinking {} random assignments", cfg.count));
    // pullbacks pin coordinates far out, past the interactive budget
    let inst = scheme_instance();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut jobs = Vec::new();
    let mut edges = 0;
    for _ in 0..cfg.count {
        let g = random_low_uogas(&mut rng, cfg.max_vertices);
        edges += g.edge_count();
        match random_u_assignment(&mut rng, &inst, &g) {
            Ok(a) => jobs.push(a),
            Err(e) => r.fail(format!("generator failed on {:?}: {e}", g.edges().collect::<Vec<_>>())),
        }
    }
    let fails = exec.map(&jobs, |a| {
        let mut out = Vec::new();
        match in_u(&inst, a) {
            Ok(true) => {}
            Ok(false) => out.push(format!("generated assignment is not in U: {a:?}")),
            Err(e) => out.push(format!("in_u: {e}")),
        }
        for &d in &cfg.ds {
            for s in [Strategy::Duplication, Strategy::FiberSelection] {
                let res = shrink_47(&inst, a, d, s).and_then(|(w, _)| verify_47(&inst, a, &w, d));
                match res {
                    Ok(bad) => out.extend(bad.into_iter().map(|b| format!("{s:?}, d = {d}: {b} on {a:?}"))),
                    Err(e) => out.push(format!("{s:?}, d = {d}: {e} on {a:?}")),
                }
            }
        }
        out
    });
    r.checked += (jobs.len() * (1 + 2 * cfg.ds.len())) as u64;
    fails.into_iter().flatten().for_each(|m| r.fail(m));
    r.note(format!("{} assignments, {edges} edges in total", jobs.len()));
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run() {
        let r = shrink_suite(&ShrinkConfig { count: 20, ..Default::default() }, Exec::Parallel);
        assert!(r.is_ok(), "{r}");
    }
}
