//! The approximation stages and the scheme built on them.

use crate::approx::{
    check_corollary_56, check_invariants, check_lemma_53_54, check_lemma_55, check_lemma_57, check_lemma_58, ApproxState, ApproxSystem,
};
use crate::cylinder::Algebra;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::homo::{build_scheme, check_scheme, scheme_instance, ComplexInstance, SchemeOptions, SchemeState, SCHEME_MAX_FREE_COORDS};
use crate::report::SuiteReport;
use crate::seq::FamilyLevel;

pub fn level_one(exec: Exec) -> ApproxSystem {
    ApproxSystem::new(FamilyLevel::new(1).unwrap()).with_exec(exec)
}

/// Partition and growth, the uogas and path bound, the path-witness lemma,
/// `L_0 = 1`, and every word of length `≤ words` appearing.
pub fn approx_suite(sys: &ApproxSystem, states: &[ApproxState], words: usize) -> Result<SuiteReport> {
    let depth = states.len().saturating_sub(1);
    let mut r = SuiteReport::new(format!("approximation stages 0..={depth}"));
    r.absorb(check_invariants(sys, states));
    r.absorb(check_lemma_53_54(states));
    r.absorb(check_lemma_57(sys, states)?);
    r.absorb(check_lemma_55(sys, states));
    r.absorb(check_corollary_56(states, words));
    Ok(r)
}

/// The cell chains towards `g_n(α)` for `α = t_n 0 w 0^ω` and every `w` of
/// length `extra`, for each `n` whose `t_n` fits the stages.
pub fn chain_suite(sys: &ApproxSystem, states: &[ApproxState], extra: usize) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("cell chains converge to the image");
    let depth = states.len().saturating_sub(1);
    let (mut chains, mut links) = (0, 0);
    for (n, t) in sys.t_words().iter().enumerate() {
        if t.len() + 1 + extra > depth {
            continue;
        }
        for v in 0..1u64 << extra {
            let mut a = t.child(false);
            for i in 0..extra {
                a.push(v >> i & 1 == 1);
            }
            let (rep, chain) = check_lemma_58(sys, states, n, &a)?;
            links += chain.links.len();
            rep.failures.into_iter().for_each(|f| r.fail(format!("n = {n}, α = {a}0^ω: {f}")));
            r.checked += rep.checked;
            chains += 1;
        }
    }
    r.note(format!("{chains} chains, {links} links"));
    Ok(r)
}

/// Levels `0..=depth` of the scheme over fresh stages, with at most
/// `budget` constrained coordinates per cell operand.
pub fn build_reference_scheme(depth: usize, budget: usize, exec: Exec) -> Result<(Vec<ApproxState>, Vec<SchemeState>)> {
    let sys = level_one(exec);
    let states = sys.run(depth)?;
    let inst = scheme_instance().with_algebra(Algebra::new(budget));
    let scheme = build_scheme(&sys, &states, &inst, depth, SchemeOptions::default()).map_err(|e| match e {
        Error::AtLevel { level, source } => match *source {
            Error::TooManyFreeCoordinates { count, limit } => {
                Error::BudgetExceeded(format!("a cell at level {level} needs {count} constrained coordinates, budget is {limit}"))
            }
            other => other.at_level(level),
        },
        other => other,
    })?;
    Ok((states, scheme))
}

/// Per map, the number of edges `(y, x)` of `A_l ∪ B_l` over all levels with
/// `U_x ⊆ f_{φ(n)}[U_y]` where `φ(n)` is that map.
pub fn edges_through(states: &[ApproxState], scheme: &[SchemeState]) -> Result<Vec<usize>> {
    let inst = scheme_instance();
    let mut count = vec![0usize; inst.map_count()];
    for s in scheme {
        let st = &states[s.level];
        let mut edges: Vec<(u32, u32)> = st.a_edges();
        edges.extend(st.b_edges().iter().map(|&(y, x, _)| (y, x)));
        edges.sort_unstable();
        edges.dedup();
        for (y, x) in edges {
            let Some(&f) = st.phi_of_pair(y, x).and_then(|n| s.phi.get(&n)) else { continue };
            let uy = &s.cells[y as usize];
            if uy.is_subset_of(&inst.domain(f)?) && s.cells[x as usize].is_subset_of(&inst.image(f, uy)?) {
                count[f] += 1;
            }
        }
    }
    Ok(count)
}

/// The scheme conditions, and at least `min_edges` inclusions through each
/// map that some level already uses.
pub fn scheme_suite(depth: usize, min_edges: usize, exec: Exec) -> Result<SuiteReport> {
    let (states, scheme) = build_reference_scheme(depth, SCHEME_MAX_FREE_COORDS, exec)?;
    let mut r = SuiteReport::new(format!("scheme to depth {depth}"));
    r.absorb(check_scheme(&scheme_instance(), &states, &scheme)?);
    let used: Vec<usize> = scheme.last().map(|s| s.phi.values().copied().collect()).unwrap_or_default();
    let through = edges_through(&states, &scheme)?;
    for f in used {
        let k = through[f];
        r.check(k >= min_edges, || format!("only {k} edges through map {f}, expected {min_edges}"));
    }
    r.note(format!("φ = {:?}, edges through each map {through:?}", scheme.last().map(|s| &s.phi)));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_runs() {
        let sys = level_one(Exec::Parallel);
        let states = sys.run(10).unwrap();
        let r = approx_suite(&sys, &states, 3).unwrap();
        assert!(r.is_ok(), "{r}");
        let r = chain_suite(&sys, &states, 2).unwrap();
        assert!(r.is_ok(), "{r}");
        let r = scheme_suite(4, 1, Exec::Parallel).unwrap();
        assert!(r.is_ok(), "{r}");
        let e = build_reference_scheme(3, 0, Exec::Parallel).unwrap_err();
        assert!(matches!(e, Error::BudgetExceeded(_)), "{e}");
    }
}
