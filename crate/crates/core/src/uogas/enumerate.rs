//! Exhaustive and random sources of small graphs for the test suites.

use std::collections::BTreeSet;

use rand::Rng;

use crate::uogas::IndexedUogas;

/// Number of oriented graphs on `0..n`, `3^{C(n,2)}`.
pub fn oriented_graph_count(n: usize) -> u64 {
    3u64.pow((n * n.saturating_sub(1) / 2) as u32)
}

/// The oriented graph with the given code: each unordered pair `a < b`,
/// in order, is a base-3 digit for absent, forward or backward.
pub fn oriented_graph(n: usize, mut code: u64) -> Vec<(u32, u32)> {
    let mut e = Vec::new();
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            match code % 3 {
                1 => e.push((a, b)),
                2 => e.push((b, a)),
                _ => {}
            }
            code /= 3;
        }
    }
    e
}

/// Every oriented graph on `0..n`, in code order. Lazy.
pub fn oriented_graphs(n: usize) -> impl Iterator<Item = Vec<(u32, u32)>> {
    (0..oriented_graph_count(n)).map(move |code| oriented_graph(n, code))
}

fn succ_acyclic(succ: &[Option<u32>]) -> bool {
    let n = succ.len();
    (0..n).all(|x| {
        let mut cur = x as u32;
        for _ in 0..=n {
            match succ[cur as usize] {
                None => return true,
                Some(s) => cur = s,
            }
        }
        false
    })
}

/// Every uogas on `0..n`. They are exactly the successor maps without
/// cycles, `(n+1)^{n-1}` of them.
pub fn labeled_uogas(n: usize) -> Vec<IndexedUogas> {
    let base = n as u64 + 1;
    let mut out = Vec::new();
    let mut succ = vec![None; n];
    for code in 0..base.pow(n as u32) {
        let mut c = code;
        let mut ok = true;
        for (x, s) in succ.iter_mut().enumerate() {
            let d = (c % base) as u32;
            c /= base;
            *s = d.checked_sub(1);
            if *s == Some(x as u32) {
                ok = false;
            }
        }
        if ok && succ_acyclic(&succ) {
            out.push(IndexedUogas::from_valid_succ(succ.clone()));
        }
    }
    out
}

/// Canonical string of the forest shape: sorted component encodings.
pub fn canonical_form(g: &IndexedUogas) -> String {
    fn enc(g: &IndexedUogas, x: u32) -> String {
        let mut kids: Vec<String> = g.preds(x).iter().map(|&y| enc(g, y)).collect();
        kids.sort();
        format!("({})", kids.concat())
    }
    let mut comps: Vec<String> = (0..g.len() as u32).filter(|&x| g.is_max(x)).map(|x| enc(g, x)).collect();
    comps.sort();
    comps.concat()
}

/// One uogas on `0..n` per isomorphism class.
pub fn uogas_up_to_iso(n: usize) -> Vec<IndexedUogas> {
    let mut seen = BTreeSet::new();
    labeled_uogas(n).into_iter().filter(|g| seen.insert(canonical_form(g))).collect()
}

/// A random uogas on `0..n`: vertices are visited in random order and each
/// one either starts a new component (probability `p_root`) or points to an
/// earlier vertex chosen uniformly.
pub fn random_uogas<R: Rng + ?Sized>(rng: &mut R, n: usize, p_root: f64) -> IndexedUogas {
    let mut order: Vec<u32> = (0..n as u32).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut succ = vec![None; n];
    for i in 1..n {
        if !rng.gen_bool(p_root) {
            succ[order[i] as usize] = Some(order[rng.gen_range(0..i)]);
        }
    }
    IndexedUogas::from_valid_succ(succ)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uogas::validate_indexed;

    #[test]
    fn counts() {
        assert_eq!(oriented_graphs(3).count(), 27);
        for n in 1..=4 {
            let valid = oriented_graphs(n).filter(|e| validate_indexed(n, e).is_empty()).count();
            assert_eq!(valid, (n + 1).pow(n as u32 - 1));
            assert_eq!(labeled_uogas(n).len(), valid);
        }
        let iso: Vec<usize> = (1..=6).map(|n| uogas_up_to_iso(n).len()).collect();
        assert_eq!(iso, vec![1, 2, 4, 9, 20, 48]);
    }
}
