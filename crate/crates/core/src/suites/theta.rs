//! The six properties of `(S_n)` and `(θ_n)`, checked exactly on finite
//! ranges.

use crate::exec::Exec;
use crate::index::Index;
use crate::report::SuiteReport;
use crate::seq::{in_s, pow2_q, pow2_q_plus, pow2_q_u64, pow3, ThetaRule};

/// Ranges for [`theta_suite`].
#[derive(Clone, Debug)]
pub struct ThetaConfig {
    /// The power, injectivity, fixing and spacing checks run over `k ≤ kmax` and `2^{q_n} j` for
    /// `j ≤ kmax`.
    pub kmax: u64,
    pub ns: Vec<usize>,
    /// Largest entry of the sequences `s` in the witness and escape checks.
    pub max_entry: usize,
    pub rs: Vec<u64>,
    /// Arguments of the escape check run over `k ≤ arg_max` and `2^{q_{s(last)}} j` for
    /// `j ≤ arg_max`.
    pub arg_max: u64,
}

impl Default for ThetaConfig {
    fn default() -> Self {
        ThetaConfig { kmax: 1_000_000, ns: vec![0, 1, 2], max_entry: 4, rs: vec![0, 1, 2], arg_max: 100_000 }
    }
}

/// Strictly decreasing sequences with entries `≤ max` and length `len`.
pub fn decreasing_seqs(max: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, below: usize, len: usize) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in (0..below).rev() {
            cur.push(v);
            go(out, cur, v, len);
            cur.pop();
        }
    }
    go(&mut out, &mut Vec::new(), max + 1, len);
    out
}

/// Strictly increasing sequences with entries `≤ max` and length `len`.
pub fn increasing_seqs(max: usize, len: usize) -> Vec<Vec<usize>> {
    decreasing_seqs(max, len)
        .into_iter()
        .map(|mut s| {
            s.reverse();
            s
        })
        .collect()
}

fn small(k: &Index) -> u128 {
    k.as_u128().expect("test range stays below 2^128")
}

/// The test set for one `n`: `0..=kmax` and the multiples `2^{q_n} j`.
fn test_range(n: usize, kmax: u64) -> Vec<u128> {
    let p = pow2_q_u64(n).unwrap() as u128;
    let mut ks: Vec<u128> = (0..=kmax as u128).collect();
    ks.extend((1..=kmax as u128).map(|j| p * j).filter(|&k| k > kmax as u128));
    ks
}

/// The power, injectivity, fixing and spacing checks at one `n`, plus fixed-point freeness
/// of θ.
fn per_n(rule: &ThetaRule, n: usize, cfg: &ThetaConfig, exec: Exec) -> SuiteReport {
    let mut r = SuiteReport::new(format!("n = {n}"));
    let p = pow2_q_u64(n).unwrap() as u128;
    let ks = test_range(n, cfg.kmax);
    let images: Vec<u128> = exec.map(&ks, |&k| small(&rule.theta_n(n, &Index::from(k))));

    // powers: an image in S_n has an odd factor ≥ 3, so it is not a power of 2
    let bad: Vec<String> = exec
        .map(&images, |&v| {
            let in_sn = v != 0 && v.trailing_zeros() as u128 >= p.trailing_zeros() as u128;
            (in_sn && v.is_power_of_two()).then(|| format!("power: image {v} is a power of 2 in S_{n}"))
        })
        .into_iter()
        .flatten()
        .collect();
    r.checked += images.len() as u64;
    bad.into_iter().for_each(|m| r.fail(m));
    let q = p.trailing_zeros();
    for e in q..128 {
        let k = Index::from(1u128 << e);
        r.check(rule.theta_n_inv(n, &k).is_none(), || format!("power: 2^{e} has a θ_{n}-preimage"));
    }

    // injectivity: on the range, and the inverse undoes it
    let mut sorted = images.clone();
    sorted.sort_unstable();
    let dups = sorted.windows(2).filter(|w| w[0] == w[1]).count();
    r.check(dups == 0, || format!("injectivity: {dups} collisions among {} images", sorted.len()));
    let bad: Vec<String> = exec
        .map(&ks.iter().zip(&images).collect::<Vec<_>>(), |&(&k, &v)| {
            let back = rule.theta_n_inv(n, &Index::from(v)).and_then(|b| b.as_u128());
            (back != Some(k)).then(|| format!("injectivity: θ_{n}^-1(θ_{n}({k})) = {back:?}"))
        })
        .into_iter()
        .flatten()
        .collect();
    r.checked += ks.len() as u64;
    bad.into_iter().for_each(|m| r.fail(m));

    // fixing: fixed exactly off S_n
    let bad: Vec<String> = exec
        .map(&ks.iter().zip(&images).collect::<Vec<_>>(), |&(&k, &v)| {
            let fixed = v == k;
            let outside = !in_s(n, &Index::from(k));
            (fixed != outside).then(|| format!("fixing: k = {k}: fixed {fixed}, outside S_{n} {outside}"))
        })
        .into_iter()
        .flatten()
        .collect();
    r.checked += ks.len() as u64;
    bad.into_iter().for_each(|m| r.fail(m));

    // spacing: consecutive multiples of 2^{q_n} move by at most 3 * 2^{q_n + 1}
    let bound = 3 * (p as i128) * 2;
    let bad: Vec<String> = exec
        .map_range(cfg.kmax, |j| {
            let a = small(&rule.theta_n(n, &Index::from(p * j as u128))) as i128;
            let b = small(&rule.theta_n(n, &Index::from(p * (j as u128 + 1)))) as i128;
            (b - a > bound).then(|| format!("spacing: j = {j}: difference {} > {bound}", b - a))
        })
        .into_iter()
        .flatten()
        .collect();
    r.checked += cfg.kmax;
    bad.into_iter().for_each(|m| r.fail(m));
    r
}

fn fixed_point_free(rule: &ThetaRule, kmax: u64, exec: Exec) -> SuiteReport {
    let mut r = SuiteReport::new("θ is fixed-point free");
    let bad = exec.filter_map_range(kmax, |j| {
        let j = Index::from(j + 1);
        (rule.theta(&j).ok()? == j).then(|| format!("θ({j}) = {j}"))
    });
    r.checked += kmax;
    bad.into_iter().for_each(|m| r.fail(m));
    r
}

/// Witnesses: the explicit witnesses `θ_{s*}(2^{q_{s(0)}+r}) = 2^{q_{s(0)}+r} 3^{|s|-1}`,
/// and the same chain started at `2^{q_{s(0)+r}}` where that power exists.
fn witnesses(rule: &ThetaRule, cfg: &ThetaConfig) -> SuiteReport {
    let l = rule.level().get();
    let mut r = SuiteReport::new("witnesses in S_{s(0)}");
    let mut skipped = 0;
    for len in 2..=l {
        for s in decreasing_seqs(cfg.max_entry, len) {
            let star = &s[1..];
            let three = pow3(len as u32 - 1);
            for &rr in &cfg.rs {
                let mut starts = vec![("2^{q_s0 + r}", pow2_q_plus(s[0], rr).expect("s(0) ≤ 4"))];
                match pow2_q(s[0] + rr as usize) {
                    Ok(v) => starts.push(("2^{q_{s0 + r}}", v)),
                    Err(_) => skipped += 1,
                }
                for (form, x) in starts {
                    let v = rule.theta_path(star, &x);
                    let want = three_times(&x, &three);
                    r.check(v == want, || format!("s = {s:?}, r = {rr}, start {form}: θ_s* gives {v}, expected {want}"));
                    r.check(in_s(s[0], &v), || format!("s = {s:?}, r = {rr}, start {form}: {v} ∉ S_{}", s[0]));
                }
            }
        }
    }
    if skipped > 0 {
        r.note(format!("{skipped} starts 2^{{q_{{s(0)+r}}}} with s(0)+r > 4 have no exact power and were skipped"));
    }
    r
}

// x * 3^e for x a power of 2; the sparse representation keeps this exact
fn three_times(x: &Index, three: &Index) -> Index {
    let e = x.trailing_zeros().expect("nonzero");
    three.shl_big(&e)
}

/// Escape: `θ_{s*}(k) ∉ S_{s(0)}` for `|s| = L + 1`.
fn disjointness(rule: &ThetaRule, cfg: &ThetaConfig, exec: Exec) -> SuiteReport {
    let l = rule.level().get();
    let mut r = SuiteReport::new("escape: images of θ_s* avoid S_{s(0)}");
    for s in decreasing_seqs(cfg.max_entry, l + 1) {
        let star = s[1..].to_vec();
        let last = *s.last().unwrap();
        let unit = pow2_q(last).expect("entries ≤ 4");
        let n0 = s[0];
        let run = |k: Index| -> Option<String> {
            let v = rule.theta_path(&star, &k);
            in_s(n0, &v).then(|| format!("s = {s:?}: θ_s*({k}) = {v} ∈ S_{n0}"))
        };
        let mut bad = exec.map_range(cfg.arg_max + 1, |k| run(Index::from(k)));
        bad.extend(exec.map_range(cfg.arg_max, |j| run(unit.mul_u64(j + 1))));
        let crit = critical_args(l);
        bad.extend(exec.map(&crit, |k| run(k.clone())));
        r.checked += 2 * cfg.arg_max + 1 + crit.len() as u64;
        bad.into_iter().flatten().for_each(|m| r.fail(m));
    }
    r
}

/// `2^{q_i + r} 3^m` for `i ≤ 2`, `r < 32`, `m ≤ L + 1`: where the chains
/// of the witness check and the `M_L` offsets meet.
fn critical_args(l: usize) -> Vec<Index> {
    let mut out = Vec::new();
    for i in 0..=2 {
        for r in 0..32 {
            for m in 0..=l as u32 + 1 {
                out.push(pow3(m).shl(pow2_q_u64(i).unwrap().trailing_zeros() as u64 + r));
            }
        }
    }
    out
}

/// All six properties for one rule.
pub fn theta_suite(rule: &ThetaRule, cfg: &ThetaConfig, exec: Exec) -> SuiteReport {
    let l = rule.level().get();
    let mut r = SuiteReport::new(format!("theta properties L = {l}, c = 2^{}", rule.c_log2()));
    for &n in &cfg.ns {
        r.absorb(per_n(rule, n, cfg, exec));
    }
    r.absorb(fixed_point_free(rule, cfg.kmax, exec));
    r.absorb(witnesses(rule, cfg));
    r.absorb(disjointness(rule, cfg, exec));
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::FamilyLevel;

    fn small_cfg() -> ThetaConfig {
        ThetaConfig { kmax: 2000, arg_max: 500, ..ThetaConfig::default() }
    }

    #[test]
    fn sequences() {
        assert_eq!(decreasing_seqs(2, 2), vec![vec![2, 1], vec![2, 0], vec![1, 0]]);
        assert_eq!(increasing_seqs(2, 3), vec![vec![0, 1, 2]]);
        assert_eq!(decreasing_seqs(4, 4).len(), 5);
    }

    #[test]
    fn default_constant_passes() {
        for l in 1..=3 {
            let rule = ThetaRule::new(FamilyLevel::new(l).unwrap());
            let r = theta_suite(&rule, &small_cfg(), Exec::Parallel);
            assert!(r.is_ok(), "{r}");
        }
    }

    #[test]
    fn large_constant_breaks_five() {
        let rule = ThetaRule::with_c_log2(FamilyLevel::new(2).unwrap(), 31).unwrap();
        let r = disjointness(&rule, &small_cfg(), Exec::Parallel);
        assert!(!r.is_ok());
        assert!(r.failures.iter().any(|f| f.contains("[2, 1, 0]")), "{r}");
    }
}
