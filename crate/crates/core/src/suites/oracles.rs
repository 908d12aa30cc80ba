//! Brute-force oracles for the core operations, on random small instances.
//!
//! Each oracle recomputes the answer from the definitions over a finite set
//! of relevant coordinates, sharing nothing with the fast path except θ.

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cylinder::{Atom, ClopenBuilder, ClopenUnion, LazyPoint, SymbolicClopen};
use crate::digraph::Family;
use crate::error::Error;
use crate::index::Index;
use crate::report::SuiteReport;
use crate::seq::{pow2_q_u64, FamilyLevel};
use crate::uogas::enumerate::random_uogas;
use crate::word::BinWord;

/// A clopen as it was drawn: a base word and raw atoms, before any
/// canonicalization.
#[derive(Clone, Debug)]
pub struct Recipe {
    pub base: BinWord,
    pub atoms: Vec<Atom>,
}

impl Recipe {
    pub fn holds(&self, bits: u64) -> bool {
        let bit = |a: u64| bits >> a & 1 == 1;
        (0..self.base.len()).all(|i| bit(i as u64) == self.base.get(i))
            && self.atoms.iter().all(|a| match *a {
                Atom::Fix(x, v) => bit(x) == v,
                Atom::Rel(x, y, d) => (bit(x) ^ bit(y)) == d,
            })
    }

    pub fn build(&self) -> Option<SymbolicClopen> {
        let mut b = ClopenBuilder::new(self.base.clone());
        for &a in &self.atoms {
            b.atom(a);
        }
        b.build()
    }
}

/// A random recipe on coordinates below `window`.
pub fn random_recipe<R: Rng + ?Sized>(rng: &mut R, window: u64) -> Recipe {
    let len = rng.gen_range(0..=4);
    let base = BinWord::from_bits((0..len).map(|_| rng.gen_bool(0.5)));
    let atoms = (0..rng.gen_range(0..=3))
        .map(|_| {
            let x = rng.gen_range(0..window);
            if rng.gen_bool(0.4) {
                Atom::Fix(x, rng.gen_bool(0.5))
            } else {
                Atom::Rel(x, rng.gen_range(0..window), rng.gen_bool(0.5))
            }
        })
        .collect();
    Recipe { base, atoms }
}

fn point(bits: u64, window: u64) -> LazyPoint {
    LazyPoint::from_word(&BinWord::from_bits((0..window).map(|i| bits >> i & 1 == 1)), false)
}

fn union_holds(u: &ClopenUnion, pts: &[LazyPoint]) -> Vec<bool> {
    pts.iter().map(|p| u.contains(p)).collect()
}

/// Meet, difference, subset, union and intersection of random clopens
/// against truth tables over every assignment of a 10-coordinate window.
pub fn set_ops_oracle(count: usize, seed: u64) -> SuiteReport {
    const W: u64 = 10;
    let mut r = SuiteReport::new("clopen set operations");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<LazyPoint> = (0..1u64 << W).map(|b| point(b, W)).collect();
    let (mut empty_inputs, mut done) = (0, 0);
    while done < count {
        let (ra, rb) = (random_recipe(&mut rng, W), random_recipe(&mut rng, W));
        let ta: Vec<bool> = (0..1u64 << W).map(|b| ra.holds(b)).collect();
        let tb: Vec<bool> = (0..1u64 << W).map(|b| rb.holds(b)).collect();
        let (a, b) = (ra.build(), rb.build());
        r.check(a.is_some() == ta.iter().any(|&x| x), || format!("emptiness of {ra:?}"));
        r.check(b.is_some() == tb.iter().any(|&x| x), || format!("emptiness of {rb:?}"));
        let (Some(a), Some(b)) = (a, b) else {
            empty_inputs += 1;
            continue;
        };
        done += 1;
        let got_a: Vec<bool> = pts.iter().map(|p| a.contains(p)).collect();
        r.check(got_a == ta, || format!("{a} does not match its recipe {ra:?}"));
        let meet: Vec<bool> = ta.iter().zip(&tb).map(|(x, y)| *x && *y).collect();
        let diff: Vec<bool> = ta.iter().zip(&tb).map(|(x, y)| *x && !*y).collect();
        let join: Vec<bool> = ta.iter().zip(&tb).map(|(x, y)| *x || *y).collect();
        let got_meet = ClopenUnion::from(a.meet(&b));
        r.check(union_holds(&got_meet, &pts) == meet, || format!("{a} ∩ {b}"));
        r.check(a.meets(&b) == meet.iter().any(|&x| x), || format!("meets({a}, {b})"));
        let pieces = a.minus(&b);
        let mut cover = vec![0u8; pts.len()];
        for c in &pieces {
            for (i, p) in pts.iter().enumerate() {
                cover[i] += u8::from(c.contains(p));
            }
        }
        r.check(cover.iter().all(|&c| c <= 1), || format!("{a} \\ {b} pieces overlap"));
        r.check(cover.iter().map(|&c| c == 1).eq(diff.iter().copied()), || format!("{a} \\ {b}"));
        let subset = diff.iter().all(|&x| !x);
        r.check(a.is_subset_of(&b) == subset, || format!("{a} ⊆ {b}"));
        let (ua, ub) = (ClopenUnion::from(a.clone()), ClopenUnion::from(b.clone()));
        r.check(union_holds(&ua.union(&ub), &pts) == join, || format!("{a} ∪ {b}"));
        r.check(union_holds(&ua.intersect(&ub), &pts) == meet, || format!("{a} ∩ {b} as unions"));
        r.check(union_holds(&ua.minus(&ub), &pts) == diff, || format!("{a} \\ {b} as unions"));
        r.check(ua.is_subset_of(&ub) == subset, || format!("{a} ⊆ {b} as unions"));
    }
    r.note(format!("{done} pairs, {empty_inputs} further draws had an empty operand"));
    r
}

/// Brute force over the coordinates in `coords`: does some assignment put
/// `α` in `N_y ∩ 𝔻_n^L` with `g_n(α) ∈ N_x`?
fn meets_brute(fam: &Family, n: usize, y: &BinWord, x: &BinWord) -> Option<bool> {
    let p = pow2_q_u64(n)?;
    let mut reads = Vec::new();
    for k in 0..x.len() as u64 {
        if k == p {
            if !x.get(k as usize) {
                return Some(false);
            }
            continue;
        }
        reads.push((fam.rule().theta_n_u64(n, k)?, x.get(k as usize)));
    }
    let t0 = fam.t0(n).ok()?;
    let atoms = fam.domain_atoms(n).ok()?;
    let mut coords: BTreeSet<u64> = reads.iter().map(|&(c, _)| c).collect();
    for a in &atoms {
        if let Atom::Rel(u, v, _) = *a {
            coords.insert(u);
            coords.insert(v);
        }
    }
    coords.extend(0..t0.len().max(y.len()) as u64);
    let fixed = |c: u64| -> Option<bool> {
        let from_y = y.get_opt(c as usize);
        let from_t = t0.get_opt(c as usize);
        match (from_y, from_t) {
            (Some(a), Some(b)) if a != b => Some(!a),
            (Some(a), _) | (None, Some(a)) => Some(a),
            _ => None,
        }
    };
    // incompatible y and t_n 0
    if (0..y.len().min(t0.len())).any(|i| y.get(i) != t0.get(i)) {
        return Some(false);
    }
    let free: Vec<u64> = coords.iter().copied().filter(|&c| fixed(c).is_none()).collect();
    if free.len() > 22 {
        return None;
    }
    let found = (0..1u64 << free.len()).any(|m| {
        let bit = |c: u64| match fixed(c) {
            Some(b) => b,
            None => m >> free.iter().position(|&f| f == c).unwrap() & 1 == 1,
        };
        atoms.iter().all(|a| match *a {
            Atom::Rel(u, v, d) => (bit(u) ^ bit(v)) == d,
            Atom::Fix(u, v) => bit(u) == v,
        }) && reads.iter().all(|&(c, want)| bit(c) == want)
    });
    Some(found)
}

/// A word near `t_n ε`: usually an extension, sometimes a perturbed or
/// truncated one.
fn near_t<R: Rng + ?Sized>(rng: &mut R, fam: &Family, n: usize, eps: bool, extra: usize) -> BinWord {
    let mut w = if eps { fam.t1(n).unwrap().clone() } else { fam.t0(n).unwrap().clone() };
    for _ in 0..rng.gen_range(0..=extra) {
        w.push(rng.gen_bool(0.5));
    }
    match rng.gen_range(0..10) {
        0 => w.prefix(rng.gen_range(0..=w.len())),
        1 if !w.is_empty() => {
            let i = rng.gen_range(0..w.len());
            let b = w.get(i);
            w.set(i, !b);
            w
        }
        _ => w,
    }
}

/// `graph_meets` for levels 1 and 2 and maps 0 and 1.
pub fn graph_meets_oracle(count: usize, seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("graph_meets");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fams = [Family::new(FamilyLevel::new(1).unwrap()), Family::new(FamilyLevel::new(2).unwrap())];
    let (mut yes, mut skipped) = (0, 0);
    for _ in 0..count {
        let fam = &fams[rng.gen_range(0..2)];
        let n = rng.gen_range(0..2);
        let y = near_t(&mut rng, fam, n, false, 10);
        let x = near_t(&mut rng, fam, n, true, 6);
        let Some(want) = meets_brute(fam, n, &y, &x) else {
            skipped += 1;
            continue;
        };
        yes += usize::from(want);
        match fam.graph_meets(n, &y, &x) {
            Ok(got) => r.check(got == want, || format!("L = {}, n = {n}, y = {y}, x = {x}: got {got}", fam.level().get())),
            Err(e) => r.fail(format!("n = {n}, y = {y}, x = {x}: {e}")),
        }
    }
    r.note(format!("{yes} meeting pairs, {skipped} skipped as too wide"));
    r
}

/// `g_s(p)` materialized on a finite prefix, stage by stage; `Err(Some(stage))`
/// when the running prefix misses a domain cylinder, `Err(None)` when the
/// prefix is too short to tell.
fn compose_materialized(fam: &Family, s: &[usize], alpha: &[bool]) -> Result<Vec<bool>, Option<usize>> {
    let mut cur = alpha.to_vec();
    for (stage, &n) in s.iter().enumerate().rev() {
        let t0 = fam.t0(n).unwrap();
        let shared = cur.len().min(t0.len());
        if (0..shared).any(|i| cur[i] != t0.get(i)) {
            return Err(Some(stage));
        }
        if shared < t0.len() {
            return Err(None);
        }
        let p = pow2_q_u64(n).unwrap();
        let mut next = Vec::new();
        for k in 0.. {
            if k == p {
                next.push(true);
                continue;
            }
            match fam.rule().theta_n_u64(n, k) {
                Some(a) if (a as usize) < cur.len() => next.push(cur[a as usize]),
                _ => break,
            }
        }
        cur = next;
    }
    Ok(cur)
}

/// `g_compose_eval` against the materialized composition, levels 1 and 2,
/// paths of length up to 3 over maps 0, 1, 2. Points start inside the
/// innermost domain when it fits the window.
pub fn compose_oracle(count: usize, seed: u64) -> SuiteReport {
    const W: usize = 4096;
    let mut r = SuiteReport::new("g_compose_eval");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fams = [Family::new(FamilyLevel::new(1).unwrap()), Family::new(FamilyLevel::new(2).unwrap())];
    let (mut defined, mut undecided, mut done) = (0, 0, 0);
    while done < count {
        let fam = &fams[rng.gen_range(0..2)];
        let s: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..3)).collect();
        let mut alpha: Vec<bool> = (0..W).map(|_| rng.gen_bool(0.5)).collect();
        // start inside the innermost domain most of the time
        let t0 = fam.t0(*s.last().unwrap()).unwrap();
        if t0.len() <= W && rng.gen_bool(0.8) {
            for (i, a) in alpha.iter_mut().enumerate().take(t0.len()) {
                *a = t0.get(i);
            }
        }
        let p = LazyPoint::from_word(&BinWord::from_bits(alpha.iter().copied()), false);
        let want = compose_materialized(fam, &s, &alpha);
        match want {
            Err(None) => {
                undecided += 1;
                continue;
            }
            Err(Some(stage)) => {
                let got = fam.g_compose_eval(&s, &p, &Index::ZERO);
                r.check(matches!(got, Err(Error::OutsideDomain { stage: g }) if g == stage), || {
                    format!("s = {s:?}: expected a miss at stage {stage}, got {got:?}")
                });
                done += 1;
            }
            Ok(bits) => {
                defined += 1;
                for k in (0..bits.len()).step_by(1 + bits.len() / 300) {
                    let got = fam.g_compose_eval(&s, &p, &Index::from(k));
                    r.check(matches!(got, Ok(b) if b == bits[k]), || format!("s = {s:?}, k = {k}: got {got:?}"));
                }
                done += 1;
            }
        }
    }
    r.note(format!("{defined} of {count} compositions defined, {undecided} draws too close to t_2 to decide"));
    r
}

/// `unique_path` against breadth-first search on the symmetrized edges.
pub fn unique_path_oracle(count: usize, seed: u64) -> SuiteReport {
    let mut r = SuiteReport::new("unique_path");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let n = rng.gen_range(1..=12);
        let p_root = rng.gen_range(0.0..0.5);
        let g = random_uogas(&mut rng, n, p_root);
        let mut adj = vec![Vec::new(); n];
        for (a, b) in g.edges() {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        let (x, y) = (rng.gen_range(0..n as u32), rng.gen_range(0..n as u32));
        let mut prev = vec![None; n];
        prev[x as usize] = Some(x);
        let mut queue = VecDeque::from([x]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v as usize] {
                if prev[w as usize].is_none() {
                    prev[w as usize] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        let want = prev[y as usize].map(|_| {
            let mut path = vec![y];
            while *path.last().unwrap() != x {
                path.push(prev[*path.last().unwrap() as usize].unwrap());
            }
            path.reverse();
            path
        });
        let got = g.unique_path(x, y);
        match (&want, &got) {
            (Some(w), Ok(p)) => r.check(w == p, || format!("{x} → {y}: {p:?}, expected {w:?}")),
            (None, Err(Error::NotConnected)) => r.checked += 1,
            _ => r.fail(format!("{x} → {y}: got {got:?}, expected {want:?}")),
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracles_agree() {
        for rep in [set_ops_oracle(60, 1), graph_meets_oracle(100, 2), compose_oracle(40, 3), unique_path_oracle(100, 4)] {
            assert!(rep.is_ok(), "{rep}");
        }
    }

    #[test]
    fn brute_force_examples() {
        let fam = Family::g1();
        let w = |s: &str| s.parse::<BinWord>().unwrap();
        assert_eq!(meets_brute(&fam, 0, &w("00"), &w("01")), Some(true));
        assert_eq!(meets_brute(&fam, 0, &w("01"), &w("01")), Some(false));
        // g_0(α)(2) = α(5), so the pair is decided by one bit
        assert_eq!(meets_brute(&fam, 0, &w("000001"), &w("010")), Some(false));
        assert_eq!(meets_brute(&fam, 0, &w("000001"), &w("011")), Some(true));
    }
}
