//! The index sequences ψ, s_n, q_n, t_n and the index maps θ, θ_n.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::index::Index;
use crate::word::BinWord;

/// Default cap on materialized word lengths, in bits.
pub const DEFAULT_MATERIALIZE_CAP: u64 = 1 << 26;

/// Default `log2` of the constant `c` in the definition of `M_L`.
pub const DEFAULT_C_LOG2: u32 = 3;

/// The bijection ω → 2^{<ω}, ordered by length then lexicographically.
pub fn psi(n: u64) -> BinWord {
    let m = n as u128 + 1;
    let len = 127 - m.leading_zeros() as usize;
    let idx = m - (1u128 << len);
    BinWord::from_bits((0..len).rev().map(|i| idx >> i & 1 == 1))
}

pub fn psi_inv(w: &BinWord) -> Index {
    // the numeral "1w" minus one
    let v = (BigUint::one() << w.len()) + w.value_be() - 1u32;
    Index::from_biguint(&v)
}

/// Machine-sized `psi_inv`, when it fits.
pub fn psi_inv_u64(w: &BinWord) -> Option<u64> {
    psi_inv(w).to_u64()
}

/// `s_n = ψ(n) 0^{n - |ψ(n)|}`.
pub fn s_seq(n: usize) -> BinWord {
    let mut w = psi(n as u64);
    while w.len() < n {
        w.push(false);
    }
    w
}

const Q_SMALL: [u64; 4] = [0, 3, 24, 50_331_648];

/// `q_n` when it fits a machine word (n ≤ 3).
pub fn q_u64(n: usize) -> Option<u64> {
    Q_SMALL.get(n).copied()
}

fn q4_big() -> &'static BigUint {
    static Q4: OnceLock<BigUint> = OnceLock::new();
    Q4.get_or_init(|| BigUint::from(3u32) << Q_SMALL[3])
}

/// `q_n` as a plain big integer; available for n ≤ 4.
pub fn q_big(n: usize) -> Option<BigUint> {
    match n {
        0..=3 => Some(BigUint::from(Q_SMALL[n])),
        4 => Some(q4_big().clone()),
        _ => None,
    }
}

/// `q_0 = 0`, `q_{n+1} = 3 * 2^{q_n}`.
///
/// Exact for n ≤ 5; `q_6` would need `q_5` as an explicit exponent, which
/// has about 2^{q_4} bits.
pub fn q_seq(n: usize) -> Result<Index> {
    match n {
        0..=3 => Ok(Index::from(Q_SMALL[n])),
        4 => Ok(Index::pow2(Q_SMALL[3]).mul_u64(3)),
        5 => Ok(Index::pow2_big(q4_big()).mul_u64(3)),
        _ => Err(Error::CapExceeded {
            what: format!("q_{n}"),
            requested: "an exponent with more than 2^(q_4) bits".into(),
            cap: "q_5".into(),
        }),
    }
}

/// `2^{q_n}` as an exact index; available for n ≤ 4.
pub fn pow2_q(n: usize) -> Result<Index> {
    match n {
        0..=3 => Ok(Index::pow2(Q_SMALL[n])),
        4 => Ok(Index::pow2_big(q4_big())),
        _ => Err(Error::CapExceeded { what: format!("2^(q_{n})"), requested: format!("exponent q_{n}"), cap: "q_4".into() }),
    }
}

/// `2^{q_n}` as a machine word (n ≤ 2).
pub fn pow2_q_u64(n: usize) -> Option<u64> {
    match n {
        0..=2 => Some(1u64 << Q_SMALL[n]),
        _ => None,
    }
}

/// `|t_n| = 2^{q_n}`, when it fits a machine word.
pub fn t_len(n: usize) -> Option<u64> {
    pow2_q_u64(n)
}

/// `t_n = ψ(n) 0^{2^{q_n} - |ψ(n)|}`.
pub fn t_seq(n: usize, cap: u64) -> Result<BinWord> {
    let too_big = || Error::CapExceeded {
        what: format!("t_{n}"),
        requested: match q_u64(n) {
            Some(q) => format!("2^{q} bits"),
            None => format!("2^(q_{n}) bits"),
        },
        cap: format!("{cap} bits"),
    };
    let len = t_len(n).ok_or_else(too_big)?;
    if len > cap {
        return Err(too_big());
    }
    if n == 2 {
        static T2: OnceLock<BinWord> = OnceLock::new();
        return Ok(T2.get_or_init(|| build_t(2, len)).clone());
    }
    Ok(build_t(n, len))
}

fn build_t(n: usize, len: u64) -> BinWord {
    let p = psi(n as u64);
    let mut w = BinWord::zeros(len as usize);
    for i in p.ones() {
        w.set(i, true);
    }
    w
}

/// Bit `i` of `t_n` without materializing it; `None` past the end.
pub fn t_bit(n: usize, i: u64) -> Option<bool> {
    if let Some(len) = t_len(n) {
        if i >= len {
            return None;
        }
    }
    let p = psi(n as u64);
    Some((i as usize) < p.len() && p.get(i as usize))
}

/// Whether `w` is prefix-compatible with `t_n ε` (ε the appended bit).
pub fn compatible_with_t_then(n: usize, eps: bool, w: &BinWord) -> bool {
    let tl = t_len(n);
    for i in 0..w.len() as u64 {
        let expect = match tl {
            Some(len) if i == len => eps,
            Some(len) if i > len => return true,
            _ => t_bit(n, i).unwrap(),
        };
        if w.get(i as usize) != expect {
            return false;
        }
    }
    true
}

/// Index `q` with `w = t_q`, if `w` is one of the t-words.
pub fn t_index_of(w: &BinWord) -> Option<usize> {
    let n = (0..=2).find(|&n| t_len(n) == Some(w.len() as u64))?;
    let p = psi(n as u64);
    (w.ones().count() == p.count_ones() && p.is_prefix_of(w)).then_some(n)
}

/// Whether `tz ≥ q_n` for an exact trailing-zero count.
fn tz_reaches_q(tz: &BigUint, n: usize) -> bool {
    match n {
        0..=3 => *tz >= BigUint::from(Q_SMALL[n]),
        4 => tz.bits() > 64 && tz >= q4_big(),
        // q_5 > 2^{tz.bits()} for every representable count
        _ => false,
    }
}

/// `k ∈ S_n = {2^{q_n} j | j ≥ 1}`.
pub fn in_s(n: usize, k: &Index) -> bool {
    if let Some(v) = k.as_u128() {
        return v != 0 && n <= 2 && v.trailing_zeros() as u64 >= Q_SMALL[n];
    }
    match k.trailing_zeros() {
        None => false,
        Some(tz) => tz_reaches_q(&tz, n),
    }
}

/// Whether `k = 2^{q_n}`.
pub fn is_pow2_q(n: usize, k: &Index) -> bool {
    match n {
        0..=2 => k.as_u128() == Some(1u128 << Q_SMALL[n]),
        3 | 4 => !k.is_small() && pow2_q(n).is_ok_and(|p| &p == k),
        _ => false,
    }
}

/// `k / 2^{q_n}` for `k ∈ S_n`.
fn div_pow2_q(n: usize, k: &Index) -> Index {
    match n {
        0..=3 => k.shr_exact(Q_SMALL[n]),
        _ => k.shr_exact_big(q4_big()),
    }
}

fn mul_pow2_q(n: usize, j: &Index) -> Index {
    match n {
        0..=3 => j.shl(Q_SMALL[n]),
        _ => j.shl_big(q4_big()),
    }
}

/// The level L of a digraph 𝔾_L, always ≥ 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct FamilyLevel(usize);

impl FamilyLevel {
    pub fn new(l: usize) -> Result<FamilyLevel> {
        if l == 0 {
            Err(Error::InvalidLevel(0))
        } else {
            Ok(FamilyLevel(l))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// θ and θ_n for one level, with the constant of `M_L` made explicit.
///
/// `M_L = {c * 3 * k | k ≥ 1, k ∉ P_L}` with `c = 2^c_log2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThetaRule {
    level: FamilyLevel,
    c_log2: u32,
}

impl ThetaRule {
    pub fn new(level: FamilyLevel) -> ThetaRule {
        ThetaRule { level, c_log2: DEFAULT_C_LOG2 }
    }

    /// A rule with a non-default `c = 2^c_log2`; `c_log2` must be positive.
    pub fn with_c_log2(level: FamilyLevel, c_log2: u32) -> Result<ThetaRule> {
        if c_log2 == 0 {
            return Err(Error::InvalidArgument("the M_L constant must be even".into()));
        }
        Ok(ThetaRule { level, c_log2 })
    }

    pub fn level(&self) -> FamilyLevel {
        self.level
    }

    pub fn c_log2(&self) -> u32 {
        self.c_log2
    }

    fn l(&self) -> usize {
        self.level.0
    }

    fn need_l2(&self) -> Result<()> {
        if self.l() < 2 {
            Err(Error::InvalidLevel(self.l()))
        } else {
            Ok(())
        }
    }

    /// `k ∈ P_L = {2^p 3^l | l < L - 2}`.
    pub fn in_p(&self, k: &Index) -> Result<bool> {
        self.need_l2()?;
        Ok(self.odd_is_small_pow3(k, self.l() - 2, 0))
    }

    /// `k ∈ M_L`.
    pub fn in_m(&self, k: &Index) -> Result<bool> {
        self.need_l2()?;
        Ok(self.in_m_unchecked(k))
    }

    fn in_m_unchecked(&self, k: &Index) -> bool {
        if k.is_zero() || k.rem_u64(3) != 0 {
            return false;
        }
        match k.trailing_zeros_u64() {
            Some(tz) if tz < self.c_log2 as u64 => return false,
            _ => {}
        }
        // k = c*3*k' with k' ∈ P_L iff odd(k) = 3^{l+1} with l < L-2
        !self.odd_is_small_pow3(k, self.l() - 2, 1)
    }

    // odd part of k equals 3^e with shift <= e < bound + shift
    fn odd_is_small_pow3(&self, k: &Index, bound: usize, shift: usize) -> bool {
        if k.is_zero() || bound == 0 {
            return false;
        }
        let max_e = bound - 1 + shift;
        let limit = (max_e as f64 * 3f64.log2()).ceil() as u64 + 2;
        let Some(mut o) = k.odd_part_within(limit) else {
            return false;
        };
        let mut e = 0usize;
        let three = BigUint::from(3u32);
        while !o.is_one() {
            if (&o % &three).is_zero() {
                o /= &three;
                e += 1;
            } else {
                return false;
            }
        }
        e >= shift && e <= max_e
    }

    /// θ(j) for j ≥ 1.
    pub fn theta(&self, j: &Index) -> Result<Index> {
        if j.is_zero() {
            return Err(Error::InvalidArgument("theta is defined for j >= 1".into()));
        }
        if self.l() == 1 {
            return Ok(j.mul_u64(2).add_u64(1));
        }
        if self.in_m_unchecked(j) {
            return Ok(j.mul_u64(3).add_u64(3));
        }
        if j.is_odd() {
            if let Some(pred) = j.checked_sub_u64(1) {
                if self.in_m_unchecked(&pred) {
                    return Ok(pred.mul_u64(3));
                }
            }
        }
        Ok(j.mul_u64(3))
    }

    /// The j ≥ 1 with θ(j) = i, if any.
    pub fn theta_inv(&self, i: &Index) -> Option<Index> {
        if self.l() == 1 {
            if !i.is_odd() || i.as_u128() == Some(1) {
                return None;
            }
            return Some(i.checked_sub_u64(1)?.shr_exact(1));
        }
        let i3 = i.div_exact_u64(3)?;
        if i3.is_zero() {
            return None;
        }
        if let Some(pred) = i3.checked_sub_u64(1) {
            if self.in_m_unchecked(&pred) {
                return Some(pred);
            }
        }
        if self.in_m_unchecked(&i3) {
            return Some(i3.add_u64(1));
        }
        Some(i3)
    }

    /// θ_n(k): identity off S_n, `2^{q_n} θ(k / 2^{q_n})` on it.
    pub fn theta_n(&self, n: usize, k: &Index) -> Index {
        if !in_s(n, k) {
            return k.clone();
        }
        let j = div_pow2_q(n, k);
        mul_pow2_q(n, &self.theta(&j).expect("j >= 1 on S_n"))
    }

    /// θ_n on machine words; `None` if the value leaves `u64`.
    pub fn theta_n_u64(&self, n: usize, k: u64) -> Option<u64> {
        self.theta_n(n, &Index::from(k)).to_u64()
    }

    /// The k with θ_n(k) = a, if a lies in the image.
    pub fn theta_n_inv(&self, n: usize, a: &Index) -> Option<Index> {
        if !in_s(n, a) {
            return Some(a.clone());
        }
        let i = div_pow2_q(n, a);
        self.theta_inv(&i).map(|j| mul_pow2_q(n, &j))
    }

    pub fn theta_n_inv_u64(&self, n: usize, a: u64) -> Option<u64> {
        self.theta_n_inv(n, &Index::from(a)).and_then(|k| k.to_u64())
    }

    /// `θ_{s(0)} ∘ … ∘ θ_{s(|s|-1)}`, rightmost map first.
    pub fn theta_path(&self, s: &[usize], k: &Index) -> Index {
        let mut v = k.clone();
        for &n in s.iter().rev() {
            v = self.theta_n(n, &v);
        }
        v
    }
}

/// `theta_global` under the default constant.
pub fn theta_global(level: FamilyLevel, j: &Index) -> Result<Index> {
    ThetaRule::new(level).theta(j)
}

/// `theta_n` under the default constant.
pub fn theta_n(level: FamilyLevel, n: usize, k: &Index) -> Index {
    ThetaRule::new(level).theta_n(n, k)
}

pub fn in_p(level: FamilyLevel, k: &Index) -> Result<bool> {
    ThetaRule::new(level).in_p(k)
}

pub fn in_m(level: FamilyLevel, k: &Index) -> Result<bool> {
    ThetaRule::new(level).in_m(k)
}

/// Exact `3^e` as an index.
pub fn pow3(e: u32) -> Index {
    Index::from_biguint(&BigUint::from(3u32).pow(e))
}

/// `2^{q_n + r}`; available for n ≤ 4.
pub fn pow2_q_plus(n: usize, r: u64) -> Result<Index> {
    Ok(pow2_q(n)?.shl(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::w;

    fn lv(l: usize) -> FamilyLevel {
        FamilyLevel::new(l).unwrap()
    }

    fn ix(v: u64) -> Index {
        Index::from(v)
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(0), BinWord::empty());
        assert_eq!(psi(1), w("0"));
        assert_eq!(psi(2), w("1"));
        assert_eq!(psi(3), w("00"));
        assert_eq!(psi(6), w("11"));
        assert_eq!(psi(7), w("000"));
        for n in 0..2000u64 {
            assert_eq!(psi_inv_u64(&psi(n)), Some(n));
        }
    }

    #[test]
    fn s_seq_examples() {
        assert_eq!(s_seq(0), BinWord::empty());
        assert_eq!(s_seq(2), w("10"));
        assert_eq!(s_seq(4), w("0100"));
    }

    #[test]
    fn q_examples() {
        assert_eq!(q_seq(0).unwrap(), ix(0));
        assert_eq!(q_seq(2).unwrap(), ix(24));
        assert_eq!(q_seq(3).unwrap(), ix(50331648));
        let q4 = q_seq(4).unwrap();
        assert_eq!(q4.trailing_zeros(), Some(BigUint::from(50331648u64)));
        assert!(q_seq(5).unwrap() > q4);
        assert!(q_seq(6).is_err());
    }

    #[test]
    fn t_examples() {
        assert_eq!(t_seq(0, DEFAULT_MATERIALIZE_CAP).unwrap(), w("0"));
        assert_eq!(t_seq(1, DEFAULT_MATERIALIZE_CAP).unwrap(), w("00000000"));
        assert!(matches!(t_seq(3, DEFAULT_MATERIALIZE_CAP), Err(Error::CapExceeded { .. })));
        let t2 = t_seq(2, DEFAULT_MATERIALIZE_CAP).unwrap();
        assert_eq!(t2.len(), 1 << 24);
        assert_eq!(t2.count_ones(), 1);
        assert!(t2.get(0));
        assert!(matches!(t_seq(2, 1000), Err(Error::CapExceeded { .. })));
        assert_eq!(t_index_of(&w("0")), Some(0));
        assert_eq!(t_index_of(&w("00000000")), Some(1));
        assert_eq!(t_index_of(&w("00000001")), None);
        assert!(compatible_with_t_then(1, true, &w("000000001")));
        assert!(!compatible_with_t_then(1, true, &w("000000000")));
        assert!(compatible_with_t_then(2, false, &w("1000")));
    }

    #[test]
    fn s_membership() {
        assert!(in_s(1, &ix(8)));
        assert!(!in_s(1, &ix(12)));
        assert!(in_s(0, &ix(5)));
        assert!(!in_s(0, &ix(0)));
        assert!(in_s(4, &pow2_q(4).unwrap().mul_u64(9)));
        assert!(!in_s(4, &pow2_q(3).unwrap()));
        assert!(!in_s(5, &pow2_q(4).unwrap()));
    }

    #[test]
    fn p_and_m_examples() {
        assert!(!in_p(lv(2), &ix(6)).unwrap());
        assert!(in_p(lv(3), &ix(2)).unwrap());
        assert!(!in_p(lv(3), &ix(6)).unwrap());
        assert!(in_p(lv(4), &ix(6)).unwrap());
        assert!(in_m(lv(2), &ix(24)).unwrap());
        assert!(!in_m(lv(3), &ix(24)).unwrap());
        assert!(in_m(lv(3), &ix(72)).unwrap());
        assert!(matches!(in_m(lv(1), &ix(24)), Err(Error::InvalidLevel(1))));
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta_global(lv(1), &ix(4)).unwrap(), ix(9));
        assert_eq!(theta_global(lv(2), &ix(5)).unwrap(), ix(15));
        assert_eq!(theta_global(lv(2), &ix(25)).unwrap(), ix(72));
        assert_eq!(theta_global(lv(2), &ix(24)).unwrap(), ix(75));
        assert!(theta_global(lv(2), &ix(0)).is_err());
        assert_eq!(theta_n(lv(1), 0, &ix(0)), ix(0));
        assert_eq!(theta_n(lv(1), 1, &ix(8)), ix(24));
        assert_eq!(theta_n(lv(2), 1, &ix(16)), ix(48));
        assert_eq!(theta_n(lv(1), 0, &ix(2)), ix(5));
    }

    #[test]
    fn theta_inverse_roundtrip() {
        for l in 1..=4 {
            let r = ThetaRule::new(lv(l));
            for n in 0..=2 {
                for k in 0..3000u64 {
                    let img = r.theta_n(n, &ix(k));
                    assert_eq!(r.theta_n_inv(n, &img), Some(ix(k)), "L={l} n={n} k={k}");
                }
            }
        }
        let r = ThetaRule::new(lv(1));
        assert_eq!(r.theta_n_inv(0, &ix(2)), None);
        assert_eq!(r.theta_n_inv(1, &ix(16)), None);
    }

    #[test]
    fn theta_on_huge_arguments() {
        let r = ThetaRule::new(lv(3));
        let k = pow2_q(4).unwrap();
        // θ_2(θ_0(2^{q_4})) = 9 * 2^{q_4}
        let v = r.theta_path(&[2, 0], &k);
        assert_eq!(v, k.mul_u64(9));
        assert!(in_s(4, &v));
    }
}
