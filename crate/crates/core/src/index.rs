//! Exact natural numbers for coordinates and index values.
//!
//! Values below 2^128 are stored inline. Larger values are kept as a sparse
//! list of odd chunks at (possibly huge) bit offsets, so numbers such as
//! `9 * 2^(3 * 2^50331648)` stay exact without materializing their bits.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Zero runs at least this long split a sparse value into separate chunks.
const GAP: u64 = 64;

/// Sparse values whose bit length stays below this are printed in decimal.
const DECIMAL_DISPLAY_BITS: u64 = 4096;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct Chunk {
    offset: BigUint,
    // odd, no internal zero run of length >= GAP
    value: BigUint,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Repr {
    Small(u128),
    // canonical chunk list, ascending offsets, value >= 2^128
    Sparse(Vec<Chunk>),
}

/// `2^e mod m`. Past the first 64 exponents the residues repeat with the
/// order of 2 modulo the odd part of `m`, which keeps huge exponents cheap.
fn pow2_mod(e: &BigUint, m: u64) -> BigUint {
    let mb = BigUint::from(m);
    let two = BigUint::from(2u32);
    if e.bits() <= 64 || m > 1 << 20 {
        return two.modpow(e, &mb);
    }
    let odd = m >> m.trailing_zeros();
    let mut period = 1u64;
    let mut x = 2 % odd;
    while x != 1 % odd {
        x = x * 2 % odd;
        period += 1;
    }
    let reduced = (e - 64u32) % period + 64u32;
    two.modpow(&reduced, &mb)
}

/// An exact, arbitrarily large natural number.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Index(Repr);

impl Index {
    pub const ZERO: Index = Index(Repr::Small(0));
    pub const ONE: Index = Index(Repr::Small(1));

    pub fn from_biguint(v: &BigUint) -> Index {
        if let Some(s) = v.to_u128() {
            return Index(Repr::Small(s));
        }
        from_terms(vec![(BigUint::zero(), v.clone())])
    }

    /// `2^e` for a machine-sized exponent.
    pub fn pow2(e: u64) -> Index {
        if e < 128 {
            Index(Repr::Small(1u128 << e))
        } else {
            Index(Repr::Sparse(vec![Chunk { offset: BigUint::from(e), value: BigUint::one() }]))
        }
    }

    /// `2^e` for an arbitrary exponent.
    pub fn pow2_big(e: &BigUint) -> Index {
        match e.to_u64() {
            Some(s) => Index::pow2(s),
            None => Index(Repr::Sparse(vec![Chunk { offset: e.clone(), value: BigUint::one() }])),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0))
    }

    pub fn is_small(&self) -> bool {
        matches!(self.0, Repr::Small(_))
    }

    pub fn as_u128(&self) -> Option<u128> {
        match self.0 {
            Repr::Small(v) => Some(v),
            Repr::Sparse(_) => None,
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.as_u128().and_then(|v| u64::try_from(v).ok())
    }

    /// Total number of significant bits.
    pub fn bits(&self) -> BigUint {
        match &self.0 {
            Repr::Small(v) => BigUint::from(128 - v.leading_zeros()),
            Repr::Sparse(cs) => {
                let top = cs.last().expect("sparse value has chunks");
                &top.offset + top.value.bits()
            }
        }
    }

    /// Materialize as a plain big integer if it has at most `max_bits` bits.
    pub fn to_biguint(&self, max_bits: u64) -> Option<BigUint> {
        match &self.0 {
            Repr::Small(v) => Some(BigUint::from(*v)),
            Repr::Sparse(cs) => {
                if self.bits() > BigUint::from(max_bits) {
                    return None;
                }
                let mut acc = BigUint::zero();
                for c in cs {
                    acc += &c.value << c.offset.to_u64()?;
                }
                Some(acc)
            }
        }
    }

    pub fn is_odd(&self) -> bool {
        match &self.0 {
            Repr::Small(v) => v & 1 == 1,
            Repr::Sparse(cs) => cs[0].offset.is_zero(),
        }
    }

    /// Exponent of the largest power of two dividing `self`; `None` for zero.
    pub fn trailing_zeros(&self) -> Option<BigUint> {
        match &self.0 {
            Repr::Small(0) => None,
            Repr::Small(v) => Some(BigUint::from(v.trailing_zeros())),
            Repr::Sparse(cs) => Some(cs[0].offset.clone()),
        }
    }

    /// Like [`Index::trailing_zeros`] but only when the count fits a `u64`.
    pub fn trailing_zeros_u64(&self) -> Option<u64> {
        match &self.0 {
            Repr::Small(0) => None,
            Repr::Small(v) => Some(v.trailing_zeros() as u64),
            Repr::Sparse(cs) => cs[0].offset.to_u64(),
        }
    }

    /// The odd part `self / 2^tz`, if it has at most `max_bits` bits.
    pub fn odd_part_within(&self, max_bits: u64) -> Option<BigUint> {
        match &self.0 {
            Repr::Small(0) => None,
            Repr::Small(v) => {
                let o = v >> v.trailing_zeros();
                (128 - o.leading_zeros() as u64 <= max_bits).then(|| BigUint::from(o))
            }
            Repr::Sparse(cs) => {
                if cs.len() != 1 {
                    // two chunks are at least GAP apart, so the odd part is
                    // larger than any chunk; only materialize when it is cheap
                    let span = &cs.last().unwrap().offset + cs.last().unwrap().value.bits() - &cs[0].offset;
                    if span > BigUint::from(max_bits) {
                        return None;
                    }
                    let base = cs[0].offset.clone();
                    let mut acc = BigUint::zero();
                    for c in cs {
                        acc += &c.value << (&c.offset - &base).to_u64()?;
                    }
                    return Some(acc);
                }
                (cs[0].value.bits() <= max_bits).then(|| cs[0].value.clone())
            }
        }
    }

    pub fn add(&self, other: &Index) -> Index {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            if let Some(s) = a.checked_add(*b) {
                return Index(Repr::Small(s));
            }
        }
        let mut t = self.terms();
        t.extend(other.terms());
        from_terms(t)
    }

    pub fn add_u64(&self, c: u64) -> Index {
        self.add(&Index::from(c))
    }

    pub fn mul_u64(&self, c: u64) -> Index {
        match &self.0 {
            Repr::Small(a) => match a.checked_mul(c as u128) {
                Some(p) => Index(Repr::Small(p)),
                None => from_terms(vec![(BigUint::zero(), BigUint::from(*a) * c)]),
            },
            Repr::Sparse(cs) => {
                if c == 0 {
                    return Index::ZERO;
                }
                from_terms(cs.iter().map(|ch| (ch.offset.clone(), &ch.value * c)).collect())
            }
        }
    }

    /// `self - c`, if non-negative and representable without a long borrow.
    pub fn checked_sub_u64(&self, c: u64) -> Option<Index> {
        match &self.0 {
            Repr::Small(a) => a.checked_sub(c as u128).map(|v| Index(Repr::Small(v))),
            Repr::Sparse(cs) => {
                let low = &cs[0];
                let off = low.offset.to_u64().filter(|o| *o < 2 * GAP)?;
                let lowv = &low.value << off;
                let cb = BigUint::from(c);
                if lowv < cb {
                    return None;
                }
                let mut t: Vec<(BigUint, BigUint)> = vec![(BigUint::zero(), lowv - cb)];
                t.extend(cs[1..].iter().map(|ch| (ch.offset.clone(), ch.value.clone())));
                Some(from_terms(t))
            }
        }
    }

    pub fn shl(&self, s: u64) -> Index {
        if let Repr::Small(a) = self.0 {
            if s < 128 && (a == 0 || a.leading_zeros() as u64 >= s) {
                return Index(Repr::Small(a << s));
            }
        }
        self.shl_big(&BigUint::from(s))
    }

    pub fn shl_big(&self, s: &BigUint) -> Index {
        if self.is_zero() {
            return Index::ZERO;
        }
        if let Some(small) = s.to_u64() {
            if let Repr::Small(a) = self.0 {
                if small < 128 && a.leading_zeros() as u64 >= small {
                    return Index(Repr::Small(a << small));
                }
            }
        }
        from_terms(self.terms().into_iter().map(|(o, v)| (o + s, v)).collect())
    }

    /// `self / 2^s`; the caller guarantees `2^s` divides `self`.
    pub fn shr_exact(&self, s: u64) -> Index {
        self.shr_exact_big(&BigUint::from(s))
    }

    pub fn shr_exact_big(&self, s: &BigUint) -> Index {
        match &self.0 {
            Repr::Small(a) => {
                let s = s.to_u32().filter(|s| *s < 128);
                match s {
                    Some(s) => {
                        debug_assert!(*a == 0 || a.trailing_zeros() >= s);
                        Index(Repr::Small(a >> s))
                    }
                    None => {
                        debug_assert!(*a == 0);
                        Index::ZERO
                    }
                }
            }
            Repr::Sparse(cs) => {
                debug_assert!(&cs[0].offset >= s);
                from_terms(cs.iter().map(|c| (&c.offset - s, c.value.clone())).collect())
            }
        }
    }

    /// Remainder modulo a small positive modulus.
    pub fn rem_u64(&self, m: u64) -> u64 {
        assert!(m > 0);
        match &self.0 {
            Repr::Small(a) => (a % m as u128) as u64,
            Repr::Sparse(cs) => {
                let mb = BigUint::from(m);
                let mut acc = BigUint::zero();
                for c in cs {
                    acc += (&c.value % &mb) * pow2_mod(&c.offset, m);
                }
                (acc % mb).to_u64().unwrap()
            }
        }
    }

    /// `self / d` for a small divisor that divides `self` exactly.
    pub fn div_exact_u64(&self, d: u64) -> Option<Index> {
        assert!(d > 0);
        if self.rem_u64(d) != 0 {
            return None;
        }
        match &self.0 {
            Repr::Small(a) => Some(Index(Repr::Small(a / d as u128))),
            Repr::Sparse(_) => {
                // split d = 2^e * o and divide the odd part of self by o
                let e = d.trailing_zeros() as u64;
                let o = d >> e;
                let tz = self.trailing_zeros()?;
                let odd = self.odd_part_within(1 << 22)?;
                let q = Index::from_biguint(&(odd / o)).shl_big(&tz);
                Some(q.shr_exact(e))
            }
        }
    }

    fn terms(&self) -> Vec<(BigUint, BigUint)> {
        match &self.0 {
            Repr::Small(0) => vec![],
            Repr::Small(v) => vec![(BigUint::zero(), BigUint::from(*v))],
            Repr::Sparse(cs) => cs.iter().map(|c| (c.offset.clone(), c.value.clone())).collect(),
        }
    }
}

/// Normalize a list of `(offset, value)` summands into canonical form.
fn from_terms(mut terms: Vec<(BigUint, BigUint)>) -> Index {
    terms.retain(|(_, v)| !v.is_zero());
    if terms.is_empty() {
        return Index::ZERO;
    }
    terms.sort_by(|a, b| a.0.cmp(&b.0));
    let mut merged: Vec<(BigUint, BigUint)> = Vec::new();
    for (o, v) in terms {
        if let Some((co, cv)) = merged.last_mut() {
            let reach = &*co + cv.bits() + GAP;
            if o <= reach {
                let d = (&o - &*co).to_u64().expect("merge distance is small");
                *cv += v << d;
                continue;
            }
        }
        merged.push((o, v));
    }
    let mut chunks = Vec::new();
    for (o, v) in merged {
        split_chunk(&o, &v, &mut chunks);
    }
    let top = chunks.last().unwrap();
    if top.offset.to_u64().is_some_and(|o| o + top.value.bits() <= 128) {
        let v = chunks.iter().map(|c| c.value.to_u128().unwrap() << c.offset.to_u64().unwrap()).sum();
        return Index(Repr::Small(v));
    }
    Index(Repr::Sparse(chunks))
}

fn split_chunk(off: &BigUint, v: &BigUint, out: &mut Vec<Chunk>) {
    let mut start: Option<u64> = None;
    let mut last = 0u64;
    let emit = |s: u64, e: u64, out: &mut Vec<Chunk>| {
        let len = e - s + 1;
        let mask = (BigUint::one() << len) - 1u32;
        out.push(Chunk { offset: off + s, value: (v >> s) & mask });
    };
    for (di, d) in v.iter_u64_digits().enumerate() {
        let mut w = d;
        while w != 0 {
            let pos = di as u64 * 64 + w.trailing_zeros() as u64;
            match start {
                None => start = Some(pos),
                Some(s) if pos - last > GAP => {
                    emit(s, last, out);
                    start = Some(pos);
                }
                _ => {}
            }
            last = pos;
            w &= w - 1;
        }
    }
    if let Some(s) = start {
        emit(s, last, out);
    }
}

impl From<u64> for Index {
    fn from(v: u64) -> Index {
        Index(Repr::Small(v as u128))
    }
}

impl From<u32> for Index {
    fn from(v: u32) -> Index {
        Index(Repr::Small(v as u128))
    }
}

impl From<usize> for Index {
    fn from(v: usize) -> Index {
        Index(Repr::Small(v as u128))
    }
}

impl From<u128> for Index {
    fn from(v: u128) -> Index {
        Index(Repr::Small(v))
    }
}

impl Ord for Index {
    fn cmp(&self, other: &Index) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            (Repr::Small(_), Repr::Sparse(_)) => Ordering::Less,
            (Repr::Sparse(_), Repr::Small(_)) => Ordering::Greater,
            (Repr::Sparse(_), Repr::Sparse(_)) => cmp_chunks(self.terms(), other.terms()),
        }
    }
}

impl PartialOrd for Index {
    fn partial_cmp(&self, other: &Index) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Walks both ascending chunk lists from the most significant chunk down.
fn cmp_chunks(mut a: Vec<(BigUint, BigUint)>, mut b: Vec<(BigUint, BigUint)>) -> Ordering {
    loop {
        match (a.pop(), b.pop()) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some((oa, va)), Some((ob, vb))) => {
                let ta = &oa + va.bits();
                let tb = &ob + vb.bits();
                if ta != tb {
                    return ta.cmp(&tb);
                }
                let lo = if oa > ob { oa.clone() } else { ob.clone() };
                let sa = (&lo - &oa).to_u64().expect("chunk shift fits");
                let sb = (&lo - &ob).to_u64().expect("chunk shift fits");
                let ha = &va >> sa;
                let hb = &vb >> sb;
                match ha.cmp(&hb) {
                    Ordering::Equal => {}
                    o => return o,
                }
                let ra = &va - (ha << sa);
                let rb = &vb - (hb << sb);
                if !ra.is_zero() {
                    let tz = ra.trailing_zeros().unwrap();
                    a.push((&oa + tz, ra >> tz));
                }
                if !rb.is_zero() {
                    let tz = rb.trailing_zeros().unwrap();
                    b.push((&ob + tz, rb >> tz));
                }
            }
        }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(v) => write!(f, "{v}"),
            Repr::Sparse(cs) => {
                if let Some(b) = self.to_biguint(DECIMAL_DISPLAY_BITS) {
                    return write!(f, "{b}");
                }
                let mut first = true;
                for c in cs.iter().rev() {
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    let off = if c.offset.bits() <= 256 { c.offset.to_string() } else { format!("<{}-bit exponent>", c.offset.bits()) };
                    if c.value.is_one() {
                        write!(f, "2^{off}")?;
                    } else {
                        write!(f, "{}*2^{off}", c.value)?;
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Index({self})")
    }
}

impl serde::Serialize for Index {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.to_u64() {
            Some(v) => s.serialize_u64(v),
            None => s.serialize_str(&self.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &Index) -> BigUint {
        v.to_biguint(1 << 20).unwrap()
    }

    #[test]
    fn pow2_mod_uses_the_period() {
        let two = BigUint::from(2u32);
        for m in [1u64, 2, 3, 12, 24, 1000, 65537] {
            for e in [0u64, 5, 63, 64, 65, 1000, 123_456] {
                let e = BigUint::from(e) << 70u32;
                assert_eq!(pow2_mod(&e, m), two.modpow(&e, &BigUint::from(m)), "m = {m}");
            }
        }
    }

    #[test]
    fn small_arith_matches_u128() {
        let a = Index::from(1_000_000u64);
        assert_eq!(a.mul_u64(3).add_u64(7), Index::from(3_000_007u64));
        assert_eq!(Index::pow2(10), Index::from(1024u64));
        assert_eq!(Index::from(96u64).trailing_zeros_u64(), Some(5));
        assert_eq!(Index::from(96u64).odd_part_within(8), Some(BigUint::from(3u32)));
    }

    #[test]
    fn crossing_128_bits_stays_exact() {
        let a = Index::pow2(127).mul_u64(3);
        assert!(!a.is_small());
        assert_eq!(big(&a), BigUint::from(3u32) << 127);
        let b = a.shr_exact(127);
        assert_eq!(b, Index::from(3u64));
        assert!(b.is_small());
    }

    #[test]
    fn canonical_forms_compare_equal() {
        let x = Index::pow2(500).add(&Index::pow2(200)).add_u64(1);
        let y = Index::ONE.add(&Index::pow2(200)).add(&Index::pow2(500));
        assert_eq!(x, y);
        // carry propagation merges 2^300 + 2^300 into 2^301
        let z = Index::pow2(300).add(&Index::pow2(300));
        assert_eq!(z, Index::pow2(301));
    }

    #[test]
    fn ordering_of_sparse_values() {
        let a = Index::pow2(1000).add_u64(5);
        let b = Index::pow2(1000).add_u64(6);
        let c = Index::pow2(1000).add(&Index::pow2(990));
        assert!(a < b);
        assert!(b < c);
        assert!(Index::pow2(1001) > c);
        assert!(Index::from(u64::MAX) < a);
    }

    #[test]
    fn huge_exponents_are_symbolic() {
        let e = BigUint::one() << 40u32;
        let p = Index::pow2_big(&e).mul_u64(9);
        assert_eq!(p.trailing_zeros(), Some(e.clone()));
        assert_eq!(p.odd_part_within(8), Some(BigUint::from(9u32)));
        assert_eq!(p.rem_u64(3), 0);
        assert_eq!(p.shr_exact_big(&e), Index::from(9u64));
        assert!(p.to_string().contains("9*2^"));
    }

    #[test]
    fn rem_matches_materialized() {
        let v = Index::pow2(333).mul_u64(7).add(&Index::pow2(70)).add_u64(11);
        let b = big(&v);
        for m in [3u64, 5, 7, 8, 1000003] {
            assert_eq!(v.rem_u64(m), (&b % m).to_u64().unwrap());
        }
    }

    #[test]
    fn sub_for_odd_sparse() {
        let v = Index::pow2(400).add_u64(1);
        assert_eq!(v.checked_sub_u64(1), Some(Index::pow2(400)));
        assert_eq!(Index::pow2(400).checked_sub_u64(1), None);
        assert_eq!(Index::from(3u64).checked_sub_u64(4), None);
    }
}
