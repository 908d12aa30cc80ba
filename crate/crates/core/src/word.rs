//! Finite binary words.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite sequence of bits, packed little-endian into `u64` limbs.
///
/// Bits past `len` in the last limb are always zero, so derived equality and
/// hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BinWord {
    limbs: Vec<u64>,
    len: usize,
}

impl BinWord {
    pub fn empty() -> BinWord {
        BinWord::default()
    }

    pub fn zeros(len: usize) -> BinWord {
        BinWord { limbs: vec![0; len.div_ceil(64)], len }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> BinWord {
        let mut w = BinWord::empty();
        for b in bits {
            w.push(b);
        }
        w
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for word of length {}", self.len);
        self.limbs[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn get_opt(&self, i: usize) -> Option<bool> {
        (i < self.len).then(|| self.get(i))
    }

    pub fn set(&mut self, i: usize, b: bool) {
        assert!(i < self.len);
        let m = 1u64 << (i % 64);
        if b {
            self.limbs[i / 64] |= m;
        } else {
            self.limbs[i / 64] &= !m;
        }
    }

    pub fn push(&mut self, b: bool) {
        if self.len.is_multiple_of(64) {
            self.limbs.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, b);
    }

    /// `self` followed by one more bit.
    pub fn child(&self, b: bool) -> BinWord {
        let mut w = self.clone();
        w.push(b);
        w
    }

    pub fn concat(&self, other: &BinWord) -> BinWord {
        let mut w = self.clone();
        for i in 0..other.len {
            w.push(other.get(i));
        }
        w
    }

    pub fn prefix(&self, n: usize) -> BinWord {
        assert!(n <= self.len);
        let mut limbs = self.limbs[..n.div_ceil(64)].to_vec();
        if !n.is_multiple_of(64) {
            *limbs.last_mut().unwrap() &= (1u64 << (n % 64)) - 1;
        }
        BinWord { limbs, len: n }
    }

    /// Length of the longest common prefix.
    pub fn lcp(&self, other: &BinWord) -> usize {
        let n = self.len.min(other.len);
        for (i, (a, b)) in self.limbs.iter().zip(&other.limbs).enumerate() {
            let x = a ^ b;
            if x != 0 {
                return n.min(i * 64 + x.trailing_zeros() as usize);
            }
        }
        n
    }

    pub fn is_prefix_of(&self, other: &BinWord) -> bool {
        self.len <= other.len && self.lcp(other) == self.len
    }

    /// Neither word extends the other.
    pub fn incompatible(&self, other: &BinWord) -> bool {
        self.lcp(other) < self.len.min(other.len)
    }

    pub fn count_ones(&self) -> usize {
        self.limbs.iter().map(|l| l.count_ones() as usize).sum()
    }

    /// Positions holding a 1, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.limbs.iter().enumerate().flat_map(|(i, &l)| {
            let mut w = l;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + t)
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    /// Interpret the word as a big-endian binary numeral.
    pub fn value_be(&self) -> num_bigint::BigUint {
        let mut v = num_bigint::BigUint::default();
        for b in self.iter() {
            v <<= 1u32;
            if b {
                v += 1u32;
            }
        }
        v
    }
}

impl Ord for BinWord {
    /// Lexicographic order with a proper prefix before its extensions.
    fn cmp(&self, other: &BinWord) -> Ordering {
        let c = self.lcp(other);
        if c < self.len && c < other.len {
            self.get(c).cmp(&other.get(c))
        } else {
            self.len.cmp(&other.len)
        }
    }
}

impl PartialOrd for BinWord {
    fn partial_cmp(&self, other: &BinWord) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BinWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len > 4096 {
            // long words (t_2 has 2^24 bits) are summarized by their runs
            let mut runs: Vec<(bool, usize)> = Vec::new();
            for b in self.iter() {
                match runs.last_mut() {
                    Some((c, n)) if *c == b => *n += 1,
                    _ => runs.push((b, 1)),
                }
            }
            for (i, (b, n)) in runs.into_iter().enumerate() {
                let sep = if i == 0 { "" } else { " " };
                write!(f, "{sep}{}^{}", u8::from(b), n)?;
            }
            return Ok(());
        }
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "BinWord(∅)")
        } else {
            write!(f, "BinWord({self})")
        }
    }
}

impl FromStr for BinWord {
    type Err = Error;

    /// Accepts `0`/`1` characters; `_` separators are ignored and `∅` or the
    /// empty string denote the empty word.
    fn from_str(s: &str) -> Result<BinWord> {
        let mut w = BinWord::empty();
        if s.contains('^') {
            // run summary, as written by `Display` for long words
            for run in s.split_whitespace() {
                let bad = || Error::Parse(format!("bad run {run:?} in word"));
                let (b, n) = run.split_once('^').ok_or_else(bad)?;
                let b = match b {
                    "0" => false,
                    "1" => true,
                    _ => return Err(bad()),
                };
                let n: usize = n.parse().map_err(|_| bad())?;
                for _ in 0..n {
                    w.push(b);
                }
            }
            return Ok(w);
        }
        for c in s.trim().chars() {
            match c {
                '0' => w.push(false),
                '1' => w.push(true),
                '_' | '∅' => {}
                _ => return Err(Error::Parse(format!("bad bit {c:?} in word {s:?}"))),
            }
        }
        Ok(w)
    }
}

impl serde::Serialize for BinWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Shorthand used throughout the tests.
pub fn w(s: &str) -> BinWord {
    s.parse().expect("valid binary word literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_and_lcp() {
        assert!(w("01").is_prefix_of(&w("0110")));
        assert!(!w("011").is_prefix_of(&w("010")));
        assert_eq!(w("0110").lcp(&w("0100")), 2);
        assert!(BinWord::empty().is_prefix_of(&w("1")));
        let long = BinWord::zeros(200).child(true);
        assert_eq!(long.lcp(&BinWord::zeros(300)), 200);
        assert_eq!(long.prefix(130), BinWord::zeros(130));
    }

    #[test]
    fn lex_order() {
        let mut v = vec![w("1"), w("01"), w("0"), w(""), w("00"), w("011")];
        v.sort();
        assert_eq!(v, vec![w(""), w("0"), w("00"), w("01"), w("011"), w("1")]);
    }

    #[test]
    fn render_and_parse() {
        assert_eq!(w("0000_0000_0").to_string(), "000000000");
        assert_eq!(w("∅"), BinWord::empty());
        assert!("012".parse::<BinWord>().is_err());
        let long = BinWord::zeros(5000).child(true);
        assert_eq!(long.to_string(), "0^5000 1^1");
        assert_eq!(long.to_string().parse::<BinWord>().unwrap(), long);
        assert_eq!(w("1011").ones().collect::<Vec<_>>(), vec![0, 2, 3]);
    }
}
