//! Points of `2^ω` evaluated lazily, one coordinate at a time.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::index::Index;
use crate::seq::{is_pow2_q, pow2_q_u64, ThetaRule};
use crate::word::BinWord;

/// How a point's non-explicit coordinates are derived from another point.
#[derive(Clone, Debug)]
pub enum Derivation {
    /// `g_n(source)`: `1` at `2^{q_n}`, else `source(θ_n(k))`.
    Image { rule: ThetaRule, n: usize, source: LazyPoint },
    /// A point `α` with `g_n(α) = target`: coordinate `θ_n(k)` reads
    /// `target(k)` for `k ≠ 2^{q_n}`; every other coordinate reads the
    /// default.
    Preimage { rule: ThetaRule, n: usize, target: LazyPoint },
}

/// An element of `2^ω`: explicit bits, then the derivation, then the default.
#[derive(Clone, Default)]
pub struct LazyPoint {
    explicit: Arc<BTreeMap<Index, bool>>,
    default: bool,
    derivation: Option<Arc<Derivation>>,
}

impl LazyPoint {
    pub fn constant(b: bool) -> LazyPoint {
        LazyPoint { default: b, ..LazyPoint::default() }
    }

    pub fn zeros() -> LazyPoint {
        LazyPoint::constant(false)
    }

    /// `w` followed by a constant tail.
    pub fn from_word(w: &BinWord, tail: bool) -> LazyPoint {
        let mut p = LazyPoint::constant(tail);
        for i in 0..w.len() {
            if w.get(i) != tail {
                Arc::make_mut(&mut p.explicit).insert(Index::from(i), w.get(i));
            }
        }
        p
    }

    pub fn derived(d: Derivation, default: bool) -> LazyPoint {
        LazyPoint { explicit: Arc::default(), default, derivation: Some(Arc::new(d)) }
    }

    pub fn set(&mut self, k: impl Into<Index>, b: bool) {
        Arc::make_mut(&mut self.explicit).insert(k.into(), b);
    }

    pub fn with(mut self, k: impl Into<Index>, b: bool) -> LazyPoint {
        self.set(k, b);
        self
    }

    pub fn explicit(&self) -> &BTreeMap<Index, bool> {
        &self.explicit
    }

    pub fn default_bit(&self) -> bool {
        self.default
    }

    pub fn derivation(&self) -> Option<&Derivation> {
        self.derivation.as_deref()
    }

    /// No derivation: explicit bits over a constant tail.
    pub fn is_simple(&self) -> bool {
        self.derivation.is_none()
    }

    pub fn eval(&self, k: &Index) -> bool {
        if let Some(&b) = self.explicit.get(k) {
            return b;
        }
        match self.derivation.as_deref() {
            None => self.default,
            Some(Derivation::Image { rule, n, source }) => is_pow2_q(*n, k) || source.eval(&rule.theta_n(*n, k)),
            Some(Derivation::Preimage { rule, n, target }) => match rule.theta_n_inv(*n, k) {
                Some(j) if !is_pow2_q(*n, &j) => target.eval(&j),
                _ => self.default,
            },
        }
    }

    pub fn eval_u64(&self, k: u64) -> bool {
        self.eval(&Index::from(k))
    }

    /// The first `len` coordinates.
    pub fn prefix(&self, len: usize) -> BinWord {
        BinWord::from_bits((0..len as u64).map(|k| self.eval_u64(k)))
    }

    /// Whether the point lies in the cylinder `N_w`.
    pub fn in_cylinder(&self, w: &BinWord) -> bool {
        if !self.is_simple() {
            return self.in_cylinder_derived(w);
        }
        for (k, &b) in self.explicit.range(..Index::from(w.len())) {
            if w.get(k.to_u64().unwrap() as usize) != b {
                return false;
            }
        }
        // the remaining coordinates read the default
        let differs = |i: usize| !self.explicit.contains_key(&Index::from(i));
        if self.default {
            (0..w.len()).filter(|&i| !w.get(i)).all(|i| !differs(i))
        } else {
            w.ones().all(|i| !differs(i))
        }
    }

    fn in_cylinder_derived(&self, w: &BinWord) -> bool {
        // below 2^{q_n} an image point copies its source, so long words are
        // delegated instead of evaluated bit by bit
        if let Some(Derivation::Image { n, source, .. }) = self.derivation.as_deref() {
            if self.explicit.is_empty() {
                let p = pow2_q_u64(*n).map_or(usize::MAX, |p| p as usize);
                let cut = w.len().min(p);
                if cut > 4096 {
                    return source.in_cylinder(&w.prefix(cut)) && (cut..w.len()).all(|i| self.eval_u64(i as u64) == w.get(i));
                }
            }
        }
        (0..w.len()).all(|i| self.eval_u64(i as u64) == w.get(i))
    }
}

impl fmt::Debug for LazyPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits: Vec<String> = self.explicit.iter().map(|(k, b)| format!("{k}:{}", u8::from(*b))).collect();
        write!(f, "LazyPoint{{{}; default {}", bits.join(","), u8::from(self.default))?;
        match self.derivation.as_deref() {
            Some(Derivation::Image { n, .. }) => write!(f, "; image under g_{n}}}"),
            Some(Derivation::Preimage { n, .. }) => write!(f, "; preimage under g_{n}}}"),
            None => write!(f, "}}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::w;

    #[test]
    fn evaluation_order() {
        let p = LazyPoint::zeros();
        assert!(!p.eval(&Index::from(1_000_000_000u64)));
        let p = p.with(5u64, true);
        assert!(p.eval_u64(5));
        assert!(!p.eval_u64(6));
    }

    #[test]
    fn cylinders() {
        let p = LazyPoint::from_word(&w("0100"), false);
        assert!(p.in_cylinder(&w("01")));
        assert!(!LazyPoint::zeros().in_cylinder(&w("01")));
        let ones = LazyPoint::constant(true).with(0u64, false);
        assert!(ones.in_cylinder(&w("0111")));
        assert!(!ones.in_cylinder(&w("0110")));
    }
}
