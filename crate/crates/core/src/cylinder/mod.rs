//! Points and clopen sets of Cantor space `2^ω`.
//!
//! The metric is the standard ultrametric `d(α, β) = 2^{-min{i | α(i) ≠ β(i)}}`,
//! so the diameter of a nonempty clopen is `2^{-m}` for the first coordinate
//! `m` on which it admits both values.

pub mod clopen;
pub mod point;
pub mod union;

pub use clopen::{coord, Atom, ClopenBuilder, Dyadic, SymbolicClopen, Term};
pub use point::{Derivation, LazyPoint};
pub use union::{assignments, holds_on, Algebra, ClopenUnion, DEFAULT_MAX_FREE_COORDS};
