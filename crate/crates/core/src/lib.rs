//! Exact finitary machinery for the digraph family 𝔾_L on Cantor space.
//!
//! The crate covers the index arithmetic behind the maps `g_n^L`, a symbolic
//! algebra of clopen subsets of `2^ω`, finite unambiguously oriented graphs
//! and their labeled duplication, the staged approximation system
//! `(X_l, B_l, A_l, E_l)` and the finite-depth Cantor scheme that builds an
//! injective homomorphism on the reference instance. Every statement that
//! the machinery relies on is exposed as a check suite (see [`suites`]).

pub mod approx;
pub mod cylinder;
pub mod digraph;
pub mod error;
pub mod exec;
pub mod homo;
pub mod index;
pub mod report;
pub mod seq;
pub mod suites;
pub mod uogas;
pub mod word;

pub use cylinder::{ClopenUnion, LazyPoint, SymbolicClopen};
pub use digraph::{Family, PathSpec, Tri};
pub use error::{Error, Result};
pub use exec::Exec;
pub use index::Index;
pub use seq::{FamilyLevel, ThetaRule};
pub use word::BinWord;
