//! Executable check suites, one per family of finitary statements. Every
//! suite returns a [`SuiteReport`](crate::report::SuiteReport) and runs its
//! per-item work through [`Exec`](crate::exec::Exec).

pub mod family;
pub mod graphs;
pub mod oracles;
pub mod shrink;
pub mod stages;
pub mod theta;

pub use family::{composition_suite, condition_d_suite, CompositionConfig, ConditionDConfig};
pub use graphs::{duplication_suite, path_lemma_suite, DuplicationConfig};
pub use theta::{decreasing_seqs, increasing_seqs, theta_suite, ThetaConfig};
