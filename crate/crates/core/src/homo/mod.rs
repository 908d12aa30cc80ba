//! Mapping tuples over a concrete instance, the refinement procedures and
//! the finite-depth scheme.

pub mod instance;
pub mod lemma2;
pub mod scheme;
pub mod shrink;
pub mod tuple;

pub use instance::{ComplexInstance, ReferenceInstance};
pub use lemma2::{lemma25_check, lemma26_find, Lemma26};
pub use scheme::{build_scheme, check_scheme, h_eval, scheme_instance, SchemeOptions, SchemeState, SCHEME_MAX_FREE_COORDS};
pub use shrink::{shrink_47, shrink_47_hinted, verify_47, Hints, Strategy, Used};
pub use tuple::{in_e, in_u, refine_45, refine_46, Assignment};
