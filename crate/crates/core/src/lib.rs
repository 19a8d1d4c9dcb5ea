//! Possibilistic reasoning over rules and precedent cases.
//!
//! Beliefs are certainty intervals `[L, U]` combined with a family of
//! triangular norms. Rules and retrieved precedent cases are two sources of
//! support for a conclusion; both are aggregated by the same calculus.

pub mod calculus;
pub mod demo;
pub mod cbr;
pub mod cli;
pub mod dsl;
pub mod engine;
pub mod error;
pub mod knowledge;
pub mod revision;

pub use calculus::{CertaintyInterval, ConflictPolicy, TNormFamily};
pub use error::InferenceError;
pub use knowledge::{Atom, KnowledgeBase, World};
