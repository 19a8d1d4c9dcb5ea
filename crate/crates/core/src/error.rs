use thiserror::Error;

use crate::calculus::CalculusError;
use crate::knowledge::{Atom, KnowledgeError, TaxonomyPath};

/// Errors raised while answering a query.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferenceError {
    #[error(transparent)]
    Knowledge(#[from] KnowledgeError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error("taxonomy path {0} is not in the case library")]
    UnknownPath(TaxonomyPath),
    #[error("no precedent link for predicate {0}")]
    NoPrecedentLink(String),
    #[error("premise profiles differ in shape ({left} vs {right} clauses)")]
    ShapeMismatch { left: usize, right: usize },
    #[error("conflicting evidence for {goal}: paths {paths:?} aggregate to inverted [{lower}, {upper}]")]
    EvidenceConflict {
        goal: Atom,
        paths: Vec<String>,
        lower: f64,
        upper: f64,
    },
    #[error("conflicting sources for {goal}: {sources:?} fuse to inverted [{lower}, {upper}]")]
    SourceConflict {
        goal: Atom,
        sources: Vec<String>,
        lower: f64,
        upper: f64,
    },
    #[error("{goal} depends on itself")]
    Cycle { goal: Atom },
    #[error("proof of {goal} exceeded depth {depth}")]
    DepthExceeded { goal: Atom, depth: usize },
}

impl InferenceError {
    /// True for inverted-interval errors raised under the strict policy.
    pub fn is_conflict(&self) -> bool {
        matches!(
            self,
            InferenceError::EvidenceConflict { .. }
                | InferenceError::SourceConflict { .. }
                | InferenceError::Knowledge(KnowledgeError::SourceConflict { .. })
                | InferenceError::Calculus(
                    CalculusError::EvidenceConflict { .. } | CalculusError::SourceConflict { .. }
                )
        )
    }
}
