use std::sync::Arc;

use thiserror::Error;

use crate::pattern::ValidationError;
use crate::value::{Symbol, ValueError};

#[derive(Debug, Clone, Error)]
pub enum MatchError {
    #[error("Something can only match a variable or wildcard, got `{pattern}`")]
    SomethingPattern { pattern: String },

    #[error("value pattern reads `{0}` before it is bound (reorder the pattern or wrap it in `later`)")]
    UnboundValuePatternRef(Symbol),

    #[error("matcher {matcher} does not understand pattern `{pattern}`")]
    UnknownPatternConstructor { matcher: String, pattern: String },

    #[error("constructor `{constructor}` takes {expected} argument(s), got {found}")]
    ConstructorArity {
        constructor: String,
        expected: usize,
        found: usize,
    },

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("matcher {matcher}: expected {expected} target, found {found}")]
    TargetType {
        matcher: String,
        expected: &'static str,
        found: String,
    },

    #[error("variable `{0}` is bound twice")]
    DuplicateBinding(Symbol),

    #[error("matcher {matcher} received a value pattern that was never evaluated")]
    UnresolvedValuePattern { matcher: String },

    #[error("match result has no binding for `{0}`")]
    MissingResultVariable(Symbol),

    #[error(transparent)]
    Validation(#[from] ValidationError),

    #[error(transparent)]
    Value(#[from] ValueError),

    #[error("{0}")]
    External(Arc<dyn std::error::Error + Send + Sync>),

    #[error("search cancelled")]
    Cancelled,

    #[error("{source} (while matching {atom})")]
    InAtom {
        atom: String,
        #[source]
        source: Box<MatchError>,
    },
}

impl MatchError {
    pub fn external<E: std::error::Error + Send + Sync + 'static>(err: E) -> Self {
        MatchError::External(Arc::new(err))
    }

    /// The underlying error with any atom context stripped.
    pub fn root(&self) -> &MatchError {
        match self {
            MatchError::InAtom { source, .. } => source.root(),
            other => other,
        }
    }

    /// Attaches the atom being reduced, keeping only the innermost one.
    pub(crate) fn in_atom(self, atom: impl FnOnce() -> String) -> Self {
        match self {
            e @ MatchError::InAtom { .. } => e,
            e @ MatchError::Cancelled => e,
            e => MatchError::InAtom {
                atom: atom(),
                source: Box::new(e),
            },
        }
    }
}
