//! Non-linear pattern matching with backtracking for non-free data types.
//!
//! Patterns ([`Pattern`]) are matched against dynamic [`Value`]s through
//! [`Matcher`]s: functions from a pattern and a target to the ways the match
//! can continue. Multisets, lists, tuples and user-defined collections all
//! plug in the same way.
//!
//! ```
//! use nfmatch::{match_all, multiset_matcher, integer_matcher, MatchClause, Pattern, Value};
//!
//! // Every element x with an x + 1 somewhere else in the multiset.
//! let p = Pattern::cons(
//!     Pattern::var("x"),
//!     Pattern::cons(
//!         Pattern::value_fn(&["x"], |env| Ok(Value::Int(env.lookup("x").unwrap().as_int()? + 1))),
//!         Pattern::wildcard(),
//!     ),
//! );
//! let clause = MatchClause::new(p, |xs| Ok(xs[0].clone())).unwrap();
//! let got = match_all(&Value::ints([1, 2, 5, 9, 4]), &multiset_matcher(integer_matcher()), &[clause]).unwrap();
//! assert_eq!(got, vec![Value::Int(1), Value::Int(4)]);
//! ```

pub mod engine;
pub mod error;
pub mod matcher;
pub mod pattern;
pub mod value;

pub use engine::{
    gen_match_results, match_all, match_all_cancellable, match_first, process_matching_state,
    process_matching_states_all, process_matching_states_first, stream_match_all, CancelToken, DepthFirst,
    Dovetail, MatchClause, MatchingState, StreamMatches,
};
pub use error::MatchError;
pub use matcher::{
    eq_matcher, integer_matcher, list_matcher, list_matcher_with, multiset_matcher, multiset_matcher_with,
    register_matcher_extension, register_recursive_matcher, something, tuple_matcher, AtomList, AtomLists,
    Clauses, Matcher, MatchingAtom, WeakMatcher,
};
pub use pattern::{
    eval_value_pattern, extract_pattern_variables, validate_pattern, BindingEnv, Pattern, PatternKind,
    ValidationError, ValidationReason, ValuePattern,
};
pub use value::{
    lazy_tails, tails, unjoin, value_equal, value_equal_with_budget, LazySeq, List, Opaque, StreamError, Symbol,
    Value, ValueError, DEFAULT_FORCE_BUDGET,
};
