//! List functions defined by a single `match-all` each.

use nfmatch::{eq_matcher, list_matcher, match_all, something, MatchClause, MatchError, Pattern, Value};

fn join_cons(p: Pattern) -> Pattern {
    Pattern::join(Pattern::wildcard(), Pattern::cons(p, Pattern::wildcard()))
}

fn collect(target: &Value, matcher: nfmatch::Matcher, clause: MatchClause) -> Result<Value, MatchError> {
    Ok(Value::list(match_all(target, &matcher, &[clause])?))
}

/// `f` applied to every element, via `(join _ (cons x _))`.
pub fn pm_map<F>(f: F, xs: &Value) -> Result<Value, MatchError>
where
    F: Fn(&Value) -> Result<Value, MatchError> + Send + Sync + 'static,
{
    let clause = MatchClause::new(join_cons(Pattern::var("x")), move |b| f(&b[0])).expect("valid pattern");
    collect(xs, list_matcher(something()), clause)
}

/// Flattens one level of nesting.
pub fn pm_concat(xss: &Value) -> Result<Value, MatchError> {
    let clause = MatchClause::new(join_cons(join_cons(Pattern::var("x"))), |b| Ok(b[0].clone())).expect("valid pattern");
    collect(xss, list_matcher(list_matcher(something())), clause)
}

/// Keeps the last occurrence of each element.
pub fn pm_unique_simple(xs: &Value) -> Result<Value, MatchError> {
    let p = Pattern::join(
        Pattern::wildcard(),
        Pattern::cons(Pattern::var("x"), Pattern::not(join_cons(Pattern::value_of("x")))),
    );
    let clause = MatchClause::new(p, |b| Ok(b[0].clone())).expect("valid pattern");
    collect(xs, list_matcher(eq_matcher()), clause)
}

/// Keeps the first occurrence of each element.
pub fn pm_unique(xs: &Value) -> Result<Value, MatchError> {
    let p = Pattern::join(
        Pattern::later(Pattern::not(join_cons(Pattern::value_of("x")))),
        Pattern::cons(Pattern::var("x"), Pattern::wildcard()),
    );
    let clause = MatchClause::new(p, |b| Ok(b[0].clone())).expect("valid pattern");
    collect(xs, list_matcher(eq_matcher()), clause)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_examples() {
        let add10 = |x: &Value| Ok(Value::Int(x.as_int()? + 10));
        assert_eq!(pm_map(add10, &Value::ints([1, 2, 3, 4])).unwrap(), Value::ints([11, 12, 13, 14]));
        let xss = Value::list([Value::ints([1, 2]), Value::ints([3]), Value::ints([4, 5])]);
        assert_eq!(pm_concat(&xss).unwrap(), Value::ints([1, 2, 3, 4, 5]));
        let xs = Value::ints([1, 2, 3, 2, 4]);
        assert_eq!(pm_unique_simple(&xs).unwrap(), Value::ints([1, 3, 2, 4]));
        assert_eq!(pm_unique(&xs).unwrap(), Value::ints([1, 2, 3, 4]));
    }

    #[test]
    fn empty_inputs() {
        let empty = Value::empty_list();
        assert_eq!(pm_concat(&empty).unwrap(), empty);
        assert_eq!(pm_unique(&empty).unwrap(), empty);
    }
}
