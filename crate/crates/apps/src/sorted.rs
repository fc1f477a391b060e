//! A matcher for ascending integer lists.
//!
//! `(cons p rest)` picks any element for `p` and matches `rest` against the
//! elements after it. When `p` is a value pattern the element is found by
//! binary search instead of a scan, so a chain of value-pattern conses
//! costs a logarithmic factor per step rather than a linear one.

use nfmatch::matcher::{fail, one};
use nfmatch::{
    integer_matcher, register_matcher_extension, register_recursive_matcher, something, AtomLists, List, MatchError,
    Matcher, MatchingAtom, Pattern, PatternKind, Value,
};

fn sorted_list(t: &Value) -> Result<&List, MatchError> {
    match t {
        Value::List(l) => Ok(l),
        other => Err(MatchError::TargetType {
            matcher: "SortedList".to_string(),
            expected: "list",
            found: other.kind_name().to_string(),
        }),
    }
}

/// Positions of `v` in the ascending `items`.
fn positions(items: &[Value], v: i64) -> Result<std::ops::Range<usize>, MatchError> {
    let key = |x: &Value| x.as_int().map_err(MatchError::from);
    let mut lo = 0;
    let mut hi = items.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        if key(&items[mid])? < v {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    let start = lo;
    hi = items.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        if key(&items[mid])? <= v {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    Ok(start..lo)
}

/// Every `(cons ,v rest)` split of `list`, with `v` known.
fn splits_at_value(list: &List, v: &Value, rest: &Pattern, this: &Matcher) -> Result<AtomLists, MatchError> {
    let v = v.as_int()?;
    let range = positions(list.as_slice(), v)?;
    let (list, rest, this) = (list.clone(), rest.clone(), this.clone());
    Ok(Box::new(range.map(move |i| {
        Ok(vec![MatchingAtom::new(rest.clone(), this.clone(), Value::List(list.slice(i + 1, list.len())))])
    })))
}

/// Ascending lists of integers, with `nil` and `cons`.
pub fn sorted_list_matcher() -> Matcher {
    register_recursive_matcher("SortedList", |weak| {
        move |p: &Pattern, t: &Value| -> Result<AtomLists, MatchError> {
            match p.kind() {
                PatternKind::Var(_) | PatternKind::Wildcard => {
                    Ok(one(vec![MatchingAtom::new(p.clone(), something(), t.clone())]))
                }
                PatternKind::Value(vp) => {
                    let v = vp.resolved().ok_or_else(|| MatchError::UnresolvedValuePattern {
                        matcher: "SortedList".to_string(),
                    })?;
                    Ok(if nfmatch::value_equal(v, t)? { one(vec![]) } else { fail() })
                }
                PatternKind::Constructor { name, args } => {
                    let list = sorted_list(t)?;
                    match (name.as_str(), &args[..]) {
                        ("nil", []) => Ok(if list.is_empty() { one(vec![]) } else { fail() }),
                        ("cons", [head, rest]) => {
                            let this = weak.get();
                            if let PatternKind::Value(vp) = head.kind() {
                                if let Some(v) = vp.resolved() {
                                    return splits_at_value(list, v, rest, &this);
                                }
                                // The engine evaluates a value pattern handed to a
                                // custom matcher, so defer the search to a matcher
                                // that receives the evaluated head.
                                let (rest, list) = (rest.clone(), list.clone());
                                let find = register_matcher_extension("SortedList/find", move |p, _| match p.kind() {
                                    PatternKind::Value(vp) => {
                                        let v = vp.resolved().expect("evaluated by the engine");
                                        splits_at_value(&list, v, &rest, &this)
                                    }
                                    _ => unreachable!("only value patterns are routed here"),
                                });
                                return Ok(one(vec![MatchingAtom::new(head.clone(), find, t.clone())]));
                            }
                            let (head, rest, list) = (head.clone(), rest.clone(), list.clone());
                            let only_head = rest.is_wildcard();
                            Ok(Box::new((0..list.len()).map(move |i| {
                                let x = list.as_slice()[i].clone();
                                let mut atoms = vec![MatchingAtom::new(head.clone(), integer_matcher(), x)];
                                if !only_head {
                                    atoms.push(MatchingAtom::new(
                                        rest.clone(),
                                        this.clone(),
                                        Value::List(list.slice(i + 1, list.len())),
                                    ));
                                }
                                Ok(atoms)
                            })))
                        }
                        _ => Err(MatchError::UnknownPatternConstructor {
                            matcher: "SortedList".to_string(),
                            pattern: p.to_string(),
                        }),
                    }
                }
                _ => Err(MatchError::UnknownPatternConstructor {
                    matcher: "SortedList".to_string(),
                    pattern: p.to_string(),
                }),
            }
        }
    })
}
