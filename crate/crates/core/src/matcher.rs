//! Matchers as functions.
//!
//! A matcher takes a pattern and a target and enumerates the ways to continue:
//! each item is a list of [`MatchingAtom`]s that replaces the atom being
//! reduced on the matching-state stack. An empty enumeration means failure,
//! a single empty list means success with nothing left to do. `Something` is
//! the one matcher the engine interprets itself; it is the only way a value
//! gets bound to a variable.

use std::fmt;
use std::sync::{Arc, OnceLock, Weak};

use crate::engine::{match_first, MatchClause};
use crate::error::MatchError;
use crate::pattern::{Pattern, PatternKind};
use crate::value::{lazy_splits, lazy_tails, value_equal, List, Value};

pub type AtomList = Vec<MatchingAtom>;

/// Lazy enumeration of next-atom lists produced by a matcher.
pub type AtomLists = Box<dyn Iterator<Item = Result<AtomList, MatchError>> + Send>;

type MatchFn = dyn Fn(&Pattern, &Value) -> Result<AtomLists, MatchError> + Send + Sync;

/// A pending obligation: match `target` against `pattern` using `matcher`.
#[derive(Clone)]
pub struct MatchingAtom {
    pub pattern: Pattern,
    pub matcher: Matcher,
    pub target: Value,
}

impl MatchingAtom {
    pub fn new(pattern: Pattern, matcher: Matcher, target: Value) -> Self {
        MatchingAtom {
            pattern,
            matcher,
            target,
        }
    }
}

impl fmt::Display for MatchingAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} {} {}]", self.pattern, self.matcher.name(), self.target)
    }
}

impl fmt::Debug for MatchingAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone)]
pub enum Matcher {
    Something,
    Custom(Arc<MatcherFn>),
}

pub struct MatcherFn {
    name: String,
    func: Box<MatchFn>,
}

impl MatcherFn {
    pub fn name(&self) -> &str {
        &self.name
    }
}

impl Matcher {
    pub fn name(&self) -> &str {
        match self {
            Matcher::Something => "Something",
            Matcher::Custom(m) => &m.name,
        }
    }

    pub fn is_something(&self) -> bool {
        matches!(self, Matcher::Something)
    }

    pub fn ptr_eq(&self, other: &Matcher) -> bool {
        match (self, other) {
            (Matcher::Something, Matcher::Something) => true,
            (Matcher::Custom(a), Matcher::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }

    /// Runs the matcher function. `Something` has none: the engine handles it.
    pub fn apply(&self, pattern: &Pattern, target: &Value) -> Result<AtomLists, MatchError> {
        match self {
            Matcher::Something => Err(MatchError::SomethingPattern {
                pattern: pattern.to_string(),
            }),
            Matcher::Custom(m) => (m.func)(pattern, target),
        }
    }

    fn from_cyclic<F>(name: String, build: impl FnOnce(Weak<MatcherFn>) -> F) -> Matcher
    where
        F: Fn(&Pattern, &Value) -> Result<AtomLists, MatchError> + Send + Sync + 'static,
    {
        Matcher::Custom(Arc::new_cyclic(|weak| MatcherFn {
            name,
            func: Box::new(build(weak.clone())),
        }))
    }
}

impl fmt::Debug for Matcher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn upgrade(weak: &Weak<MatcherFn>) -> Matcher {
    Matcher::Custom(weak.upgrade().expect("matcher invoked after being dropped"))
}

// ---------------------------------------------------------------------------
// Enumeration helpers
// ---------------------------------------------------------------------------

/// No way to continue: the match fails.
pub fn fail() -> AtomLists {
    Box::new(std::iter::empty())
}

/// Exactly one way to continue.
pub fn one(atoms: AtomList) -> AtomLists {
    Box::new(std::iter::once(Ok(atoms)))
}

/// Success with nothing left to match.
pub fn succeed() -> AtomLists {
    one(Vec::new())
}

pub fn from_vec(lists: Vec<AtomList>) -> AtomLists {
    Box::new(lists.into_iter().map(Ok))
}

fn succeed_if(ok: bool) -> AtomLists {
    if ok {
        succeed()
    } else {
        fail()
    }
}

/// Hand a variable or wildcard over to `Something`.
fn delegate(p: &Pattern, t: &Value) -> AtomLists {
    one(vec![MatchingAtom::new(p.clone(), Matcher::Something, t.clone())])
}

fn unknown(matcher: &str, p: &Pattern) -> MatchError {
    MatchError::UnknownPatternConstructor {
        matcher: matcher.to_string(),
        pattern: p.to_string(),
    }
}

fn resolved_value<'a>(matcher: &str, p: &'a Pattern) -> Result<&'a Value, MatchError> {
    match p.kind() {
        PatternKind::Value(vp) => vp.resolved().ok_or_else(|| MatchError::UnresolvedValuePattern {
            matcher: matcher.to_string(),
        }),
        _ => unreachable!("resolved_value on a non-value pattern"),
    }
}

fn check_arity(name: &str, args: &[Pattern], expected: usize) -> Result<(), MatchError> {
    if args.len() == expected {
        Ok(())
    } else {
        Err(MatchError::ConstructorArity {
            constructor: name.to_string(),
            expected,
            found: args.len(),
        })
    }
}

// ---------------------------------------------------------------------------
// Built-in matchers
// ---------------------------------------------------------------------------

pub fn something() -> Matcher {
    Matcher::Something
}

/// Matches value patterns by structural equality and nothing else.
pub fn eq_matcher() -> Matcher {
    static EQ: OnceLock<Matcher> = OnceLock::new();
    EQ.get_or_init(|| {
        Matcher::from_cyclic("Eq".to_string(), |_| {
            |p: &Pattern, t: &Value| match p.kind() {
                PatternKind::Value(_) => {
                    let v = resolved_value("Eq", p)?;
                    Ok(succeed_if(value_equal(v, t)?))
                }
                PatternKind::Var(_) | PatternKind::Wildcard => Ok(delegate(p, t)),
                _ => Err(unknown("Eq", p)),
            }
        })
    })
    .clone()
}

/// Like [`eq_matcher`], but value patterns only compare integers.
pub fn integer_matcher() -> Matcher {
    static INTEGER: OnceLock<Matcher> = OnceLock::new();
    INTEGER
        .get_or_init(|| {
            Matcher::from_cyclic("Integer".to_string(), |_| {
                |p: &Pattern, t: &Value| match p.kind() {
                    PatternKind::Value(_) => {
                        let v = resolved_value("Integer", p)?;
                        for x in [t, v] {
                            if !matches!(x, Value::Int(_)) {
                                return Err(MatchError::TargetType {
                                    matcher: "Integer".to_string(),
                                    expected: "integer",
                                    found: x.kind_name().to_string(),
                                });
                            }
                        }
                        Ok(succeed_if(value_equal(v, t)?))
                    }
                    PatternKind::Var(_) | PatternKind::Wildcard => Ok(delegate(p, t)),
                    _ => Err(unknown("Integer", p)),
                }
            })
        })
        .clone()
}

/// Component-wise matcher for fixed-arity tuples. Finite lists are accepted
/// as tuple targets too.
pub fn tuple_matcher(components: Vec<Matcher>) -> Matcher {
    let name = format!(
        "[{}]",
        components.iter().map(|m| m.name().to_string()).collect::<Vec<_>>().join(" ")
    );
    let label = name.clone();
    Matcher::from_cyclic(name, move |_| {
        move |p: &Pattern, t: &Value| {
            let elements = |t: &Value| -> Result<Vec<Value>, MatchError> {
                match t {
                    Value::Tuple(items) => Ok(items.to_vec()),
                    Value::List(items) => Ok(items.to_vec()),
                    other => Err(MatchError::TargetType {
                        matcher: label.clone(),
                        expected: "tuple",
                        found: other.kind_name().to_string(),
                    }),
                }
            };
            let arity = |found: usize| -> Result<(), MatchError> {
                if found == components.len() {
                    Ok(())
                } else {
                    Err(MatchError::ArityMismatch {
                        expected: components.len(),
                        found,
                    })
                }
            };
            match p.kind() {
                PatternKind::Tuple(args) => {
                    arity(args.len())?;
                    let items = elements(t)?;
                    arity(items.len())?;
                    Ok(one(args
                        .iter()
                        .zip(components.iter())
                        .zip(items)
                        .map(|((a, m), x)| MatchingAtom::new(a.clone(), m.clone(), x))
                        .collect()))
                }
                PatternKind::Value(vp) => {
                    let v = resolved_value(&label, p)?;
                    let want = elements(v)?;
                    let items = elements(t)?;
                    if want.len() != items.len() || items.len() != components.len() {
                        return Ok(fail());
                    }
                    Ok(one(want
                        .into_iter()
                        .zip(components.iter())
                        .zip(items)
                        .map(|((w, m), x)| MatchingAtom::new(Pattern::value(vp.resolve(w)), m.clone(), x))
                        .collect()))
                }
                PatternKind::Var(_) | PatternKind::Wildcard => Ok(delegate(p, t)),
                _ => Err(unknown(&label, p)),
            }
        }
    })
}

/// Which clause set a collection matcher uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Clauses {
    /// Includes the wildcard shortcuts (`(cons p _)` on multisets,
    /// `(join _ p)` on lists) and defers building multiset remainders.
    #[default]
    Optimized,
    /// Only the general clauses; every multiset remainder is built eagerly.
    Naive,
}

/// Lists: `nil`, `cons`, `join`. Streams are accepted wherever lists are.
pub fn list_matcher(element: Matcher) -> Matcher {
    list_matcher_with(element, Clauses::Optimized)
}

pub fn list_matcher_with(element: Matcher, clauses: Clauses) -> Matcher {
    let name = format!("(List {})", element.name());
    let label = name.clone();
    Matcher::from_cyclic(name, move |weak| {
        move |p: &Pattern, t: &Value| {
            let type_error = || MatchError::TargetType {
                matcher: label.clone(),
                expected: "list",
                found: t.kind_name().to_string(),
            };
            if !t.is_sequence() {
                return match p.kind() {
                    PatternKind::Var(_) | PatternKind::Wildcard => Ok(delegate(p, t)),
                    _ => Err(type_error()),
                };
            }
            match p.kind() {
                PatternKind::Constructor { name, args } => match name.as_str() {
                    "nil" => {
                        check_arity("nil", args, 0)?;
                        Ok(succeed_if(match t {
                            Value::List(l) => l.is_empty(),
                            Value::Lazy(s) => s.is_end(),
                            _ => unreachable!(),
                        }))
                    }
                    "cons" => {
                        check_arity("cons", args, 2)?;
                        let split = match t {
                            Value::List(l) => l.first().map(|h| (h.clone(), Value::List(l.tail().unwrap()))),
                            Value::Lazy(s) => match s.head() {
                                Some(h) => Some((h.clone(), Value::Lazy(s.tail().map_err(crate::value::ValueError::from)?))),
                                None => None,
                            },
                            _ => unreachable!(),
                        };
                        Ok(match split {
                            None => fail(),
                            Some((head, tail)) => one(vec![
                                MatchingAtom::new(args[0].clone(), element.clone(), head),
                                MatchingAtom::new(args[1].clone(), upgrade(&weak), tail),
                            ]),
                        })
                    }
                    "join" => {
                        check_arity("join", args, 2)?;
                        let this = upgrade(&weak);
                        let (px, py) = (args[0].clone(), args[1].clone());
                        if clauses == Clauses::Optimized && px.is_wildcard() {
                            Ok(Box::new(lazy_tails(t)?.map(move |suffix| {
                                Ok(vec![MatchingAtom::new(py.clone(), this.clone(), suffix?)])
                            })))
                        } else {
                            Ok(Box::new(lazy_splits(t)?.map(move |split| {
                                let (h, rest) = split?;
                                Ok(vec![
                                    MatchingAtom::new(px.clone(), this.clone(), h),
                                    MatchingAtom::new(py.clone(), this.clone(), rest),
                                ])
                            })))
                        }
                    }
                    _ => Err(unknown(&label, p)),
                },
                PatternKind::Value(_) => {
                    let v = resolved_value(&label, p)?;
                    Ok(succeed_if(value_equal(v, t)?))
                }
                PatternKind::Var(_) | PatternKind::Wildcard => Ok(delegate(p, t)),
                _ => Err(unknown(&label, p)),
            }
        }
    })
}

/// Multisets: `nil` and `cons`, where `cons` picks any element.
pub fn multiset_matcher(element: Matcher) -> Matcher {
    multiset_matcher_with(element, Clauses::Optimized)
}

pub fn multiset_matcher_with(element: Matcher, clauses: Clauses) -> Matcher {
    let name = format!("(Multiset {})", element.name());
    let label = name.clone();
    let as_list = list_matcher_with(element.clone(), clauses);
    Matcher::from_cyclic(name, move |weak| {
        move |p: &Pattern, t: &Value| {
            let list = match t {
                Value::List(l) => l.clone(),
                other => {
                    return match p.kind() {
                        PatternKind::Var(_) | PatternKind::Wildcard => Ok(delegate(p, t)),
                        _ => Err(MatchError::TargetType {
                            matcher: label.clone(),
                            expected: "list",
                            found: other.kind_name().to_string(),
                        }),
                    }
                }
            };
            match p.kind() {
                PatternKind::Constructor { name, args } => match name.as_str() {
                    "nil" => {
                        check_arity("nil", args, 0)?;
                        Ok(succeed_if(list.is_empty()))
                    }
                    "cons" => {
                        check_arity("cons", args, 2)?;
                        let (px, py) = (args[0].clone(), args[1].clone());
                        let element = element.clone();
                        if clauses == Clauses::Optimized && py.is_wildcard() {
                            return Ok(Box::new((0..list.len()).map(move |i| {
                                Ok(vec![MatchingAtom::new(px.clone(), element.clone(), list.as_slice()[i].clone())])
                            })));
                        }
                        let this = upgrade(&weak);
                        Ok(Box::new((0..list.len()).map(move |i| {
                            let rest = match clauses {
                                Clauses::Optimized => list.without_deferred(i),
                                Clauses::Naive => list.without(i),
                            };
                            Ok(vec![
                                MatchingAtom::new(px.clone(), element.clone(), list.as_slice()[i].clone()),
                                MatchingAtom::new(py.clone(), this.clone(), Value::List(rest)),
                            ])
                        })))
                    }
                    _ => Err(unknown(&label, p)),
                },
                PatternKind::Value(_) => {
                    let v = resolved_value(&label, p)?;
                    let equal = multiset_equal(&as_list, &upgrade(&weak), &list, v)?;
                    Ok(succeed_if(equal))
                }
                PatternKind::Var(_) | PatternKind::Wildcard => Ok(delegate(p, t)),
                _ => Err(unknown(&label, p)),
            }
        }
    })
}

/// Multiset equality by recursive pairing: walk `target` as a list and find
/// each head somewhere in `value` (compared with the element matcher), then
/// compare the remainders the same way.
fn multiset_equal(as_list: &Matcher, this: &Matcher, target: &List, value: &Value) -> Result<bool, MatchError> {
    if !matches!(value, Value::List(_)) {
        return Ok(false);
    }
    static CLAUSES: OnceLock<Vec<MatchClause>> = OnceLock::new();
    let clauses = CLAUSES.get_or_init(|| {
        let yes = |_: &[Value]| Ok(Value::Bool(true));
        let no = |_: &[Value]| Ok(Value::Bool(false));
        vec![
            MatchClause::new(Pattern::tuple(vec![Pattern::nil(), Pattern::nil()]), yes)
                .expect("valid pattern"),
            MatchClause::new(
                Pattern::tuple(vec![
                    Pattern::cons(Pattern::var("x"), Pattern::var("xs")),
                    Pattern::cons(Pattern::value_of("x"), Pattern::value_of("xs")),
                ]),
                yes,
            )
            .expect("valid pattern"),
            MatchClause::new(Pattern::tuple(vec![Pattern::wildcard(), Pattern::wildcard()]), no)
                .expect("valid pattern"),
        ]
    });
    let pair = Value::tuple([Value::List(target.clone()), value.clone()]);
    let matcher = tuple_matcher(vec![as_list.clone(), this.clone()]);
    Ok(matches!(match_first(&pair, &matcher, clauses)?, Some(Value::Bool(true))))
}

/// Wraps a user function as a matcher usable anywhere a built-in one is.
/// The function must be pure: the same pattern and target always produce
/// the same enumeration.
pub fn register_matcher_extension<F>(name: impl Into<String>, f: F) -> Matcher
where
    F: Fn(&Pattern, &Value) -> Result<AtomLists, MatchError> + Send + Sync + 'static,
{
    Matcher::Custom(Arc::new(MatcherFn {
        name: name.into(),
        func: Box::new(f),
    }))
}

/// Like [`register_matcher_extension`], for matchers that need to refer to
/// themselves (e.g. to match the rest of a collection with the same matcher).
pub fn register_recursive_matcher<F>(name: impl Into<String>, build: impl FnOnce(WeakMatcher) -> F) -> Matcher
where
    F: Fn(&Pattern, &Value) -> Result<AtomLists, MatchError> + Send + Sync + 'static,
{
    Matcher::from_cyclic(name.into(), |weak| build(WeakMatcher(weak)))
}

/// Handle a recursive matcher holds on itself.
#[derive(Clone)]
pub struct WeakMatcher(Weak<MatcherFn>);

impl WeakMatcher {
    pub fn get(&self) -> Matcher {
        upgrade(&self.0)
    }
}
