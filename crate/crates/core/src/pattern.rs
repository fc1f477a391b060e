//! Pattern AST, binding environments and the static analyses match
//! compilation relies on.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::error::MatchError;
use crate::value::{Symbol, Value};

/// Deferred body of a value pattern.
pub type ValueFn = Arc<dyn Fn(&BindingEnv) -> Result<Value, MatchError> + Send + Sync>;

/// Cheaply clonable handle to an immutable pattern tree.
#[derive(Clone)]
pub struct Pattern(Arc<PatternKind>);

pub enum PatternKind {
    Wildcard,
    Var(Symbol),
    Value(ValuePattern),
    Constructor { name: Symbol, args: Vec<Pattern> },
    Tuple(Vec<Pattern>),
    Or(Vec<Pattern>),
    And(Vec<Pattern>),
    Not(Pattern),
    Later(Pattern),
}

#[derive(Clone)]
pub struct ValuePattern {
    source: ValueSource,
    refs: Arc<[Symbol]>,
    label: Option<Arc<str>>,
}

#[derive(Clone)]
enum ValueSource {
    Resolved(Value),
    Deferred(ValueFn),
}

impl ValuePattern {
    /// A value pattern that compares against a fixed value.
    pub fn constant(value: Value) -> Self {
        ValuePattern {
            source: ValueSource::Resolved(value),
            refs: Arc::from(Vec::new()),
            label: None,
        }
    }

    /// A value pattern computed from the bindings named in `refs`.
    pub fn deferred<F>(refs: Vec<Symbol>, f: F) -> Self
    where
        F: Fn(&BindingEnv) -> Result<Value, MatchError> + Send + Sync + 'static,
    {
        ValuePattern {
            source: ValueSource::Deferred(Arc::new(f)),
            refs: Arc::from(refs),
            label: None,
        }
    }

    /// Text shown when the pattern is printed (usually the source expression).
    pub fn with_label(mut self, label: impl Into<Arc<str>>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn refs(&self) -> &[Symbol] {
        &self.refs
    }

    /// The comparison value once it is known.
    pub fn resolved(&self) -> Option<&Value> {
        match &self.source {
            ValueSource::Resolved(v) => Some(v),
            ValueSource::Deferred(_) => None,
        }
    }

    pub fn eval(&self, env: &BindingEnv) -> Result<Value, MatchError> {
        match &self.source {
            ValueSource::Resolved(v) => Ok(v.clone()),
            ValueSource::Deferred(f) => {
                if let Some(missing) = self.refs.iter().find(|r| env.get(r).is_none()) {
                    return Err(MatchError::UnboundValuePatternRef(missing.clone()));
                }
                f(env)
            }
        }
    }

    /// This pattern with its value fixed to `value`.
    pub fn resolve(&self, value: Value) -> ValuePattern {
        ValuePattern {
            source: ValueSource::Resolved(value),
            refs: Arc::clone(&self.refs),
            label: self.label.clone(),
        }
    }
}

/// Evaluates a value pattern against the intermediate bindings.
pub fn eval_value_pattern(vp: &ValuePattern, env: &BindingEnv) -> Result<Value, MatchError> {
    vp.eval(env)
}

impl Pattern {
    pub fn new(kind: PatternKind) -> Self {
        Pattern(Arc::new(kind))
    }

    pub fn kind(&self) -> &PatternKind {
        &self.0
    }

    pub fn wildcard() -> Self {
        Pattern::new(PatternKind::Wildcard)
    }

    pub fn var(name: &str) -> Self {
        Pattern::new(PatternKind::Var(Symbol::new(name)))
    }

    pub fn value(vp: ValuePattern) -> Self {
        Pattern::new(PatternKind::Value(vp))
    }

    /// `,v` for a constant `v`.
    pub fn constant(v: impl Into<Value>) -> Self {
        Pattern::value(ValuePattern::constant(v.into()))
    }

    /// `,e` where `e` reads the bindings listed in `refs`.
    pub fn value_fn<F>(refs: &[&str], f: F) -> Self
    where
        F: Fn(&BindingEnv) -> Result<Value, MatchError> + Send + Sync + 'static,
    {
        Pattern::value(ValuePattern::deferred(
            refs.iter().map(|r| Symbol::new(r)).collect(),
            f,
        ))
    }

    /// `,x`: compare against whatever `x` is bound to.
    pub fn value_of(name: &str) -> Self {
        let sym = Symbol::new(name);
        let label = sym.to_string();
        let key = sym.clone();
        Pattern::value(
            ValuePattern::deferred(vec![sym], move |env| {
                env.get(&key)
                    .cloned()
                    .ok_or_else(|| MatchError::UnboundValuePatternRef(key.clone()))
            })
            .with_label(label),
        )
    }

    pub fn constructor(name: &str, args: Vec<Pattern>) -> Self {
        Pattern::new(PatternKind::Constructor {
            name: Symbol::new(name),
            args,
        })
    }

    pub fn nil() -> Self {
        Pattern::constructor("nil", Vec::new())
    }

    pub fn cons(head: Pattern, tail: Pattern) -> Self {
        Pattern::constructor("cons", vec![head, tail])
    }

    pub fn join(front: Pattern, back: Pattern) -> Self {
        Pattern::constructor("join", vec![front, back])
    }

    pub fn tuple(args: Vec<Pattern>) -> Self {
        Pattern::new(PatternKind::Tuple(args))
    }

    pub fn or(args: Vec<Pattern>) -> Self {
        Pattern::new(PatternKind::Or(args))
    }

    pub fn and(args: Vec<Pattern>) -> Self {
        Pattern::new(PatternKind::And(args))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(arg: Pattern) -> Self {
        Pattern::new(PatternKind::Not(arg))
    }

    pub fn later(arg: Pattern) -> Self {
        Pattern::new(PatternKind::Later(arg))
    }

    pub fn is_wildcard(&self) -> bool {
        matches!(self.kind(), PatternKind::Wildcard)
    }

    /// Constructor name and arguments, if this is a constructor pattern.
    pub fn as_constructor(&self) -> Option<(&str, &[Pattern])> {
        match self.kind() {
            PatternKind::Constructor { name, args } => Some((name.as_str(), args)),
            _ => None,
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, head: &str, args: &[Pattern]) -> fmt::Result {
            write!(f, "({head}")?;
            for a in args {
                write!(f, " {a}")?;
            }
            f.write_str(")")
        }
        match self.kind() {
            PatternKind::Wildcard => f.write_str("_"),
            PatternKind::Var(x) => write!(f, "{x}"),
            PatternKind::Value(vp) => write!(f, "{vp}"),
            PatternKind::Constructor { name, args } => list(f, name.as_str(), args),
            PatternKind::Tuple(args) => {
                f.write_str("'[")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str("]")
            }
            PatternKind::Or(args) => list(f, "or", args),
            PatternKind::And(args) => list(f, "and", args),
            PatternKind::Not(p) => write!(f, "(not {p})"),
            PatternKind::Later(p) => write!(f, "(later {p})"),
        }
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ValuePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.label, &self.source) {
            (Some(label), _) => write!(f, ",{label}"),
            (None, ValueSource::Resolved(v)) => write!(f, ",{v}"),
            (None, ValueSource::Deferred(_)) => f.write_str(",<expr>"),
        }
    }
}

// ---------------------------------------------------------------------------
// Binding environments
// ---------------------------------------------------------------------------

/// Insertion-ordered bindings from pattern variables to values. Persistent:
/// extending an environment shares the old one.
#[derive(Clone, Default)]
pub struct BindingEnv {
    head: Option<Arc<EnvNode>>,
    len: usize,
}

struct EnvNode {
    name: Symbol,
    value: Value,
    next: Option<Arc<EnvNode>>,
}

impl BindingEnv {
    pub fn new() -> Self {
        BindingEnv::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, name: &Symbol) -> Option<&Value> {
        let mut cur = self.head.as_deref();
        while let Some(node) = cur {
            if node.name.same(name) {
                return Some(&node.value);
            }
            cur = node.next.as_deref();
        }
        None
    }

    pub fn lookup(&self, name: &str) -> Option<&Value> {
        self.get(&Symbol::new(name))
    }

    pub fn bind(&self, name: Symbol, value: Value) -> Result<BindingEnv, MatchError> {
        if self.get(&name).is_some() {
            return Err(MatchError::DuplicateBinding(name));
        }
        Ok(BindingEnv {
            head: Some(Arc::new(EnvNode {
                name,
                value,
                next: self.head.clone(),
            })),
            len: self.len + 1,
        })
    }

    /// Bindings in the order they were made.
    pub fn entries(&self) -> Vec<(Symbol, Value)> {
        let mut out = Vec::with_capacity(self.len);
        let mut cur = self.head.as_deref();
        while let Some(node) = cur {
            out.push((node.name.clone(), node.value.clone()));
            cur = node.next.as_deref();
        }
        out.reverse();
        out
    }

    pub fn values(&self) -> Vec<Value> {
        self.entries().into_iter().map(|(_, v)| v).collect()
    }
}

impl fmt::Display for BindingEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.entries().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for BindingEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ---------------------------------------------------------------------------
// Static analyses
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid pattern `{pattern}`: {reason}")]
pub struct ValidationError {
    pub pattern: String,
    pub reason: ValidationReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationReason {
    #[error("variable `{0}` is bound more than once")]
    DuplicateBinder(Symbol),
    #[error("or-branches bind different variables: {first:?} vs {other:?}")]
    OrBranchMismatch {
        first: Vec<Symbol>,
        other: Vec<Symbol>,
    },
    #[error("value pattern reads `{0}`, which is only bound inside a not-pattern")]
    NotScopedRef(Symbol),
}

/// Pattern variables in the order their values appear in a match result.
///
/// Left-to-right, depth-first. Variables under `not` are dropped, `or`
/// contributes its first branch and `and` the ordered union of its branches.
pub fn extract_pattern_variables(p: &Pattern) -> Vec<Symbol> {
    let mut out = Vec::new();
    collect_exported(p, &mut out);
    out
}

fn collect_exported(p: &Pattern, out: &mut Vec<Symbol>) {
    match p.kind() {
        PatternKind::Wildcard | PatternKind::Value(_) | PatternKind::Not(_) => {}
        PatternKind::Var(x) => out.push(x.clone()),
        PatternKind::Constructor { args, .. } | PatternKind::Tuple(args) => {
            for a in args {
                collect_exported(a, out);
            }
        }
        PatternKind::Or(args) => {
            if let Some(first) = args.first() {
                collect_exported(first, out);
            }
        }
        PatternKind::And(args) => {
            for a in args {
                let mut vars = Vec::new();
                collect_exported(a, &mut vars);
                for v in vars {
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
        }
        PatternKind::Later(q) => collect_exported(q, out),
    }
}

/// Binder occurrences of a subtree: those visible in the result and those
/// hidden under a `not`.
struct Binders {
    exported: Vec<Symbol>,
    hidden: Vec<Symbol>,
}

fn scan(p: &Pattern) -> Result<Binders, ValidationError> {
    let mut b = Binders {
        exported: Vec::new(),
        hidden: Vec::new(),
    };
    match p.kind() {
        PatternKind::Wildcard | PatternKind::Value(_) => {}
        PatternKind::Var(x) => b.exported.push(x.clone()),
        PatternKind::Constructor { args, .. } | PatternKind::Tuple(args) | PatternKind::And(args) => {
            for a in args {
                let sub = scan(a)?;
                b.exported.extend(sub.exported);
                b.hidden.extend(sub.hidden);
            }
        }
        PatternKind::Or(args) => {
            let first_vars = args.first().map(extract_pattern_variables).unwrap_or_default();
            for (i, a) in args.iter().enumerate() {
                let sub = scan(a)?;
                let vars = extract_pattern_variables(a);
                if vars != first_vars {
                    return Err(ValidationError {
                        pattern: p.to_string(),
                        reason: ValidationReason::OrBranchMismatch {
                            first: first_vars,
                            other: vars,
                        },
                    });
                }
                if i == 0 {
                    b.exported = sub.exported;
                } else {
                    check_unique(&sub.exported)?;
                }
                b.hidden.extend(sub.hidden);
            }
        }
        PatternKind::Not(q) => {
            let sub = scan(q)?;
            b.hidden.extend(sub.exported);
            b.hidden.extend(sub.hidden);
        }
        PatternKind::Later(q) => b = scan(q)?,
    }
    Ok(b)
}

fn check_unique(names: &[Symbol]) -> Result<(), ValidationError> {
    for (i, name) in names.iter().enumerate() {
        if names[..i].contains(name) {
            return Err(ValidationError {
                pattern: name.to_string(),
                reason: ValidationReason::DuplicateBinder(name.clone()),
            });
        }
    }
    Ok(())
}

/// Rejects duplicate binders, `or` branches binding different variables, and
/// value patterns that read a variable bound only inside some other `not`.
pub fn validate_pattern(p: &Pattern) -> Result<(), ValidationError> {
    let binders = scan(p)?;
    let mut all = binders.exported.clone();
    all.extend(binders.hidden.iter().cloned());
    check_unique(&all)?;
    check_value_refs(p, &binders.exported, &binders.hidden)
}

fn check_value_refs(p: &Pattern, visible: &[Symbol], hidden: &[Symbol]) -> Result<(), ValidationError> {
    match p.kind() {
        PatternKind::Wildcard | PatternKind::Var(_) => Ok(()),
        PatternKind::Value(vp) => {
            for r in vp.refs() {
                if !visible.contains(r) && hidden.contains(r) {
                    return Err(ValidationError {
                        pattern: p.to_string(),
                        reason: ValidationReason::NotScopedRef(r.clone()),
                    });
                }
            }
            Ok(())
        }
        PatternKind::Constructor { args, .. }
        | PatternKind::Tuple(args)
        | PatternKind::Or(args)
        | PatternKind::And(args) => args.iter().try_for_each(|a| check_value_refs(a, visible, hidden)),
        PatternKind::Later(q) => check_value_refs(q, visible, hidden),
        PatternKind::Not(q) => {
            let inner = scan(q)?;
            let mut widened = visible.to_vec();
            widened.extend(inner.exported);
            widened.extend(inner.hidden);
            check_value_refs(q, &widened, hidden)
        }
    }
}
