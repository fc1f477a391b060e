//! The evaluator: a CEK-style machine with an explicit continuation stack,
//! so deep non-tail recursion costs heap rather than native stack, and calls
//! in tail position do not grow the stack at all.

use std::any::Any;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use nfmatch::{
    extract_pattern_variables, match_all, match_first, stream_match_all, tuple_matcher, BindingEnv, Clauses,
    LazySeq, MatchClause, Matcher, Opaque, Pattern, StreamError, Symbol, Value, ValuePattern,
};

use crate::builtins;
use crate::error::{LangError, SourceSpan};
use crate::expr::{compile_toplevel, ClauseExpr, Expr, ExprKind, Lambda, MatchExpr, MatchMode};
use crate::reader::read_all;

/// Which search `match-all` uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Engine {
    /// Depth-first; returns a list.
    #[default]
    Strict,
    /// Fair interleaving; returns a lazy stream, so infinite result sets work.
    Stream,
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub engine: Engine,
    /// Clause set for the `List` and `Multiset` matcher constructors.
    pub clauses: Clauses,
}

// ---------------------------------------------------------------------------
// Environments and procedures
// ---------------------------------------------------------------------------

/// Lexical environment: a chain of frames.
#[derive(Clone, Default)]
pub struct Env(Option<Arc<Frame>>);

struct Frame {
    names: Vec<Symbol>,
    values: Vec<Value>,
    parent: Env,
}

impl Env {
    pub fn extend(&self, names: Vec<Symbol>, values: Vec<Value>) -> Env {
        debug_assert_eq!(names.len(), values.len());
        Env(Some(Arc::new(Frame {
            names,
            values,
            parent: self.clone(),
        })))
    }

    fn lookup(&self, name: &Symbol) -> Option<&Value> {
        let mut cur = self.0.as_deref();
        while let Some(frame) = cur {
            if let Some(i) = frame.names.iter().rposition(|n| n.same(name)) {
                return Some(&frame.values[i]);
            }
            cur = frame.parent.0.as_deref();
        }
        None
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Arity {
    Exact(usize),
    AtLeast(usize),
    Range(usize, usize),
}

impl Arity {
    fn accepts(self, n: usize) -> bool {
        match self {
            Arity::Exact(k) => n == k,
            Arity::AtLeast(k) => n >= k,
            Arity::Range(lo, hi) => (lo..=hi).contains(&n),
        }
    }

    fn describe(self) -> String {
        let plural = |k: usize| if k == 1 { "argument" } else { "arguments" };
        match self {
            Arity::Exact(k) => format!("{k} {}", plural(k)),
            Arity::AtLeast(k) => format!("at least {k} {}", plural(k)),
            Arity::Range(lo, hi) => format!("{lo} to {hi} arguments"),
        }
    }
}

pub type BuiltinFn = fn(&Interp, &[Value]) -> Result<Value, LangError>;

pub enum Procedure {
    Closure { lambda: Arc<Lambda>, env: Env },
    Builtin { name: &'static str, arity: Arity, f: BuiltinFn },
}

impl Procedure {
    pub fn name(&self) -> &str {
        match self {
            Procedure::Closure { lambda, .. } => lambda.name.as_ref().map_or("lambda", Symbol::as_str),
            Procedure::Builtin { name, .. } => name,
        }
    }
}

impl Opaque for Procedure {
    fn type_name(&self) -> &str {
        "procedure"
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

pub fn as_procedure(v: &Value) -> Option<&Procedure> {
    match v {
        Value::Opaque(o) => o.as_any().downcast_ref::<Procedure>(),
        _ => None,
    }
}

fn arity_error(name: &str, arity: Arity, got: usize) -> LangError {
    LangError::runtime(format!("{name}: expected {}, got {got}", arity.describe()))
}

pub fn truthy(v: &Value) -> bool {
    !matches!(v, Value::Bool(false))
}

/// Converts a matcher value. A list or tuple of matchers becomes a tuple
/// matcher, so `` `[,Integer ,Integer] `` works in matcher position.
pub fn to_matcher(v: &Value) -> Result<Matcher, LangError> {
    match v {
        Value::Matcher(m) => Ok(m.clone()),
        Value::List(items) => Ok(tuple_matcher(items.iter().map(to_matcher).collect::<Result<_, _>>()?)),
        Value::Tuple(items) => Ok(tuple_matcher(items.iter().map(to_matcher).collect::<Result<_, _>>()?)),
        other => Err(LangError::runtime(format!("expected a matcher, found {}", other.kind_name()))),
    }
}

// ---------------------------------------------------------------------------
// Interpreter
// ---------------------------------------------------------------------------

struct Shared {
    globals: RwLock<HashMap<Symbol, Value>>,
    options: Options,
}

/// An interpreter instance: global environment plus options. Cheap to clone;
/// clones share the global environment.
#[derive(Clone)]
pub struct Interp(Arc<Shared>);

/// The outcome of one top-level form.
pub enum Outcome {
    Defined(Symbol),
    Value(Value),
}

enum Ctl {
    Eval(Expr, Env),
    Return(Value),
}

enum Kont {
    If(Expr, Env),
    Apply { node: Expr, env: Env, vals: Vec<Value> },
    Define(Symbol),
    Let { node: Expr, env: Env, vals: Vec<Value> },
    Seq { node: Expr, env: Env, next: usize },
    And { node: Expr, env: Env, next: usize },
    Or { node: Expr, env: Env, next: usize },
    List { node: Expr, env: Env, vals: Vec<Value> },
    Match { node: Expr, env: Env, vals: Vec<Value> },
}

impl Interp {
    pub fn new(options: Options) -> Self {
        let interp = Interp(Arc::new(Shared {
            globals: RwLock::new(HashMap::new()),
            options,
        }));
        builtins::install(&interp);
        interp
    }

    pub fn options(&self) -> &Options {
        &self.0.options
    }

    pub fn define(&self, name: &str, value: Value) {
        self.0
            .globals
            .write()
            .unwrap_or_else(|p| p.into_inner())
            .insert(Symbol::new(name), value);
    }

    pub fn global(&self, name: &str) -> Option<Value> {
        self.0
            .globals
            .read()
            .unwrap_or_else(|p| p.into_inner())
            .get(&Symbol::new(name))
            .cloned()
    }

    pub(crate) fn define_builtin(&self, name: &'static str, arity: Arity, f: BuiltinFn) {
        self.define(name, Value::Opaque(Arc::new(Procedure::Builtin { name, arity, f })));
    }

    fn lookup(&self, env: &Env, name: &Symbol) -> Option<Value> {
        if let Some(v) = env.lookup(name) {
            return Some(v.clone());
        }
        self.0
            .globals
            .read()
            .unwrap_or_else(|p| p.into_inner())
            .get(name)
            .cloned()
    }

    /// Parses all of `src`, then evaluates the forms in order, calling
    /// `each` after every form.
    pub fn run<F>(&self, src: &str, file: Option<&str>, mut each: F) -> Result<(), LangError>
    where
        F: FnMut(Outcome) -> Result<(), LangError>,
    {
        let forms = read_all(src, file)?
            .iter()
            .map(compile_toplevel)
            .collect::<Result<Vec<_>, _>>()?;
        for form in forms {
            let value = self.eval(&form, &Env::default())?;
            let outcome = match form.kind() {
                ExprKind::Define(name, _) => Outcome::Defined(name.clone()),
                _ => Outcome::Value(value),
            };
            each(outcome)?;
        }
        Ok(())
    }

    /// Values of the non-`define` forms of `src`.
    pub fn run_str(&self, src: &str) -> Result<Vec<Value>, LangError> {
        let mut out = Vec::new();
        self.run(src, None, |o| {
            if let Outcome::Value(v) = o {
                out.push(v);
            }
            Ok(())
        })?;
        Ok(out)
    }

    /// Value of the last form of `src`.
    pub fn eval_str(&self, src: &str) -> Result<Value, LangError> {
        let mut last = None;
        self.run(src, None, |o| {
            last = Some(match o {
                Outcome::Value(v) => v,
                Outcome::Defined(name) => Value::Symbol(name),
            });
            Ok(())
        })?;
        last.ok_or_else(|| LangError::runtime("no expression to evaluate"))
    }

    /// Calls a procedure value.
    pub fn apply(&self, f: &Value, args: Vec<Value>) -> Result<Value, LangError> {
        match as_procedure(f) {
            Some(Procedure::Builtin { name, arity, f }) => {
                if !arity.accepts(args.len()) {
                    return Err(arity_error(name, *arity, args.len()));
                }
                f(self, &args)
            }
            Some(Procedure::Closure { lambda, env }) => {
                let env = bind_params(lambda, env, args)?;
                self.eval(&lambda.body, &env)
            }
            None => Err(LangError::runtime(format!("not a procedure: {}", f.kind_name()))),
        }
    }

    pub fn eval(&self, expr: &Expr, env: &Env) -> Result<Value, LangError> {
        let mut stack: Vec<Kont> = Vec::new();
        let mut ctl = Ctl::Eval(expr.clone(), env.clone());
        loop {
            let value = match ctl {
                Ctl::Return(v) => v,
                Ctl::Eval(e, env) => match e.kind() {
                    ExprKind::Lit(v) => v.clone(),
                    ExprKind::Ref(name) => self
                        .lookup(&env, name)
                        .ok_or_else(|| LangError::runtime(format!("unbound variable `{name}`")).at(e.span()))?,
                    ExprKind::If(c, _, _) => {
                        let c = c.clone();
                        stack.push(Kont::If(e, env.clone()));
                        ctl = Ctl::Eval(c, env);
                        continue;
                    }
                    ExprKind::Lambda(l) => Value::Opaque(Arc::new(Procedure::Closure {
                        lambda: l.clone(),
                        env,
                    })),
                    ExprKind::Apply(f, args) => {
                        let f = f.clone();
                        let vals = Vec::with_capacity(args.len() + 1);
                        stack.push(Kont::Apply {
                            node: e,
                            env: env.clone(),
                            vals,
                        });
                        ctl = Ctl::Eval(f, env);
                        continue;
                    }
                    ExprKind::Define(name, x) => {
                        let x = x.clone();
                        stack.push(Kont::Define(name.clone()));
                        ctl = Ctl::Eval(x, env);
                        continue;
                    }
                    ExprKind::Let(binds, body) => {
                        if binds.is_empty() {
                            ctl = Ctl::Eval(body.clone(), env);
                            continue;
                        }
                        let first = binds[0].1.clone();
                        stack.push(Kont::Let {
                            node: e,
                            env: env.clone(),
                            vals: Vec::new(),
                        });
                        ctl = Ctl::Eval(first, env);
                        continue;
                    }
                    ExprKind::Begin(xs) | ExprKind::And(xs) | ExprKind::Or(xs) => {
                        if xs.is_empty() {
                            Value::Bool(!matches!(e.kind(), ExprKind::Or(_)))
                        } else {
                            let first = xs[0].clone();
                            if xs.len() > 1 {
                                let (node, env) = (e.clone(), env.clone());
                                stack.push(match e.kind() {
                                    ExprKind::Begin(_) => Kont::Seq { node, env, next: 1 },
                                    ExprKind::And(_) => Kont::And { node, env, next: 1 },
                                    _ => Kont::Or { node, env, next: 1 },
                                });
                            }
                            ctl = Ctl::Eval(first, env);
                            continue;
                        }
                    }
                    ExprKind::MakeList(parts) => {
                        if parts.is_empty() {
                            Value::empty_list()
                        } else {
                            let first = parts[0].1.clone();
                            stack.push(Kont::List {
                                node: e,
                                env: env.clone(),
                                vals: Vec::new(),
                            });
                            ctl = Ctl::Eval(first, env);
                            continue;
                        }
                    }
                    ExprKind::Match(m) => {
                        let target = m.target.clone();
                        stack.push(Kont::Match {
                            node: e,
                            env: env.clone(),
                            vals: Vec::new(),
                        });
                        ctl = Ctl::Eval(target, env);
                        continue;
                    }
                },
            };

            let Some(k) = stack.pop() else {
                return Ok(value);
            };
            ctl = match k {
                Kont::If(node, env) => {
                    let ExprKind::If(_, t, f) = node.kind() else { unreachable!() };
                    Ctl::Eval(if truthy(&value) { t.clone() } else { f.clone() }, env)
                }
                Kont::Apply { node, env, mut vals } => {
                    vals.push(value);
                    let ExprKind::Apply(_, args) = node.kind() else { unreachable!() };
                    if vals.len() <= args.len() {
                        let next = args[vals.len() - 1].clone();
                        stack.push(Kont::Apply {
                            node,
                            env: env.clone(),
                            vals,
                        });
                        Ctl::Eval(next, env)
                    } else {
                        let f = vals.remove(0);
                        match as_procedure(&f) {
                            Some(Procedure::Closure { lambda, env }) => {
                                let env = bind_params(lambda, env, vals).map_err(|e| e.at(node.span()))?;
                                Ctl::Eval(lambda.body.clone(), env)
                            }
                            Some(Procedure::Builtin { name, arity, f }) => {
                                if !arity.accepts(vals.len()) {
                                    return Err(arity_error(name, *arity, vals.len()).at(node.span()));
                                }
                                Ctl::Return(f(self, &vals).map_err(|e| e.at(node.span()))?)
                            }
                            None => {
                                return Err(LangError::runtime(format!("not a procedure: {f}")).at(node.span()));
                            }
                        }
                    }
                }
                Kont::Define(name) => {
                    self.define(name.as_str(), value);
                    Ctl::Return(Value::Symbol(name))
                }
                Kont::Let { node, env, mut vals } => {
                    vals.push(value);
                    let ExprKind::Let(binds, body) = node.kind() else { unreachable!() };
                    if vals.len() < binds.len() {
                        let next = binds[vals.len()].1.clone();
                        stack.push(Kont::Let {
                            node,
                            env: env.clone(),
                            vals,
                        });
                        Ctl::Eval(next, env)
                    } else {
                        let names = binds.iter().map(|(n, _)| n.clone()).collect();
                        Ctl::Eval(body.clone(), env.extend(names, vals))
                    }
                }
                Kont::Seq { node, env, next } => {
                    let ExprKind::Begin(xs) = node.kind() else { unreachable!() };
                    let e = xs[next].clone();
                    if next + 1 < xs.len() {
                        stack.push(Kont::Seq {
                            node: node.clone(),
                            env: env.clone(),
                            next: next + 1,
                        });
                    }
                    Ctl::Eval(e, env)
                }
                Kont::And { node, env, next } | Kont::Or { node, env, next } => {
                    let (xs, is_and) = match node.kind() {
                        ExprKind::And(xs) => (xs, true),
                        ExprKind::Or(xs) => (xs, false),
                        _ => unreachable!(),
                    };
                    if truthy(&value) != is_and {
                        Ctl::Return(value)
                    } else {
                        let e = xs[next].clone();
                        if next + 1 < xs.len() {
                            let (node, env) = (node.clone(), env.clone());
                            stack.push(if is_and {
                                Kont::And { node, env, next: next + 1 }
                            } else {
                                Kont::Or { node, env, next: next + 1 }
                            });
                        }
                        Ctl::Eval(e, env)
                    }
                }
                Kont::List { node, env, mut vals } => {
                    vals.push(value);
                    let ExprKind::MakeList(parts) = node.kind() else { unreachable!() };
                    if vals.len() < parts.len() {
                        let next = parts[vals.len()].1.clone();
                        stack.push(Kont::List {
                            node,
                            env: env.clone(),
                            vals,
                        });
                        Ctl::Eval(next, env)
                    } else {
                        Ctl::Return(build_list(parts, vals).map_err(|e| e.at(node.span()))?)
                    }
                }
                Kont::Match { node, env, mut vals } => {
                    vals.push(value);
                    if vals.len() == 1 {
                        let ExprKind::Match(m) = node.kind() else { unreachable!() };
                        let matcher = m.matcher.clone();
                        stack.push(Kont::Match {
                            node,
                            env: env.clone(),
                            vals,
                        });
                        Ctl::Eval(matcher, env)
                    } else {
                        let ExprKind::Match(m) = node.kind() else { unreachable!() };
                        let matcher = vals.pop().expect("matcher value");
                        let target = vals.pop().expect("target value");
                        Ctl::Return(self.run_match(m, &env, target, &matcher, node.span())?)
                    }
                }
            };
        }
    }

    fn clause(&self, c: &ClauseExpr, env: &Env) -> Result<MatchClause, LangError> {
        let value_fn = |expr: &Expr, refs: &[Symbol], label: &str| {
            let (interp, env, expr, names) = (self.clone(), env.clone(), expr.clone(), refs.to_vec());
            let vp = ValuePattern::deferred(refs.to_vec(), move |bindings: &BindingEnv| {
                let values = names
                    .iter()
                    .map(|n| bindings.get(n).cloned().ok_or_else(|| nfmatch::MatchError::UnboundValuePatternRef(n.clone())))
                    .collect::<Result<Vec<_>, _>>()?;
                interp
                    .eval(&expr, &env.extend(names.clone(), values))
                    .map_err(LangError::into_match)
            });
            Pattern::value(vp.with_label(label))
        };
        let pattern = c.pattern.instantiate(&value_fn);
        let names = extract_pattern_variables(&pattern);
        let (interp, env, body) = (self.clone(), env.clone(), c.body.clone());
        MatchClause::new(pattern, move |xs: &[Value]| {
            interp
                .eval(&body, &env.extend(names.clone(), xs.to_vec()))
                .map_err(LangError::into_match)
        })
        .map_err(|e| LangError::runtime(e.to_string()).at(&c.span))
    }

    fn run_match(
        &self,
        m: &MatchExpr,
        env: &Env,
        target: Value,
        matcher: &Value,
        span: &SourceSpan,
    ) -> Result<Value, LangError> {
        let matcher = to_matcher(matcher).map_err(|e| e.at(m.matcher.span()))?;
        let clauses = m
            .clauses
            .iter()
            .map(|c| self.clause(c, env))
            .collect::<Result<Vec<_>, _>>()?;
        let located = |e: nfmatch::MatchError| LangError::from_match(e).at(span);
        match (m.mode, self.0.options.engine) {
            (MatchMode::All, Engine::Strict) => match_all(&target, &matcher, &clauses)
                .map(Value::list)
                .map_err(located),
            (MatchMode::All, Engine::Stream) => {
                let span = span.clone();
                let results = clauses
                    .into_iter()
                    .flat_map(move |c| stream_match_all(&target, &matcher, &c))
                    .map(move |r| r.map_err(|e| StreamError::new(LangError::from_match(e).at(&span))));
                Ok(Value::Lazy(LazySeq::from_iter(results)?))
            }
            (MatchMode::First, _) => match match_first(&target, &matcher, &clauses).map_err(located)? {
                Some(v) => Ok(v),
                None => Err(LangError::runtime("match-first: no clause matched").at(span)),
            },
        }
    }
}

fn bind_params(lambda: &Lambda, env: &Env, mut args: Vec<Value>) -> Result<Env, LangError> {
    let name = lambda.name.as_ref().map_or("lambda", Symbol::as_str);
    let n = lambda.params.len();
    match &lambda.rest {
        None if args.len() != n => Err(arity_error(name, Arity::Exact(n), args.len())),
        Some(_) if args.len() < n => Err(arity_error(name, Arity::AtLeast(n), args.len())),
        None => Ok(env.extend(lambda.params.clone(), args)),
        Some(rest) => {
            let extra = Value::list(args.split_off(n));
            let mut names = lambda.params.clone();
            names.push(rest.clone());
            args.push(extra);
            Ok(env.extend(names, args))
        }
    }
}

fn build_list(parts: &[(bool, Expr)], vals: Vec<Value>) -> Result<Value, LangError> {
    let mut out = Vec::with_capacity(vals.len());
    for ((splice, _), v) in parts.iter().zip(vals) {
        if *splice {
            match v {
                Value::List(items) => out.extend(items.iter().cloned()),
                other => {
                    return Err(LangError::runtime(format!(",@ expects a list, found {}", other.kind_name())));
                }
            }
        } else {
            out.push(v);
        }
    }
    Ok(Value::list(out))
}
