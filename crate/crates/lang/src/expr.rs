//! Expressions, pattern templates, and compilation from read data.

use std::collections::HashSet;
use std::sync::Arc;

use nfmatch::{validate_pattern, Pattern, Symbol, Value, ValuePattern};

use crate::error::{LangError, SourceSpan};
use crate::reader::{Datum, DatumKind};

#[derive(Clone, Debug)]
pub struct Expr(Arc<ExprNode>);

#[derive(Debug)]
pub struct ExprNode {
    pub kind: ExprKind,
    pub span: SourceSpan,
}

#[derive(Debug)]
pub enum ExprKind {
    Lit(Value),
    Ref(Symbol),
    If(Expr, Expr, Expr),
    Lambda(Arc<Lambda>),
    Apply(Expr, Vec<Expr>),
    Define(Symbol, Expr),
    Let(Vec<(Symbol, Expr)>, Expr),
    Begin(Vec<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    /// List construction from quasiquote; `true` marks a spliced element.
    MakeList(Vec<(bool, Expr)>),
    Match(Arc<MatchExpr>),
}

#[derive(Debug)]
pub struct Lambda {
    pub name: Option<Symbol>,
    pub params: Vec<Symbol>,
    pub rest: Option<Symbol>,
    pub body: Expr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchMode {
    All,
    First,
}

#[derive(Debug)]
pub struct MatchExpr {
    pub mode: MatchMode,
    pub target: Expr,
    pub matcher: Expr,
    pub clauses: Vec<ClauseExpr>,
}

#[derive(Debug)]
pub struct ClauseExpr {
    pub pattern: PatTemplate,
    pub body: Expr,
    pub span: SourceSpan,
}

/// A pattern whose value-pattern expressions still need a lexical
/// environment.
#[derive(Debug, Clone)]
pub enum PatTemplate {
    Wild,
    Var(Symbol),
    Value {
        expr: Expr,
        refs: Vec<Symbol>,
        label: String,
    },
    Ctor(String, Vec<PatTemplate>),
    Tuple(Vec<PatTemplate>),
    Or(Vec<PatTemplate>),
    And(Vec<PatTemplate>),
    Not(Box<PatTemplate>),
    Later(Box<PatTemplate>),
}

impl PatTemplate {
    /// Builds the pattern, turning each value pattern into a function by
    /// way of `value_fn`.
    pub fn instantiate<F>(&self, value_fn: &F) -> Pattern
    where
        F: Fn(&Expr, &[Symbol], &str) -> Pattern,
    {
        let all = |ps: &[PatTemplate]| ps.iter().map(|p| p.instantiate(value_fn)).collect::<Vec<_>>();
        match self {
            PatTemplate::Wild => Pattern::wildcard(),
            PatTemplate::Var(x) => Pattern::var(x.as_str()),
            PatTemplate::Value { expr, refs, label } => value_fn(expr, refs, label),
            PatTemplate::Ctor(name, args) => Pattern::constructor(name, all(args)),
            PatTemplate::Tuple(args) => Pattern::tuple(all(args)),
            PatTemplate::Or(args) => Pattern::or(all(args)),
            PatTemplate::And(args) => Pattern::and(all(args)),
            PatTemplate::Not(p) => Pattern::not(p.instantiate(value_fn)),
            PatTemplate::Later(p) => Pattern::later(p.instantiate(value_fn)),
        }
    }

    fn binders(&self, out: &mut Vec<Symbol>) {
        match self {
            PatTemplate::Wild | PatTemplate::Value { .. } => {}
            PatTemplate::Var(x) => out.push(x.clone()),
            PatTemplate::Ctor(_, args) | PatTemplate::Tuple(args) | PatTemplate::Or(args) | PatTemplate::And(args) => {
                args.iter().for_each(|a| a.binders(out))
            }
            PatTemplate::Not(p) | PatTemplate::Later(p) => p.binders(out),
        }
    }
}

impl Expr {
    fn new(kind: ExprKind, span: &SourceSpan) -> Self {
        Expr(Arc::new(ExprNode {
            kind,
            span: span.clone(),
        }))
    }

    pub fn kind(&self) -> &ExprKind {
        &self.0.kind
    }

    pub fn span(&self) -> &SourceSpan {
        &self.0.span
    }

    pub fn ptr_eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Free variables, in order of first use.
    pub fn free_vars(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        free_vars(self, &mut Vec::new(), &mut out);
        out
    }
}

fn free_vars(e: &Expr, bound: &mut Vec<Symbol>, out: &mut Vec<Symbol>) {
    let scoped = |names: &[Symbol], body: &Expr, bound: &mut Vec<Symbol>, out: &mut Vec<Symbol>| {
        let n = bound.len();
        bound.extend(names.iter().cloned());
        free_vars(body, bound, out);
        bound.truncate(n);
    };
    match e.kind() {
        ExprKind::Lit(_) => {}
        ExprKind::Ref(x) => {
            if !bound.contains(x) && !out.contains(x) {
                out.push(x.clone());
            }
        }
        ExprKind::If(a, b, c) => {
            for x in [a, b, c] {
                free_vars(x, bound, out);
            }
        }
        ExprKind::Lambda(l) => {
            let mut names = l.params.clone();
            names.extend(l.rest.clone());
            scoped(&names, &l.body, bound, out);
        }
        ExprKind::Apply(f, args) => {
            free_vars(f, bound, out);
            args.iter().for_each(|a| free_vars(a, bound, out));
        }
        ExprKind::Define(_, x) => free_vars(x, bound, out),
        ExprKind::Let(binds, body) => {
            binds.iter().for_each(|(_, x)| free_vars(x, bound, out));
            let names: Vec<Symbol> = binds.iter().map(|(n, _)| n.clone()).collect();
            scoped(&names, body, bound, out);
        }
        ExprKind::Begin(xs) | ExprKind::And(xs) | ExprKind::Or(xs) => {
            xs.iter().for_each(|x| free_vars(x, bound, out))
        }
        ExprKind::MakeList(xs) => xs.iter().for_each(|(_, x)| free_vars(x, bound, out)),
        ExprKind::Match(m) => {
            free_vars(&m.target, bound, out);
            free_vars(&m.matcher, bound, out);
            for c in &m.clauses {
                let mut names = Vec::new();
                c.pattern.binders(&mut names);
                let n = bound.len();
                bound.extend(names);
                pattern_free_vars(&c.pattern, bound, out);
                free_vars(&c.body, bound, out);
                bound.truncate(n);
            }
        }
    }
}

fn pattern_free_vars(p: &PatTemplate, bound: &mut Vec<Symbol>, out: &mut Vec<Symbol>) {
    match p {
        PatTemplate::Wild | PatTemplate::Var(_) => {}
        PatTemplate::Value { expr, .. } => free_vars(expr, bound, out),
        PatTemplate::Ctor(_, args) | PatTemplate::Tuple(args) | PatTemplate::Or(args) | PatTemplate::And(args) => {
            args.iter().for_each(|a| pattern_free_vars(a, bound, out))
        }
        PatTemplate::Not(q) | PatTemplate::Later(q) => pattern_free_vars(q, bound, out),
    }
}

// ---------------------------------------------------------------------------
// Data to values
// ---------------------------------------------------------------------------

/// The value of quoted data. Every bracket shape reads as a list.
pub fn datum_to_value(d: &Datum) -> Value {
    match &d.kind {
        DatumKind::Int(n) => Value::Int(*n),
        DatumKind::Bool(b) => Value::Bool(*b),
        DatumKind::Str(s) => Value::str(s),
        DatumKind::Sym(s) => Value::sym(s),
        DatumKind::List(items, _) => Value::list(items.iter().map(datum_to_value)),
        DatumKind::Quote(x) => tagged("quote", x),
        DatumKind::Quasi(x) => tagged("quasiquote", x),
        DatumKind::Unquote(x) => tagged("unquote", x),
        DatumKind::Splice(x) => tagged("unquote-splicing", x),
    }
}

fn tagged(tag: &str, d: &Datum) -> Value {
    Value::list([Value::sym(tag), datum_to_value(d)])
}

// ---------------------------------------------------------------------------
// Compilation
// ---------------------------------------------------------------------------

const SPECIAL_FORMS: &[&str] = &[
    "define",
    "lambda",
    "if",
    "cond",
    "let",
    "let*",
    "begin",
    "and",
    "or",
    "quote",
    "quasiquote",
    "match-all",
    "match-first",
];

fn err(message: impl Into<String>, span: &SourceSpan) -> LangError {
    LangError::parse(message, span)
}

/// Compiles one top-level form.
pub fn compile_toplevel(d: &Datum) -> Result<Expr, LangError> {
    compile(d, true)
}

pub fn compile_expr(d: &Datum) -> Result<Expr, LangError> {
    compile(d, false)
}

fn compile(d: &Datum, top: bool) -> Result<Expr, LangError> {
    let span = &d.span;
    match &d.kind {
        DatumKind::Int(n) => Ok(Expr::new(ExprKind::Lit(Value::Int(*n)), span)),
        DatumKind::Bool(b) => Ok(Expr::new(ExprKind::Lit(Value::Bool(*b)), span)),
        DatumKind::Str(s) => Ok(Expr::new(ExprKind::Lit(Value::str(s)), span)),
        DatumKind::Sym(s) => Ok(Expr::new(ExprKind::Ref(Symbol::new(s)), span)),
        DatumKind::Quote(x) => Ok(Expr::new(ExprKind::Lit(datum_to_value(x)), span)),
        DatumKind::Quasi(x) => quasi(x),
        DatumKind::Unquote(_) | DatumKind::Splice(_) => Err(err("`,` outside of a quasiquote or pattern", span)),
        DatumKind::List(items, _) => {
            if items.is_empty() {
                return Ok(Expr::new(ExprKind::Lit(Value::empty_list()), span));
            }
            if let Some(head) = items[0].as_sym() {
                if SPECIAL_FORMS.contains(&head) {
                    return special(head, items, span, top);
                }
            }
            let f = compile_expr(&items[0])?;
            let args = items[1..].iter().map(compile_expr).collect::<Result<_, _>>()?;
            Ok(Expr::new(ExprKind::Apply(f, args), span))
        }
    }
}

fn body(forms: &[Datum], span: &SourceSpan) -> Result<Expr, LangError> {
    match forms {
        [] => Err(err("empty body", span)),
        [one] => compile_expr(one),
        many => {
            let xs = many.iter().map(compile_expr).collect::<Result<_, _>>()?;
            Ok(Expr::new(ExprKind::Begin(xs), span))
        }
    }
}

fn symbol(d: &Datum, what: &str) -> Result<Symbol, LangError> {
    d.as_sym()
        .map(Symbol::new)
        .ok_or_else(|| err(format!("expected {what}"), &d.span))
}

fn lambda(name: Option<Symbol>, params: &Datum, forms: &[Datum], span: &SourceSpan) -> Result<Expr, LangError> {
    let (params, rest) = match &params.kind {
        DatumKind::Sym(s) => (Vec::new(), Some(Symbol::new(s))),
        DatumKind::List(items, _) => {
            let mut ps = Vec::new();
            let mut rest = None;
            let mut it = items.iter();
            while let Some(p) = it.next() {
                if p.as_sym() == Some(".") {
                    let r = it.next().ok_or_else(|| err("expected a rest parameter after `.`", &p.span))?;
                    rest = Some(symbol(r, "a parameter name")?);
                    if let Some(extra) = it.next() {
                        return Err(err("unexpected parameter after rest parameter", &extra.span));
                    }
                    break;
                }
                let s = symbol(p, "a parameter name")?;
                if ps.contains(&s) {
                    return Err(err(format!("duplicate parameter `{s}`"), &p.span));
                }
                ps.push(s);
            }
            (ps, rest)
        }
        _ => return Err(err("expected a parameter list", &params.span)),
    };
    let body = body(forms, span)?;
    Ok(Expr::new(
        ExprKind::Lambda(Arc::new(Lambda {
            name,
            params,
            rest,
            body,
        })),
        span,
    ))
}

fn arity(items: &[Datum], min: usize, max: Option<usize>, span: &SourceSpan) -> Result<(), LangError> {
    let n = items.len() - 1;
    let ok = n >= min && max.is_none_or(|m| n <= m);
    if ok {
        return Ok(());
    }
    let form = items[0].as_sym().unwrap_or("form");
    let expected = match max {
        Some(m) if m == min => format!("{min}"),
        Some(m) => format!("{min} to {m}"),
        None => format!("at least {min}"),
    };
    Err(err(format!("`{form}` expects {expected} operand(s), got {n}"), span))
}

fn special(head: &str, items: &[Datum], span: &SourceSpan, top: bool) -> Result<Expr, LangError> {
    match head {
        "define" => {
            if !top {
                return Err(err("`define` is only allowed at top level", span));
            }
            arity(items, 2, None, span)?;
            match &items[1].kind {
                DatumKind::Sym(name) => {
                    arity(items, 2, Some(2), span)?;
                    let name = Symbol::new(name);
                    let value = match &items[2].kind {
                        DatumKind::List(xs, _) if xs.first().and_then(Datum::as_sym) == Some("lambda") => {
                            arity(xs, 2, None, &items[2].span)?;
                            lambda(Some(name.clone()), &xs[1], &xs[2..], &items[2].span)?
                        }
                        _ => compile_expr(&items[2])?,
                    };
                    Ok(Expr::new(ExprKind::Define(name, value), span))
                }
                DatumKind::List(sig, shape) if !sig.is_empty() => {
                    let name = symbol(&sig[0], "a function name")?;
                    let params = Datum {
                        kind: DatumKind::List(sig[1..].to_vec(), *shape),
                        span: items[1].span.clone(),
                    };
                    let f = lambda(Some(name.clone()), &params, &items[2..], span)?;
                    Ok(Expr::new(ExprKind::Define(name, f), span))
                }
                _ => Err(err("expected a name or (name params ...)", &items[1].span)),
            }
        }
        "lambda" => {
            arity(items, 2, None, span)?;
            lambda(None, &items[1], &items[2..], span)
        }
        "if" => {
            arity(items, 2, Some(3), span)?;
            let c = compile_expr(&items[1])?;
            let t = compile_expr(&items[2])?;
            let e = match items.get(3) {
                Some(d) => compile_expr(d)?,
                None => Expr::new(ExprKind::Lit(Value::Bool(false)), span),
            };
            Ok(Expr::new(ExprKind::If(c, t, e), span))
        }
        "cond" => {
            let mut acc = Expr::new(ExprKind::Lit(Value::Bool(false)), span);
            for (i, clause) in items[1..].iter().enumerate().rev() {
                let parts = clause
                    .as_list()
                    .filter(|p| p.len() >= 2)
                    .ok_or_else(|| err("expected [test body ...]", &clause.span))?;
                let is_else = parts[0].as_sym() == Some("else");
                if is_else && i != items.len() - 2 {
                    return Err(err("`else` must be the last cond clause", &clause.span));
                }
                let then = body(&parts[1..], &clause.span)?;
                acc = if is_else {
                    then
                } else {
                    Expr::new(ExprKind::If(compile_expr(&parts[0])?, then, acc), &clause.span)
                };
            }
            Ok(acc)
        }
        "let" | "let*" => {
            arity(items, 2, None, span)?;
            let binds = items[1]
                .as_list()
                .ok_or_else(|| err("expected a binding list", &items[1].span))?;
            let mut compiled = Vec::new();
            for b in binds {
                match b.as_list() {
                    Some([name, value]) => compiled.push((symbol(name, "a variable name")?, compile_expr(value)?)),
                    _ => return Err(err("expected (name value)", &b.span)),
                }
            }
            let body = body(&items[2..], span)?;
            if head == "let" {
                return Ok(Expr::new(ExprKind::Let(compiled, body), span));
            }
            Ok(compiled
                .into_iter()
                .rev()
                .fold(body, |acc, bind| Expr::new(ExprKind::Let(vec![bind], acc), span)))
        }
        "begin" => {
            arity(items, 1, None, span)?;
            let xs = items[1..].iter().map(|d| compile(d, top)).collect::<Result<_, _>>()?;
            Ok(Expr::new(ExprKind::Begin(xs), span))
        }
        "and" | "or" => {
            let xs = items[1..].iter().map(compile_expr).collect::<Result<_, _>>()?;
            Ok(Expr::new(if head == "and" { ExprKind::And(xs) } else { ExprKind::Or(xs) }, span))
        }
        "quote" => {
            arity(items, 1, Some(1), span)?;
            Ok(Expr::new(ExprKind::Lit(datum_to_value(&items[1])), span))
        }
        "quasiquote" => {
            arity(items, 1, Some(1), span)?;
            quasi(&items[1])
        }
        "match-all" | "match-first" => {
            arity(items, 3, None, span)?;
            let target = compile_expr(&items[1])?;
            let matcher = compile_expr(&items[2])?;
            let clauses = items[3..].iter().map(clause).collect::<Result<_, _>>()?;
            let mode = if head == "match-all" { MatchMode::All } else { MatchMode::First };
            Ok(Expr::new(
                ExprKind::Match(Arc::new(MatchExpr {
                    mode,
                    target,
                    matcher,
                    clauses,
                })),
                span,
            ))
        }
        _ => unreachable!("unknown special form {head}"),
    }
}

fn quasi(d: &Datum) -> Result<Expr, LangError> {
    fn has_unquote(d: &Datum) -> bool {
        match &d.kind {
            DatumKind::Unquote(_) | DatumKind::Splice(_) => true,
            DatumKind::List(items, _) => items.iter().any(has_unquote),
            DatumKind::Quote(x) => has_unquote(x),
            _ => false,
        }
    }
    fn reject_nested(d: &Datum) -> Result<(), LangError> {
        match &d.kind {
            DatumKind::Quasi(_) => Err(err("nested quasiquote is not supported", &d.span)),
            DatumKind::List(items, _) => items.iter().try_for_each(reject_nested),
            DatumKind::Quote(x) => reject_nested(x),
            _ => Ok(()),
        }
    }
    reject_nested(d)?;
    if !has_unquote(d) {
        return Ok(Expr::new(ExprKind::Lit(datum_to_value(d)), &d.span));
    }
    match &d.kind {
        DatumKind::Unquote(x) => compile_expr(x),
        DatumKind::Splice(_) => Err(err("`,@` outside of a list", &d.span)),
        DatumKind::List(items, _) => {
            let parts = items
                .iter()
                .map(|item| match &item.kind {
                    DatumKind::Splice(x) => Ok((true, compile_expr(x)?)),
                    _ => Ok((false, quasi(item)?)),
                })
                .collect::<Result<_, LangError>>()?;
            Ok(Expr::new(ExprKind::MakeList(parts), &d.span))
        }
        DatumKind::Quote(x) => {
            let inner = quasi(x)?;
            let tag = Expr::new(ExprKind::Lit(Value::sym("quote")), &d.span);
            Ok(Expr::new(ExprKind::MakeList(vec![(false, tag), (false, inner)]), &d.span))
        }
        _ => unreachable!("atoms never contain an unquote"),
    }
}

fn clause(d: &Datum) -> Result<ClauseExpr, LangError> {
    let parts = match d.as_list() {
        Some(parts) if parts.len() >= 2 => parts,
        _ => return Err(err("expected a match clause [pattern body]", &d.span)),
    };
    // Every binder of the clause, so value patterns know which of their free
    // variables come from the pattern.
    let mut names = HashSet::new();
    collect_binders(&parts[0], &mut names);
    let pattern = pattern(&parts[0], &names)?;
    let probe = pattern.instantiate(&|_, refs: &[Symbol], label: &str| {
        Pattern::value(ValuePattern::deferred(refs.to_vec(), |_| Ok(Value::Bool(false))).with_label(label))
    });
    validate_pattern(&probe).map_err(|e| err(e.to_string(), &parts[0].span))?;
    let body = body(&parts[1..], &d.span)?;
    Ok(ClauseExpr {
        pattern,
        body,
        span: d.span.clone(),
    })
}

fn collect_binders(d: &Datum, out: &mut HashSet<String>) {
    match &d.kind {
        DatumKind::Sym(s) if s != "_" => {
            out.insert(s.clone());
        }
        DatumKind::List(items, _) => {
            let skip = usize::from(items.first().and_then(Datum::as_sym).is_some());
            items[skip..].iter().for_each(|x| collect_binders(x, out));
        }
        DatumKind::Quote(x) => {
            if let Some(items) = x.as_list() {
                items.iter().for_each(|p| collect_binders(p, out));
            }
        }
        _ => {}
    }
}

fn pattern(d: &Datum, binders: &HashSet<String>) -> Result<PatTemplate, LangError> {
    let span = &d.span;
    match &d.kind {
        DatumKind::Sym(s) if s == "_" => Ok(PatTemplate::Wild),
        DatumKind::Sym(s) => Ok(PatTemplate::Var(Symbol::new(s))),
        DatumKind::Unquote(x) => {
            let expr = compile_expr(x)?;
            let refs = expr
                .free_vars()
                .into_iter()
                .filter(|v| binders.contains(v.as_str()))
                .collect();
            Ok(PatTemplate::Value {
                expr,
                refs,
                label: source_text(x),
            })
        }
        DatumKind::Quote(x) => match x.as_list() {
            Some(items) => Ok(PatTemplate::Tuple(
                items.iter().map(|p| pattern(p, binders)).collect::<Result<_, _>>()?,
            )),
            None => Err(err("expected a tuple pattern '[p ...]", span)),
        },
        DatumKind::List(items, _) if items.is_empty() => Ok(PatTemplate::Ctor("nil".into(), Vec::new())),
        DatumKind::List(items, _) => {
            let head = items[0]
                .as_sym()
                .ok_or_else(|| err("expected a pattern constructor name", &items[0].span))?;
            let args = items[1..]
                .iter()
                .map(|p| pattern(p, binders))
                .collect::<Result<Vec<_>, _>>()?;
            let one = |args: Vec<PatTemplate>| -> Result<Box<PatTemplate>, LangError> {
                match <[PatTemplate; 1]>::try_from(args) {
                    Ok([p]) => Ok(Box::new(p)),
                    Err(_) => Err(err(format!("`{head}` takes exactly one pattern"), span)),
                }
            };
            match head {
                "or" | "and" if args.is_empty() => Err(err(format!("`{head}` needs at least one pattern"), span)),
                "or" => Ok(PatTemplate::Or(args)),
                "and" => Ok(PatTemplate::And(args)),
                "not" => Ok(PatTemplate::Not(one(args)?)),
                "later" => Ok(PatTemplate::Later(one(args)?)),
                _ => Ok(PatTemplate::Ctor(head.to_string(), args)),
            }
        }
        DatumKind::Int(_) | DatumKind::Bool(_) | DatumKind::Str(_) => Err(err(
            format!("literal `{}` in pattern position (write a value pattern, e.g. ,{})", source_text(d), source_text(d)),
            span,
        )),
        DatumKind::Quasi(_) | DatumKind::Splice(_) => Err(err("unexpected syntax in pattern", span)),
    }
}

/// A compact rendering of `d` for labels and messages.
pub fn source_text(d: &Datum) -> String {
    match &d.kind {
        DatumKind::Int(n) => n.to_string(),
        DatumKind::Bool(b) => (if *b { "#t" } else { "#f" }).to_string(),
        DatumKind::Str(s) => Value::str(s).to_string(),
        DatumKind::Sym(s) => s.clone(),
        DatumKind::List(items, _) => {
            let inner: Vec<String> = items.iter().map(source_text).collect();
            format!("({})", inner.join(" "))
        }
        DatumKind::Quote(x) => format!("'{}", source_text(x)),
        DatumKind::Quasi(x) => format!("`{}", source_text(x)),
        DatumKind::Unquote(x) => format!(",{}", source_text(x)),
        DatumKind::Splice(x) => format!(",@{}", source_text(x)),
    }
}
