//! Davis–Putnam satisfiability over multisets of clauses.
//!
//! A variable is a positive integer and a literal a nonzero one; `-v` is the
//! negation of `v`. A clause is a list of literals and a CNF a list of
//! clauses.

use std::collections::BTreeSet;

use nfmatch::{
    integer_matcher, match_first, multiset_matcher, tuple_matcher, MatchClause, MatchError, Pattern, Value,
};
use thiserror::Error;

pub type Clause = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub vars: Vec<i64>,
    pub clauses: Vec<Clause>,
}

impl CnfFormula {
    /// Builds a formula over every variable that occurs in `clauses`.
    /// Repeated literals are merged and tautological clauses dropped.
    pub fn new(clauses: Vec<Clause>) -> Self {
        let clauses: Vec<Clause> = clauses.into_iter().filter_map(normalize).collect();
        let vars: BTreeSet<i64> = clauses.iter().flatten().map(|l| l.abs()).collect();
        CnfFormula {
            vars: vars.into_iter().collect(),
            clauses,
        }
    }

    pub fn is_satisfiable(&self) -> bool {
        sat(&self.vars, &self.clauses).expect("well-formed formula")
    }
}

/// Deduplicated clause, or `None` if it contains both `l` and `-l`.
fn normalize(clause: Clause) -> Option<Clause> {
    let mut out: Clause = Vec::with_capacity(clause.len());
    for l in clause {
        if out.contains(&-l) {
            return None;
        }
        if !out.contains(&l) {
            out.push(l);
        }
    }
    Some(out)
}

/// Removes every occurrence of `x`.
pub fn delete(x: i64, xs: &[i64]) -> Vec<i64> {
    xs.iter().copied().filter(|&y| y != x).collect()
}

/// Drops the clauses that contain `l`.
pub fn delete_clauses_with(l: i64, cnf: &[Clause]) -> Vec<Clause> {
    cnf.iter().filter(|c| !c.contains(&l)).cloned().collect()
}

/// `cnf` with `l` set true: clauses containing `l` are satisfied and go,
/// and `-l` is removed from the others.
pub fn assign_true(l: i64, cnf: &[Clause]) -> Vec<Clause> {
    delete_clauses_with(l, cnf).iter().map(|c| delete(-l, c)).collect()
}

/// Every resolvent on `v`: for each clause with `v` and each with `-v`,
/// their union without `v` and `-v`. Tautologies are dropped.
pub fn resolve_on(v: i64, cnf: &[Clause]) -> Vec<Clause> {
    let pos: Vec<&Clause> = cnf.iter().filter(|c| c.contains(&v)).collect();
    let neg: Vec<&Clause> = cnf.iter().filter(|c| c.contains(&-v)).collect();
    let mut out = Vec::new();
    for p in &pos {
        for n in &neg {
            let merged = delete(v, p).into_iter().chain(delete(-v, n)).collect();
            out.extend(normalize(merged));
        }
    }
    out
}

fn to_value(cnf: &[Clause]) -> Value {
    Value::list(cnf.iter().map(|c| Value::ints(c.iter().copied())))
}

fn ints_of(v: &Value) -> Result<Vec<i64>, MatchError> {
    Ok(v.as_list()?.iter().map(|x| x.as_int()).collect::<Result<_, _>>()?)
}

fn neg_of(name: &'static str) -> Pattern {
    Pattern::value_fn(&[name], move |env| Ok(Value::Int(-env.lookup(name).expect("bound").as_int()?)))
}

/// Whether `cnf` is satisfiable, by `match-first` on `[vars cnf]` as a
/// multiset of integers and a multiset of multisets of integers. The
/// clauses are tried in order: empty CNF, empty clause, unit clause, pure
/// positive literal, pure negative literal, resolution.
pub fn sat(vars: &[i64], cnf: &[Clause]) -> Result<bool, MatchError> {
    let ms = multiset_matcher(integer_matcher());
    let matcher = tuple_matcher(vec![ms.clone(), multiset_matcher(ms)]);
    let target = Value::tuple([Value::ints(vars.iter().copied()), to_value(cnf)]);

    let pair = |a, b| Pattern::tuple(vec![a, b]);
    let cons = Pattern::cons;
    let wild = Pattern::wildcard;
    let var = Pattern::var;
    let recur = |vars: Vec<i64>, cnf: Vec<Clause>| sat(&vars, &cnf).map(Value::Bool);

    let (all_vars, all_cnf) = (vars.to_vec(), cnf.to_vec());
    let unit = move |b: &[Value]| {
        let l = b[0].as_int()?;
        recur(delete(l.abs(), &all_vars), assign_true(l, &all_cnf))
    };
    let pure_cnf = cnf.to_vec();
    let pure_pos = move |b: &[Value]| {
        let v = b[0].as_int()?;
        recur(ints_of(&b[1])?, assign_true(v, &pure_cnf))
    };
    let pure_cnf = cnf.to_vec();
    let pure_neg = move |b: &[Value]| {
        let v = b[0].as_int()?;
        recur(ints_of(&b[1])?, assign_true(-v, &pure_cnf))
    };
    let res_cnf = cnf.to_vec();
    let resolve = move |b: &[Value]| {
        let v = b[0].as_int()?;
        let mut next = resolve_on(v, &res_cnf);
        next.extend(delete_clauses_with(v, &delete_clauses_with(-v, &res_cnf)));
        recur(ints_of(&b[1])?, next)
    };

    let clauses = [
        MatchClause::new(pair(wild(), Pattern::nil()), |_| Ok(Value::Bool(true))),
        MatchClause::new(pair(wild(), cons(Pattern::nil(), wild())), |_| Ok(Value::Bool(false))),
        MatchClause::new(pair(wild(), cons(cons(var("l"), Pattern::nil()), wild())), unit),
        MatchClause::new(
            pair(cons(var("v"), var("vs")), Pattern::not(cons(cons(neg_of("v"), wild()), wild()))),
            pure_pos,
        ),
        MatchClause::new(
            pair(cons(var("v"), var("vs")), Pattern::not(cons(cons(Pattern::value_of("v"), wild()), wild()))),
            pure_neg,
        ),
        MatchClause::new(pair(cons(var("v"), var("vs")), wild()), resolve),
    ]
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .expect("valid patterns");

    match match_first(&target, &matcher, &clauses)? {
        Some(Value::Bool(b)) => Ok(b),
        Some(other) => Err(MatchError::from(nfmatch::ValueError::type_error("boolean", &other))),
        None => Err(MatchError::external(Uncovered(to_value(cnf).to_string()))),
    }
}

/// Raised when a literal's variable is missing from `vars`.
#[derive(Debug, Error)]
#[error("no clause applies: the variable list does not cover {0}")]
pub struct Uncovered(String);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("header declares {declared} clauses but {found} were given")]
    ClauseCount { declared: usize, found: usize },
    #[error("last clause is not terminated by 0")]
    Unterminated,
}

/// Reads the `p cnf V C` format: `c` comment lines, a header, then clauses
/// as whitespace-separated literals each terminated by `0`.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut header: Option<(i64, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let syntax = |message: String| DimacsError::Syntax { line: line_no, message };
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            if header.is_some() {
                return Err(syntax("duplicate header".into()));
            }
            let fields: Vec<&str> = rest.split_whitespace().collect();
            match fields.as_slice() {
                ["cnf", v, c] => {
                    let v = v.parse().map_err(|_| syntax(format!("bad variable count `{v}`")))?;
                    let c = c.parse().map_err(|_| syntax(format!("bad clause count `{c}`")))?;
                    header = Some((v, c));
                }
                _ => return Err(syntax("expected `p cnf VARS CLAUSES`".into())),
            }
            continue;
        }
        let (nvars, _) = header.ok_or(DimacsError::MissingHeader)?;
        for tok in line.split_whitespace() {
            let l: i64 = tok.parse().map_err(|_| syntax(format!("bad literal `{tok}`")))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if l.abs() > nvars {
                return Err(syntax(format!("literal {l} exceeds the {nvars} declared variables")));
            } else {
                current.push(l);
            }
        }
    }
    let (_, declared) = header.ok_or(DimacsError::MissingHeader)?;
    if !current.is_empty() {
        return Err(DimacsError::Unterminated);
    }
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCount {
            declared,
            found: clauses.len(),
        });
    }
    Ok(CnfFormula::new(clauses))
}
