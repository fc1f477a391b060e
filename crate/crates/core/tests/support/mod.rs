//! Random matching instances and a brute-force decomposition enumerator that
//! computes their results without the engine.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fmt;

use nfmatch::{integer_matcher, list_matcher_with, multiset_matcher_with, BindingEnv, Clauses, Matcher, Pattern, Value};
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    List,
    Multiset,
}

impl Kind {
    pub fn matcher(self, clauses: Clauses) -> Matcher {
        match self {
            Kind::List => list_matcher_with(integer_matcher(), clauses),
            Kind::Multiset => multiset_matcher_with(integer_matcher(), clauses),
        }
    }
}

/// Element patterns, matched with `Integer`.
#[derive(Clone, Debug)]
pub enum Elem {
    Wild,
    Var(String),
    Val(i64),
    /// `,x` for an element variable bound further left.
    Ref(String),
}

/// Collection patterns, matched with the collection matcher.
#[derive(Clone, Debug)]
pub enum Coll {
    Wild,
    Var(String),
    Val(Vec<i64>),
    Nil,
    Cons(Elem, Box<Coll>),
    Join(Box<Coll>, Box<Coll>),
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub kind: Kind,
    pub pattern: Coll,
    pub target: Vec<i64>,
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {} over {:?}", self.kind, self.pattern.to_pattern(), self.target)
    }
}

pub struct GenConfig {
    pub kinds: Vec<Kind>,
    pub max_len: usize,
    pub max_depth: usize,
    /// Allow `,x` element patterns that refer to earlier binders.
    pub refs: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            kinds: vec![Kind::List, Kind::Multiset],
            max_len: 6,
            max_depth: 4,
            refs: false,
        }
    }
}

struct Gen<'a, R> {
    rng: &'a mut R,
    cfg: &'a GenConfig,
    kind: Kind,
    fresh: usize,
    elem_vars: Vec<String>,
}

impl<R: Rng> Gen<'_, R> {
    fn name(&mut self) -> String {
        self.fresh += 1;
        format!("v{}", self.fresh)
    }

    fn small_list(&mut self) -> Vec<i64> {
        let n = self.rng.gen_range(0..=3);
        (0..n).map(|_| self.rng.gen_range(0..3)).collect()
    }

    fn elem(&mut self) -> Elem {
        match self.rng.gen_range(0..10) {
            0..=1 => Elem::Wild,
            2..=5 => {
                let x = self.name();
                self.elem_vars.push(x.clone());
                Elem::Var(x)
            }
            6..=7 if self.cfg.refs && !self.elem_vars.is_empty() => {
                let i = self.rng.gen_range(0..self.elem_vars.len());
                Elem::Ref(self.elem_vars[i].clone())
            }
            _ => Elem::Val(self.rng.gen_range(0..3)),
        }
    }

    fn coll(&mut self, depth: usize) -> Coll {
        let leaf = depth == 0 || self.rng.gen_bool(0.25);
        if leaf {
            return match self.rng.gen_range(0..8) {
                0..=2 => Coll::Wild,
                3..=5 => Coll::Var(self.name()),
                6 => Coll::Val(self.small_list()),
                _ => Coll::Nil,
            };
        }
        if self.kind == Kind::List && self.rng.gen_bool(0.4) {
            let front = self.coll(depth - 1);
            let back = self.coll(depth - 1);
            Coll::Join(Box::new(front), Box::new(back))
        } else {
            let head = self.elem();
            let tail = self.coll(depth - 1);
            Coll::Cons(head, Box::new(tail))
        }
    }
}

/// A random instance. Multisets have no `join` constructor, so `join` only
/// appears under `List`.
pub fn random_instance<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Instance {
    let kind = cfg.kinds[rng.gen_range(0..cfg.kinds.len())];
    let len = rng.gen_range(0..=cfg.max_len);
    let target = (0..len).map(|_| rng.gen_range(0..3)).collect();
    let mut g = Gen {
        rng,
        cfg,
        kind,
        fresh: 0,
        elem_vars: Vec::new(),
    };
    let pattern = g.coll(cfg.max_depth);
    Instance { kind, pattern, target }
}

impl Elem {
    pub fn to_pattern(&self) -> Pattern {
        match self {
            Elem::Wild => Pattern::wildcard(),
            Elem::Var(x) => Pattern::var(x),
            Elem::Val(n) => Pattern::constant(*n),
            Elem::Ref(x) => Pattern::value_of(x),
        }
    }
}

impl Coll {
    pub fn to_pattern(&self) -> Pattern {
        match self {
            Coll::Wild => Pattern::wildcard(),
            Coll::Var(x) => Pattern::var(x),
            Coll::Val(xs) => Pattern::constant(Value::ints(xs.iter().copied())),
            Coll::Nil => Pattern::nil(),
            Coll::Cons(h, t) => Pattern::cons(h.to_pattern(), t.to_pattern()),
            Coll::Join(a, b) => Pattern::join(a.to_pattern(), b.to_pattern()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Bound {
    Int(i64),
    Ints(Vec<i64>),
}

/// One match result: variable name to value.
pub type Env = BTreeMap<String, Bound>;

fn sorted(xs: &[i64]) -> Vec<i64> {
    let mut v = xs.to_vec();
    v.sort_unstable();
    v
}

fn elem_oracle(p: &Elem, x: i64, env: &Env) -> Vec<Env> {
    match p {
        Elem::Wild => vec![env.clone()],
        Elem::Var(name) => {
            let mut e = env.clone();
            e.insert(name.clone(), Bound::Int(x));
            vec![e]
        }
        Elem::Val(n) => {
            if *n == x {
                vec![env.clone()]
            } else {
                vec![]
            }
        }
        Elem::Ref(name) => match env.get(name) {
            Some(Bound::Int(n)) if *n == x => vec![env.clone()],
            Some(Bound::Int(_)) => vec![],
            other => panic!("oracle: ref {name} to {other:?}"),
        },
    }
}

fn coll_oracle(kind: Kind, p: &Coll, xs: &[i64], env: &Env) -> Vec<Env> {
    match p {
        Coll::Wild => vec![env.clone()],
        Coll::Var(name) => {
            let mut e = env.clone();
            e.insert(name.clone(), Bound::Ints(xs.to_vec()));
            vec![e]
        }
        Coll::Val(v) => {
            let equal = match kind {
                Kind::List => v.as_slice() == xs,
                Kind::Multiset => sorted(v) == sorted(xs),
            };
            if equal {
                vec![env.clone()]
            } else {
                vec![]
            }
        }
        Coll::Nil => {
            if xs.is_empty() {
                vec![env.clone()]
            } else {
                vec![]
            }
        }
        Coll::Cons(h, t) => {
            let picks: Vec<usize> = match kind {
                Kind::List => (0..xs.len().min(1)).collect(),
                Kind::Multiset => (0..xs.len()).collect(),
            };
            let mut out = Vec::new();
            for i in picks {
                let mut rest = xs.to_vec();
                let x = rest.remove(i);
                for e in elem_oracle(h, x, env) {
                    out.extend(coll_oracle(kind, t, &rest, &e));
                }
            }
            out
        }
        Coll::Join(a, b) => {
            assert_eq!(kind, Kind::List, "oracle: join on a multiset");
            let mut out = Vec::new();
            for k in 0..=xs.len() {
                for e in coll_oracle(kind, a, &xs[..k], env) {
                    out.extend(coll_oracle(kind, b, &xs[k..], &e));
                }
            }
            out
        }
    }
}

/// Every decomposition of the target the pattern describes, in no
/// particular order.
pub fn oracle(inst: &Instance) -> Vec<Env> {
    coll_oracle(inst.kind, &inst.pattern, &inst.target, &Env::new())
}

pub fn bound_of(v: &Value) -> Bound {
    match v {
        Value::Int(n) => Bound::Int(*n),
        Value::List(l) => Bound::Ints(l.iter().map(|x| x.as_int().expect("integer element")).collect()),
        other => panic!("unexpected bound value {other}"),
    }
}

pub fn env_of(env: &BindingEnv) -> Env {
    env.entries()
        .into_iter()
        .map(|(k, v)| (k.as_str().to_string(), bound_of(&v)))
        .collect()
}

/// Sorts so two result lists can be compared as multisets.
pub fn multiset<T: Ord>(mut xs: Vec<T>) -> Vec<T> {
    xs.sort();
    xs
}
