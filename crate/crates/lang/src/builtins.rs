use nfmatch::{
    eq_matcher, integer_matcher, list_matcher_with, multiset_matcher_with, something, value_equal, LazySeq, List,
    StreamError, Value,
};

use crate::error::LangError;
use crate::eval::{to_matcher, truthy, Arity, Interp};

fn int(v: &Value, who: &str) -> Result<i64, LangError> {
    match v {
        Value::Int(n) => Ok(*n),
        other => Err(LangError::runtime(format!("{who}: expected an integer, found {}", other.kind_name()))),
    }
}

fn list<'a>(v: &'a Value, who: &str) -> Result<&'a List, LangError> {
    match v {
        Value::List(l) => Ok(l),
        other => Err(LangError::runtime(format!("{who}: expected a list, found {}", other.kind_name()))),
    }
}

fn stream(v: &Value, who: &str) -> Result<LazySeq, LangError> {
    match v {
        Value::Lazy(s) => Ok(s.clone()),
        Value::List(l) => Ok(LazySeq::from_values(l.to_vec())),
        other => Err(LangError::runtime(format!("{who}: expected a stream, found {}", other.kind_name()))),
    }
}

fn count(v: &Value, who: &str) -> Result<usize, LangError> {
    let n = int(v, who)?;
    usize::try_from(n).map_err(|_| LangError::runtime(format!("{who}: expected a non-negative count, got {n}")))
}

fn overflow(who: &str) -> LangError {
    LangError::runtime(format!("{who}: integer overflow"))
}

fn fold_ints(args: &[Value], who: &str, init: i64, op: fn(i64, i64) -> Option<i64>) -> Result<Value, LangError> {
    let mut acc = init;
    for a in args {
        acc = op(acc, int(a, who)?).ok_or_else(|| overflow(who))?;
    }
    Ok(Value::Int(acc))
}

fn compare(args: &[Value], who: &str, ok: fn(i64, i64) -> bool) -> Result<Value, LangError> {
    let ns = args.iter().map(|a| int(a, who)).collect::<Result<Vec<_>, _>>()?;
    Ok(Value::Bool(ns.windows(2).all(|w| ok(w[0], w[1]))))
}

fn divide(args: &[Value], who: &str, op: fn(i64, i64) -> Option<i64>) -> Result<Value, LangError> {
    let (a, b) = (int(&args[0], who)?, int(&args[1], who)?);
    if b == 0 {
        return Err(LangError::runtime(format!("{who}: division by zero")));
    }
    op(a, b).map(Value::Int).ok_or_else(|| overflow(who))
}

pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3i64;
    while d <= n / d {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn iota(args: &[Value], who: &str) -> Result<(i64, i64, i64), LangError> {
    let n = int(&args[0], who)?;
    let start = args.get(1).map(|v| int(v, who)).transpose()?.unwrap_or(0);
    let step = args.get(2).map(|v| int(v, who)).transpose()?.unwrap_or(1);
    Ok((n, start, step))
}

fn stream_iota(remaining: Option<u64>, start: i64, step: i64) -> LazySeq {
    if remaining == Some(0) {
        return LazySeq::end();
    }
    LazySeq::cons(Value::Int(start), move || {
        let next = start
            .checked_add(step)
            .ok_or_else(|| StreamError::new(overflow("stream-iota")))?;
        Ok(stream_iota(remaining.map(|r| r - 1), next, step))
    })
}

fn stream_filter(interp: Interp, pred: Value, mut cur: LazySeq) -> Result<LazySeq, LangError> {
    while let Some(head) = cur.head().cloned() {
        if truthy(&interp.apply(&pred, vec![head.clone()])?) {
            return Ok(LazySeq::cons(head, move || {
                let rest = cur.tail()?;
                stream_filter(interp, pred, rest).map_err(StreamError::new)
            }));
        }
        cur = cur.tail()?;
    }
    Ok(LazySeq::end())
}

fn stream_take(s: LazySeq, n: usize) -> LazySeq {
    match s.head() {
        Some(head) if n > 0 => {
            let head = head.clone();
            LazySeq::cons(head, move || Ok(stream_take(s.tail()?, n - 1)))
        }
        _ => LazySeq::end(),
    }
}

fn first_of(v: &Value, who: &str) -> Result<Value, LangError> {
    let found = match v {
        Value::List(l) => l.first().cloned(),
        Value::Lazy(s) => s.head().cloned(),
        other => return Err(LangError::runtime(format!("{who}: expected a list, found {}", other.kind_name()))),
    };
    found.ok_or_else(|| LangError::runtime(format!("{who}: empty list")))
}

fn rest_of(v: &Value, who: &str) -> Result<Value, LangError> {
    match v {
        Value::List(l) => l
            .tail()
            .map(Value::List)
            .ok_or_else(|| LangError::runtime(format!("{who}: empty list"))),
        Value::Lazy(s) if s.is_end() => Err(LangError::runtime(format!("{who}: empty stream"))),
        Value::Lazy(s) => Ok(Value::Lazy(s.tail()?)),
        other => Err(LangError::runtime(format!("{who}: expected a list, found {}", other.kind_name()))),
    }
}

pub(crate) fn install(interp: &Interp) {
    use Arity::*;

    interp.define("Something", Value::Matcher(something()));
    interp.define("Eq", Value::Matcher(eq_matcher()));
    interp.define("Integer", Value::Matcher(integer_matcher()));

    interp.define_builtin("List", Exact(1), |i, a| {
        Ok(Value::Matcher(list_matcher_with(to_matcher(&a[0])?, i.options().clauses)))
    });
    interp.define_builtin("Multiset", Exact(1), |i, a| {
        Ok(Value::Matcher(multiset_matcher_with(to_matcher(&a[0])?, i.options().clauses)))
    });

    // arithmetic
    interp.define_builtin("+", AtLeast(0), |_, a| fold_ints(a, "+", 0, i64::checked_add));
    interp.define_builtin("*", AtLeast(0), |_, a| fold_ints(a, "*", 1, i64::checked_mul));
    interp.define_builtin("-", AtLeast(1), |_, a| {
        let first = int(&a[0], "-")?;
        if a.len() == 1 {
            return first.checked_neg().map(Value::Int).ok_or_else(|| overflow("-"));
        }
        fold_ints(&a[1..], "-", first, i64::checked_sub)
    });
    interp.define_builtin("abs", Exact(1), |_, a| {
        int(&a[0], "abs")?.checked_abs().map(Value::Int).ok_or_else(|| overflow("abs"))
    });
    interp.define_builtin("neg", Exact(1), |_, a| {
        int(&a[0], "neg")?.checked_neg().map(Value::Int).ok_or_else(|| overflow("neg"))
    });
    interp.define_builtin("quotient", Exact(2), |_, a| divide(a, "quotient", i64::checked_div));
    interp.define_builtin("remainder", Exact(2), |_, a| divide(a, "remainder", i64::checked_rem));
    interp.define_builtin("modulo", Exact(2), |_, a| divide(a, "modulo", i64::checked_rem_euclid));
    interp.define_builtin("=", AtLeast(1), |_, a| compare(a, "=", |x, y| x == y));
    interp.define_builtin("<", AtLeast(1), |_, a| compare(a, "<", |x, y| x < y));
    interp.define_builtin(">", AtLeast(1), |_, a| compare(a, ">", |x, y| x > y));
    interp.define_builtin("<=", AtLeast(1), |_, a| compare(a, "<=", |x, y| x <= y));
    interp.define_builtin(">=", AtLeast(1), |_, a| compare(a, ">=", |x, y| x >= y));
    interp.define_builtin("prime?", Exact(1), |_, a| Ok(Value::Bool(is_prime(int(&a[0], "prime?")?))));

    // equality
    interp.define_builtin("eq?", Exact(2), |_, a| Ok(Value::Bool(value_equal(&a[0], &a[1])?)));
    interp.define_builtin("equal?", Exact(2), |_, a| Ok(Value::Bool(value_equal(&a[0], &a[1])?)));
    interp.define_builtin("not", Exact(1), |_, a| Ok(Value::Bool(!truthy(&a[0]))));

    // lists
    interp.define_builtin("list", AtLeast(0), |_, a| Ok(Value::list(a.iter().cloned())));
    interp.define_builtin("tuple", AtLeast(0), |_, a| Ok(Value::tuple(a.iter().cloned())));
    interp.define_builtin("cons", Exact(2), |_, a| match &a[1] {
        Value::List(l) => Ok(Value::List(List::new(vec![a[0].clone()]).concat(l))),
        Value::Lazy(s) => Ok(Value::Lazy(LazySeq::cons_ready(a[0].clone(), s.clone()))),
        other => Err(LangError::runtime(format!("cons: expected a list, found {}", other.kind_name()))),
    });
    interp.define_builtin("car", Exact(1), |_, a| first_of(&a[0], "car"));
    interp.define_builtin("cdr", Exact(1), |_, a| rest_of(&a[0], "cdr"));
    interp.define_builtin("cadr", Exact(1), |_, a| first_of(&rest_of(&a[0], "cadr")?, "cadr"));
    interp.define_builtin("append", AtLeast(0), |_, a| {
        let mut out = Vec::new();
        for x in a {
            out.extend(list(x, "append")?.iter().cloned());
        }
        Ok(Value::list(out))
    });
    interp.define_builtin("length", Exact(1), |_, a| match &a[0] {
        Value::Tuple(items) => Ok(Value::Int(items.len() as i64)),
        other => Ok(Value::Int(list(other, "length")?.len() as i64)),
    });
    interp.define_builtin("null?", Exact(1), |_, a| match &a[0] {
        Value::Lazy(s) => Ok(Value::Bool(s.is_end())),
        other => Ok(Value::Bool(list(other, "null?")?.is_empty())),
    });
    interp.define_builtin("reverse", Exact(1), |_, a| {
        Ok(Value::list(list(&a[0], "reverse")?.iter().rev().cloned()))
    });
    interp.define_builtin("iota", Range(1, 3), |_, a| {
        let (n, start, step) = iota(a, "iota")?;
        let n = usize::try_from(n).map_err(|_| LangError::runtime("iota: negative count"))?;
        let mut out = Vec::with_capacity(n);
        let mut x = start;
        for i in 0..n {
            out.push(Value::Int(x));
            if i + 1 < n {
                x = x.checked_add(step).ok_or_else(|| overflow("iota"))?;
            }
        }
        Ok(Value::list(out))
    });
    interp.define_builtin("take", Exact(2), |_, a| {
        let n = count(&a[1], "take")?;
        match &a[0] {
            Value::Lazy(s) => Ok(Value::list(s.take(n)?)),
            other => {
                let l = list(other, "take")?;
                if n > l.len() {
                    return Err(LangError::runtime(format!("take: list has only {} elements", l.len())));
                }
                Ok(Value::List(l.slice(0, n)))
            }
        }
    });
    interp.define_builtin("drop", Exact(2), |_, a| {
        let l = list(&a[0], "drop")?;
        let n = count(&a[1], "drop")?;
        if n > l.len() {
            return Err(LangError::runtime(format!("drop: list has only {} elements", l.len())));
        }
        Ok(Value::List(l.slice(n, l.len())))
    });
    interp.define_builtin("delete", Exact(2), |_, a| {
        let mut out = Vec::new();
        for x in list(&a[1], "delete")?.iter() {
            if !value_equal(&a[0], x)? {
                out.push(x.clone());
            }
        }
        Ok(Value::list(out))
    });
    interp.define_builtin("map", Exact(2), |i, a| {
        let out = list(&a[1], "map")?
            .iter()
            .map(|x| i.apply(&a[0], vec![x.clone()]))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Value::list(out))
    });
    interp.define_builtin("filter", Exact(2), |i, a| {
        let mut out = Vec::new();
        for x in list(&a[1], "filter")?.iter() {
            if truthy(&i.apply(&a[0], vec![x.clone()])?) {
                out.push(x.clone());
            }
        }
        Ok(Value::list(out))
    });

    // streams
    interp.define_builtin("stream-iota", Range(1, 3), |_, a| {
        let (n, start, step) = iota(a, "stream-iota")?;
        let remaining = u64::try_from(n).ok();
        Ok(Value::Lazy(stream_iota(remaining, start, step)))
    });
    interp.define_builtin("stream-filter", Exact(2), |i, a| {
        Ok(Value::Lazy(stream_filter(i.clone(), a[0].clone(), stream(&a[1], "stream-filter")?)?))
    });
    interp.define_builtin("stream-take", Exact(2), |_, a| {
        Ok(Value::Lazy(stream_take(stream(&a[0], "stream-take")?, count(&a[1], "stream-take")?)))
    });
    interp.define_builtin("stream->list", Range(1, 2), |_, a| {
        let s = stream(&a[0], "stream->list")?;
        let items = match a.get(1) {
            Some(n) => s.take(count(n, "stream->list")?)?,
            None => s.iter().collect::<Result<Vec<_>, _>>()?,
        };
        Ok(Value::list(items))
    });
    interp.define_builtin("stream-car", Exact(1), |_, a| first_of(&a[0], "stream-car"));
    interp.define_builtin("stream-cdr", Exact(1), |_, a| rest_of(&a[0], "stream-cdr"));
}
