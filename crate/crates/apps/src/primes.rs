//! Prime patterns over the infinite stream of primes.

use nfmatch::{
    integer_matcher, list_matcher, stream_match_all, LazySeq, MatchClause, MatchError, Pattern, Value,
};

/// Trial division up to the square root.
pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d <= n / d {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// 2, 3, 5, 7, ...
pub fn primes_stream() -> LazySeq {
    LazySeq::from_iter((2..).filter(|&n| is_prime(n)).map(|n| Ok(Value::Int(n)))).expect("infinite")
}

fn plus(name: &'static str, k: i64) -> Pattern {
    Pattern::value_fn(&[name], move |env| {
        let p = env.lookup(name).expect("bound").as_int()?;
        Ok(Value::Int(p + k))
    })
}

fn first_k(clause: MatchClause, k: usize) -> Result<Vec<Value>, MatchError> {
    let primes = Value::Lazy(primes_stream());
    stream_match_all(&primes, &list_matcher(integer_matcher()), &clause).take(k).collect()
}

/// The first `k` pairs `(p p+2)` of primes, found with
/// `(join _ (cons p (cons ,(+ p 2) _)))`.
pub fn twin_primes(k: usize) -> Result<Vec<Value>, MatchError> {
    let p = Pattern::join(
        Pattern::wildcard(),
        Pattern::cons(Pattern::var("p"), Pattern::cons(plus("p", 2), Pattern::wildcard())),
    );
    let clause = MatchClause::new(p, |b| {
        let p = b[0].as_int()?;
        Ok(Value::ints([p, p + 2]))
    })
    .expect("valid pattern");
    first_k(clause, k)
}

/// The first `k` prime triplets `(p m p+6)` with `m` either `p+2` or `p+4`.
pub fn prime_triplets(k: usize) -> Result<Vec<Value>, MatchError> {
    let middle = Pattern::and(vec![Pattern::or(vec![plus("p", 2), plus("p", 4)]), Pattern::var("m")]);
    let p = Pattern::join(
        Pattern::wildcard(),
        Pattern::cons(
            Pattern::var("p"),
            Pattern::cons(middle, Pattern::cons(plus("p", 6), Pattern::wildcard())),
        ),
    );
    let clause = MatchClause::new(p, |b| {
        let p = b[0].as_int()?;
        Ok(Value::list([Value::Int(p), b[1].clone(), Value::Int(p + 6)]))
    })
    .expect("valid pattern");
    first_k(clause, k)
}
