//! comb2 and sequential-triple benchmarks.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use nfmatch::{
    integer_matcher, match_all_cancellable, multiset_matcher_with, something, CancelToken, Clauses, MatchClause,
    MatchError, Matcher, Pattern, Value,
};
use serde::Serialize;

use crate::sorted::sorted_list_matcher;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// comb2 with the general multiset clauses only.
    NaiveMultiset,
    /// comb2 with the wildcard shortcut and deferred remainders.
    OptimizedMultiset,
    /// comb2 written as a plain recursive function.
    Functional,
    /// Sequential triple over a multiset of zeros.
    SeqMultiset,
    /// Sequential triple over a sorted list of zeros.
    SeqSorted,
}

impl Variant {
    pub const COMB2: [Variant; 3] = [Variant::NaiveMultiset, Variant::OptimizedMultiset, Variant::Functional];
    pub const SEQ_TRIPLE: [Variant; 2] = [Variant::SeqMultiset, Variant::SeqSorted];

    pub fn name(self) -> &'static str {
        match self {
            Variant::NaiveMultiset => "naive-multiset",
            Variant::OptimizedMultiset => "optimized-multiset",
            Variant::Functional => "functional",
            Variant::SeqMultiset => "seq-multiset",
            Variant::SeqSorted => "seq-sorted",
        }
    }

    fn cancellable(self) -> bool {
        self != Variant::Functional
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Variant::COMB2
            .iter()
            .chain(Variant::SEQ_TRIPLE.iter())
            .copied()
            .find(|v| v.name() == s || (s == "naive" && *v == Variant::NaiveMultiset) || (s == "optimized" && *v == Variant::OptimizedMultiset))
            .ok_or_else(|| format!("unknown variant `{s}`"))
    }
}

fn iota(n: usize) -> Value {
    Value::ints(1..=n as i64)
}

fn zeros(n: usize) -> Value {
    Value::ints(std::iter::repeat_n(0, n))
}

fn comb2_clause() -> MatchClause {
    let p = Pattern::cons(Pattern::var("x"), Pattern::cons(Pattern::var("y"), Pattern::wildcard()));
    MatchClause::new(p, |b| Ok(Value::list(b.iter().cloned()))).expect("valid pattern")
}

fn comb2_matcher(clauses: Clauses) -> Matcher {
    multiset_matcher_with(something(), clauses)
}

/// Every ordered pair of distinct positions of `1..=n`, by matching
/// `(cons x (cons y _))` against the multiset.
pub fn comb2_pattern(n: usize, clauses: Clauses) -> Result<Vec<Value>, MatchError> {
    match_all_cancellable(&iota(n), &comb2_matcher(clauses), &[comb2_clause()], None)
}

/// The same pairs without pattern matching: for each head `x`, pairs with
/// the elements before it and then with those after it.
pub fn comb2_functional(n: usize) -> Vec<Value> {
    comb2_helper(&iota(n).as_list().expect("list").to_vec())
}

fn comb2_helper(xs: &[Value]) -> Vec<Value> {
    let mut out = Vec::with_capacity(xs.len() * xs.len().saturating_sub(1));
    let mut hs: Vec<Value> = Vec::with_capacity(xs.len());
    for (i, x) in xs.iter().enumerate() {
        let pair = |y: &Value| Value::list([x.clone(), y.clone()]);
        out.extend(hs.iter().map(pair));
        out.extend(xs[i + 1..].iter().map(pair));
        hs.push(x.clone());
    }
    out
}

fn seq_triple_clause() -> MatchClause {
    let succ = |k: i64| {
        Pattern::value_fn(&["x"], move |env| Ok(Value::Int(env.lookup("x").expect("bound").as_int()? + k)))
    };
    let p = Pattern::cons(
        Pattern::var("x"),
        Pattern::cons(succ(1), Pattern::cons(succ(2), Pattern::wildcard())),
    );
    MatchClause::new(p, |b| Ok(b[0].clone())).expect("valid pattern")
}

fn timed<T>(f: impl FnOnce() -> Result<T, MatchError>) -> Result<(T, Duration), MatchError> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed()))
}

/// Searches `n` zeros as a multiset for `x, x+1, x+2`. Always empty;
/// quadratic in `n`.
pub fn seq_triple_bench(n: usize) -> Result<(Vec<Value>, Duration), MatchError> {
    let (target, clause, m) = (zeros(n), seq_triple_clause(), multiset_matcher_with(integer_matcher(), Clauses::Optimized));
    timed(|| match_all_cancellable(&target, &m, &[clause], None))
}

/// The same search with [`sorted_list_matcher`].
pub fn seq_triple_sorted(n: usize) -> Result<(Vec<Value>, Duration), MatchError> {
    let (target, clause, m) = (zeros(n), seq_triple_clause(), sorted_list_matcher());
    timed(|| match_all_cancellable(&target, &m, &[clause], None))
}

/// One timed run of `variant` at size `n`: (elapsed, result count).
/// Input construction is not timed.
fn run_once(variant: Variant, n: usize, cancel: &CancelToken) -> Result<(Duration, usize), MatchError> {
    let search = |target: Value, m: Matcher, clause: MatchClause| {
        let start = Instant::now();
        let got = match_all_cancellable(&target, &m, &[clause], Some(cancel))?;
        Ok((start.elapsed(), got.len()))
    };
    match variant {
        Variant::NaiveMultiset => search(iota(n), comb2_matcher(Clauses::Naive), comb2_clause()),
        Variant::OptimizedMultiset => search(iota(n), comb2_matcher(Clauses::Optimized), comb2_clause()),
        Variant::SeqMultiset => search(
            zeros(n),
            multiset_matcher_with(integer_matcher(), Clauses::Optimized),
            seq_triple_clause(),
        ),
        Variant::SeqSorted => search(zeros(n), sorted_list_matcher(), seq_triple_clause()),
        Variant::Functional => {
            let xs = iota(n).as_list().expect("list").to_vec();
            let start = Instant::now();
            let got = comb2_helper(&xs);
            Ok((start.elapsed(), got.len()))
        }
    }
}

/// Cancels a token unless dropped before the timeout.
struct Watchdog {
    stop: Option<mpsc::Sender<()>>,
    handle: Option<thread::JoinHandle<()>>,
}

impl Watchdog {
    fn start(timeout: Duration, token: CancelToken) -> Self {
        let (tx, rx) = mpsc::channel::<()>();
        let handle = thread::spawn(move || {
            if let Err(mpsc::RecvTimeoutError::Timeout) = rx.recv_timeout(timeout) {
                token.cancel();
            }
        });
        Watchdog {
            stop: Some(tx),
            handle: Some(handle),
        }
    }
}

impl Drop for Watchdog {
    fn drop(&mut self) {
        self.stop.take();
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub variants: Vec<Variant>,
    pub repetitions: usize,
    /// Per-repetition limit; a cell that exceeds it is reported as n/a.
    pub timeout: Duration,
    /// Run variants on separate threads. Repetitions of one cell are always
    /// serial.
    pub parallel: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![50, 100, 200, 400, 800, 1600],
            variants: Variant::COMB2.to_vec(),
            repetitions: 5,
            timeout: Duration::from_secs(60),
            parallel: false,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.repetitions == 0 {
            return Err("repetitions must be at least 1".into());
        }
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return Err("sizes must be positive".into());
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err("sizes must be strictly ascending".into());
        }
        if self.variants.is_empty() {
            return Err("no variants selected".into());
        }
        Ok(())
    }
}

/// One cell. `median` and `count` are `None` when the cell timed out.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub variant: Variant,
    pub n: usize,
    pub median: Option<Duration>,
    pub count: Option<usize>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    variant: &'a str,
    n: usize,
    median_seconds: String,
    count: String,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, variant: Variant, n: usize) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.variant == variant && r.n == n)
    }

    pub fn median(&self, variant: Variant, n: usize) -> Option<Duration> {
        self.row(variant, n).and_then(|r| r.median)
    }

    /// `time(2n) / time(n)` for each consecutive doubling of `n` measured
    /// for `variant`.
    pub fn scaling(&self, variant: Variant) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for r in self.rows.iter().filter(|r| r.variant == variant) {
            if let (Some(t), Some(t2)) = (r.median, self.median(variant, r.n * 2)) {
                out.push((r.n, t2.as_secs_f64() / t.as_secs_f64().max(1e-9)));
            }
        }
        out
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(CsvRow {
                variant: r.variant.name(),
                n: r.n,
                median_seconds: r.median.map_or("n/a".into(), |d| format!("{:.6}", d.as_secs_f64())),
                count: r.count.map_or("n/a".into(), |c| c.to_string()),
            })?;
        }
        w.flush()?;
        Ok(())
    }

    /// Variants as rows, sizes as columns.
    pub fn table(&self) -> String {
        let mut sizes: Vec<usize> = self.rows.iter().map(|r| r.n).collect();
        sizes.sort_unstable();
        sizes.dedup();
        let mut variants: Vec<Variant> = self.rows.iter().map(|r| r.variant).collect();
        variants.sort_unstable();
        variants.dedup();

        let mut s = format!("{:<20}", "variant");
        for n in &sizes {
            let _ = write!(s, " {:>10}", format!("n={n}"));
        }
        s.push('\n');
        for v in variants {
            let _ = write!(s, "{:<20}", v.name());
            for &n in &sizes {
                let cell = match self.row(v, n) {
                    Some(BenchRow { median: Some(d), .. }) => format!("{:.3}s", d.as_secs_f64()),
                    Some(_) => "n/a".to_string(),
                    None => "-".to_string(),
                };
                let _ = write!(s, " {cell:>10}");
            }
            s.push('\n');
        }
        s
    }
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort_unstable();
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        (xs[mid - 1] + xs[mid]) / 2
    }
}

fn run_variant(cfg: &BenchConfig, variant: Variant) -> Result<Vec<BenchRow>, MatchError> {
    let mut rows = Vec::new();
    let mut timed_out = false;
    for &n in &cfg.sizes {
        if timed_out {
            // Larger inputs cannot finish sooner.
            rows.push(BenchRow { variant, n, median: None, count: None });
            continue;
        }
        let mut times = Vec::with_capacity(cfg.repetitions);
        let mut count = None;
        for _ in 0..cfg.repetitions {
            let token = CancelToken::new();
            let dog = variant.cancellable().then(|| Watchdog::start(cfg.timeout, token.clone()));
            let res = run_once(variant, n, &token);
            drop(dog);
            match res {
                Ok((t, c)) if t <= cfg.timeout => {
                    times.push(t);
                    count = Some(c);
                }
                Ok(_) | Err(MatchError::Cancelled) => {
                    timed_out = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        rows.push(if timed_out {
            BenchRow { variant, n, median: None, count: None }
        } else {
            BenchRow { variant, n, median: Some(median(times)), count }
        });
    }
    Ok(rows)
}

/// Runs every (variant, size) cell `repetitions` times and records the
/// median wall time of the match call.
pub fn run_benchmarks(cfg: &BenchConfig) -> Result<BenchReport, String> {
    cfg.validate()?;
    let per_variant: Vec<Result<Vec<BenchRow>, MatchError>> = if cfg.parallel {
        thread::scope(|s| {
            let handles: Vec<_> = cfg.variants.iter().map(|&v| s.spawn(move || run_variant(cfg, v))).collect();
            handles.into_iter().map(|h| h.join().expect("benchmark thread panicked")).collect()
        })
    } else {
        cfg.variants.iter().map(|&v| run_variant(cfg, v)).collect()
    };
    let mut rows = Vec::new();
    for r in per_variant {
        rows.extend(r.map_err(|e| e.to_string())?);
    }
    rows.sort_by_key(|r| (r.variant, r.n));
    Ok(BenchReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(v: Vec<Value>) -> Vec<(i64, i64)> {
        let mut out: Vec<(i64, i64)> = v
            .iter()
            .map(|p| {
                let l = p.as_list().unwrap();
                (l.as_slice()[0].as_int().unwrap(), l.as_slice()[1].as_int().unwrap())
            })
            .collect();
        out.sort_unstable();
        out
    }

    #[test]
    fn comb2_examples() {
        let got = comb2_pattern(3, Clauses::Optimized).unwrap();
        let want: Vec<Value> = [(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)]
            .iter()
            .map(|&(a, b)| Value::ints([a, b]))
            .collect();
        assert_eq!(got, want);
        assert!(comb2_pattern(1, Clauses::Naive).unwrap().is_empty());
        assert!(comb2_functional(1).is_empty());
        assert_eq!(pairs(comb2_functional(2)), vec![(1, 2), (2, 1)]);
        assert_eq!(pairs(comb2_functional(3)), pairs(want));
    }

    #[test]
    fn seq_triple_is_empty() {
        assert!(seq_triple_bench(100).unwrap().0.is_empty());
        assert!(seq_triple_bench(1).unwrap().0.is_empty());
        assert!(seq_triple_sorted(1).unwrap().0.is_empty());
    }

    #[test]
    fn report_rows_and_csv() {
        let cfg = BenchConfig {
            sizes: vec![50, 100],
            variants: Variant::COMB2.to_vec(),
            repetitions: 1,
            timeout: Duration::from_secs(30),
            parallel: false,
        };
        let report = run_benchmarks(&cfg).unwrap();
        assert_eq!(report.rows.len(), 6);
        for n in [50, 100] {
            for v in Variant::COMB2 {
                assert_eq!(report.row(v, n).unwrap().count, Some(n * (n - 1)));
            }
        }
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("variant,n,median_seconds,count\n"));
        assert_eq!(text.lines().count(), 7);
        assert!(report.table().contains("n=100"));
    }

    #[test]
    fn timeouts_are_reported_as_na() {
        let cfg = BenchConfig {
            sizes: vec![1000, 2000],
            variants: vec![Variant::NaiveMultiset],
            repetitions: 1,
            timeout: Duration::from_millis(1),
            parallel: false,
        };
        let report = run_benchmarks(&cfg).unwrap();
        assert!(report.rows.iter().all(|r| r.median.is_none() && r.count.is_none()));
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().contains("naive-multiset,1000,n/a,n/a"));
    }

    #[test]
    fn config_validation() {
        let mut cfg = BenchConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.sizes = vec![100, 50];
        assert!(cfg.validate().is_err());
        cfg.sizes = vec![50];
        cfg.repetitions = 0;
        assert!(cfg.validate().is_err());
    }
}
