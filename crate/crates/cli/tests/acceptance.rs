//! One pass/fail line per acceptance criterion. Lines are written straight
//! to stdout so they show up without `--nocapture`.

#[path = "../../core/tests/support/mod.rs"]
mod core_support;
#[path = "../../apps/tests/support/mod.rs"]
mod sat_support;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use nfmatch::{
    extract_pattern_variables, gen_match_results, integer_matcher, list_matcher, match_all, match_first,
    multiset_matcher, multiset_matcher_with, process_matching_state, something, stream_match_all, tails, unjoin,
    validate_pattern, Clauses, MatchClause, MatchingState, Pattern, Value,
};
use nfmatch_apps::{
    assign_true, comb2_functional, comb2_pattern, is_prime, run_benchmarks, seq_triple_bench, seq_triple_sorted,
    twin_primes, BenchConfig, CnfFormula, Variant,
};
use nfmatch_lang::{print, Interp, Options};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use core_support::{env_of, multiset, oracle, random_instance, GenConfig};
use sat_support::{random_cnf, truth_table_sat};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cli_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn nfmatch(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_nfmatch")).args(args).output().unwrap()
}

fn golden_transcripts() -> Check {
    let dir = cli_dir().join("tests/golden");
    let mut files: Vec<PathBuf> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "scm"))
        .collect();
    files.sort();
    let mut cases = 0;
    let start = Instant::now();
    for file in &files {
        let src = fs::read_to_string(file).unwrap();
        let engine = if src.starts_with("; engine: stream") { "stream" } else { "strict" };
        let want = fs::read_to_string(file.with_extension("out")).unwrap();
        let o = nfmatch(&["--engine", engine, "run", file.to_str().unwrap()]);
        ensure(o.status.success(), || format!("{}: {}", file.display(), String::from_utf8_lossy(&o.stderr)))?;
        let got = String::from_utf8(o.stdout).unwrap();
        ensure(got == want, || format!("{}: got {got:?}, want {want:?}", file.display()))?;
        cases += want.lines().count();
    }
    let elapsed = start.elapsed();
    ensure(cases >= 15, || format!("only {cases} cases"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("{cases} printed results in {} files, {elapsed:.2?}", files.len()))
}

fn first_path(state: &MatchingState) -> Option<Vec<MatchingState>> {
    if state.is_final() {
        return Some(vec![state.clone()]);
    }
    for next in process_matching_state(state).ok()? {
        if let Some(mut rest) = first_path(&next) {
            rest.insert(0, state.clone());
            return Some(rest);
        }
    }
    None
}

fn reduction_path() -> Check {
    let m = multiset_matcher_with(integer_matcher(), Clauses::Naive);
    let p = Pattern::cons(Pattern::var("m"), Pattern::cons(Pattern::value_of("m"), Pattern::wildcard()));
    let init = MatchingState::initial(p.clone(), m.clone(), Value::ints([2, 8, 2]));
    let path = first_path(&init).ok_or("no successful branch")?;
    let want = [
        "(MState {[(cons m (cons ,m _)) (Multiset Integer) (2 8 2)]} {})",
        "(MState {[m Integer 2] [(cons ,m _) (Multiset Integer) (8 2)]} {})",
        "(MState {[m Something 2] [(cons ,m _) (Multiset Integer) (8 2)]} {})",
        "(MState {[(cons ,m _) (Multiset Integer) (8 2)]} {2})",
        "(MState {[,m Integer 2] [_ (Multiset Integer) (8)]} {2})",
        "(MState {[_ (Multiset Integer) (8)]} {2})",
        "(MState {[_ Something (8)]} {2})",
        "(MState {} {2})",
    ];
    let got: Vec<String> = path.iter().map(ToString::to_string).collect();
    ensure(got == want, || format!("path {got:#?}"))?;
    let sizes: Vec<usize> = path.iter().map(MatchingState::stack_len).collect();
    ensure(sizes == [1, 2, 2, 1, 2, 1, 1, 0], || format!("stack sizes {sizes:?}"))?;
    let clause = MatchClause::new(p, |b| Ok(b[0].clone())).unwrap();
    let results = Value::list(match_all(&Value::ints([2, 8, 2]), &m, &[clause]).unwrap());
    ensure(results.to_string() == "(2 2)", || format!("results {results}"))?;
    Ok("8 rows match, stack sizes 1 2 2 1 2 1 1 0, results (2 2)".into())
}

fn vars_clause(p: Pattern) -> MatchClause {
    MatchClause::new(p, |b| Ok(Value::list(b.iter().cloned()))).unwrap()
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cfg = GenConfig { refs: true, ..GenConfig::default() };
    let (mut checked, mut matched) = (0, 0);
    while checked < 1000 {
        let inst = random_instance(&mut rng, &cfg);
        let p = inst.pattern.to_pattern();
        if validate_pattern(&p).is_err() {
            continue;
        }
        checked += 1;
        let m = inst.kind.matcher(Clauses::Optimized);
        let t = Value::ints(inst.target.iter().copied());
        let envs = gen_match_results(&p, &m, &t).map_err(|e| format!("{inst}: {e}"))?;
        let got = multiset(envs.iter().map(env_of).collect());
        let want = multiset(oracle(&inst));
        ensure(got == want, || format!("{inst}: engine {got:?}, oracle {want:?}"))?;

        let clause = vars_clause(p);
        let all = match_all(&t, &m, std::slice::from_ref(&clause)).unwrap();
        ensure(all.len() == want.len(), || format!("{inst}: match_all count"))?;
        let first = match_first(&t, &m, std::slice::from_ref(&clause)).unwrap();
        ensure(first == all.first().cloned(), || format!("{inst}: match_first is not the head"))?;
        let fair: Vec<String> = stream_match_all(&t, &m, &clause).map(|r| r.unwrap().to_string()).collect();
        let strict: Vec<String> = all.iter().map(ToString::to_string).collect();
        ensure(multiset(fair) == multiset(strict), || format!("{inst}: stream results differ"))?;
        matched += usize::from(!all.is_empty());
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("{checked} instances ({matched} with results), {elapsed:.2?}"))
}

fn naive_optimized() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cfg = GenConfig { refs: true, ..GenConfig::default() };
    let mut checked = 0;
    while checked < 500 {
        let inst = random_instance(&mut rng, &cfg);
        let p = inst.pattern.to_pattern();
        if validate_pattern(&p).is_err() {
            continue;
        }
        checked += 1;
        let t = Value::ints(inst.target.iter().copied());
        let naive = gen_match_results(&p, &inst.kind.matcher(Clauses::Naive), &t).unwrap();
        let fast = gen_match_results(&p, &inst.kind.matcher(Clauses::Optimized), &t).unwrap();
        let (a, b) = (
            multiset(naive.iter().map(env_of).collect::<Vec<_>>()),
            multiset(fast.iter().map(env_of).collect::<Vec<_>>()),
        );
        ensure(a == b, || format!("{inst}: naive {a:?}, optimized {b:?}"))?;
    }
    Ok(format!("{checked} instances identical"))
}

fn sorted_pairs(v: &[Value]) -> Vec<String> {
    multiset(v.iter().map(ToString::to_string).collect())
}

fn comb2_counts() -> Check {
    for n in [4usize, 10, 50] {
        let naive = sorted_pairs(&comb2_pattern(n, Clauses::Naive).unwrap());
        let fast = sorted_pairs(&comb2_pattern(n, Clauses::Optimized).unwrap());
        let func = sorted_pairs(&comb2_functional(n));
        ensure(naive.len() == n * (n - 1), || format!("n={n}: {} pairs", naive.len()))?;
        ensure(naive == fast && fast == func, || format!("n={n}: variants differ"))?;
    }
    Ok("n = 4, 10, 50 give 12, 90, 2450 identical pairs".into())
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn scaling() -> Check {
    let timeout = Duration::from_secs(60);
    let main = run_benchmarks(&BenchConfig {
        sizes: vec![400, 800],
        variants: vec![Variant::OptimizedMultiset, Variant::Functional],
        repetitions: 5,
        timeout,
        parallel: false,
    })?;
    let naive = run_benchmarks(&BenchConfig {
        sizes: vec![400],
        variants: vec![Variant::NaiveMultiset],
        repetitions: 5,
        timeout,
        parallel: false,
    })?;
    let cell = |r: &nfmatch_apps::BenchReport, v, n| r.median(v, n).ok_or(format!("{v} n={n} n/a"));
    let o400 = cell(&main, Variant::OptimizedMultiset, 400)?;
    let o800 = cell(&main, Variant::OptimizedMultiset, 800)?;
    let f800 = cell(&main, Variant::Functional, 800)?;
    let n400 = cell(&naive, Variant::NaiveMultiset, 400)?;
    let growth = secs(o800) / secs(o400);
    let speedup = secs(n400) / secs(o400);
    let baseline = secs(o800) / secs(f800);
    let detail = format!(
        "optimized t(800)/t(400) = {growth:.2}, naive/optimized at 400 = {speedup:.1}x, optimized/functional at 800 = {baseline:.1}x"
    );
    ensure(growth <= 6.0 && speedup >= 5.0 && baseline > 1.0 && baseline <= 10.0, || detail.clone())?;
    Ok(detail)
}

fn median_of(reps: usize, mut f: impl FnMut() -> (Vec<Value>, Duration)) -> Result<Duration, String> {
    let mut times = Vec::new();
    for _ in 0..reps {
        let (out, t) = f();
        ensure(out.is_empty(), || format!("non-empty result {}", Value::list(out)))?;
        times.push(t);
    }
    times.sort_unstable();
    Ok(times[reps / 2])
}

fn sequential_triple() -> Check {
    let mut t = BTreeMap::new();
    for n in [1usize, 100, 400, 800, 1600] {
        t.insert(n, median_of(5, || seq_triple_bench(n).unwrap())?);
    }
    let r1 = secs(t[&800]) / secs(t[&400]);
    let r2 = secs(t[&1600]) / secs(t[&800]);
    let sorted = median_of(3, || seq_triple_sorted(100_000).unwrap())?;
    let detail = format!(
        "t(800)/t(400) = {r1:.2}, t(1600)/t(800) = {r2:.2}, sorted-list matcher at 1e5: {sorted:.2?} (multiset at 1600: {:.2?})",
        t[&1600]
    );
    ensure(r1 <= 6.0 && r2 <= 6.0 && sorted < Duration::from_secs(1) && sorted < t[&1600], || detail.clone())?;
    Ok(detail)
}

fn sat_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut sat_count = 0;
    for _ in 0..500 {
        let cnf = random_cnf(&mut rng, 4, 5);
        let want = truth_table_sat(&cnf);
        let got = CnfFormula::new(cnf.clone()).is_satisfiable();
        ensure(got == want, || format!("{cnf:?}: solver {got}, oracle {want}"))?;
        sat_count += usize::from(want);
    }
    let smoke = cli_dir().join("tests/data/smoke.cnf");
    let f = nfmatch_apps::parse_dimacs(&fs::read_to_string(&smoke).unwrap()).map_err(|e| e.to_string())?;
    ensure(f.clauses.len() == 6, || "smoke file does not have 6 clauses".into())?;
    let want = if truth_table_sat(&f.clauses) { "SATISFIABLE\n" } else { "UNSATISFIABLE\n" };
    let o = nfmatch(&["examples", "sat", smoke.to_str().unwrap()]);
    let got = String::from_utf8(o.stdout).unwrap();
    ensure(got == want, || format!("smoke file: cli {got:?}, oracle {want:?}"))?;
    Ok(format!("500 formulas agree ({sat_count} satisfiable), smoke file {}", want.trim()))
}

fn run_property<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases: 256, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn arb_value() -> impl Strategy<Value = Value> {
    let leaf = prop_oneof![
        any::<i64>().prop_map(Value::Int),
        any::<bool>().prop_map(Value::Bool),
        "[a-z][a-z0-9-]{0,5}".prop_map(|s| Value::sym(&s)),
        "[ -~]{0,6}".prop_map(|s| Value::str(&s)),
    ];
    leaf.prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..4).prop_map(Value::list),
            prop::collection::vec(inner, 0..4).prop_map(Value::tuple),
        ]
    })
}

fn property_suites() -> Check {
    let ints = || prop::collection::vec(-3i64..4, 0..8);
    let mut names = Vec::new();
    let mut suite = |name: &'static str, r: Result<(), String>| {
        names.push(name);
        r
    };

    suite(
        "values",
        run_property("values", ints(), |xs| {
            let v = Value::ints(xs.iter().copied());
            prop_assert_eq!(tails(&v).unwrap().len(), xs.len() + 1);
            for (i, (h, t)) in unjoin(&v).unwrap().into_iter().enumerate() {
                prop_assert_eq!(h.as_list().unwrap().len(), i);
                let joined: Vec<Value> = h.as_list().unwrap().iter().chain(t.as_list().unwrap().iter()).cloned().collect();
                prop_assert_eq!(Value::list(joined), v.clone());
            }
            Ok(())
        }),
    )?;

    suite(
        "pattern",
        run_property("pattern", any::<u64>(), |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_instance(&mut rng, &GenConfig::default()).pattern.to_pattern();
            if validate_pattern(&p).is_ok() {
                let mut vars: Vec<String> = extract_pattern_variables(&p).iter().map(|s| s.as_str().to_string()).collect();
                let n = vars.len();
                vars.sort();
                vars.dedup();
                prop_assert_eq!(vars.len(), n);
            }
            Ok(())
        }),
    )?;

    suite(
        "matchers",
        run_property("matchers", ints(), |xs| {
            let v = Value::ints(xs.iter().copied());
            let pick = Pattern::cons(Pattern::var("x"), Pattern::var("r"));
            let n = gen_match_results(&pick, &multiset_matcher(something()), &v).unwrap().len();
            prop_assert_eq!(n, xs.len());
            let split = Pattern::join(Pattern::var("a"), Pattern::var("b"));
            let n = gen_match_results(&split, &list_matcher(something()), &v).unwrap().len();
            prop_assert_eq!(n, xs.len() + 1);
            Ok(())
        }),
    )?;

    suite(
        "engine",
        run_property("engine", any::<u64>(), |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = random_instance(&mut rng, &GenConfig { refs: true, ..GenConfig::default() });
            let p = inst.pattern.to_pattern();
            if validate_pattern(&p).is_ok() {
                let (m, t) = (inst.kind.matcher(Clauses::Optimized), Value::ints(inst.target.iter().copied()));
                let clause = vars_clause(p);
                let all = match_all(&t, &m, std::slice::from_ref(&clause)).unwrap();
                prop_assert_eq!(match_first(&t, &m, &[clause]).unwrap(), all.first().cloned());
            }
            Ok(())
        }),
    )?;

    suite(
        "lang",
        run_property("lang", arb_value(), |v| {
            let text = print(&v).unwrap();
            let back = Interp::new(Options::default()).eval_str(&format!("'{text}")).unwrap();
            prop_assert_eq!(print(&back).unwrap(), text);
            Ok(())
        }),
    )?;

    suite(
        "bench",
        run_property("bench", 1usize..30, |n| {
            let a = sorted_pairs(&comb2_pattern(n, Clauses::Naive).unwrap());
            prop_assert_eq!(a.len(), n * (n - 1));
            prop_assert_eq!(&a, &sorted_pairs(&comb2_pattern(n, Clauses::Optimized).unwrap()));
            prop_assert_eq!(&a, &sorted_pairs(&comb2_functional(n)));
            Ok(())
        }),
    )?;

    suite(
        "examples",
        run_property("examples", (any::<u64>(), 0usize..20), |(seed, k)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cnf = random_cnf(&mut rng, 4, 5);
            prop_assert_eq!(CnfFormula::new(cnf.clone()).is_satisfiable(), truth_table_sat(&cnf));
            if let Some(&l) = cnf.iter().flatten().next() {
                let mut with_l = cnf.clone();
                with_l.push(vec![l]);
                prop_assert_eq!(truth_table_sat(&assign_true(l, &cnf)), truth_table_sat(&with_l));
            }
            for pair in twin_primes(k).unwrap() {
                let l = pair.as_list().unwrap().as_slice();
                let (p, q) = (l[0].as_int().unwrap(), l[1].as_int().unwrap());
                prop_assert!(q == p + 2 && is_prime(p) && is_prime(q));
            }
            Ok(())
        }),
    )?;

    Ok(format!("{} suites x 256 cases: {}", names.len(), names.join(", ")))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("golden transcripts", golden_transcripts),
        ("reduction path replay", reduction_path),
        ("oracle equivalence", oracle_equivalence),
        ("naive/optimized multiset equivalence", naive_optimized),
        ("comb2 counts", comb2_counts),
        ("comb2 scaling", scaling),
        ("sequential triple", sequential_triple),
        ("SAT oracle", sat_oracle),
        ("property suites", property_suites),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let (status, detail) = match &result {
            Ok(d) => ("PASS", d.as_str()),
            Err(d) => ("FAIL", d.as_str()),
        };
        writeln!(out, "criterion {}: {status}: {name}: {detail}", i + 1).unwrap();
        if result.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
