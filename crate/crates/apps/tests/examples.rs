mod support;

use nfmatch::{Clauses, Value};
use nfmatch_apps::{
    assign_true, comb2_functional, comb2_pattern, delete_clauses_with, is_prime, parse_dimacs, prime_triplets,
    resolve_on, sat, twin_primes, CnfFormula,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::{random_cnf, truth_table_sat, vars_of};

fn pairs(v: &[Value]) -> Vec<(i64, i64)> {
    let mut out: Vec<(i64, i64)> = v
        .iter()
        .map(|p| {
            let l = p.as_list().unwrap().as_slice();
            (l[0].as_int().unwrap(), l[1].as_int().unwrap())
        })
        .collect();
    out.sort_unstable();
    out
}

fn double_loop(n: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for x in 1..=n {
        for y in 1..=n {
            if x != y {
                out.push((x, y));
            }
        }
    }
    out
}

#[test]
fn twin_primes_and_triplets() {
    let got = Value::list(twin_primes(10).unwrap()).to_string();
    assert_eq!(got, "((3 5) (5 7) (11 13) (17 19) (29 31) (41 43) (59 61) (71 73) (101 103) (107 109))");
    let got = Value::list(prime_triplets(8).unwrap()).to_string();
    assert_eq!(got, "((5 7 11) (7 11 13) (11 13 17) (13 17 19) (17 19 23) (37 41 43) (41 43 47) (67 71 73))");
}

#[test]
fn comb2_counts() {
    for n in [1usize, 2, 4, 10, 50] {
        let want = double_loop(n as i64);
        assert_eq!(want.len(), n * (n - 1));
        assert_eq!(pairs(&comb2_pattern(n, Clauses::Naive).unwrap()), want);
        assert_eq!(pairs(&comb2_pattern(n, Clauses::Optimized).unwrap()), want);
        assert_eq!(pairs(&comb2_functional(n)), want);
    }
}

#[test]
fn sat_agrees_with_truth_table_on_500_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut yes, mut no) = (0, 0);
    for _ in 0..500 {
        let cnf = random_cnf(&mut rng, 4, 5);
        let want = truth_table_sat(&cnf);
        let f = CnfFormula::new(cnf.clone());
        assert_eq!(f.is_satisfiable(), want, "{cnf:?}");
        if want {
            yes += 1;
        } else {
            no += 1;
        }
    }
    assert!(yes > 50 && no > 20, "{yes} satisfiable, {no} unsatisfiable");
}

#[test]
fn dimacs_smoke_file() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../cli/tests/data/smoke.cnf");
    let f = parse_dimacs(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(f.clauses.len(), 6);
    assert_eq!(f.is_satisfiable(), truth_table_sat(&f.clauses));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sat_matches_truth_table(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cnf = random_cnf(&mut rng, 4, 5);
        let f = CnfFormula::new(cnf.clone());
        prop_assert_eq!(sat(&f.vars, &f.clauses).unwrap(), truth_table_sat(&cnf), "{:?}", cnf);
    }

    #[test]
    fn assign_true_fixes_the_literal(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cnf = CnfFormula::new(random_cnf(&mut rng, 4, 5)).clauses;
        let lits: Vec<i64> = cnf.iter().flatten().copied().collect();
        prop_assume!(!lits.is_empty());
        let l = lits[pick.index(lits.len())];
        // Satisfiable with l true iff the reduced formula is satisfiable.
        let mut with_l = cnf.clone();
        with_l.push(vec![l]);
        let reduced = assign_true(l, &cnf);
        prop_assert!(reduced.iter().flatten().all(|&x| x.abs() != l.abs()));
        prop_assert_eq!(truth_table_sat(&reduced), truth_table_sat(&with_l), "{:?} l={}", cnf, l);
    }

    #[test]
    fn resolution_step_is_equisatisfiable(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cnf = CnfFormula::new(random_cnf(&mut rng, 4, 5)).clauses;
        let vars = vars_of(&cnf);
        prop_assume!(!vars.is_empty());
        let v = vars[pick.index(vars.len())];
        let mut next = resolve_on(v, &cnf);
        next.extend(delete_clauses_with(v, &delete_clauses_with(-v, &cnf)));
        prop_assert!(next.iter().flatten().all(|&x| x.abs() != v));
        prop_assert!(next.iter().all(|c| c.iter().all(|&x| !c.contains(&-x))));
        prop_assert_eq!(truth_table_sat(&next), truth_table_sat(&cnf), "{:?} v={}", cnf, v);
    }

    #[test]
    fn twin_primes_are_prime_pairs(k in 0usize..40) {
        let got = twin_primes(k).unwrap();
        prop_assert_eq!(got.len(), k);
        let mut last = 0;
        for pair in &got {
            let l = pair.as_list().unwrap().as_slice();
            let (p, q) = (l[0].as_int().unwrap(), l[1].as_int().unwrap());
            prop_assert!(q == p + 2 && is_prime(p) && is_prime(q) && p > last);
            // Nothing skipped between consecutive results.
            prop_assert!((last + 1..p).all(|x| !(is_prime(x) && is_prime(x + 2))));
            last = p;
        }
    }

    #[test]
    fn comb2_variants_agree(n in 1usize..40) {
        let naive = pairs(&comb2_pattern(n, Clauses::Naive).unwrap());
        prop_assert_eq!(naive.len(), n * (n - 1));
        prop_assert_eq!(&pairs(&comb2_pattern(n, Clauses::Optimized).unwrap()), &naive);
        prop_assert_eq!(&pairs(&comb2_functional(n)), &naive);
    }
}
