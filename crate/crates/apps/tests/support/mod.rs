//! Random small CNFs and a truth-table satisfiability oracle.

#![allow(dead_code)]

use rand::Rng;

/// Every variable that occurs in `cnf`, ascending.
pub fn vars_of(cnf: &[Vec<i64>]) -> Vec<i64> {
    let mut vs: Vec<i64> = cnf.iter().flatten().map(|l| l.abs()).collect();
    vs.sort_unstable();
    vs.dedup();
    vs
}

/// Whether `assignment` (bit i set = variable `vars[i]` true) satisfies `cnf`.
pub fn satisfies(cnf: &[Vec<i64>], vars: &[i64], assignment: u32) -> bool {
    let value = |l: i64| {
        let i = vars.iter().position(|&v| v == l.abs()).expect("known variable");
        let bit = assignment >> i & 1 == 1;
        if l > 0 {
            bit
        } else {
            !bit
        }
    };
    cnf.iter().all(|c| c.iter().any(|&l| value(l)))
}

/// Tries every assignment.
pub fn truth_table_sat(cnf: &[Vec<i64>]) -> bool {
    let vars = vars_of(cnf);
    (0..1u32 << vars.len()).any(|a| satisfies(cnf, &vars, a))
}

/// Up to `max_clauses` clauses of up to three literals over `1..=max_vars`.
/// Clauses may repeat literals or be tautologies; one in twenty is empty.
pub fn random_cnf<R: Rng>(rng: &mut R, max_vars: i64, max_clauses: usize) -> Vec<Vec<i64>> {
    let n = rng.gen_range(0..=max_clauses);
    (0..n)
        .map(|_| {
            let len = if rng.gen_ratio(1, 20) { 0 } else { rng.gen_range(1..=3) };
            (0..len)
                .map(|_| {
                    let v = rng.gen_range(1..=max_vars);
                    if rng.gen_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                })
                .collect()
        })
        .collect()
}
