//! Programs written against the `nfmatch` engine: list combinators defined
//! by pattern matching, a Davis–Putnam SAT solver over multisets, prime
//! patterns over an infinite stream, and the comb2 / sequential-triple
//! benchmarks.

pub mod bench;
pub mod combinators;
pub mod primes;
pub mod sat;
pub mod sorted;

pub use bench::{
    comb2_functional, comb2_pattern, run_benchmarks, seq_triple_bench, seq_triple_sorted, BenchConfig, BenchReport,
    BenchRow, Variant,
};
pub use combinators::{pm_concat, pm_map, pm_unique, pm_unique_simple};
pub use primes::{is_prime, prime_triplets, primes_stream, twin_primes};
pub use sat::{assign_true, delete, delete_clauses_with, parse_dimacs, resolve_on, sat, CnfFormula, DimacsError};
pub use sorted::sorted_list_matcher;
