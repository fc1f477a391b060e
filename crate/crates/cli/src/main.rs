use std::fs;
use std::io::{self, BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use nfmatch::Clauses;
use nfmatch_apps::{parse_dimacs, prime_triplets, run_benchmarks, twin_primes, BenchConfig, Variant};
use nfmatch_lang::{print_limited, Engine, ErrorKind, Interp, LangError, Options, Outcome, DEFAULT_STREAM_LIMIT};

#[derive(Parser)]
#[command(name = "nfmatch", version, about = "Pattern matching for non-free data types")]
struct Cli {
    /// How match-all produces its results.
    #[arg(long, value_enum, default_value_t = EngineArg::Strict, global = true)]
    engine: EngineArg,
    /// Use the general multiset clauses only.
    #[arg(long, global = true)]
    naive_multiset: bool,
    /// Stream elements printed before truncating with `...`.
    #[arg(long, global = true, default_value_t = DEFAULT_STREAM_LIMIT)]
    max_results: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Strict,
    Stream,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a program file, printing each top-level result.
    Run { file: PathBuf },
    /// Evaluate one expression.
    Eval { expr: String },
    /// Interactive session.
    Repl,
    /// Timing runs.
    Bench {
        #[command(subcommand)]
        suite: BenchSuite,
    },
    /// Built-in example programs.
    Examples {
        #[command(subcommand)]
        example: Example,
    },
}

#[derive(clap::Args)]
struct BenchArgs {
    /// Comma-separated input sizes, ascending.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Comma-separated variant names.
    #[arg(long, value_delimiter = ',')]
    variants: Option<Vec<Variant>>,
    /// Repetitions per cell; the median is reported.
    #[arg(long, default_value_t = 5)]
    reps: usize,
    /// Also write `variant,n,median_seconds,count` rows here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Seconds before a repetition is abandoned and its cell marked n/a.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    /// Run variants concurrently.
    #[arg(long)]
    parallel: bool,
}

#[derive(Subcommand)]
enum BenchSuite {
    /// All ordered pairs of 1..n from a multiset.
    Comb2(BenchArgs),
    /// Sequential triple over n zeros.
    SeqTriple(BenchArgs),
}

#[derive(Subcommand)]
enum Example {
    /// Decide a CNF given in DIMACS form.
    Sat { file: PathBuf },
    /// First K twin primes.
    TwinPrimes { k: usize },
    /// First K prime triplets.
    Triplets { k: usize },
}

struct Failure(String);

impl From<LangError> for Failure {
    fn from(e: LangError) -> Self {
        Failure(e.to_string())
    }
}

impl From<nfmatch::MatchError> for Failure {
    fn from(e: nfmatch::MatchError) -> Self {
        Failure(format!("error: {e}"))
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure(format!("error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}

fn interp(cli: &Cli) -> Interp {
    Interp::new(Options {
        engine: match cli.engine {
            EngineArg::Strict => Engine::Strict,
            EngineArg::Stream => Engine::Stream,
        },
        clauses: if cli.naive_multiset { Clauses::Naive } else { Clauses::Optimized },
    })
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    match &cli.command {
        Command::Run { file } => {
            let src = fs::read_to_string(file).map_err(|e| Failure(format!("{}: {e}", file.display())))?;
            let name = file.display().to_string();
            interp(cli).run(&src, Some(&name), |o| {
                if let Outcome::Value(v) = o {
                    let s = print_limited(&v, cli.max_results)?;
                    writeln!(out, "{s}").map_err(|e| LangError::runtime(e.to_string()))?;
                }
                Ok(())
            })?;
            Ok(())
        }
        Command::Eval { expr } => {
            let v = interp(cli).eval_str(expr)?;
            writeln!(out, "{}", print_limited(&v, cli.max_results)?)?;
            Ok(())
        }
        Command::Repl => repl(cli),
        Command::Bench { suite } => bench(cli, suite),
        Command::Examples { example } => match example {
            Example::Sat { file } => {
                let text = fs::read_to_string(file).map_err(|e| Failure(format!("{}: {e}", file.display())))?;
                let cnf = parse_dimacs(&text).map_err(|e| Failure(format!("{}: {e}", file.display())))?;
                let sat = nfmatch_apps::sat(&cnf.vars, &cnf.clauses)?;
                writeln!(out, "{}", if sat { "SATISFIABLE" } else { "UNSATISFIABLE" })?;
                Ok(())
            }
            Example::TwinPrimes { k } => {
                writeln!(out, "{}", nfmatch_lang::print(&nfmatch::Value::list(twin_primes(*k)?))?)?;
                Ok(())
            }
            Example::Triplets { k } => {
                writeln!(out, "{}", nfmatch_lang::print(&nfmatch::Value::list(prime_triplets(*k)?))?)?;
                Ok(())
            }
        },
    }
}

fn bench(cli: &Cli, suite: &BenchSuite) -> Result<(), Failure> {
    let (args, default_sizes, default_variants) = match suite {
        BenchSuite::Comb2(a) => (
            a,
            vec![50, 100, 200, 400, 800],
            if cli.naive_multiset {
                vec![Variant::NaiveMultiset]
            } else {
                Variant::COMB2.to_vec()
            },
        ),
        BenchSuite::SeqTriple(a) => (a, vec![100, 200, 400, 800], Variant::SEQ_TRIPLE.to_vec()),
    };
    if !(args.timeout > 0.0 && args.timeout.is_finite()) {
        return Err(Failure("error: --timeout must be positive".into()));
    }
    let cfg = BenchConfig {
        sizes: args.sizes.clone().unwrap_or(default_sizes),
        variants: args.variants.clone().unwrap_or(default_variants),
        repetitions: args.reps,
        timeout: Duration::from_secs_f64(args.timeout),
        parallel: args.parallel,
    };
    let report = run_benchmarks(&cfg).map_err(|e| Failure(format!("error: {e}")))?;
    print!("{}", report.table());
    if let Some(path) = &args.csv {
        let file = fs::File::create(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
        report
            .write_csv(file)
            .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

/// Whether more input could complete `src`.
fn incomplete(e: &LangError) -> bool {
    e.kind == ErrorKind::Parse
        && ["unexpected end of input", "unclosed", "unterminated string"]
            .iter()
            .any(|m| e.message.starts_with(m))
}

fn repl(cli: &Cli) -> Result<(), Failure> {
    let interp = interp(cli);
    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    let mut out = io::stdout().lock();
    let mut buf = String::new();
    let prompt = |out: &mut io::StdoutLock, more: bool| -> io::Result<()> {
        if interactive {
            write!(out, "{}", if more { "... " } else { "> " })?;
            out.flush()?;
        }
        Ok(())
    };
    prompt(&mut out, false)?;
    for line in stdin.lock().lines() {
        buf.push_str(&line?);
        buf.push('\n');
        if let Err(e) = nfmatch_lang::read_all(&buf, None) {
            if incomplete(&e) {
                prompt(&mut out, true)?;
                continue;
            }
        }
        let src = std::mem::take(&mut buf);
        let res = interp.run(&src, Some("<repl>"), |o| {
            let s = match o {
                Outcome::Value(v) => print_limited(&v, cli.max_results)?,
                Outcome::Defined(name) => name.to_string(),
            };
            writeln!(out, "{s}").map_err(|e| LangError::runtime(e.to_string()))
        });
        if let Err(e) = res {
            eprintln!("{e}");
        }
        prompt(&mut out, false)?;
    }
    if !buf.trim().is_empty() {
        return Err(Failure("error: unterminated input at end of session".into()));
    }
    Ok(())
}
