//! A small s-expression language over the `nfmatch` engine.
//!
//! ```
//! use nfmatch_lang::{Interp, Options, print};
//!
//! let interp = Interp::new(Options::default());
//! let v = interp
//!     .eval_str("(match-all '(1 2 5 9 4) (Multiset Integer) [(cons x (cons ,(+ x 1) _)) x])")
//!     .unwrap();
//! assert_eq!(print(&v).unwrap(), "(1 4)");
//! ```

mod builtins;
pub mod error;
pub mod eval;
pub mod expr;
pub mod printer;
pub mod reader;

pub use builtins::is_prime;
pub use error::{ErrorKind, LangError, SourceSpan};
pub use eval::{Engine, Env, Interp, Options, Outcome};
pub use expr::{compile_expr, compile_toplevel, Expr};
pub use printer::{print, print_limited, DEFAULT_STREAM_LIMIT};
pub use reader::{read_all, Datum, DatumKind};

/// Parses a program without running it.
pub fn parse_program(src: &str, file: Option<&str>) -> Result<Vec<Expr>, LangError> {
    read_all(src, file)?.iter().map(compile_toplevel).collect()
}
