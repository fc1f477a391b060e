//! The printed form of values in program output.
//!
//! Same as the values' own `Display` except that tuples print as lists,
//! procedures show their name, and streams are forced up to a limit.

use std::fmt::Write;

use nfmatch::Value;

use crate::error::LangError;
use crate::eval::as_procedure;

/// Default cap on the number of stream elements printed.
pub const DEFAULT_STREAM_LIMIT: usize = 100;

pub fn print(v: &Value) -> Result<String, LangError> {
    print_limited(v, DEFAULT_STREAM_LIMIT)
}

/// Prints `v`, forcing at most `limit` elements of each stream. A stream
/// with more elements ends in ` ...`.
pub fn print_limited(v: &Value, limit: usize) -> Result<String, LangError> {
    let mut out = String::new();
    write_value(&mut out, v, limit)?;
    Ok(out)
}

fn write_items<'a>(out: &mut String, items: impl Iterator<Item = &'a Value>, limit: usize) -> Result<(), LangError> {
    out.push('(');
    for (i, x) in items.enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write_value(out, x, limit)?;
    }
    out.push(')');
    Ok(())
}

fn write_value(out: &mut String, v: &Value, limit: usize) -> Result<(), LangError> {
    match v {
        Value::List(l) => write_items(out, l.iter(), limit)?,
        Value::Tuple(items) => write_items(out, items.iter(), limit)?,
        Value::Lazy(s) => {
            out.push('(');
            let mut cur = s.clone();
            let mut n = 0;
            while let Some(head) = cur.head().cloned() {
                if n == limit {
                    out.push_str(if n == 0 { "..." } else { " ..." });
                    break;
                }
                if n > 0 {
                    out.push(' ');
                }
                write_value(out, &head, limit)?;
                n += 1;
                cur = cur.tail()?;
            }
            out.push(')');
        }
        Value::Opaque(_) => match as_procedure(v) {
            Some(p) => {
                let _ = write!(out, "#<procedure {}>", p.name());
            }
            None => {
                let _ = write!(out, "{v}");
            }
        },
        _ => {
            let _ = write!(out, "{v}");
        }
    }
    Ok(())
}
