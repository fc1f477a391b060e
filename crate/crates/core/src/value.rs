//! Dynamic values shared by the engine, the matchers and the surface language.
//!
//! Everything here is immutable once built. Lists are shared slices so that
//! `cons`, `join` and `tails` never copy; the only lazily computed list is the
//! "rest after removing one element" that the multiset matcher hands out (see
//! [`List::without_deferred`]). Streams ([`LazySeq`]) memoize each tail the
//! first time it is forced.

use std::any::Any;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::matcher::Matcher;

/// Number of stream cells [`value_equal`] may force before giving up.
pub const DEFAULT_FORCE_BUDGET: usize = 1_000_000;

/// Failure raised by a stream producer, shared by every reader of the cell.
#[derive(Clone)]
pub struct StreamError(Arc<dyn std::error::Error + Send + Sync>);

impl StreamError {
    pub fn new<E: std::error::Error + Send + Sync + 'static>(err: E) -> Self {
        StreamError(Arc::new(err))
    }

    pub fn msg(message: impl Into<String>) -> Self {
        #[derive(Debug, Error)]
        #[error("{0}")]
        struct Msg(String);
        StreamError::new(Msg(message.into()))
    }

    pub fn inner(&self) -> &(dyn std::error::Error + Send + Sync + 'static) {
        &*self.0
    }
}

impl fmt::Debug for StreamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StreamError({})", self.0)
    }
}

impl fmt::Display for StreamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Error)]
pub enum ValueError {
    #[error("equality undecided after forcing {0} stream cells")]
    DepthExceeded(usize),
    #[error("type error: expected {expected}, found {found}")]
    TypeError { expected: &'static str, found: String },
    #[error("integer overflow in `{0}`")]
    Overflow(&'static str),
    #[error("{0}")]
    Stream(StreamError),
}

impl ValueError {
    pub fn type_error(expected: &'static str, found: &Value) -> Self {
        ValueError::TypeError {
            expected,
            found: found.kind_name().to_string(),
        }
    }
}

impl From<StreamError> for ValueError {
    fn from(err: StreamError) -> Self {
        ValueError::Stream(err)
    }
}

/// An interned-by-value name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    #[inline]
    pub fn same(&self, other: &Symbol) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl From<&str> for Symbol {
    fn from(name: &str) -> Self {
        Symbol::new(name)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Host objects embedded in values (procedures of the surface language, etc).
/// Two opaque values are equal only when they are the same object.
pub trait Opaque: Any + Send + Sync {
    fn type_name(&self) -> &str;
    fn as_any(&self) -> &dyn Any;
}

#[derive(Clone)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Symbol(Symbol),
    Str(Arc<str>),
    List(List),
    Tuple(Arc<[Value]>),
    Lazy(LazySeq),
    Matcher(Matcher),
    Opaque(Arc<dyn Opaque>),
}

impl Value {
    pub fn int(n: i64) -> Self {
        Value::Int(n)
    }

    pub fn sym(name: &str) -> Self {
        Value::Symbol(Symbol::new(name))
    }

    pub fn str(s: &str) -> Self {
        Value::Str(Arc::from(s))
    }

    pub fn list(items: impl IntoIterator<Item = Value>) -> Self {
        Value::List(List::from_iter(items))
    }

    pub fn empty_list() -> Self {
        Value::List(List::empty())
    }

    pub fn tuple(items: impl IntoIterator<Item = Value>) -> Self {
        Value::Tuple(items.into_iter().collect())
    }

    pub fn ints(items: impl IntoIterator<Item = i64>) -> Self {
        Value::list(items.into_iter().map(Value::Int))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "integer",
            Value::Bool(_) => "boolean",
            Value::Symbol(_) => "symbol",
            Value::Str(_) => "string",
            Value::List(_) => "list",
            Value::Tuple(_) => "tuple",
            Value::Lazy(_) => "stream",
            Value::Matcher(_) => "matcher",
            Value::Opaque(_) => "opaque",
        }
    }

    pub fn as_int(&self) -> Result<i64, ValueError> {
        match self {
            Value::Int(n) => Ok(*n),
            other => Err(ValueError::type_error("integer", other)),
        }
    }

    pub fn as_list(&self) -> Result<&List, ValueError> {
        match self {
            Value::List(l) => Ok(l),
            other => Err(ValueError::type_error("list", other)),
        }
    }

    /// True for finite lists and streams.
    pub fn is_sequence(&self) -> bool {
        matches!(self, Value::List(_) | Value::Lazy(_))
    }

    /// Tuple arity, `None` for non-tuples.
    pub fn arity(&self) -> Option<usize> {
        match self {
            Value::Tuple(items) => Some(items.len()),
            _ => None,
        }
    }

    /// Structural equality with the default force budget; undecidable
    /// comparisons count as unequal.
    pub fn equals(&self, other: &Value) -> bool {
        value_equal(self, other).unwrap_or(false)
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::Int(n)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<List> for Value {
    fn from(l: List) -> Self {
        Value::List(l)
    }
}

impl From<LazySeq> for Value {
    fn from(s: LazySeq) -> Self {
        Value::Lazy(s)
    }
}

impl From<Matcher> for Value {
    fn from(m: Matcher) -> Self {
        Value::Matcher(m)
    }
}

// ---------------------------------------------------------------------------
// Finite lists
// ---------------------------------------------------------------------------

#[derive(Clone)]
pub struct List(ListRepr);

#[derive(Clone)]
enum ListRepr {
    Slice {
        data: Arc<[Value]>,
        start: usize,
        end: usize,
    },
    Without(Arc<Without>),
}

/// `source` with the element at `index` removed, built on first access.
struct Without {
    source: List,
    index: usize,
    built: OnceLock<Arc<[Value]>>,
}

impl List {
    pub fn empty() -> Self {
        List::from_arc(Arc::from(Vec::new()))
    }

    pub fn new(items: Vec<Value>) -> Self {
        List::from_arc(Arc::from(items))
    }

    fn from_arc(data: Arc<[Value]>) -> Self {
        let end = data.len();
        List(ListRepr::Slice {
            data,
            start: 0,
            end,
        })
    }

    pub fn len(&self) -> usize {
        match &self.0 {
            ListRepr::Slice { start, end, .. } => end - start,
            ListRepr::Without(w) => w.source.len() - 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_slice(&self) -> &[Value] {
        match &self.0 {
            ListRepr::Slice { data, start, end } => &data[*start..*end],
            ListRepr::Without(w) => w.built.get_or_init(|| {
                let src = w.source.as_slice();
                let mut out = Vec::with_capacity(src.len() - 1);
                out.extend_from_slice(&src[..w.index]);
                out.extend_from_slice(&src[w.index + 1..]);
                Arc::from(out)
            }),
        }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Value> {
        self.as_slice().iter()
    }

    pub fn get(&self, i: usize) -> Option<&Value> {
        self.as_slice().get(i)
    }

    pub fn first(&self) -> Option<&Value> {
        self.get(0)
    }

    /// Sub-list sharing storage with `self`.
    pub fn slice(&self, from: usize, to: usize) -> List {
        assert!(from <= to && to <= self.len(), "slice out of range");
        match &self.0 {
            ListRepr::Slice { data, start, .. } => List(ListRepr::Slice {
                data: Arc::clone(data),
                start: start + from,
                end: start + to,
            }),
            ListRepr::Without(w) => {
                self.as_slice();
                let data = Arc::clone(w.built.get().expect("materialized above"));
                List(ListRepr::Slice {
                    data,
                    start: from,
                    end: to,
                })
            }
        }
    }

    /// Everything but the first element; `None` on the empty list.
    pub fn tail(&self) -> Option<List> {
        if self.is_empty() {
            None
        } else {
            Some(self.slice(1, self.len()))
        }
    }

    /// `(prefix, suffix)` with `prefix.len() == at`.
    pub fn split_at(&self, at: usize) -> (List, List) {
        (self.slice(0, at), self.slice(at, self.len()))
    }

    /// A copy without the element at `index`, built immediately.
    pub fn without(&self, index: usize) -> List {
        let src = self.as_slice();
        assert!(index < src.len(), "index out of range");
        let mut out = Vec::with_capacity(src.len() - 1);
        out.extend_from_slice(&src[..index]);
        out.extend_from_slice(&src[index + 1..]);
        List::new(out)
    }

    /// Same elements as [`List::without`], but nothing is copied until the
    /// result is first inspected element-wise.
    pub fn without_deferred(&self, index: usize) -> List {
        assert!(index < self.len(), "index out of range");
        List(ListRepr::Without(Arc::new(Without {
            source: self.clone(),
            index,
            built: OnceLock::new(),
        })))
    }

    pub fn concat(&self, other: &List) -> List {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.len() + other.len());
        out.extend_from_slice(self.as_slice());
        out.extend_from_slice(other.as_slice());
        List::new(out)
    }

    pub fn to_vec(&self) -> Vec<Value> {
        self.as_slice().to_vec()
    }
}

impl FromIterator<Value> for List {
    fn from_iter<I: IntoIterator<Item = Value>>(iter: I) -> Self {
        List::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a List {
    type Item = &'a Value;
    type IntoIter = std::slice::Iter<'a, Value>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

// ---------------------------------------------------------------------------
// Streams
// ---------------------------------------------------------------------------

type Producer = Box<dyn FnOnce() -> Result<LazySeq, StreamError> + Send>;

/// A possibly infinite sequence. `LazySeq::end()` is the end-of-stream
/// sentinel; every other value carries a head and a memoized tail.
#[derive(Clone)]
pub struct LazySeq(Option<Arc<Cell>>);

struct Cell {
    head: Value,
    tail: Thunk,
}

struct Thunk {
    value: OnceLock<Result<LazySeq, StreamError>>,
    producer: Mutex<Option<Producer>>,
}

impl Thunk {
    fn ready(seq: LazySeq) -> Self {
        let value = OnceLock::new();
        let _ = value.set(Ok(seq));
        Thunk {
            value,
            producer: Mutex::new(None),
        }
    }

    fn deferred(producer: Producer) -> Self {
        Thunk {
            value: OnceLock::new(),
            producer: Mutex::new(Some(producer)),
        }
    }

    fn force(&self) -> &Result<LazySeq, StreamError> {
        self.value.get_or_init(|| {
            let producer = self
                .producer
                .lock()
                .unwrap_or_else(|poisoned| poisoned.into_inner())
                .take();
            match producer {
                Some(produce) => produce(),
                None => Err(StreamError::msg("stream cell forced re-entrantly")),
            }
        })
    }
}

impl Drop for Cell {
    // Unlink forced tails one cell at a time so that dropping a long stream
    // does not recurse once per element.
    fn drop(&mut self) {
        let mut next = self.tail.value.take();
        while let Some(Ok(LazySeq(Some(cell)))) = next {
            next = match Arc::into_inner(cell) {
                Some(mut owned) => owned.tail.value.take(),
                None => None,
            };
        }
    }
}

impl LazySeq {
    pub fn end() -> Self {
        LazySeq(None)
    }

    /// A cell whose tail is computed on first demand.
    pub fn cons<F>(head: Value, tail: F) -> Self
    where
        F: FnOnce() -> Result<LazySeq, StreamError> + Send + 'static,
    {
        LazySeq(Some(Arc::new(Cell {
            head,
            tail: Thunk::deferred(Box::new(tail)),
        })))
    }

    /// A cell whose tail is already known.
    pub fn cons_ready(head: Value, tail: LazySeq) -> Self {
        LazySeq(Some(Arc::new(Cell {
            head,
            tail: Thunk::ready(tail),
        })))
    }

    pub fn from_values(items: Vec<Value>) -> Self {
        items
            .into_iter()
            .rev()
            .fold(LazySeq::end(), |tail, head| LazySeq::cons_ready(head, tail))
    }

    /// Streams the items of `iter` on demand. The iterator is pulled once per
    /// forced cell; the first `Err` ends the stream with that error.
    #[allow(clippy::should_implement_trait)]
    pub fn from_iter<I>(mut iter: I) -> Result<Self, StreamError>
    where
        I: Iterator<Item = Result<Value, StreamError>> + Send + 'static,
    {
        match iter.next() {
            None => Ok(LazySeq::end()),
            Some(Err(e)) => Err(e),
            Some(Ok(head)) => Ok(LazySeq::cons(head, move || LazySeq::from_iter(iter))),
        }
    }

    /// `start, start+1, ...` (stops, rather than overflowing, at `i64::MAX`).
    pub fn naturals_from(start: i64) -> Self {
        LazySeq::cons(Value::Int(start), move || match start.checked_add(1) {
            Some(next) => Ok(LazySeq::naturals_from(next)),
            None => Ok(LazySeq::end()),
        })
    }

    pub fn is_end(&self) -> bool {
        self.0.is_none()
    }

    pub fn head(&self) -> Option<&Value> {
        self.0.as_ref().map(|c| &c.head)
    }

    /// Forces the tail. Forcing the end sentinel yields the end sentinel.
    pub fn tail(&self) -> Result<LazySeq, StreamError> {
        match &self.0 {
            None => Ok(LazySeq::end()),
            Some(cell) => cell.tail.force().clone(),
        }
    }

    /// True if the tail of this cell has already been computed.
    pub fn is_tail_forced(&self) -> bool {
        match &self.0 {
            None => true,
            Some(cell) => cell.tail.value.get().is_some(),
        }
    }

    pub fn ptr_eq(&self, other: &LazySeq) -> bool {
        match (&self.0, &other.0) {
            (None, None) => true,
            (Some(a), Some(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }

    pub fn iter(&self) -> LazyIter {
        LazyIter {
            cur: Some(self.clone()),
        }
    }

    /// The first `n` elements (fewer if the stream ends).
    pub fn take(&self, n: usize) -> Result<Vec<Value>, StreamError> {
        self.iter().take(n).collect()
    }
}

/// Forcing iterator over a stream.
pub struct LazyIter {
    cur: Option<LazySeq>,
}

impl Iterator for LazyIter {
    type Item = Result<Value, StreamError>;

    fn next(&mut self) -> Option<Self::Item> {
        let cur = self.cur.take()?;
        let head = cur.head()?.clone();
        match cur.tail() {
            Ok(rest) => {
                self.cur = Some(rest);
                Some(Ok(head))
            }
            Err(e) => Some(Err(e)),
        }
    }
}

// ---------------------------------------------------------------------------
// Equality
// ---------------------------------------------------------------------------

/// Structural equality with [`DEFAULT_FORCE_BUDGET`].
pub fn value_equal(a: &Value, b: &Value) -> Result<bool, ValueError> {
    value_equal_with_budget(a, b, DEFAULT_FORCE_BUDGET)
}

/// Structural equality forcing at most `budget` stream cells.
///
/// Lists and streams are both sequences and compare element-wise with each
/// other; every other pair of different kinds is unequal.
pub fn value_equal_with_budget(a: &Value, b: &Value, budget: usize) -> Result<bool, ValueError> {
    let mut remaining = budget;
    eq_rec(a, b, &mut remaining, budget)
}

fn eq_rec(a: &Value, b: &Value, remaining: &mut usize, budget: usize) -> Result<bool, ValueError> {
    Ok(match (a, b) {
        (Value::Int(x), Value::Int(y)) => x == y,
        (Value::Bool(x), Value::Bool(y)) => x == y,
        (Value::Symbol(x), Value::Symbol(y)) => x.same(y),
        (Value::Str(x), Value::Str(y)) => x == y,
        (Value::Tuple(xs), Value::Tuple(ys)) => {
            if xs.len() != ys.len() {
                return Ok(false);
            }
            for (x, y) in xs.iter().zip(ys.iter()) {
                if !eq_rec(x, y, remaining, budget)? {
                    return Ok(false);
                }
            }
            true
        }
        (Value::List(xs), Value::List(ys)) => {
            if xs.len() != ys.len() {
                return Ok(false);
            }
            for (x, y) in xs.iter().zip(ys.iter()) {
                if !eq_rec(x, y, remaining, budget)? {
                    return Ok(false);
                }
            }
            true
        }
        (Value::List(_) | Value::Lazy(_), Value::List(_) | Value::Lazy(_)) => {
            let mut left = Cursor::new(a);
            let mut right = Cursor::new(b);
            loop {
                if let (Cursor::Lazy(l), Cursor::Lazy(r)) = (&left, &right) {
                    if l.ptr_eq(r) {
                        return Ok(true);
                    }
                }
                match (left.next(remaining, budget)?, right.next(remaining, budget)?) {
                    (None, None) => return Ok(true),
                    (Some(x), Some(y)) => {
                        if !eq_rec(&x, &y, remaining, budget)? {
                            return Ok(false);
                        }
                    }
                    _ => return Ok(false),
                }
            }
        }
        (Value::Matcher(x), Value::Matcher(y)) => x.ptr_eq(y),
        (Value::Opaque(x), Value::Opaque(y)) => Arc::ptr_eq(x, y),
        _ => false,
    })
}

enum Cursor<'a> {
    Slice(std::slice::Iter<'a, Value>),
    Lazy(LazySeq),
}

impl<'a> Cursor<'a> {
    fn new(v: &'a Value) -> Self {
        match v {
            Value::List(l) => Cursor::Slice(l.iter()),
            Value::Lazy(s) => Cursor::Lazy(s.clone()),
            _ => unreachable!("cursor over a non-sequence"),
        }
    }

    fn next(&mut self, remaining: &mut usize, budget: usize) -> Result<Option<Value>, ValueError> {
        match self {
            Cursor::Slice(it) => Ok(it.next().cloned()),
            Cursor::Lazy(seq) => {
                let Some(head) = seq.head().cloned() else {
                    return Ok(None);
                };
                if *remaining == 0 {
                    return Err(ValueError::DepthExceeded(budget));
                }
                *remaining -= 1;
                *seq = seq.tail()?;
                Ok(Some(head))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Sequence helpers used by the list matchers
// ---------------------------------------------------------------------------

/// All suffixes of a finite list, longest first, ending with `()`.
pub fn tails(xs: &Value) -> Result<Vec<Value>, ValueError> {
    let list = xs.as_list()?;
    Ok((0..=list.len())
        .map(|i| Value::List(list.slice(i, list.len())))
        .collect())
}

/// Every `(prefix, suffix)` split of a finite list by increasing prefix length.
pub fn unjoin(xs: &Value) -> Result<Vec<(Value, Value)>, ValueError> {
    let list = xs.as_list()?;
    Ok((0..=list.len())
        .map(|i| {
            let (h, t) = list.split_at(i);
            (Value::List(h), Value::List(t))
        })
        .collect())
}

/// Suffixes of a list or stream, produced as they are consumed.
pub fn lazy_tails(xs: &Value) -> Result<LazyTails, ValueError> {
    match xs {
        Value::List(l) => Ok(LazyTails::List {
            list: l.clone(),
            next: 0,
        }),
        Value::Lazy(s) => Ok(LazyTails::Stream(Some(s.clone()))),
        other => Err(ValueError::type_error("list or stream", other)),
    }
}

pub enum LazyTails {
    List { list: List, next: usize },
    Stream(Option<LazySeq>),
}

impl Iterator for LazyTails {
    type Item = Result<Value, ValueError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self {
            LazyTails::List { list, next } => {
                if *next > list.len() {
                    return None;
                }
                let suffix = list.slice(*next, list.len());
                *next += 1;
                Some(Ok(Value::List(suffix)))
            }
            LazyTails::Stream(cur) => {
                let seq = cur.take()?;
                if !seq.is_end() {
                    match seq.tail() {
                        Ok(rest) => *cur = Some(rest),
                        Err(e) => return Some(Err(e.into())),
                    }
                }
                Some(Ok(Value::Lazy(seq)))
            }
        }
    }
}

/// `(prefix, suffix)` splits of a list or stream by increasing prefix length.
/// Prefixes are finite lists; on a stream the suffix stays a stream.
pub fn lazy_splits(xs: &Value) -> Result<LazySplits, ValueError> {
    match xs {
        Value::List(l) => Ok(LazySplits::List {
            list: l.clone(),
            next: 0,
        }),
        Value::Lazy(s) => Ok(LazySplits::Stream {
            prefix: Vec::new(),
            rest: Some(s.clone()),
        }),
        other => Err(ValueError::type_error("list or stream", other)),
    }
}

pub enum LazySplits {
    List { list: List, next: usize },
    Stream { prefix: Vec<Value>, rest: Option<LazySeq> },
}

impl Iterator for LazySplits {
    type Item = Result<(Value, Value), ValueError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self {
            LazySplits::List { list, next } => {
                if *next > list.len() {
                    return None;
                }
                let (h, t) = list.split_at(*next);
                *next += 1;
                Some(Ok((Value::List(h), Value::List(t))))
            }
            LazySplits::Stream { prefix, rest } => {
                let seq = rest.take()?;
                let item = (Value::List(List::new(prefix.clone())), Value::Lazy(seq.clone()));
                if let Some(head) = seq.head() {
                    prefix.push(head.clone());
                    match seq.tail() {
                        Ok(t) => *rest = Some(t),
                        Err(e) => return Some(Err(e.into())),
                    }
                }
                Some(Ok(item))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

pub(crate) fn write_str_literal(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    f.write_str("\"")?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            c => write!(f, "{c}")?,
        }
    }
    f.write_str("\"")
}

fn write_seq<'a>(
    f: &mut fmt::Formatter<'_>,
    open: &str,
    close: &str,
    items: impl Iterator<Item = &'a Value>,
) -> fmt::Result {
    f.write_str(open)?;
    for (i, item) in items.enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{item}")?;
    }
    f.write_str(close)
}

/// Lisp-style printed form. Tuples use brackets. A stream shows the cells
/// forced so far followed by `...` when more may follow; printing never
/// forces anything.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(true) => f.write_str("#t"),
            Value::Bool(false) => f.write_str("#f"),
            Value::Symbol(s) => write!(f, "{s}"),
            Value::Str(s) => write_str_literal(f, s),
            Value::List(l) => write_seq(f, "(", ")", l.iter()),
            Value::Tuple(items) => write_seq(f, "[", "]", items.iter()),
            Value::Lazy(seq) => {
                f.write_str("(")?;
                let mut cur = seq.clone();
                let mut first = true;
                while let Some(head) = cur.head() {
                    if !first {
                        f.write_str(" ")?;
                    }
                    first = false;
                    write!(f, "{head}")?;
                    if !cur.is_tail_forced() {
                        f.write_str(" ...")?;
                        break;
                    }
                    match cur.tail() {
                        Ok(next) => cur = next,
                        Err(_) => {
                            f.write_str(" <error>")?;
                            break;
                        }
                    }
                }
                f.write_str(")")
            }
            Value::Matcher(m) => write!(f, "#<matcher {}>", m.name()),
            Value::Opaque(o) => write!(f, "#<{}>", o.type_name()),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for List {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_seq(f, "(", ")", self.iter())
    }
}

impl fmt::Debug for List {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
