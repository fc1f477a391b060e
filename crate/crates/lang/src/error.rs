use std::fmt;
use std::sync::Arc;

use nfmatch::MatchError;

/// A region of source text. Lines and columns are 1-based, offsets are byte
/// offsets into the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: Option<Arc<str>>,
    pub line: usize,
    pub column: usize,
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn to(&self, other: &SourceSpan) -> SourceSpan {
        SourceSpan {
            end: other.end.max(self.start),
            ..self.clone()
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(file) => write!(f, "{file}:{}:{}", self.line, self.column),
            None => write!(f, "{}:{}", self.line, self.column),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Runtime,
}

#[derive(Clone, Debug)]
pub struct LangError {
    pub kind: ErrorKind,
    pub message: String,
    pub span: Option<SourceSpan>,
}

impl LangError {
    pub fn parse(message: impl Into<String>, span: &SourceSpan) -> Self {
        LangError {
            kind: ErrorKind::Parse,
            message: message.into(),
            span: Some(span.clone()),
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        LangError {
            kind: ErrorKind::Runtime,
            message: message.into(),
            span: None,
        }
    }

    /// Attaches `span` unless the error already has a location.
    pub fn at(mut self, span: &SourceSpan) -> Self {
        if self.span.is_none() {
            self.span = Some(span.clone());
        }
        self
    }

    /// Recovers a language error that travelled through the matcher as an
    /// external error; any other match error becomes a runtime error.
    pub fn from_match(err: MatchError) -> Self {
        let inner = match err.root() {
            MatchError::External(inner) => Some(&**inner),
            MatchError::Value(nfmatch::ValueError::Stream(s)) => Some(s.inner()),
            _ => None,
        };
        if let Some(lang) = inner.and_then(|e| e.downcast_ref::<LangError>()) {
            return lang.clone();
        }
        LangError::runtime(err.to_string())
    }

    pub fn into_match(self) -> MatchError {
        MatchError::External(Arc::new(self))
    }
}

impl fmt::Display for LangError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ErrorKind::Parse => "parse error",
            ErrorKind::Runtime => "error",
        };
        match &self.span {
            Some(span) => write!(f, "{span}: {kind}: {}", self.message),
            None => write!(f, "{kind}: {}", self.message),
        }
    }
}

impl std::error::Error for LangError {}

impl From<nfmatch::ValueError> for LangError {
    fn from(err: nfmatch::ValueError) -> Self {
        match err {
            nfmatch::ValueError::Stream(s) => match s.inner().downcast_ref::<LangError>() {
                Some(lang) => lang.clone(),
                None => LangError::runtime(s.to_string()),
            },
            other => LangError::runtime(other.to_string()),
        }
    }
}

impl From<nfmatch::StreamError> for LangError {
    fn from(err: nfmatch::StreamError) -> Self {
        LangError::from(nfmatch::ValueError::Stream(err))
    }
}
