//! Tokenizer and s-expression reader.

use std::sync::Arc;

use crate::error::{LangError, SourceSpan};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Paren,
    Bracket,
    Brace,
}

impl Shape {
    fn open(self) -> char {
        match self {
            Shape::Paren => '(',
            Shape::Bracket => '[',
            Shape::Brace => '{',
        }
    }

    fn close(self) -> char {
        match self {
            Shape::Paren => ')',
            Shape::Bracket => ']',
            Shape::Brace => '}',
        }
    }
}

#[derive(Clone, Debug)]
pub enum DatumKind {
    Int(i64),
    Bool(bool),
    Str(String),
    Sym(String),
    List(Vec<Datum>, Shape),
    Quote(Box<Datum>),
    Quasi(Box<Datum>),
    Unquote(Box<Datum>),
    Splice(Box<Datum>),
}

#[derive(Clone, Debug)]
pub struct Datum {
    pub kind: DatumKind,
    pub span: SourceSpan,
}

impl Datum {
    pub fn as_sym(&self) -> Option<&str> {
        match &self.kind {
            DatumKind::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Datum]> {
        match &self.kind {
            DatumKind::List(items, _) => Some(items),
            _ => None,
        }
    }
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
    file: Option<Arc<str>>,
}

fn is_delimiter(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | ')' | '[' | ']' | '{' | '}' | '"' | ';' | '\'' | '`' | ',')
}

impl<'a> Reader<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn here(&self) -> SourceSpan {
        SourceSpan {
            file: self.file.clone(),
            line: self.line,
            column: self.col,
            start: self.pos,
            end: self.pos,
        }
    }

    fn finish(&self, mut span: SourceSpan) -> SourceSpan {
        span.end = self.pos;
        span
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn datum(&mut self) -> Result<Datum, LangError> {
        self.skip_trivia();
        let start = self.here();
        let c = match self.peek() {
            Some(c) => c,
            None => return Err(LangError::parse("unexpected end of input", &start)),
        };
        let kind = match c {
            '(' | '[' | '{' => {
                self.bump();
                let shape = match c {
                    '(' => Shape::Paren,
                    '[' => Shape::Bracket,
                    _ => Shape::Brace,
                };
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        None => {
                            return Err(LangError::parse(format!("unclosed `{}`", shape.open()), &start));
                        }
                        Some(close @ (')' | ']' | '}')) => {
                            if close != shape.close() {
                                let here = self.here();
                                return Err(LangError::parse(
                                    format!(
                                        "`{}` opened at {}:{} closed by `{close}`",
                                        shape.open(),
                                        start.line,
                                        start.column
                                    ),
                                    &here,
                                ));
                            }
                            self.bump();
                            break;
                        }
                        Some(_) => items.push(self.datum()?),
                    }
                }
                DatumKind::List(items, shape)
            }
            ')' | ']' | '}' => {
                return Err(LangError::parse(format!("unexpected `{c}`"), &start));
            }
            '\'' => {
                self.bump();
                DatumKind::Quote(Box::new(self.datum()?))
            }
            '`' => {
                self.bump();
                DatumKind::Quasi(Box::new(self.datum()?))
            }
            ',' => {
                self.bump();
                if self.peek() == Some('@') {
                    self.bump();
                    DatumKind::Splice(Box::new(self.datum()?))
                } else {
                    DatumKind::Unquote(Box::new(self.datum()?))
                }
            }
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(LangError::parse("unterminated string", &start)),
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            Some('r') => s.push('\r'),
                            Some('0') => s.push('\0'),
                            Some(c @ ('\\' | '"')) => s.push(c),
                            Some(c) => {
                                return Err(LangError::parse(format!("unknown escape `\\{c}`"), &self.here()));
                            }
                            None => return Err(LangError::parse("unterminated string", &start)),
                        },
                        Some(c) => s.push(c),
                    }
                }
                DatumKind::Str(s)
            }
            _ => {
                let from = self.pos;
                while let Some(c) = self.peek() {
                    if is_delimiter(c) {
                        break;
                    }
                    self.bump();
                }
                atom(&self.src[from..self.pos], &self.finish(start.clone()))?
            }
        };
        Ok(Datum {
            kind,
            span: self.finish(start),
        })
    }
}

fn atom(text: &str, span: &SourceSpan) -> Result<DatumKind, LangError> {
    match text {
        "#t" | "#true" => return Ok(DatumKind::Bool(true)),
        "#f" | "#false" => return Ok(DatumKind::Bool(false)),
        _ => {}
    }
    if text.starts_with('#') {
        return Err(LangError::parse(format!("unknown syntax `{text}`"), span));
    }
    let digits = text.strip_prefix(['+', '-']).unwrap_or(text);
    if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
        return text
            .parse::<i64>()
            .map(DatumKind::Int)
            .map_err(|_| LangError::parse(format!("integer literal `{text}` out of range"), span));
    }
    Ok(DatumKind::Sym(text.to_string()))
}

/// Reads every datum in `src`.
pub fn read_all(src: &str, file: Option<&str>) -> Result<Vec<Datum>, LangError> {
    let mut r = Reader {
        src,
        pos: 0,
        line: 1,
        col: 1,
        file: file.map(Arc::from),
    };
    let mut out = Vec::new();
    loop {
        r.skip_trivia();
        if r.peek().is_none() {
            return Ok(out);
        }
        out.push(r.datum()?);
    }
}
