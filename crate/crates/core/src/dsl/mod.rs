//! The `.dlm` text format.
//!
//! ```text
//! dilemma "newcomb"
//!
//! var Fdt in {onebox, twobox} prior {onebox: 1/2, twobox: 1/2}
//! var Accurate in {accurate, inaccurate} prior {accurate: 99/100, inaccurate: 1/100}
//! det Act(Fdt) in {onebox, twobox} {
//!   (onebox) -> onebox;
//!   (twobox) -> twobox;
//! }
//! utility V(Act) {
//!   (onebox) -> 0;
//!   (twobox) -> 1000;
//! }
//!
//! designate act=Act value=V fdt {∅: Fdt}
//! ```
//!
//! Stochastic children use `var X in {..} cpt (P, Q) { (p, q): {x: 1/2, ..}; .. }`.
//! A `det` stanza may omit `in {..}`, in which case its domain is the output
//! values in order of first appearance. Names and values are bare words
//! (`[A-Za-z0-9_.-]+`) or double-quoted strings. Newlines are whitespace.

mod lexer;
mod parser;
mod serialize;

use std::fmt;

use crate::model::Model;

pub use serialize::serialize;

/// 1-based position and extent of a token, counted in characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ErrorKind {
    Lex,
    Syntax,
    Semantic,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Lex => "lex",
            ErrorKind::Syntax => "syntax",
            ErrorKind::Semantic => "semantic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {kind} error: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ErrorKind,
    pub message: String,
}

impl ParseError {
    fn new(span: SourceSpan, kind: ErrorKind, message: impl Into<String>) -> Self {
        ParseError {
            span,
            kind,
            message: message.into(),
        }
    }
}

/// Every error found in one input, in source order.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}", self.0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n"))]
pub struct ParseErrors(pub Vec<ParseError>);

impl ParseErrors {
    pub fn errors(&self) -> &[ParseError] {
        &self.0
    }
}

/// Parses `.dlm` text into a validated model.
pub fn parse(text: &str) -> Result<Model, ParseErrors> {
    let (tokens, lex_errors) = lexer::lex(text);
    if !lex_errors.is_empty() {
        return Err(ParseErrors(lex_errors));
    }
    let eof = lexer::end_span(text);
    let file = parser::parse_tokens(&tokens, eof).map_err(ParseErrors)?;
    parser::lower(file, eof).map_err(|mut errs| {
        errs.sort_by_key(|e| e.span);
        ParseErrors(errs)
    })
}

/// Like [`parse`], for input that may not be UTF-8.
pub fn parse_bytes(bytes: &[u8]) -> Result<Model, ParseErrors> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse(text),
        Err(e) => {
            let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or_default();
            let mut span = lexer::end_span(valid);
            span.length = 1;
            let byte = bytes[e.valid_up_to()];
            Err(ParseErrors(vec![ParseError::new(
                span,
                ErrorKind::Lex,
                format!("invalid UTF-8 byte 0x{byte:02x}"),
            )]))
        }
    }
}

#[cfg(test)]
mod tests;
