use super::{ErrorKind, ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) enum Tok {
    /// Bare word or number.
    Atom(String),
    Str(String),
    EmptySet,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Eq,
    Arrow,
}

impl Tok {
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Atom(s) => format!("`{s}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::EmptySet => "`∅`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Arrow => "`->`".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(super) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
    /// First token on its line.
    pub line_start: bool,
}

pub(super) fn is_atom_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-' | '/')
}

/// Position just past the last character, as a one-character span.
pub(super) fn end_span(text: &str) -> SourceSpan {
    let mut line = 1;
    let mut column = 1;
    for c in text.chars() {
        if c == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    SourceSpan {
        line,
        column,
        length: 1,
    }
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Cursor {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<char> {
        self.chars.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

pub(super) fn lex(text: &str) -> (Vec<Token>, Vec<ParseError>) {
    let mut cur = Cursor {
        chars: text.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut tokens: Vec<Token> = Vec::new();
    let mut errors = Vec::new();
    while let Some(c) = cur.peek() {
        let (line, column) = (cur.line, cur.column);
        let span = |len: usize| SourceSpan {
            line,
            column,
            length: len.max(1),
        };
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            continue;
        }
        let (tok, len) = if c == '-' && cur.peek2() == Some('>') {
            cur.bump();
            cur.bump();
            (Tok::Arrow, 2)
        } else if is_atom_char(c) {
            let mut s = String::new();
            while let Some(c) = cur.peek() {
                if !is_atom_char(c) || (c == '-' && cur.peek2() == Some('>')) {
                    break;
                }
                cur.bump();
                s.push(c);
            }
            let len = s.chars().count();
            (Tok::Atom(s), len)
        } else if c == '"' {
            cur.bump();
            let mut s = String::new();
            let mut closed = false;
            let mut len = 1;
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
                len += 1;
                match c {
                    '"' => {
                        closed = true;
                        break;
                    }
                    '\\' => {
                        let (esc_line, esc_col) = (cur.line, cur.column - 1);
                        match escape(&mut cur, &mut len) {
                            Ok(ch) => s.push(ch),
                            Err(msg) => errors.push(ParseError::new(
                                SourceSpan {
                                    line: esc_line,
                                    column: esc_col,
                                    length: 2,
                                },
                                ErrorKind::Lex,
                                msg,
                            )),
                        }
                    }
                    c => s.push(c),
                }
            }
            if !closed {
                errors.push(ParseError::new(
                    span(len),
                    ErrorKind::Lex,
                    "unterminated string literal",
                ));
                continue;
            }
            (Tok::Str(s), len)
        } else {
            cur.bump();
            let tok = match c {
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                ':' => Tok::Colon,
                '=' => Tok::Eq,
                '∅' => Tok::EmptySet,
                other => {
                    errors.push(ParseError::new(
                        span(1),
                        ErrorKind::Lex,
                        format!("unexpected character `{}`", other.escape_debug()),
                    ));
                    continue;
                }
            };
            (tok, 1)
        };
        let line_start = tokens.last().is_none_or(|t| t.span.line != line);
        tokens.push(Token {
            tok,
            span: span(len),
            line_start,
        });
    }
    (tokens, errors)
}

fn escape(cur: &mut Cursor, len: &mut usize) -> Result<char, String> {
    let Some(c) = cur.peek() else {
        return Err("unterminated escape".into());
    };
    if c == '\n' {
        return Err("unterminated escape".into());
    }
    cur.bump();
    *len += 1;
    Ok(match c {
        '"' => '"',
        '\\' => '\\',
        'n' => '\n',
        'r' => '\r',
        't' => '\t',
        'u' => {
            if cur.peek() != Some('{') {
                return Err("expected `{` after `\\u`".into());
            }
            cur.bump();
            *len += 1;
            let mut hex = String::new();
            while let Some(c) = cur.peek() {
                if c == '}' || c == '\n' || c == '"' || hex.len() > 6 {
                    break;
                }
                cur.bump();
                *len += 1;
                hex.push(c);
            }
            if cur.peek() != Some('}') {
                return Err("unterminated `\\u{..}` escape".into());
            }
            cur.bump();
            *len += 1;
            u32::from_str_radix(&hex, 16)
                .ok()
                .and_then(char::from_u32)
                .ok_or_else(|| format!("invalid unicode escape `\\u{{{hex}}}`"))?
        }
        other => return Err(format!("unknown escape `\\{}`", other.escape_debug())),
    })
}
