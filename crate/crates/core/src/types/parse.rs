use std::sync::Arc;

use thiserror::Error;

use super::{Symbol, Type, FRESH_PREFIX};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Arrow,
    Amp,
    LParen,
    RParen,
    Omega,
    Const(String),
    Var(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn lex(src: &str, line0: usize, col0: usize) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (line0, col0);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, column);
        let push = |out: &mut Vec<Spanned>, tok| {
            out.push(Spanned {
                tok,
                line: tl,
                column: tc,
            })
        };
        match c {
            '\n' => {
                line += 1;
                column = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {}
            '-' if chars.get(i + 1) == Some(&'>') => {
                push(&mut out, Tok::Arrow);
                i += 2;
                column += 2;
                continue;
            }
            '\u{2192}' => push(&mut out, Tok::Arrow),
            '&' | '\u{2229}' => push(&mut out, Tok::Amp),
            '(' => push(&mut out, Tok::LParen),
            ')' => push(&mut out, Tok::RParen),
            '\u{03c9}' => push(&mut out, Tok::Omega),
            '\'' => {
                let start = i + 1;
                let mut j = start;
                if j < chars.len() && (chars[j].is_ascii_alphabetic() || chars[j] == '_') {
                    while j < chars.len() && is_ident_char(chars[j]) {
                        j += 1;
                    }
                }
                if j == start {
                    return Err(ParseError::new(tl, tc, "expected a variable name after '"));
                }
                push(&mut out, Tok::Var(chars[start..j].iter().collect()));
                column += j - i;
                i = j;
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                if !c.is_ascii_lowercase() {
                    return Err(ParseError::new(
                        tl,
                        tc,
                        format!("constant `{word}` must start with a lowercase letter"),
                    ));
                }
                push(
                    &mut out,
                    if word == "omega" {
                        Tok::Omega
                    } else {
                        Tok::Const(word)
                    },
                );
                column += j - i;
                i = j;
                continue;
            }
            other => {
                return Err(ParseError::new(
                    tl,
                    tc,
                    format!("unexpected character `{other}`"),
                ))
            }
        }
        i += 1;
        column += 1;
    }
    Ok(out)
}

struct State {
    toks: Vec<Spanned>,
    pos: usize,
    allow_fresh: bool,
    end: (usize, usize),
}

impl State {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.column))
            .unwrap_or(self.end)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (l, c) = self.here();
        ParseError::new(l, c, message)
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let lhs = self.inter()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.ty()?;
            Ok(Type::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn inter(&mut self) -> Result<Type, ParseError> {
        let mut parts = vec![self.atom()?];
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            parts.push(self.atom()?);
        }
        Ok(Type::inter(parts))
    }

    fn atom(&mut self) -> Result<Type, ParseError> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return Err(self.error("unexpected end of input, expected a type")),
        };
        match tok {
            Tok::Omega => {
                self.pos += 1;
                Ok(Type::Omega)
            }
            Tok::Const(name) => {
                self.pos += 1;
                Ok(Type::Const(Symbol::from(name.as_str())))
            }
            Tok::Var(name) => {
                if name == "omega" {
                    return Err(self.error("`omega` is reserved and cannot name a variable"));
                }
                if !self.allow_fresh && name.starts_with(FRESH_PREFIX) {
                    return Err(self.error(format!(
                        "variable names starting with `{FRESH_PREFIX}` are reserved"
                    )));
                }
                self.pos += 1;
                Ok(Type::Var(Arc::from(name.as_str())))
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.ty()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Tok::Arrow => Err(self.error("unexpected `->`, expected a type")),
            Tok::Amp => Err(self.error("unexpected `&`, expected a type")),
            Tok::RParen => Err(self.error("unexpected `)`, expected a type")),
        }
    }
}

/// Parses a type whose first character sits at `line`:`column`, so that
/// errors point into the enclosing file.
pub fn parse_type_at(
    src: &str,
    line: usize,
    column: usize,
    allow_fresh: bool,
) -> Result<Type, ParseError> {
    let toks = lex(src, line, column)?;
    let end = {
        let last_line = src.matches('\n').count();
        let tail = src.rsplit('\n').next().unwrap_or("");
        let base = if last_line == 0 { column } else { 1 };
        (line + last_line, base + tail.chars().count())
    };
    let mut st = State {
        toks,
        pos: 0,
        allow_fresh,
        end,
    };
    let t = st.ty()?;
    if st.pos < st.toks.len() {
        return Err(st.error("unexpected trailing input"));
    }
    Ok(t)
}

/// Parses a user-supplied type. Names with the reserved fresh prefix are rejected.
pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    parse_type_at(src, 1, 1, false)
}

/// Parses a type that may mention library-generated fresh variables.
pub fn parse_type_lenient(src: &str) -> Result<Type, ParseError> {
    parse_type_at(src, 1, 1, true)
}

impl std::str::FromStr for Type {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_type(s)
    }
}
