//! Tokenizer shared by the DDL and SELECT parsers.

use crate::error::{Error, Result};
use crate::model::normalize_ident;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Bare or quoted identifier, already unquoted.
    Ident { text: String, quoted: bool },
    Str(String),
    Num(String),
    Sym(char),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
}

impl Token {
    pub fn text(&self) -> String {
        match &self.tok {
            Tok::Ident { text, .. } => text.clone(),
            Tok::Str(s) => format!("'{s}'"),
            Tok::Num(n) => n.clone(),
            Tok::Sym(c) => c.to_string(),
        }
    }

    /// Case-insensitive keyword test; quoted identifiers never match.
    pub fn is_kw(&self, kw: &str) -> bool {
        matches!(&self.tok, Tok::Ident { text, quoted: false } if text.eq_ignore_ascii_case(kw))
    }

    pub fn is_sym(&self, c: char) -> bool {
        self.tok == Tok::Sym(c)
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            while i < chars.len() && !(chars[i] == '*' && chars.get(i + 1) == Some(&'/')) {
                if chars[i] == '\n' {
                    line += 1;
                }
                i += 1;
            }
            i += 2;
        } else if c == '\'' {
            let start_line = line;
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => {
                        return Err(Error::SyntaxError {
                            line: start_line,
                            token: "unterminated string".into(),
                        })
                    }
                    Some('\'') if chars.get(i + 1) == Some(&'\'') => {
                        s.push('\'');
                        i += 2;
                    }
                    Some('\'') => {
                        i += 1;
                        break;
                    }
                    Some(&ch) => {
                        if ch == '\n' {
                            line += 1;
                        }
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            out.push(Token { tok: Tok::Str(s), line: start_line });
        } else if c == '"' || c == '`' || c == '[' {
            let close = if c == '[' { ']' } else { c };
            let start = i;
            i += 1;
            loop {
                match chars.get(i) {
                    None => {
                        return Err(Error::SyntaxError {
                            line,
                            token: "unterminated quoted identifier".into(),
                        })
                    }
                    Some(&ch) if ch == close && close != ']' && chars.get(i + 1) == Some(&close) => i += 2,
                    Some(&ch) if ch == close => {
                        i += 1;
                        break;
                    }
                    Some(_) => i += 1,
                }
            }
            let raw: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: Tok::Ident {
                    text: normalize_ident(&raw),
                    quoted: true,
                },
                line,
            });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident {
                    text: chars[start..i].iter().collect(),
                    quoted: false,
                },
                line,
            });
        } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Num(chars[start..i].iter().collect()),
                line,
            });
        } else {
            out.push(Token { tok: Tok::Sym(c), line });
            i += 1;
        }
    }
    Ok(out)
}

/// Cursor over a token list.
pub struct Cursor<'a> {
    toks: &'a [Token],
    pub pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(toks: &'a [Token]) -> Self {
        Cursor { toks, pos: 0 }
    }

    pub fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    pub fn peek_at(&self, k: usize) -> Option<&'a Token> {
        self.toks.get(self.pos + k)
    }

    pub fn advance(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn error(&self) -> Error {
        match self.peek() {
            Some(t) => Error::SyntaxError {
                line: t.line,
                token: t.text(),
            },
            None => Error::SyntaxError {
                line: self.toks.last().map_or(1, |t| t.line),
                token: "end of input".into(),
            },
        }
    }

    pub fn eat_kw(&mut self, kw: &str) -> bool {
        if self.peek().is_some_and(|t| t.is_kw(kw)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_kw(&mut self, kw: &str) -> Result<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error())
        }
    }

    pub fn eat_sym(&mut self, c: char) -> bool {
        if self.peek().is_some_and(|t| t.is_sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.error())
        }
    }

    pub fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Token {
                tok: Tok::Ident { text, .. },
                ..
            }) => {
                self.pos += 1;
                Ok(text.clone())
            }
            _ => Err(self.error()),
        }
    }

    /// `( a, b, … )`
    pub fn ident_list(&mut self) -> Result<Vec<String>> {
        self.expect_sym('(')?;
        let mut v = vec![self.ident()?];
        while self.eat_sym(',') {
            v.push(self.ident()?);
        }
        self.expect_sym(')')?;
        Ok(v)
    }
}
