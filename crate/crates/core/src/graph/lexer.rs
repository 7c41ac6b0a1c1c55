//! Tokenizer shared by the Turtle, N-Triples and query parsers.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Iri(String),
    PName { prefix: String, local: String },
    Blank(String),
    Var(String),
    Str(String),
    LangTag(String),
    AtKeyword(String),
    Integer(String),
    Decimal(String),
    Double(String),
    Word(String),
    Caret2,
    Dot,
    Semicolon,
    Comma,
    LBracket,
    RBracket,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Star,
    Op(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Iri(i) => write!(f, "<{i}>"),
            Tok::PName { prefix, local } => write!(f, "{prefix}:{local}"),
            Tok::Blank(b) => write!(f, "_:{b}"),
            Tok::Var(v) => write!(f, "?{v}"),
            Tok::Str(s) => write!(f, "{s:?}"),
            Tok::LangTag(t) => write!(f, "@{t}"),
            Tok::AtKeyword(k) => write!(f, "@{k}"),
            Tok::Integer(n) | Tok::Decimal(n) | Tok::Double(n) => f.write_str(n),
            Tok::Word(w) => f.write_str(w),
            Tok::Caret2 => f.write_str("^^"),
            Tok::Dot => f.write_str("."),
            Tok::Semicolon => f.write_str(";"),
            Tok::Comma => f.write_str(","),
            Tok::LBracket => f.write_str("["),
            Tok::RBracket => f.write_str("]"),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
            Tok::LBrace => f.write_str("{"),
            Tok::RBrace => f.write_str("}"),
            Tok::Star => f.write_str("*"),
            Tok::Op(o) => f.write_str(o),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub pos: Position,
    pub message: String,
}

pub struct Lexer<'a> {
    chars: Vec<char>,
    idx: usize,
    line: usize,
    col: usize,
    allow_vars: bool,
    _src: &'a str,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str, allow_vars: bool) -> Self {
        Lexer {
            chars: src.chars().collect(),
            idx: 0,
            line: 1,
            col: 1,
            allow_vars,
            _src: src,
        }
    }

    pub fn tokenize(mut self) -> Result<Vec<(Tok, Position)>, LexError> {
        let mut out = Vec::new();
        while let Some(tok) = self.next_token()? {
            out.push(tok);
        }
        Ok(out)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).copied()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.idx + n).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.idx).copied()?;
        self.idx += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Position {
        Position {
            line: self.line,
            column: self.col,
        }
    }

    fn err<T>(&self, pos: Position, message: impl Into<String>) -> Result<T, LexError> {
        Err(LexError {
            pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn next_token(&mut self) -> Result<Option<(Tok, Position)>, LexError> {
        self.skip_ws();
        let start = self.pos();
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        let tok = match c {
            '<' => {
                if let Some(iri) = self.try_iri()? {
                    Tok::Iri(iri)
                } else {
                    self.bump();
                    if self.peek() == Some('=') {
                        self.bump();
                        Tok::Op("<=")
                    } else {
                        Tok::Op("<")
                    }
                }
            }
            '>' => {
                self.bump();
                if self.peek() == Some('=') {
                    self.bump();
                    Tok::Op(">=")
                } else {
                    Tok::Op(">")
                }
            }
            '=' => {
                self.bump();
                Tok::Op("=")
            }
            '!' => {
                self.bump();
                if self.peek() == Some('=') {
                    self.bump();
                    Tok::Op("!=")
                } else {
                    Tok::Op("!")
                }
            }
            '&' if self.peek_at(1) == Some('&') => {
                self.bump();
                self.bump();
                Tok::Op("&&")
            }
            '|' if self.peek_at(1) == Some('|') => {
                self.bump();
                self.bump();
                Tok::Op("||")
            }
            '"' | '\'' => Tok::Str(self.string_literal()?),
            '@' => {
                self.bump();
                let word = self.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
                if word.is_empty() {
                    return self.err(start, "expected language tag or keyword after '@'");
                }
                if word == "prefix" || word == "base" {
                    Tok::AtKeyword(word)
                } else {
                    Tok::LangTag(word)
                }
            }
            '^' => {
                self.bump();
                if self.bump() != Some('^') {
                    return self.err(start, "expected '^^'");
                }
                Tok::Caret2
            }
            '.' if !self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) => {
                self.bump();
                Tok::Dot
            }
            ';' => {
                self.bump();
                Tok::Semicolon
            }
            ',' => {
                self.bump();
                Tok::Comma
            }
            '[' => {
                self.bump();
                Tok::LBracket
            }
            ']' => {
                self.bump();
                Tok::RBracket
            }
            '(' => {
                self.bump();
                Tok::LParen
            }
            ')' => {
                self.bump();
                Tok::RParen
            }
            '{' => {
                self.bump();
                Tok::LBrace
            }
            '}' => {
                self.bump();
                Tok::RBrace
            }
            '*' => {
                self.bump();
                Tok::Star
            }
            '?' | '$' if self.allow_vars => {
                self.bump();
                let name = self.take_while(|c| c.is_alphanumeric() || c == '_');
                if name.is_empty() {
                    return self.err(start, "empty variable name");
                }
                Tok::Var(name)
            }
            '_' if self.peek_at(1) == Some(':') => {
                self.bump();
                self.bump();
                let label = self.take_while(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '.');
                let label = self.unread_trailing_dots(label);
                if label.is_empty() {
                    return self.err(start, "empty blank node label");
                }
                Tok::Blank(label)
            }
            c if c.is_ascii_digit() || ((c == '+' || c == '-' || c == '.') && self.peek_at(1).is_some_and(|d| d.is_ascii_digit() || d == '.')) => {
                self.number()?
            }
            c if c.is_alphabetic() || c == ':' || c == '_' => {
                let word = self.take_while(|c| {
                    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '%')
                });
                let word = self.unread_trailing_dots(word);
                match word.split_once(':') {
                    Some((prefix, local)) => Tok::PName {
                        prefix: prefix.to_string(),
                        local: local.to_string(),
                    },
                    None => Tok::Word(word),
                }
            }
            other => return self.err(start, format!("unexpected character {other:?}")),
        };
        Ok(Some((tok, start)))
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if f(c) {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    /// A name may not end in '.', which instead terminates the statement.
    fn unread_trailing_dots(&mut self, mut word: String) -> String {
        while word.ends_with('.') {
            word.pop();
            self.idx -= 1;
            self.col -= 1;
        }
        word
    }

    fn try_iri(&mut self) -> Result<Option<String>, LexError> {
        // Scan ahead: an IRI reference closes before any whitespace.
        let mut j = self.idx + 1;
        loop {
            match self.chars.get(j) {
                Some('>') => break,
                Some(c) if c.is_whitespace() || *c == '<' || *c == '"' => return Ok(None),
                Some(_) => j += 1,
                None => return Ok(None),
            }
        }
        let start = self.pos();
        self.bump();
        let mut iri = String::new();
        while let Some(c) = self.bump() {
            match c {
                '>' => return Ok(Some(iri)),
                '\\' => iri.push(self.unicode_escape(start)?),
                c => iri.push(c),
            }
        }
        self.err(start, "unterminated IRI")
    }

    fn unicode_escape(&mut self, at: Position) -> Result<char, LexError> {
        let width = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return self.err(at, "invalid escape in IRI"),
        };
        self.hex_char(width, at)
    }

    fn hex_char(&mut self, width: usize, at: Position) -> Result<char, LexError> {
        let mut code = 0u32;
        for _ in 0..width {
            let Some(d) = self.bump().and_then(|c| c.to_digit(16)) else {
                return self.err(at, "invalid hex digit in escape");
            };
            code = code * 16 + d;
        }
        match char::from_u32(code) {
            Some(c) => Ok(c),
            None => self.err(at, format!("invalid code point U+{code:X}")),
        }
    }

    fn string_literal(&mut self) -> Result<String, LexError> {
        let start = self.pos();
        let quote = self.bump().unwrap_or('"');
        let long = self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        if long {
            self.bump();
            self.bump();
        }
        let mut out = String::new();
        loop {
            let Some(c) = self.bump() else {
                return self.err(start, "unterminated string literal");
            };
            if c == quote {
                if !long {
                    return Ok(out);
                }
                if self.peek() == Some(quote) && self.peek_at(1) == Some(quote) {
                    self.bump();
                    self.bump();
                    // """a"""" ends with an embedded quote
                    while self.peek() == Some(quote) {
                        out.push(quote);
                        self.bump();
                    }
                    return Ok(out);
                }
                out.push(c);
                continue;
            }
            match c {
                '\\' => {
                    let esc = self.pos();
                    let e = match self.bump() {
                        Some('t') => '\t',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('b') => '\u{8}',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_char(4, esc)?,
                        Some('U') => self.hex_char(8, esc)?,
                        _ => return self.err(esc, "invalid escape sequence"),
                    };
                    out.push(e);
                }
                '\n' | '\r' if !long => return self.err(start, "newline in short string literal"),
                c => out.push(c),
            }
        }
    }

    fn number(&mut self) -> Result<Tok, LexError> {
        let start = self.pos();
        let mut s = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            s.push(c);
            self.bump();
        }
        s.push_str(&self.take_while(|c| c.is_ascii_digit()));
        let mut decimal = false;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            decimal = true;
            s.push('.');
            self.bump();
            s.push_str(&self.take_while(|c| c.is_ascii_digit()));
        }
        if let Some(e @ ('e' | 'E')) = self.peek() {
            s.push(e);
            self.bump();
            if let Some(c @ ('+' | '-')) = self.peek() {
                s.push(c);
                self.bump();
            }
            let exp = self.take_while(|c| c.is_ascii_digit());
            if exp.is_empty() {
                return self.err(start, "malformed exponent");
            }
            s.push_str(&exp);
            return Ok(Tok::Double(s));
        }
        if !s.chars().any(|c| c.is_ascii_digit()) {
            return self.err(start, "malformed number");
        }
        Ok(if decimal { Tok::Decimal(s) } else { Tok::Integer(s) })
    }
}
