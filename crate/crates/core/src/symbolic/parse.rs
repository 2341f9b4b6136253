//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') ['-'] term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ('^' signed-integer)?
//! atom   := number | ident | '(' expr ')' | func '(' expr ')'
//! ident  := t | qI | qI_t | qI_tt | pI | pI_t | p | parameter
//! ```
//!
//! Decimal literals are read as exact rationals (`0.5` is `1/2`).

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use super::expr::{Expr, Func, Rational};
use super::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },
    #[error("index out of range in `{name}` at position {position}: dimension is {dimension}")]
    IndexOutOfRange { name: String, position: usize, dimension: usize },
    #[error("invalid parameter name `{0}`")]
    InvalidParameter(String),
}

impl ParseError {
    pub(crate) fn syntax(position: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax { position, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Token {
    Number(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Token::Plus, start)),
            b'-' => out.push((Token::Minus, start)),
            b'*' => out.push((Token::Star, start)),
            b'/' => out.push((Token::Slash, start)),
            b'^' => out.push((Token::Caret, start)),
            b'(' => out.push((Token::LParen, start)),
            b')' => out.push((Token::RParen, start)),
            b'0'..=b'9' | b'.' => {
                let (value, end) = read_number(bytes, i)?;
                out.push((Token::Number(value), start));
                i = end;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Token::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError::syntax(start, format!("unexpected character `{ch}`")));
            }
        }
        i += 1;
    }
    out.push((Token::End, text.len()));
    Ok(out)
}

fn read_number(bytes: &[u8], start: usize) -> Result<(Rational, usize), ParseError> {
    let mut i = start;
    let mut digits = String::new();
    let mut frac_len: i64 = 0;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        digits.push(bytes[i] as char);
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            digits.push(bytes[i] as char);
            frac_len += 1;
            i += 1;
        }
    }
    if digits.is_empty() {
        return Err(ParseError::syntax(start, "malformed number"));
    }
    let mut exponent: i64 = 0;
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        let negative = j < bytes.len() && bytes[j] == b'-';
        if j < bytes.len() && (bytes[j] == b'-' || bytes[j] == b'+') {
            j += 1;
        }
        let exp_start = j;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        if j > exp_start {
            let text = std::str::from_utf8(&bytes[exp_start..j]).unwrap();
            let value: i64 =
                text.parse().map_err(|_| ParseError::syntax(exp_start, "exponent too large"))?;
            exponent = if negative { -value } else { value };
            i = j;
        }
    }
    let mantissa: BigInt = digits.parse().map_err(|_| ParseError::syntax(start, "malformed number"))?;
    let shift = exponent - frac_len;
    if shift.abs() > 4096 {
        return Err(ParseError::syntax(start, "exponent too large"));
    }
    let ten = BigInt::from(10);
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    let value = if shift >= 0 {
        Rational::from_integer(mantissa * scale)
    } else {
        Rational::new(mantissa, scale)
    };
    Ok((value, i))
}

/// Declared alphabet: coordinate dimension and parameter names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseContext {
    dimension: usize,
    params: BTreeSet<String>,
}

/// Names that cannot be used as parameters.
pub(crate) fn is_reserved_name(name: &str) -> bool {
    if matches!(name, "t" | "p" | "dt") || Func::from_name(name).is_some() {
        return true;
    }
    for prefix in ["q", "p", "dq"] {
        if let Some(rest) = name.strip_prefix(prefix) {
            let digits = rest.trim_end_matches("_tt").trim_end_matches("_t");
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                return true;
            }
        }
    }
    false
}

impl ParseContext {
    pub fn new<S: AsRef<str>>(dimension: usize, params: &[S]) -> Result<Self, ParseError> {
        let mut set = BTreeSet::new();
        for p in params {
            let p = p.as_ref();
            let valid = p.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid || is_reserved_name(p) {
                return Err(ParseError::InvalidParameter(p.to_string()));
            }
            set.insert(p.to_string());
        }
        Ok(ParseContext { dimension, params: set })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn params(&self) -> impl Iterator<Item = &str> {
        self.params.iter().map(String::as_str)
    }

    pub fn parse(&self, text: &str) -> Result<Expr, ParseError> {
        let mut parser = Parser::new(self, text)?;
        let e = parser.expr()?;
        parser.expect_end()?;
        Ok(e)
    }

    /// Resolves an identifier to a symbol of the alphabet.
    pub fn resolve(&self, name: &str, position: usize) -> Result<Symbol, ParseError> {
        if name == "t" {
            return Ok(Symbol::Time);
        }
        if name == "p" {
            return Ok(Symbol::HomogeneousMomentum);
        }
        if self.params.contains(name) {
            return Ok(Symbol::param(name));
        }
        let indexed = |prefix: &str, suffix: &str| -> Option<&str> {
            let rest = name.strip_prefix(prefix)?.strip_suffix(suffix)?;
            (!rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit())).then_some(rest)
        };
        type Make = fn(usize) -> Symbol;
        let patterns: [(&str, &str, Make); 5] = [
            ("q", "_tt", Symbol::Acceleration),
            ("q", "_t", Symbol::Velocity),
            ("q", "", Symbol::Coord),
            ("p", "_t", Symbol::MomentumRate),
            ("p", "", Symbol::Momentum),
        ];
        for (prefix, suffix, make) in patterns {
            if let Some(digits) = indexed(prefix, suffix) {
                let index: usize = digits.parse().unwrap_or(0);
                if index == 0 || index > self.dimension {
                    return Err(ParseError::IndexOutOfRange {
                        name: name.to_string(),
                        position,
                        dimension: self.dimension,
                    });
                }
                return Ok(make(index));
            }
        }
        Err(ParseError::UnknownIdentifier { name: name.to_string(), position })
    }
}

/// Parses `text` against a scenario alphabet.
pub fn parse<S: AsRef<str>>(text: &str, dimension: usize, params: &[S]) -> Result<Expr, ParseError> {
    ParseContext::new(dimension, params)?.parse(text)
}

pub(crate) struct Parser<'a> {
    ctx: &'a ParseContext,
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(ctx: &'a ParseContext, text: &str) -> Result<Self, ParseError> {
        Ok(Parser { ctx, tokens: tokenize(text)?, pos: 0 })
    }

    pub(crate) fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    pub(crate) fn position(&self) -> usize {
        self.tokens[self.pos].1
    }

    pub(crate) fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            Token::End => Ok(()),
            other => Err(ParseError::syntax(self.position(), format!("unexpected {}", describe(other)))),
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut parts = Vec::new();
        let mut negate = false;
        loop {
            while matches!(self.peek(), Token::Minus) {
                self.bump();
                negate = !negate;
            }
            let t = self.term()?;
            parts.push(if negate { -t } else { t });
            match self.peek() {
                Token::Plus => negate = false,
                Token::Minus => negate = true,
                _ => break,
            }
            self.bump();
        }
        Ok(Expr::add(parts))
    }

    pub(crate) fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Token::Star => {
                    self.bump();
                    acc = acc * self.factor()?;
                }
                Token::Slash => {
                    self.bump();
                    let at = self.position();
                    let d = self.factor()?;
                    if d.is_zero() {
                        return Err(ParseError::syntax(at, "division by zero"));
                    }
                    acc = acc / d;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !matches!(self.peek(), Token::Caret) {
            return Ok(base);
        }
        self.bump();
        let at = self.position();
        let negative = match self.peek() {
            Token::Minus => {
                self.bump();
                true
            }
            Token::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        let Token::Number(n) = self.bump() else {
            return Err(ParseError::syntax(at, "expected integer exponent"));
        };
        if !n.denom().is_one() {
            return Err(ParseError::syntax(at, "exponent must be an integer"));
        }
        let n: i64 = n
            .numer()
            .try_into()
            .ok()
            .filter(|v: &i64| v.abs() <= 4096)
            .ok_or_else(|| ParseError::syntax(at, "exponent too large"))?;
        let n = if negative { -n } else { n };
        if n < 0 && base.is_zero() {
            return Err(ParseError::syntax(at, "division by zero"));
        }
        Ok(base.pow(n))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.position();
        match self.bump() {
            Token::Number(r) => Ok(Expr::num(r)),
            Token::LParen => {
                let e = self.expr()?;
                self.close_paren()?;
                Ok(e)
            }
            Token::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    if matches!(self.peek(), Token::LParen) {
                        self.bump();
                        let arg = self.expr()?;
                        self.close_paren()?;
                        return Ok(Expr::func(func, arg));
                    }
                    return Err(ParseError::syntax(at, format!("expected `(` after `{name}`")));
                }
                Ok(Expr::sym(self.ctx.resolve(&name, at)?))
            }
            other => Err(ParseError::syntax(at, format!("unexpected {}", describe(&other)))),
        }
    }

    fn close_paren(&mut self) -> Result<(), ParseError> {
        let at = self.position();
        match self.bump() {
            Token::RParen => Ok(()),
            other => Err(ParseError::syntax(at, format!("expected `)`, found {}", describe(&other)))),
        }
    }
}

fn describe(t: &Token) -> String {
    match t {
        Token::Number(r) => format!("number `{r}`"),
        Token::Ident(s) => format!("identifier `{s}`"),
        Token::Plus => "`+`".into(),
        Token::Minus => "`-`".into(),
        Token::Star => "`*`".into(),
        Token::Slash => "`/`".into(),
        Token::Caret => "`^`".into(),
        Token::LParen => "`(`".into(),
        Token::RParen => "`)`".into(),
        Token::End => "end of input".into(),
    }
}
