//! Line-oriented tokenizer shared by the text formats.

use sandlab_core::program::Cmp;
use sandlab_core::Height;

use crate::error::{ParseError, ParseResult};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    PosInf,
    NegInf,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Comma,
    OrOr,
    AndAnd,
    Bang,
    Arrow,
    Cmp(Cmp),
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::PosInf => "`+inf`".into(),
            Tok::NegInf => "`-inf`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::OrOr => "`||`".into(),
            Tok::AndAnd => "`&&`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Arrow => "`=>`".into(),
            Tok::Cmp(c) => format!("`{}`", c.symbol()),
        }
    }

    pub fn height(&self) -> Option<Height> {
        match *self {
            Tok::Int(v) => Some(Height::Finite(v)),
            Tok::PosInf => Some(Height::PosInf),
            Tok::NegInf => Some(Height::NegInf),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub col: usize,
}

/// Source split into numbered lines with comments removed.
pub fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("")))
}

/// Position just past the last line, for "missing ..." diagnostics.
pub fn eof(text: &str) -> (usize, usize) {
    (text.lines().count() + 1, 1)
}

pub fn tokenize(line: usize, src: &str) -> ParseResult<Vec<Spanned>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let next = chars.get(i + 1).copied();
        let two = |a: char, b: char| c == a && next == Some(b);
        let (tok, len) = if two('|', '|') {
            (Tok::OrOr, 2)
        } else if two('&', '&') {
            (Tok::AndAnd, 2)
        } else if two('=', '>') {
            (Tok::Arrow, 2)
        } else if two('=', '=') {
            (Tok::Cmp(Cmp::Eq), 2)
        } else if two('!', '=') {
            (Tok::Cmp(Cmp::Ne), 2)
        } else if two('<', '=') {
            (Tok::Cmp(Cmp::Le), 2)
        } else if two('>', '=') {
            (Tok::Cmp(Cmp::Ge), 2)
        } else {
            match c {
                '<' => (Tok::Cmp(Cmp::Lt), 1),
                '>' => (Tok::Cmp(Cmp::Gt), 1),
                '!' => (Tok::Bang, 1),
                '[' => (Tok::LBrack, 1),
                ']' => (Tok::RBrack, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                ',' => (Tok::Comma, 1),
                '+' | '-' | '0'..='9' => number(line, &chars, i)?,
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let end = (i..chars.len())
                        .find(|&j| !(chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '-'))
                        .unwrap_or(chars.len());
                    (Tok::Ident(chars[i..end].iter().collect()), end - i)
                }
                c => return Err(ParseError::new(line, col, format!("unexpected character {c:?}"))),
            }
        };
        out.push(Spanned { tok, col });
        i += len;
    }
    Ok(out)
}

fn number(line: usize, chars: &[char], start: usize) -> ParseResult<(Tok, usize)> {
    let mut i = start;
    let sign = chars[i];
    if sign == '+' || sign == '-' {
        i += 1;
        if chars[i..].starts_with(&['i', 'n', 'f']) {
            let end = i + 3;
            if chars.get(end).is_some_and(|c| c.is_ascii_alphanumeric()) {
                return Err(ParseError::new(line, start + 1, "malformed infinity"));
            }
            let tok = if sign == '+' { Tok::PosInf } else { Tok::NegInf };
            return Ok((tok, end - start));
        }
    }
    let digits = (i..chars.len()).take_while(|&j| chars[j].is_ascii_digit()).count();
    if digits == 0 {
        return Err(ParseError::new(line, start + 1, "expected a number after the sign"));
    }
    let end = i + digits;
    if chars.get(end).is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_') {
        return Err(ParseError::new(line, end + 1, "malformed number"));
    }
    let text: String = chars[start..end].iter().collect();
    let v = text.parse::<i64>().map_err(|_| ParseError::new(line, start + 1, "integer out of range"))?;
    Ok((Tok::Int(v), end - start))
}

/// Cursor over one line's tokens.
pub struct Cursor<'a> {
    pub line: usize,
    toks: &'a [Spanned],
    pos: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(line: usize, toks: &'a [Spanned], src: &str) -> Self {
        Cursor { line, toks, pos: 0, end_col: src.chars().count() + 1 }
    }

    pub fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    pub fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |s| s.col)
    }

    pub fn bump(&mut self) -> Option<&'a Tok> {
        let t = self.toks.get(self.pos).map(|s| &s.tok);
        self.pos += 1;
        t
    }

    pub fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col(), msg)
    }

    pub fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.describe())),
            None => self.error(format!("expected {wanted}, found end of line")),
        }
    }

    pub fn expect(&mut self, tok: Tok, wanted: &str) -> ParseResult<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    pub fn int(&mut self) -> ParseResult<i64> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(*v)
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    pub fn height(&mut self) -> ParseResult<Height> {
        match self.peek().and_then(Tok::height) {
            Some(h) => {
                self.pos += 1;
                Ok(h)
            }
            None => Err(self.unexpected("an integer, +inf or -inf")),
        }
    }

    pub fn finish(&self) -> ParseResult<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.error(format!("unexpected {} at end of line", t.describe()))),
        }
    }
}
