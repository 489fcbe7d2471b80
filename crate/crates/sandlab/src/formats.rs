//! Configuration files and dense rule tables.

use std::fmt::Write;

use sandlab_core::ca::{neighbourhood_count, CaBacking, CaRule};
use sandlab_core::config::Configuration;
use sandlab_core::rule::{range_count, Backing, SaRule};
use sandlab_core::Height;

use crate::dsl;
use crate::error::{ParseError, ParseResult};
use crate::lex::{self, Cursor, Tok};

/// Key/value lines of a header-tagged file, each with its line number and
/// tokens after the key.
struct Fields<'a> {
    entries: Vec<(String, usize, usize, Vec<lex::Spanned>, &'a str)>,
    text: &'a str,
}

impl<'a> Fields<'a> {
    /// Reads lines up to (and excluding) a line consisting of `stop`.
    /// Returns the fields and the line number where `stop` was found.
    fn read(text: &'a str, header: &str, stop: Option<&str>) -> ParseResult<(Self, Option<usize>)> {
        let mut entries: Vec<(String, usize, usize, Vec<lex::Spanned>, &str)> = Vec::new();
        let mut seen_header = false;
        for (line, src) in lex::lines(text) {
            let toks = lex::tokenize(line, src)?;
            let mut cur = Cursor::new(line, &toks, src);
            let Some(first) = cur.peek() else { continue };
            let Tok::Ident(key) = first else { return Err(cur.unexpected("a keyword")) };
            if !seen_header {
                if key != header {
                    return Err(cur.error(format!("expected the header `{header} v1`")));
                }
                cur.bump();
                dsl::version(&mut cur)?;
                seen_header = true;
                continue;
            }
            if Some(key.as_str()) == stop {
                cur.bump();
                cur.finish()?;
                return Ok((Fields { entries, text }, Some(line)));
            }
            if entries.iter().any(|e| &e.0 == key) {
                return Err(cur.error(format!("duplicate `{key}`")));
            }
            entries.push((key.clone(), line, cur.col(), toks[1..].to_vec(), src));
        }
        if !seen_header {
            let (l, c) = lex::eof(text);
            return Err(ParseError::new(l, c, format!("missing header `{header} v1`")));
        }
        Ok((Fields { entries, text }, None))
    }

    fn get(&self, key: &str) -> Option<(usize, &[lex::Spanned], &'a str)> {
        self.entries.iter().find(|e| e.0 == key).map(|e| (e.1, e.3.as_slice(), e.4))
    }

    fn missing(&self, key: &str) -> ParseError {
        let (l, c) = lex::eof(self.text);
        ParseError::new(l, c, format!("missing `{key}`"))
    }

    /// Runs `f` on the tokens of `key`, requiring it to consume them all.
    fn with<T>(&self, key: &str, f: impl FnOnce(&mut Cursor<'_>) -> ParseResult<T>) -> ParseResult<T> {
        let (line, toks, src) = self.get(key).ok_or_else(|| self.missing(key))?;
        let mut cur = Cursor::new(line, toks, src);
        let v = f(&mut cur)?;
        cur.finish()?;
        Ok(v)
    }

    fn reject_unknown(&self, allowed: &[&str]) -> ParseResult<()> {
        for (key, line, col, _, _) in &self.entries {
            if !allowed.contains(&key.as_str()) {
                return Err(ParseError::new(*line, *col, format!("unexpected key `{key}`")));
            }
        }
        Ok(())
    }
}

fn bounded(cur: &mut Cursor<'_>, lo: i64, hi: i64, what: &str) -> ParseResult<i64> {
    let col = cur.col();
    let v = cur.int()?;
    if v < lo || v > hi {
        return Err(ParseError::new(cur.line, col, format!("{what} {v} outside [{lo}, {hi}]")));
    }
    Ok(v)
}

fn heights(cur: &mut Cursor<'_>) -> ParseResult<Vec<Height>> {
    let mut out = Vec::new();
    while cur.peek().is_some() {
        out.push(cur.height()?);
    }
    Ok(out)
}

const MAX_SIDE: i64 = 1 << 24;

pub fn parse_config(text: &str) -> ParseResult<Configuration> {
    let (fields, _) = Fields::read(text, "sandcfg", None)?;
    let dim = fields.with("dim", |c| bounded(c, 1, 2, "dimension"))?;
    let mut kind_at = (1, 1);
    let kind = fields.with("kind", |c| {
        kind_at = (c.line, c.col());
        match c.bump() {
            Some(Tok::Ident(k)) if k == "eventually-constant" || k == "periodic" => Ok(k.clone()),
            _ => Err(ParseError::new(kind_at.0, kind_at.1, "kind must be `eventually-constant` or `periodic`")),
        }
    })?;
    let (hline, htoks, hsrc) = fields.get("heights").ok_or_else(|| fields.missing("heights"))?;
    let hs = heights(&mut Cursor::new(hline, htoks, hsrc))?;
    let count_error = |want: usize| {
        ParseError::new(hline, 1, format!("expected {want} heights, found {}", hs.len()))
    };
    match (dim, kind.as_str()) {
        (1, "eventually-constant") => {
            fields.reject_unknown(&["dim", "kind", "left", "right", "origin", "heights"])?;
            let left = fields.with("left", |c| c.height())?;
            let right = fields.with("right", |c| c.height())?;
            let origin = fields.with("origin", |c| c.int())?;
            Ok(Configuration::line(left, right, origin, hs))
        }
        (1, _) => {
            fields.reject_unknown(&["dim", "kind", "period", "heights"])?;
            let p = fields.with("period", |c| bounded(c, 1, MAX_SIDE, "period"))? as usize;
            if hs.len() != p {
                return Err(count_error(p));
            }
            Ok(Configuration::periodic(hs).expect("period is positive"))
        }
        (_, "eventually-constant") => {
            fields.reject_unknown(&["dim", "kind", "bg", "origin", "shape", "heights"])?;
            let bg = fields.with("bg", |c| c.height())?;
            let origin = fields.with("origin", |c| Ok([c.int()?, c.int()?]))?;
            let shape = fields.with("shape", |c| {
                Ok([bounded(c, 0, MAX_SIDE, "side")? as usize, bounded(c, 0, MAX_SIDE, "side")? as usize])
            })?;
            let want = shape[0].checked_mul(shape[1]).filter(|&n| n <= MAX_SIDE as usize);
            let Some(want) = want else {
                let line = fields.get("shape").unwrap().0;
                return Err(ParseError::new(line, 1, "shape too large"));
            };
            if hs.len() != want {
                return Err(count_error(want));
            }
            Ok(Configuration::plane(bg, origin, shape, hs))
        }
        _ => Err(ParseError::new(kind_at.0, kind_at.1, "periodic configurations are one-dimensional")),
    }
}

fn join(hs: &[Height]) -> String {
    let mut s = String::from("heights");
    for h in hs {
        let _ = write!(s, " {h}");
    }
    s
}

pub fn serialize_config(x: &Configuration) -> String {
    match x {
        Configuration::Line(l) => format!(
            "sandcfg v1\ndim 1\nkind eventually-constant\nleft {}\nright {}\norigin {}\n{}\n",
            l.left(),
            l.right(),
            l.origin(),
            join(l.core())
        ),
        Configuration::Periodic(p) => {
            format!("sandcfg v1\ndim 1\nkind periodic\nperiod {}\n{}\n", p.period(), join(p.cells()))
        }
        Configuration::Plane(p) => {
            let [a, b] = p.origin();
            let [w, h] = p.shape();
            format!(
                "sandcfg v1\ndim 2\nkind eventually-constant\nbg {}\norigin {a} {b}\nshape {w} {h}\n{}\n",
                p.background(),
                join(p.core())
            )
        }
    }
}

/// Largest dense table a file may declare.
pub const MAX_TABLE: u64 = 1 << 26;

fn table_header(fields: &Fields<'_>, stop: Option<usize>) -> ParseResult<usize> {
    stop.ok_or_else(|| fields.missing("table"))
}

pub fn parse_sa_table(text: &str) -> ParseResult<SaRule> {
    let (fields, stop) = Fields::read(text, "satable", Some("table"))?;
    let table_line = table_header(&fields, stop)?;
    fields.reject_unknown(&["dim", "radius"])?;
    let dim = fields.with("dim", |c| bounded(c, 1, 2, "dimension"))? as usize;
    let radius = fields.with("radius", |c| bounded(c, 0, 64, "radius"))? as u32;
    let count = range_count(radius, dim).filter(|&n| n <= MAX_TABLE).ok_or_else(|| {
        ParseError::new(table_line, 1, format!("a radius-{radius} table in dimension {dim} is too large"))
    })? as usize;
    let mut values = Vec::with_capacity(count);
    for (line, src) in lex::lines(text).skip(table_line) {
        let toks = lex::tokenize(line, src)?;
        let mut cur = Cursor::new(line, &toks, src);
        while cur.peek().is_some() {
            if values.len() == count {
                return Err(cur.error(format!("more than {count} table entries")));
            }
            let v = bounded(&mut cur, -(radius as i64), radius as i64, "output")?;
            values.push(v as i32);
        }
    }
    if values.len() != count {
        let (l, c) = lex::eof(text);
        return Err(ParseError::new(l, c, format!("expected {count} table entries, found {}", values.len())));
    }
    Ok(SaRule::table(dim, radius, values).expect("validated table"))
}

/// Dense-table text of a rule; fails when the table would exceed `budget`.
pub fn serialize_sa_table(f: &SaRule, budget: u64) -> sandlab_core::Result<String> {
    let t = f.to_table(budget)?;
    let Backing::Table(values) = t.backing() else { unreachable!("to_table returns a table") };
    let mut s = format!("satable v1\ndim {}\nradius {}\ntable\n", f.dim(), f.radius());
    for chunk in values.chunks(32) {
        let row: Vec<String> = chunk.iter().map(i32::to_string).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    Ok(s)
}

const DIGITS: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";

pub fn parse_ca(text: &str) -> ParseResult<CaRule> {
    let (fields, stop) = Fields::read(text, "carule", Some("table"))?;
    let table_line = table_header(&fields, stop)?;
    fields.reject_unknown(&["dim", "radius", "states"])?;
    let dim = fields.with("dim", |c| bounded(c, 1, 3, "dimension"))? as usize;
    let radius = fields.with("radius", |c| bounded(c, 0, 64, "radius"))? as u32;
    let states = fields.with("states", |c| bounded(c, 1, 36, "states"))? as u8;
    let count = neighbourhood_count(dim, radius, states).filter(|&n| n <= MAX_TABLE).ok_or_else(|| {
        ParseError::new(table_line, 1, "table too large")
    })? as usize;
    let mut table = Vec::with_capacity(count);
    for (line, src) in lex::lines(text).skip(table_line) {
        for (i, b) in src.bytes().enumerate() {
            if b.is_ascii_whitespace() {
                continue;
            }
            let d = match b {
                b'0'..=b'9' => b - b'0',
                b'a'..=b'z' => b - b'a' + 10,
                _ => 255,
            };
            let col = src[..i].chars().count() + 1;
            if d >= states {
                return Err(ParseError::new(line, col, format!("invalid state digit for {states} states")));
            }
            if table.len() == count {
                return Err(ParseError::new(line, col, format!("more than {count} table entries")));
            }
            table.push(d);
        }
    }
    if table.len() != count {
        let (l, c) = lex::eof(text);
        return Err(ParseError::new(l, c, format!("expected {count} table entries, found {}", table.len())));
    }
    Ok(CaRule::table(dim, radius, states, table).expect("validated table"))
}

pub fn serialize_ca(g: &CaRule, budget: u64) -> sandlab_core::Result<String> {
    if g.states() as usize > DIGITS.len() {
        return Err(sandlab_core::Error::InvalidRule(format!("{} states do not fit one digit", g.states())));
    }
    let t = g.to_table(budget)?;
    let CaBacking::Table(values) = t.backing() else { unreachable!("to_table returns a table") };
    let mut s = String::with_capacity(values.len() + values.len() / 64 + 64);
    let _ = write!(s, "carule v1\ndim {}\nradius {}\nstates {}\ntable\n", g.dim(), g.radius(), g.states());
    for chunk in values.chunks(64) {
        s.extend(chunk.iter().map(|&d| DIGITS[d as usize] as char));
        s.push('\n');
    }
    Ok(s)
}

/// A rule file in either the program or the dense-table format.
pub fn parse_sa_rule(text: &str) -> ParseResult<SaRule> {
    let head = lex::lines(text).map(|(_, l)| l.trim()).find(|l| !l.is_empty()).unwrap_or("");
    if head.starts_with("satable") {
        parse_sa_table(text)
    } else {
        let p = dsl::parse_rule(text)?;
        Ok(SaRule::program(p).expect("parser enforces program invariants"))
    }
}
