//! Text form of guarded-case rule programs.
//!
//! ```text
//! sarule v1
//! dim 1
//! radius 1
//! case R[-1] < 0 || R[1] < 0 => -1
//! default => 0
//! ```

use std::fmt::Write;

use sandlab_core::program::{offset_problem, output_problem, Atom, Case, Cond, RuleProgram};

use crate::error::{ParseError, ParseResult};
use crate::lex::{self, Cursor, Tok};

const MAX_DEPTH: usize = 64;

struct Header {
    dim: Option<(usize, usize)>,
    radius: Option<(u32, usize)>,
}

pub fn parse_rule(text: &str) -> ParseResult<RuleProgram> {
    let mut seen_header = false;
    let mut head = Header { dim: None, radius: None };
    let mut cases = Vec::new();
    let mut default = None;
    for (line, src) in lex::lines(text) {
        let toks = lex::tokenize(line, src)?;
        let mut cur = Cursor::new(line, &toks, src);
        let Some(first) = cur.peek() else { continue };
        let Tok::Ident(kw) = first else { return Err(cur.unexpected("a keyword")) };
        if !seen_header {
            if kw != "sarule" {
                return Err(cur.error("expected the header `sarule v1`"));
            }
            cur.bump();
            version(&mut cur)?;
            seen_header = true;
            continue;
        }
        if default.is_some() {
            return Err(cur.error("nothing may follow the default case"));
        }
        match kw.as_str() {
            "dim" => {
                if head.dim.is_some() {
                    return Err(cur.error("duplicate `dim`"));
                }
                cur.bump();
                let col = cur.col();
                let d = cur.int()?;
                if d != 1 && d != 2 {
                    return Err(ParseError::new(line, col, format!("unsupported dimension {d}")));
                }
                head.dim = Some((d as usize, line));
            }
            "radius" => {
                if head.radius.is_some() {
                    return Err(cur.error("duplicate `radius`"));
                }
                cur.bump();
                let col = cur.col();
                let r = cur.int()?;
                if !(0..=64).contains(&r) {
                    return Err(ParseError::new(line, col, format!("radius {r} outside [0, 64]")));
                }
                head.radius = Some((r as u32, line));
            }
            "case" | "default" => {
                let (Some((dim, _)), Some((radius, _))) = (head.dim, head.radius) else {
                    return Err(cur.error("cases must come after `dim` and `radius`"));
                };
                let is_case = kw == "case";
                cur.bump();
                let cond = if is_case {
                    Some(CondParser { cur: &mut cur, dim, radius, depth: 0 }.or()?)
                } else {
                    None
                };
                cur.expect(Tok::Arrow, "`=>`")?;
                let col = cur.col();
                let out = cur.int()?;
                if let Some(msg) = output_problem(radius, out) {
                    return Err(ParseError::new(line, col, msg));
                }
                match cond {
                    Some(cond) => cases.push(Case { cond, output: out }),
                    None => default = Some(out),
                }
            }
            other => return Err(cur.error(format!("unknown keyword `{other}`"))),
        }
        cur.finish()?;
    }
    let (line, col) = lex::eof(text);
    if !seen_header {
        return Err(ParseError::new(line, col, "missing header `sarule v1`"));
    }
    let Some((dim, _)) = head.dim else { return Err(ParseError::new(line, col, "missing `dim`")) };
    let Some((radius, _)) = head.radius else { return Err(ParseError::new(line, col, "missing `radius`")) };
    let Some(default) = default else { return Err(ParseError::new(line, col, "missing `default` case")) };
    Ok(RuleProgram { dim, radius, cases, default })
}

/// Checks the `v1` after a header keyword.
pub(crate) fn version(cur: &mut Cursor<'_>) -> ParseResult<()> {
    match cur.peek() {
        Some(Tok::Ident(v)) if v == "v1" => {
            cur.bump();
            cur.finish()
        }
        Some(Tok::Ident(v)) => Err(cur.error(format!("unsupported version `{v}`"))),
        _ => Err(cur.unexpected("a version")),
    }
}

struct CondParser<'c, 'a> {
    cur: &'c mut Cursor<'a>,
    dim: usize,
    radius: u32,
    depth: usize,
}

impl CondParser<'_, '_> {
    fn or(&mut self) -> ParseResult<Cond> {
        let mut terms = Vec::new();
        push_flat(&mut terms, self.and()?, |c| matches!(c, Cond::Or(_)));
        while self.cur.peek() == Some(&Tok::OrOr) {
            self.cur.bump();
            push_flat(&mut terms, self.and()?, |c| matches!(c, Cond::Or(_)));
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Cond::Or(terms) })
    }

    fn and(&mut self) -> ParseResult<Cond> {
        let mut terms = Vec::new();
        push_flat(&mut terms, self.unary()?, |c| matches!(c, Cond::And(_)));
        while self.cur.peek() == Some(&Tok::AndAnd) {
            self.cur.bump();
            push_flat(&mut terms, self.unary()?, |c| matches!(c, Cond::And(_)));
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Cond::And(terms) })
    }

    fn unary(&mut self) -> ParseResult<Cond> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.cur.error("condition nested too deeply"));
        }
        let c = match self.cur.peek() {
            Some(Tok::Bang) => {
                self.cur.bump();
                Cond::Not(Box::new(self.unary()?))
            }
            Some(Tok::LParen) => {
                self.cur.bump();
                let c = self.or()?;
                self.cur.expect(Tok::RParen, "`)`")?;
                c
            }
            Some(Tok::Ident(r)) if r == "R" => self.atom()?,
            _ => return Err(self.cur.unexpected("`R[...]`, `!` or `(`")),
        };
        self.depth -= 1;
        Ok(c)
    }

    fn atom(&mut self) -> ParseResult<Cond> {
        let (line, col) = (self.cur.line, self.cur.col());
        self.cur.bump();
        self.cur.expect(Tok::LBrack, "`[`")?;
        let mut offset = vec![self.cur.int()?];
        while self.cur.peek() == Some(&Tok::Comma) {
            self.cur.bump();
            offset.push(self.cur.int()?);
        }
        self.cur.expect(Tok::RBrack, "`]`")?;
        if let Some(msg) = offset_problem(self.radius, self.dim, &offset) {
            return Err(ParseError::new(line, col, msg));
        }
        let cmp = match self.cur.peek() {
            Some(Tok::Cmp(c)) => *c,
            _ => return Err(self.cur.unexpected("a comparison")),
        };
        self.cur.bump();
        let value = self.cur.height()?;
        Ok(Cond::Atom(Atom { offset, cmp, value }))
    }
}

fn push_flat(terms: &mut Vec<Cond>, c: Cond, same: impl Fn(&Cond) -> bool) {
    if same(&c) {
        match c {
            Cond::And(cs) | Cond::Or(cs) => terms.extend(cs),
            _ => unreachable!(),
        }
    } else {
        terms.push(c);
    }
}

/// Canonical text of a program.
pub fn print_rule(p: &RuleProgram) -> String {
    let mut s = format!("sarule v1\ndim {}\nradius {}\n", p.dim, p.radius);
    for case in &p.cases {
        let _ = writeln!(s, "case {} => {}", print_cond(&case.cond), case.output);
    }
    let _ = writeln!(s, "default => {}", p.default);
    s
}

pub fn print_cond(c: &Cond) -> String {
    match c {
        Cond::Or(cs) => cs.iter().map(print_and).collect::<Vec<_>>().join(" || "),
        _ => print_and(c),
    }
}

fn print_and(c: &Cond) -> String {
    match c {
        Cond::And(cs) => cs.iter().map(print_unary).collect::<Vec<_>>().join(" && "),
        _ => print_unary(c),
    }
}

fn print_unary(c: &Cond) -> String {
    match c {
        Cond::Atom(a) => {
            let o: Vec<String> = a.offset.iter().map(i64::to_string).collect();
            format!("R[{}] {} {}", o.join(","), a.cmp.symbol(), a.value)
        }
        Cond::Not(inner) => format!("!({})", print_cond(inner)),
        Cond::And(_) | Cond::Or(_) => format!("({})", print_cond(c)),
    }
}
