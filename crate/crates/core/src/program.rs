//! Guarded-case local rules.
//!
//! A [`RuleProgram`] is an ordered list of `condition => output` cases and a
//! default output. Conditions compare saturated range entries (`R[o]`) with
//! integers or infinities; the first case whose condition holds wins.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::rule::{offset_index, Range};
use crate::{Error, Height, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cmp {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl Cmp {
    pub fn holds(self, a: Height, b: Height) -> bool {
        match self {
            Cmp::Lt => a < b,
            Cmp::Le => a <= b,
            Cmp::Eq => a == b,
            Cmp::Ne => a != b,
            Cmp::Ge => a >= b,
            Cmp::Gt => a > b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Eq => "==",
            Cmp::Ne => "!=",
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub offset: Vec<i64>,
    pub cmp: Cmp,
    pub value: Height,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cond {
    Atom(Atom),
    Not(Box<Cond>),
    /// Conjunction; never empty.
    And(Vec<Cond>),
    /// Disjunction; never empty.
    Or(Vec<Cond>),
}

impl Cond {
    fn eval(&self, entries: &[Height], radius: u32, dim: usize) -> bool {
        match self {
            Cond::Atom(a) => {
                let idx = offset_index(radius, dim, &a.offset).expect("validated offset");
                a.cmp.holds(entries[idx], a.value)
            }
            Cond::Not(c) => !c.eval(entries, radius, dim),
            Cond::And(cs) => cs.iter().all(|c| c.eval(entries, radius, dim)),
            Cond::Or(cs) => cs.iter().any(|c| c.eval(entries, radius, dim)),
        }
    }

    fn atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Cond::Atom(a) => out.push(a),
            Cond::Not(c) => c.atoms(out),
            Cond::And(cs) | Cond::Or(cs) => cs.iter().for_each(|c| c.atoms(out)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Case {
    pub cond: Cond,
    pub output: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RuleProgram {
    pub dim: usize,
    pub radius: u32,
    pub cases: Vec<Case>,
    pub default: i64,
}

/// Why an offset cannot appear in a program of the given header.
pub fn offset_problem(radius: u32, dim: usize, offset: &[i64]) -> Option<String> {
    if offset.len() != dim {
        return Some(format!("offset has {} coordinates, rule dimension is {dim}", offset.len()));
    }
    if offset.iter().all(|&o| o == 0) {
        return Some(String::from("the centre cell is not part of the range"));
    }
    if offset.iter().any(|&o| o.unsigned_abs() > radius as u64) {
        return Some(format!("offset out of range for radius {radius}"));
    }
    None
}

pub fn output_problem(radius: u32, output: i64) -> Option<String> {
    (output.unsigned_abs() > radius as u64).then(|| format!("output {output} outside [-{radius}, {radius}]"))
}

impl RuleProgram {
    pub fn validate(&self) -> Result<()> {
        if self.dim != 1 && self.dim != 2 {
            return Err(Error::InvalidRule(format!("unsupported dimension {}", self.dim)));
        }
        let mut atoms = Vec::new();
        for case in &self.cases {
            if let Some(msg) = output_problem(self.radius, case.output) {
                return Err(Error::InvalidRule(msg));
            }
            case.cond.atoms(&mut atoms);
        }
        if let Some(msg) = output_problem(self.radius, self.default) {
            return Err(Error::InvalidRule(msg));
        }
        for a in atoms {
            if let Some(msg) = offset_problem(self.radius, self.dim, &a.offset) {
                return Err(Error::InvalidRule(msg));
            }
        }
        Ok(())
    }

    pub fn eval_entries(&self, entries: &[Height]) -> i64 {
        self.cases
            .iter()
            .find(|c| c.cond.eval(entries, self.radius, self.dim))
            .map_or(self.default, |c| c.output)
    }

    pub fn eval(&self, range: &Range) -> i64 {
        self.eval_entries(range.entries())
    }
}
