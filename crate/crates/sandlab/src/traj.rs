//! Line-delimited trajectory records.

use serde::{Deserialize, Serialize};

use sandlab_core::config::Configuration;
use sandlab_core::Height;

use crate::error::{ParseError, ParseResult};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub step: u64,
    pub origin: i64,
    pub left: String,
    pub right: String,
    pub core: Vec<Cell>,
}

fn cell(h: Height) -> Cell {
    match h {
        Height::Finite(v) => Cell::Int(v),
        h => Cell::Text(h.to_string()),
    }
}

fn text_height(s: &str) -> Option<Height> {
    match s {
        "+inf" => Some(Height::PosInf),
        "-inf" => Some(Height::NegInf),
        _ => s.parse().ok().map(Height::Finite),
    }
}

impl Record {
    /// `None` unless `x` is an eventually constant line.
    pub fn new(step: u64, x: &Configuration) -> Option<Record> {
        let l = x.as_line()?;
        Some(Record {
            step,
            origin: l.origin(),
            left: l.left().to_string(),
            right: l.right().to_string(),
            core: l.core().iter().map(|&h| cell(h)).collect(),
        })
    }

    pub fn config(&self) -> Result<Configuration, String> {
        let side = |s: &str| text_height(s).ok_or_else(|| format!("bad background {s:?}"));
        let core = self
            .core
            .iter()
            .map(|c| match c {
                Cell::Int(v) => Ok(Height::Finite(*v)),
                Cell::Text(s) if s == "+inf" || s == "-inf" => Ok(text_height(s).unwrap()),
                Cell::Text(s) => Err(format!("bad height {s:?}")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Configuration::line(side(&self.left)?, side(&self.right)?, self.origin, core))
    }
}

pub fn to_jsonl(records: &[Record]) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r).expect("records serialize"));
        s.push('\n');
    }
    s
}

pub fn parse_jsonl(text: &str) -> ParseResult<Vec<(u64, Configuration)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(line)
            .map_err(|e| ParseError::new(i + 1, e.column().max(1), e.to_string()))?;
        let x = rec.config().map_err(|m| ParseError::new(i + 1, 1, m))?;
        out.push((rec.step, x));
    }
    Ok(out)
}
