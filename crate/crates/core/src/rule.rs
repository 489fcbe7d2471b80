//! Ranges and sand-automaton local rules.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::ca::CaRule;
use crate::config::Configuration;
use crate::height::{Finite, NegInf, PosInf};
use crate::metric::beta;
use crate::nil::Reduction;
use crate::program::RuleProgram;
use crate::{Error, Height, Result};

/// Number of off-centre cells in a range, `(2r+1)^d - 1`.
pub fn range_len(radius: u32, dim: usize) -> usize {
    (2 * radius as usize + 1).pow(dim as u32) - 1
}

/// Off-centre offsets of a range, in lexicographic order.
pub fn offsets(radius: u32, dim: usize) -> Vec<Vec<i64>> {
    let r = radius as i64;
    match dim {
        1 => (-r..=r).filter(|&o| o != 0).map(|o| alloc::vec![o]).collect(),
        2 => {
            let mut v = Vec::with_capacity(range_len(radius, 2));
            for a in -r..=r {
                for b in -r..=r {
                    if a != 0 || b != 0 {
                        v.push(alloc::vec![a, b]);
                    }
                }
            }
            v
        }
        _ => panic!("unsupported dimension {dim}"),
    }
}

/// Position of an offset in [`offsets`], if it belongs to the range.
pub fn offset_index(radius: u32, dim: usize, offset: &[i64]) -> Option<usize> {
    let r = radius as i64;
    if offset.len() != dim || offset.iter().any(|&o| o.abs() > r) || offset.iter().all(|&o| o == 0) {
        return None;
    }
    let side = 2 * r + 1;
    let linear = offset.iter().fold(0, |acc, &o| acc * side + (o + r));
    let centre = (0..dim).fold(0, |acc, _| acc * side + r);
    Some(if linear < centre { linear as usize } else { linear as usize - 1 })
}

/// Digit of a saturated value in a dense table: `-inf, -r, ..., r, +inf`
/// map to `0 ..= 2r+2`.
pub fn digit(radius: u32, h: Height) -> usize {
    match h {
        NegInf => 0,
        Finite(v) => (v + radius as i64 + 1) as usize,
        PosInf => 2 * radius as usize + 2,
    }
}

pub fn undigit(radius: u32, d: usize) -> Height {
    let r = radius as usize;
    if d == 0 {
        NegInf
    } else if d == 2 * r + 2 {
        PosInf
    } else {
        Finite(d as i64 - r as i64 - 1)
    }
}

/// Dense-table index: `sum digit(entry_p) * (2r+3)^p` over positions `p`.
pub fn table_index(radius: u32, entries: &[Height]) -> usize {
    let base = 2 * radius as usize + 3;
    entries.iter().rev().fold(0, |acc, &h| acc * base + digit(radius, h))
}

/// Number of ranges of the given radius and dimension, if it fits in `u64`.
pub fn range_count(radius: u32, dim: usize) -> Option<u64> {
    (2 * radius as u64 + 3).checked_pow(range_len(radius, dim) as u32)
}

/// What a pile sees: its neighbours measured from its own top with
/// precision equal to the radius. The centre is implicit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Range {
    radius: u32,
    dim: usize,
    entries: Vec<Height>,
}

impl Range {
    pub fn new(radius: u32, dim: usize, entries: Vec<Height>) -> Result<Range> {
        if entries.len() != range_len(radius, dim) {
            return Err(Error::InvalidRule(format!(
                "range of radius {radius} in dimension {dim} has {} entries, got {}",
                range_len(radius, dim),
                entries.len()
            )));
        }
        if entries.iter().any(|h| h.finite().is_some_and(|v| v.unsigned_abs() > radius as u64)) {
            return Err(Error::InvalidRule(format!("range entry outside [-{radius}, {radius}]")));
        }
        Ok(Range { radius, dim, entries })
    }

    /// All-zero range: what a pile sees on a flat configuration.
    pub fn flat(radius: u32, dim: usize) -> Range {
        Range { radius, dim, entries: alloc::vec![Finite(0); range_len(radius, dim)] }
    }

    /// The range with the given dense-table index.
    pub fn from_index(radius: u32, dim: usize, mut index: u64) -> Range {
        let base = 2 * radius as u64 + 3;
        let entries = (0..range_len(radius, dim))
            .map(|_| {
                let d = (index % base) as usize;
                index /= base;
                undigit(radius, d)
            })
            .collect();
        Range { radius, dim, entries }
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Height] {
        &self.entries
    }

    pub fn get(&self, offset: &[i64]) -> Option<Height> {
        offset_index(self.radius, self.dim, offset).map(|i| self.entries[i])
    }

    pub fn index(&self) -> usize {
        table_index(self.radius, &self.entries)
    }
}

/// Range of radius `r` centred on pile `i`; errors on an infinite pile.
pub fn range_at(x: &Configuration, i: &[i64], r: u32) -> Result<Range> {
    let centre = x.height_at(i)?.finite().ok_or(Error::CenterInfinite)?;
    let entries = offsets(r, x.dim())
        .iter()
        .map(|o| {
            let j: Vec<i64> = o.iter().zip(i).map(|(a, b)| a + b).collect();
            beta(r, centre, x.height_at(&j).expect("dimension checked"))
        })
        .collect();
    Ok(Range { radius: r, dim: x.dim(), entries })
}

/// Named built-in rules.
#[derive(Clone, Debug)]
pub enum Native {
    /// `-1` when some entry is negative, else `0`. Radius 1, dimension 1 is
    /// the collapsing automaton.
    Collapse,
    /// Always `+1`: the raising map.
    Raise,
    /// Always `0`.
    Identity,
    /// Marker simulation of a spreading cellular automaton.
    Reduction(Arc<Reduction>),
}

#[derive(Clone, Debug)]
pub enum Backing {
    /// Outputs indexed by [`table_index`].
    Table(Arc<Vec<i32>>),
    Program(Arc<RuleProgram>),
    Native(Native),
    /// `base` composed with itself `steps` times, evaluated on demand by
    /// brute-force simulation of a realizing window.
    Iterated { base: Arc<SaRule>, steps: u32 },
    /// Rule read off a cellular automaton acting on the staircase subshift.
    Extracted(Arc<CaRule>),
}

/// A total local rule from ranges to variations in `[-radius, radius]`.
#[derive(Clone, Debug)]
pub struct SaRule {
    dim: usize,
    radius: u32,
    backing: Backing,
}

impl SaRule {
    pub fn table(dim: usize, radius: u32, values: Vec<i32>) -> Result<SaRule> {
        let count = range_count(radius, dim).ok_or(Error::BudgetExceeded { needed: u64::MAX, budget: u64::MAX })?;
        if values.len() as u64 != count {
            return Err(Error::InvalidRule(format!("table needs {count} entries, got {}", values.len())));
        }
        if values.iter().any(|v| v.unsigned_abs() > radius) {
            return Err(Error::InvalidRule(format!("table output outside [-{radius}, {radius}]")));
        }
        Ok(SaRule { dim, radius, backing: Backing::Table(Arc::new(values)) })
    }

    pub fn program(p: RuleProgram) -> Result<SaRule> {
        p.validate()?;
        Ok(SaRule { dim: p.dim, radius: p.radius, backing: Backing::Program(Arc::new(p)) })
    }

    pub fn collapse(radius: u32, dim: usize) -> SaRule {
        assert!(radius >= 1, "collapse needs radius >= 1");
        SaRule { dim, radius, backing: Backing::Native(Native::Collapse) }
    }

    pub fn raise(dim: usize) -> SaRule {
        SaRule { dim, radius: 1, backing: Backing::Native(Native::Raise) }
    }

    pub fn identity(dim: usize) -> SaRule {
        SaRule { dim, radius: 1, backing: Backing::Native(Native::Identity) }
    }

    pub(crate) fn from_parts(dim: usize, radius: u32, backing: Backing) -> SaRule {
        SaRule { dim, radius, backing }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn backing(&self) -> &Backing {
        &self.backing
    }

    /// Evaluates the rule on the entries of a range of this rule's radius and
    /// dimension, in [`offsets`] order.
    pub fn eval_entries(&self, entries: &[Height]) -> i64 {
        debug_assert_eq!(entries.len(), range_len(self.radius, self.dim));
        match &self.backing {
            Backing::Table(t) => t[table_index(self.radius, entries)] as i64,
            Backing::Program(p) => p.eval_entries(entries),
            Backing::Native(Native::Collapse) => -i64::from(entries.iter().any(|&h| h < Finite(0))),
            Backing::Native(Native::Raise) => 1,
            Backing::Native(Native::Identity) => 0,
            Backing::Native(Native::Reduction(red)) => red.eval_entries(entries),
            Backing::Iterated { base, steps } => crate::sa::iterated_eval(base, *steps, self.radius, entries),
            Backing::Extracted(ca) => crate::bridge::extracted_eval(ca, self.radius, entries),
        }
    }

    pub fn apply(&self, range: &Range) -> Result<i64> {
        if range.radius != self.radius || range.dim != self.dim {
            return Err(Error::InvalidRule(format!(
                "range (radius {}, dim {}) does not match rule (radius {}, dim {})",
                range.radius, range.dim, self.radius, self.dim
            )));
        }
        Ok(self.eval_entries(&range.entries))
    }

    /// Dense table of this rule, if it has at most `budget` entries.
    pub fn to_table(&self, budget: u64) -> Result<SaRule> {
        if let Backing::Table(_) = self.backing {
            return Ok(self.clone());
        }
        let needed = range_count(self.radius, self.dim).unwrap_or(u64::MAX);
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        let values = (0..needed)
            .map(|i| self.eval_entries(Range::from_index(self.radius, self.dim, i).entries()) as i32)
            .collect();
        SaRule::table(self.dim, self.radius, values)
    }
}

impl fmt::Display for SaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.backing {
            Backing::Table(_) => "table",
            Backing::Program(_) => "program",
            Backing::Native(Native::Collapse) => "collapse",
            Backing::Native(Native::Raise) => "raise",
            Backing::Native(Native::Identity) => "identity",
            Backing::Native(Native::Reduction(_)) => "reduction",
            Backing::Iterated { .. } => "iterated",
            Backing::Extracted(_) => "extracted",
        };
        write!(f, "{kind} rule (dim {}, radius {})", self.dim, self.radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn offset_order_and_index() {
        assert_eq!(offsets(2, 1), vec![vec![-2], vec![-1], vec![1], vec![2]]);
        for d in 1..=2 {
            for (k, o) in offsets(2, d).iter().enumerate() {
                assert_eq!(offset_index(2, d, o), Some(k));
            }
        }
        assert_eq!(offsets(1, 2)[3], vec![0, -1]);
        assert_eq!(offsets(1, 2)[4], vec![0, 1]);
        assert_eq!(offset_index(1, 1, &[0]), None);
        assert_eq!(offset_index(1, 1, &[2]), None);
    }

    #[test]
    fn table_index_round_trip() {
        for i in 0..range_count(1, 1).unwrap() {
            assert_eq!(Range::from_index(1, 1, i).index() as u64, i);
        }
        // -inf is digit 0, +inf the top digit; first offset is least significant
        assert_eq!(table_index(1, &[NegInf, NegInf]), 0);
        assert_eq!(table_index(1, &[PosInf, NegInf]), 4);
        assert_eq!(table_index(1, &[NegInf, Finite(-1)]), 5);
    }

    #[test]
    fn range_at_examples() {
        let fig = Configuration::from_ints(0, -3, &[5, -2, 1, 4, 2, 2, 5]);
        let r = range_at(&fig, &[0], 3).unwrap();
        assert_eq!(r.entries(), &[Finite(1), NegInf, Finite(-3), Finite(-2), Finite(-2), Finite(1)]);
        let flat = range_at(&Configuration::constant(7), &[3], 2).unwrap();
        assert_eq!(flat, Range::flat(2, 1));
        let x = Configuration::from_ints(0, 1, &[-1]);
        assert_eq!(range_at(&x, &[0], 1).unwrap().entries(), &[Finite(0), Finite(-1)]);
        let inf = Configuration::finite(0, 0, vec![PosInf]);
        assert_eq!(range_at(&inf, &[0], 1), Err(Error::CenterInfinite));
    }

    #[test]
    fn natives_on_examples() {
        let n = SaRule::collapse(1, 1);
        let r = Range::new(1, 1, vec![NegInf, PosInf]).unwrap();
        assert_eq!(n.apply(&r), Ok(-1));
        assert_eq!(n.apply(&Range::flat(1, 1)), Ok(0));
        assert_eq!(SaRule::raise(1).apply(&r), Ok(1));
        let c2 = SaRule::collapse(2, 1);
        let r = Range::new(2, 1, vec![Finite(0), Finite(0), Finite(-2), Finite(0)]).unwrap();
        assert_eq!(c2.apply(&r), Ok(-1));
        assert!(n.apply(&Range::flat(2, 1)).is_err());
    }

    #[test]
    fn table_materialization_matches() {
        let n = SaRule::collapse(1, 1);
        let t = n.to_table(1000).unwrap();
        for i in 0..25 {
            let r = Range::from_index(1, 1, i);
            assert_eq!(t.apply(&r), n.apply(&r));
        }
        assert!(SaRule::collapse(3, 2).to_table(1000).is_err());
        assert!(SaRule::table(1, 1, vec![2; 25]).is_err());
        assert!(SaRule::table(1, 1, vec![0; 24]).is_err());
    }
}
