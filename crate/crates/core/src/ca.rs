//! Finite-alphabet cellular automata acting on windows.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::rule::SaRule;
use crate::{Error, Pattern, Result};

/// Named built-in local rules.
#[derive(Clone, Debug)]
pub enum NativeCa {
    /// Centre projection.
    Identity,
    Constant(u8),
    /// Minimum over the neighbourhood.
    Min,
    /// Copies the left neighbour along the first axis, so patterns move right.
    ShiftRight,
    /// `states - 1 - centre`.
    Complement,
    /// The two-dimensional binary rule built from a one-dimensional sand
    /// automaton (see [`crate::bridge`]).
    Bridge(Arc<SaRule>),
}

pub type CaFn = dyn Fn(&[u8]) -> u8 + Send + Sync;

#[derive(Clone)]
pub enum CaBacking {
    /// Outputs indexed by `sum state_p * states^p` over flat positions `p`.
    Table(Arc<Vec<u8>>),
    Native(NativeCa),
    Custom(Arc<CaFn>),
}

impl fmt::Debug for CaBacking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaBacking::Table(t) => write!(f, "Table({} entries)", t.len()),
            CaBacking::Native(n) => write!(f, "Native({n:?})"),
            CaBacking::Custom(_) => f.write_str("Custom"),
        }
    }
}

/// Local rule over neighbourhoods of side `2 radius + 1`, read row-major
/// with the last axis fastest (the vertical axis in two dimensions).
#[derive(Clone, Debug)]
pub struct CaRule {
    dim: usize,
    radius: u32,
    states: u8,
    backing: CaBacking,
}

/// Neighbourhood count `states^((2 radius + 1)^dim)`, if it fits in `u64`.
pub fn neighbourhood_count(dim: usize, radius: u32, states: u8) -> Option<u64> {
    let cells = (2 * radius as u64 + 1).checked_pow(dim as u32)?;
    (states as u64).checked_pow(u32::try_from(cells).ok()?)
}

impl CaRule {
    fn check(dim: usize, states: u8) -> Result<()> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidRule(format!("unsupported dimension {dim}")));
        }
        if states == 0 {
            return Err(Error::InvalidRule("alphabet must not be empty".into()));
        }
        Ok(())
    }

    pub fn native(dim: usize, radius: u32, states: u8, rule: NativeCa) -> Result<CaRule> {
        Self::check(dim, states)?;
        if let NativeCa::Constant(c) = rule {
            if c >= states {
                return Err(Error::InvalidRule(format!("state {c} outside alphabet")));
            }
        }
        if matches!(rule, NativeCa::ShiftRight) && radius == 0 {
            return Err(Error::InvalidRule("shift needs radius at least 1".into()));
        }
        Ok(CaRule { dim, radius, states, backing: CaBacking::Native(rule) })
    }

    pub fn table(dim: usize, radius: u32, states: u8, table: Vec<u8>) -> Result<CaRule> {
        Self::check(dim, states)?;
        let count = neighbourhood_count(dim, radius, states).unwrap_or(u64::MAX);
        if table.len() as u64 != count {
            return Err(Error::InvalidRule(format!("table needs {count} entries, got {}", table.len())));
        }
        if table.iter().any(|&s| s >= states) {
            return Err(Error::InvalidRule("table output outside alphabet".into()));
        }
        Ok(CaRule { dim, radius, states, backing: CaBacking::Table(Arc::new(table)) })
    }

    /// Rule given by a function of the flat neighbourhood. Outputs are
    /// reduced modulo the alphabet size.
    pub fn custom(dim: usize, radius: u32, states: u8, f: Arc<CaFn>) -> Result<CaRule> {
        Self::check(dim, states)?;
        Ok(CaRule { dim, radius, states, backing: CaBacking::Custom(f) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn states(&self) -> u8 {
        self.states
    }

    pub fn backing(&self) -> &CaBacking {
        &self.backing
    }

    /// Cells in a neighbourhood.
    pub fn cells(&self) -> usize {
        (2 * self.radius as usize + 1).pow(self.dim as u32)
    }

    /// Output on a flat neighbourhood of [`Self::cells`] states.
    pub fn eval(&self, cells: &[u8]) -> u8 {
        debug_assert_eq!(cells.len(), self.cells());
        let centre = cells[cells.len() / 2];
        match &self.backing {
            CaBacking::Table(t) => {
                let s = self.states as usize;
                t[cells.iter().rev().fold(0, |acc, &c| acc * s + c as usize)]
            }
            CaBacking::Native(n) => match n {
                NativeCa::Identity => centre,
                NativeCa::Constant(c) => *c,
                NativeCa::Min => *cells.iter().min().expect("non-empty"),
                NativeCa::ShiftRight => {
                    let side = 2 * self.radius as usize + 1;
                    let stride = side.pow(self.dim as u32 - 1);
                    cells[cells.len() / 2 - stride]
                }
                NativeCa::Complement => self.states - 1 - centre.min(self.states - 1),
                NativeCa::Bridge(f) => crate::bridge::bridge_eval(f, cells),
            },
            CaBacking::Custom(f) => f(cells) % self.states,
        }
    }

    /// Dense table, if it has at most `budget` entries.
    pub fn to_table(&self, budget: u64) -> Result<CaRule> {
        if let CaBacking::Table(_) = self.backing {
            return Ok(self.clone());
        }
        let needed = neighbourhood_count(self.dim, self.radius, self.states).unwrap_or(u64::MAX);
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        let mut cells = vec![0u8; self.cells()];
        let mut table = Vec::with_capacity(needed as usize);
        for _ in 0..needed {
            table.push(self.eval(&cells));
            increment(&mut cells, self.states);
        }
        CaRule::table(self.dim, self.radius, self.states, table)
    }
}

/// Base-`states` odometer, position 0 least significant.
fn increment(cells: &mut [u8], states: u8) {
    for c in cells.iter_mut() {
        *c += 1;
        if *c < states {
            return;
        }
        *c = 0;
    }
}

fn check_order(g: &CaRule, shape: &[usize], exact: bool) -> Result<()> {
    let side = 2 * g.radius as usize + 1;
    let ok = shape.len() == g.dim && shape.iter().all(|&s| if exact { s == side } else { s >= side });
    if ok {
        Ok(())
    } else {
        Err(Error::OrderMismatch { expected: side, found: shape.to_vec() })
    }
}

/// `g` applied to a neighbourhood of side `2 radius + 1`.
pub fn ca_apply(g: &CaRule, neighbourhood: &Pattern<u8>) -> Result<u8> {
    check_order(g, neighbourhood.shape(), true)?;
    Ok(g.eval(neighbourhood.as_slice()))
}

/// Simultaneous application of `g` at every position of `u` whose whole
/// neighbourhood lies inside `u`; each side shrinks by `2 radius`.
pub fn ca_extend(g: &CaRule, u: &Pattern<u8>) -> Result<Pattern<u8>> {
    check_order(g, u.shape(), false)?;
    let side = 2 * g.radius as usize + 1;
    let d = u.as_slice();
    let mut buf = vec![0u8; g.cells()];
    match *u.shape() {
        [n] => {
            let out = (0..=n - side).map(|i| g.eval(&d[i..i + side])).collect();
            Ok(Pattern::line(out))
        }
        [a, b] => {
            let shape = [a + 1 - side, b + 1 - side];
            let mut out = Vec::with_capacity(shape[0] * shape[1]);
            for i in 0..shape[0] {
                for j in 0..shape[1] {
                    for p in 0..side {
                        buf[p * side..(p + 1) * side].copy_from_slice(&d[(i + p) * b + j..(i + p) * b + j + side]);
                    }
                    out.push(g.eval(&buf));
                }
            }
            Ok(Pattern::from_vec(&shape, out))
        }
        _ => unreachable!("order checked"),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StateReport {
    /// States `s` with `g(U) = s` whenever `s` occurs in `U`.
    pub spreading: Vec<u8>,
    /// States `s` with `g(s, ..., s) = s`.
    pub quiescent: Vec<u8>,
}

/// Exhaustive classification of spreading and quiescent states.
pub fn find_spreading_states(g: &CaRule, budget: u64) -> Result<StateReport> {
    let needed = neighbourhood_count(g.dim, g.radius, g.states).unwrap_or(u64::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let n = g.states as usize;
    let mut spreading = vec![true; n];
    let mut cells = vec![0u8; g.cells()];
    let mut present = vec![false; n];
    for _ in 0..needed {
        let out = g.eval(&cells);
        present.iter_mut().for_each(|p| *p = false);
        for &c in &cells {
            present[c as usize] = true;
        }
        for s in 0..n {
            if present[s] && out as usize != s {
                spreading[s] = false;
            }
        }
        increment(&mut cells, g.states);
    }
    let quiescent = (0..g.states).filter(|&s| g.eval(&vec![s; g.cells()]) == s).collect();
    let spreading = (0..g.states).filter(|&s| spreading[s as usize]).collect();
    Ok(StateReport { spreading, quiescent })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn native(dim: usize, radius: u32, states: u8, n: NativeCa) -> CaRule {
        CaRule::native(dim, radius, states, n).unwrap()
    }

    #[test]
    fn apply_examples() {
        let id = native(2, 1, 2, NativeCa::Identity);
        let p = Pattern::from_vec(&[3, 3], vec![0, 1, 0, 1, 1, 0, 0, 0, 1]);
        assert_eq!(ca_apply(&id, &p), Ok(1));
        assert_eq!(ca_apply(&native(2, 1, 2, NativeCa::Constant(0)), &p), Ok(0));
        assert!(matches!(ca_apply(&id, &Pattern::line(vec![0, 1, 0])), Err(Error::OrderMismatch { .. })));
    }

    #[test]
    fn extend_examples() {
        let id = native(2, 1, 2, NativeCa::Identity);
        let p = Pattern::from_fn(&[5, 4], |k| ((k[0] * 3 + k[1]) % 2) as u8);
        assert_eq!(ca_extend(&id, &p).unwrap(), p.crop(&[1, 1], &[3, 2]));
        let one = Pattern::from_vec(&[3, 3], vec![1; 9]);
        assert_eq!(ca_extend(&id, &one).unwrap().as_slice(), &[1]);
        assert!(ca_extend(&id, &Pattern::from_vec(&[2, 3], vec![0; 6])).is_err());
        let shift = native(1, 1, 3, NativeCa::ShiftRight);
        assert_eq!(ca_extend(&shift, &Pattern::line(vec![0, 1, 2, 0])).unwrap().as_slice(), &[0, 1]);
    }

    #[test]
    fn spreading_examples() {
        let rep = find_spreading_states(&native(1, 1, 2, NativeCa::Constant(0)), 1000).unwrap();
        assert_eq!(rep.spreading, vec![0]);
        let rep = find_spreading_states(&native(1, 1, 2, NativeCa::Min), 1000).unwrap();
        assert_eq!(rep.spreading, vec![0]);
        assert_eq!(rep.quiescent, vec![0, 1]);
        let rep = find_spreading_states(&native(1, 1, 2, NativeCa::Identity), 1000).unwrap();
        assert!(rep.spreading.is_empty());
        assert_eq!(rep.quiescent, vec![0, 1]);
        let rep = find_spreading_states(&native(1, 1, 3, NativeCa::ShiftRight), 1000).unwrap();
        assert!(rep.spreading.is_empty());
        assert!(find_spreading_states(&native(2, 2, 2, NativeCa::Min), 1000).is_err());
    }

    #[test]
    fn table_matches_function() {
        for n in [NativeCa::Identity, NativeCa::Min, NativeCa::ShiftRight, NativeCa::Complement] {
            for (dim, states) in [(1, 3), (2, 2)] {
                let g = native(dim, 1, states, n.clone());
                let t = g.to_table(1 << 20).unwrap();
                let mut cells = vec![0u8; g.cells()];
                for _ in 0..neighbourhood_count(dim, 1, states).unwrap() {
                    assert_eq!(g.eval(&cells), t.eval(&cells));
                    increment(&mut cells, states);
                }
            }
        }
    }
}
