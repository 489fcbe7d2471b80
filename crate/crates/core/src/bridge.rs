//! The correspondence between one-dimensional sand automata and
//! two-dimensional binary cellular automata acting on the staircase
//! subshift.
//!
//! A sand automaton of radius `r` becomes a cellular automaton of radius
//! `2r` on column encodings; conversely a binary cellular automaton that
//! keeps staircase configurations staircase and fixes full and empty
//! columns is the encoding of a sand automaton, whose rule can be read off.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::ca::{ca_extend, CaRule, NativeCa};
use crate::config::Configuration;
use crate::height::{Finite, NegInf, PosInf};
use crate::metric::{beta, column_count, enumerate_staircase, zeta_window, StaircasePattern};
use crate::rule::{offset_index, offsets, Backing, Range, SaRule};
use crate::sa::step;
use crate::sample::{self, LineParams};
use crate::{Error, Height, Pattern, Result};

/// Finds the top of the central column in a `(4r+1) x (4r+1)` binary window
/// and the range seen from it. Returns `None` when the window contains the
/// forbidden pattern or when the top is not within `[-r, r-1]` of the
/// central cell.
pub fn locate_top(window: &[u8], r: u32) -> Option<(i64, Range)> {
    let side = 4 * r as usize + 1;
    if window.len() != side * side {
        return None;
    }
    let mut counts = Vec::with_capacity(side);
    for col in window.chunks(side) {
        let ones = col.iter().take_while(|&&c| c != 0).count();
        if col[ones..].iter().any(|&c| c != 0) {
            return None;
        }
        counts.push(ones as i64);
    }
    let mid = 2 * r as usize;
    let c = counts[mid];
    let j = c - 1 - 2 * r as i64;
    if j < -(r as i64) || j >= r as i64 {
        return None;
    }
    let entries = offsets(r, 1).iter().map(|o| beta(r, 0, Finite(counts[(mid as i64 + o[0]) as usize] - c))).collect();
    Some((j, Range::new(r, 1, entries).expect("saturated entries")))
}

pub(crate) fn bridge_eval(f: &SaRule, cells: &[u8]) -> u8 {
    match locate_top(cells, f.radius()) {
        Some((j, range)) => u8::from(j + f.eval_entries(range.entries()) >= 0),
        None => cells[cells.len() / 2],
    }
}

/// The binary cellular automaton of radius `2r` conjugate to `f` through
/// the column encoding.
pub fn build_ca_from_sa(f: &SaRule) -> Result<CaRule> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: f.dim() });
    }
    CaRule::native(2, 2 * f.radius(), 2, NativeCa::Bridge(Arc::new(f.clone())))
}

/// Column encoding of `x` on `[h_lo, h_hi] x [v_lo, v_hi]` as a binary pattern.
pub fn zeta_pattern(x: &Configuration, horiz: (i64, i64), vert: (i64, i64)) -> Result<Pattern<u8>> {
    Ok(zeta_window(x, horiz, vert)?.to_pattern())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyMismatch {
    pub x: Configuration,
    pub steps: u32,
    /// Cell `(i, k)` where the two sides differ.
    pub cell: (i64, i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyReport {
    pub samples: usize,
    pub mismatch: Option<ConjugacyMismatch>,
}

impl ConjugacyReport {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Compares the encodings of `F^t(x)` with `G^t` applied to the encoding of
/// `x`, for `t = 1..=n_steps` on `samples` random configurations.
pub fn check_conjugacy(f: &SaRule, samples: usize, n_steps: u32, seed: u64) -> Result<ConjugacyReport> {
    let g = build_ca_from_sa(f)?;
    check_conjugacy_with(f, &g, samples, n_steps, seed)
}

/// As [`check_conjugacy`], against an arbitrary two-dimensional binary rule.
pub fn check_conjugacy_with(f: &SaRule, g: &CaRule, samples: usize, n_steps: u32, seed: u64) -> Result<ConjugacyReport> {
    check_binary_plane(g)?;
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: f.dim() });
    }
    let mut rng = sample::rng(seed);
    let params = LineParams::default();
    let rho = g.radius() as i64;
    let margin = rho * n_steps as i64;
    for _ in 0..samples {
        let x = sample::random_line(&mut rng, &params);
        let e = x.extent() + rng.gen_range(0..3);
        let (lo, hi) = x.finite_range().unwrap_or((0, 0));
        let vert = (lo - 3, hi + 3);
        let mut enc = zeta_pattern(&x, (-e - margin, e + margin), (vert.0 - margin, vert.1 + margin))?;
        let mut fx = x.clone();
        for t in 1..=n_steps {
            enc = ca_extend(g, &enc)?;
            fx = step(f, &fx)?;
            let m = margin - rho * t as i64;
            let expect = zeta_pattern(&fx, (-e - m, e + m), (vert.0 - m, vert.1 + m))?;
            if enc != expect {
                let h = expect.shape()[1];
                let k = (0..enc.len()).find(|&k| enc.as_slice()[k] != expect.as_slice()[k]).expect("patterns differ");
                let cell = (-e - m + (k / h) as i64, vert.0 - m + (k % h) as i64);
                return Ok(ConjugacyReport { samples, mismatch: Some(ConjugacyMismatch { x, steps: t, cell }) });
            }
        }
    }
    Ok(ConjugacyReport { samples, mismatch: None })
}

fn check_binary_plane(g: &CaRule) -> Result<()> {
    if g.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: g.dim() });
    }
    if g.states() != 2 {
        return Err(Error::InvalidRule(alloc::format!("expected a binary rule, got {} states", g.states())));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Check {
    /// Some staircase window is mapped onto a forbidden pattern.
    Invariance,
    /// A full or empty central column is not preserved.
    ColumnPreservation,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Witness {
    pub check: Check,
    pub pattern: StaircasePattern,
}

impl Witness {
    /// True when the pattern still violates its check under `g`.
    pub fn replay(&self, g: &CaRule) -> Result<bool> {
        match self.check {
            Check::Invariance => invariance_violated(g, &self.pattern),
            Check::ColumnPreservation => column_violated(g, &self.pattern),
        }
    }
}

fn invariance_violated(g: &CaRule, p: &StaircasePattern) -> Result<bool> {
    let out = ca_extend(g, &p.to_pattern())?;
    Ok(out.as_slice().windows(2).any(|w| w[0] == 0 && w[1] == 1))
}

fn column_violated(g: &CaRule, p: &StaircasePattern) -> Result<bool> {
    let centre = p.tops()[p.width() / 2];
    let expected = u8::from(centre == p.height());
    if centre != 0 && centre != p.height() {
        return Ok(false);
    }
    let out = ca_extend(g, &p.to_pattern())?;
    Ok(out.as_slice() != [expected])
}

/// Searches the staircase windows of width `2 rho + 1` and height
/// `2 rho + 2` for one whose image contains the forbidden pattern.
pub fn check_invariance(g: &CaRule, budget: u64) -> Result<Option<Witness>> {
    check_binary_plane(g)?;
    let rho = g.radius() as usize;
    for p in enumerate_staircase(2 * rho + 1, 2 * rho + 2, budget)? {
        if invariance_violated(g, &p)? {
            return Ok(Some(Witness { check: Check::Invariance, pattern: p }));
        }
    }
    Ok(None)
}

/// Searches the square staircase windows whose central column is full or
/// empty for one whose central cell changes.
pub fn check_column_preservation(g: &CaRule, budget: u64) -> Result<Option<Witness>> {
    check_binary_plane(g)?;
    let rho = g.radius() as usize;
    let side = 2 * rho + 1;
    for centre in [side, 0] {
        for others in enumerate_staircase(2 * rho, side, budget / 2)? {
            let mut tops = others.tops().to_vec();
            tops.insert(rho, centre);
            let p = StaircasePattern::new(side, tops)?;
            if column_violated(g, &p)? {
                return Ok(Some(Witness { check: Check::ColumnPreservation, pattern: p }));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    IsSa,
    NotSa,
}

#[derive(Clone, Debug)]
pub struct DecisionReport {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub extracted: Option<SaRule>,
}

/// Decides whether a two-dimensional binary cellular automaton acts on the
/// staircase subshift as a sand automaton, optionally extracting its rule.
pub fn decide_sa(g: &CaRule, extract: bool, budget: u64) -> Result<DecisionReport> {
    check_binary_plane(g)?;
    let witness = match check_invariance(g, budget)? {
        Some(w) => Some(w),
        None => check_column_preservation(g, budget)?,
    };
    if witness.is_some() {
        return Ok(DecisionReport { verdict: Verdict::NotSa, witness, extracted: None });
    }
    let extracted = extract.then(|| extract_rule(g));
    Ok(DecisionReport { verdict: Verdict::IsSa, witness: None, extracted })
}

/// The sand-automaton rule of radius `2 rho` encoded by `g`. Meaningful
/// only when `g` passes both checks.
pub fn extract_rule(g: &CaRule) -> SaRule {
    SaRule::from_parts(1, 2 * g.radius(), Backing::Extracted(Arc::new(g.clone())))
}

fn realize(radius: u32, h: Height) -> Height {
    match h {
        PosInf => Finite(radius as i64 + 1),
        NegInf => Finite(-(radius as i64) - 1),
        v => v,
    }
}

pub(crate) fn extracted_eval(g: &CaRule, radius: u32, entries: &[Height]) -> i64 {
    let rho = g.radius() as i64;
    if rho == 0 {
        return 0;
    }
    let v_lo = -2 * rho + 1;
    let height = 4 * rho as usize;
    let tops: Vec<usize> = (-rho..=rho)
        .map(|o| {
            let h = match offset_index(radius, 1, &[o]) {
                Some(i) => realize(radius, entries[i]),
                None => Finite(0),
            };
            column_count(h, v_lo, height)
        })
        .collect();
    let window = StaircasePattern::new(height, tops).expect("counts within height").to_pattern();
    let out = ca_extend(g, &window).expect("window has the needed order");
    // out[t] is the new cell at height -rho + 1 + t
    match out.as_slice().iter().rposition(|&c| c == 1) {
        Some(t) => -rho + 1 + t as i64,
        None => -rho,
    }
}

/// Column counts of a flat window where every column top sits `delta`
/// cells above the central cell, for windows of side `side`.
pub fn flat_window(side: usize, delta: i64) -> Vec<u8> {
    let mid = (side / 2) as i64;
    let ones = (mid + delta + 1).clamp(0, side as i64) as usize;
    let mut col = vec![0u8; side];
    col[..ones].iter_mut().for_each(|c| *c = 1);
    col.repeat(side)
}
