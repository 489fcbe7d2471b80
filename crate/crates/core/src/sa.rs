//! Global steps, orbits, the window oracle, rule iteration and the
//! characterization harness.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::config::{Configuration, OrbitRecord};
use crate::height::{Finite, NegInf, PosInf};
use crate::metric::{beta, ground_cylinder};
use crate::rule::{offset_index, offsets, range_count, range_len, Backing, Range, SaRule};
use crate::sample::{self, LineParams};
use crate::{Error, Height, Pattern, Result, DEFAULT_BUDGET};

fn check_dim(f: &SaRule, x: &Configuration) -> Result<()> {
    if f.dim() == x.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: f.dim(), found: x.dim() })
    }
}

fn flat_delta(f: &SaRule) -> i64 {
    f.eval_entries(&vec![Finite(0); range_len(f.radius(), f.dim())])
}

/// New value of pile `i`: unchanged when infinite, else moved by the rule.
fn new_pile(f: &SaRule, x: &Configuration, i: &[i64], offs: &[Vec<i64>], buf: &mut Vec<Height>) -> Result<Height> {
    let h = x.height_at(i)?;
    let Some(centre) = h.finite() else { return Ok(h) };
    buf.clear();
    for o in offs {
        let j: Vec<i64> = o.iter().zip(i).map(|(a, b)| a + b).collect();
        buf.push(beta(f.radius(), centre, x.height_at(&j)?));
    }
    h.checked_add(f.eval_entries(buf))
}

/// One application of the global rule.
pub fn step(f: &SaRule, x: &Configuration) -> Result<Configuration> {
    check_dim(f, x)?;
    let r = f.radius() as i64;
    let offs = offsets(f.radius(), f.dim());
    let mut buf = Vec::with_capacity(offs.len());
    match x {
        Configuration::Line(l) => {
            let flat = flat_delta(f);
            let lo = l.origin() - r;
            let core = (lo..l.end() + r)
                .map(|i| new_pile(f, x, &[i], &offs, &mut buf))
                .collect::<Result<Vec<_>>>()?;
            Ok(Configuration::line(l.left().checked_add(flat)?, l.right().checked_add(flat)?, lo, core))
        }
        Configuration::Periodic(p) => {
            let cells = (0..p.period() as i64)
                .map(|i| new_pile(f, x, &[i], &offs, &mut buf))
                .collect::<Result<Vec<_>>>()?;
            Configuration::periodic(cells)
        }
        Configuration::Plane(p) => {
            let bg = p.background().checked_add(flat_delta(f))?;
            let o = p.origin();
            let shape = [p.shape()[0] + 2 * r as usize, p.shape()[1] + 2 * r as usize];
            let mut core = Vec::with_capacity(shape[0] * shape[1]);
            for a in 0..shape[0] as i64 {
                for b in 0..shape[1] as i64 {
                    core.push(new_pile(f, x, &[o[0] - r + a, o[1] - r + b], &offs, &mut buf)?);
                }
            }
            Ok(Configuration::plane(bg, [o[0] - r, o[1] - r], shape, core))
        }
    }
}

/// `F^n(x)`.
pub fn step_n(f: &SaRule, x: &Configuration, n: u64) -> Result<Configuration> {
    let mut x = x.clone();
    for _ in 0..n {
        x = step(f, &x)?;
    }
    Ok(x)
}

/// Records of `F^0(x), ..., F^n(x)`.
pub fn orbit(f: &SaRule, x: &Configuration, n_steps: u64) -> Result<Vec<OrbitRecord>> {
    check_dim(f, x)?;
    if n_steps >= DEFAULT_BUDGET {
        return Err(Error::BudgetExceeded { needed: n_steps + 1, budget: DEFAULT_BUDGET });
    }
    let mut out = Vec::with_capacity(n_steps as usize + 1);
    let mut cur = x.clone();
    for s in 0..=n_steps {
        if s > 0 {
            cur = step(f, &cur)?;
        }
        out.push(OrbitRecord { step: s, config: cur.clone(), drift: 0 });
    }
    Ok(out)
}

fn saturate(r: i64, m: i64, n: Height) -> Height {
    match n {
        Finite(v) => {
            let d = v as i128 - m as i128;
            if d > r as i128 {
                PosInf
            } else if d < -(r as i128) {
                NegInf
            } else {
                Finite(d as i64)
            }
        }
        other => other,
    }
}

fn oracle_once(f: &SaRule, cur: &Pattern<Height>) -> Result<Pattern<Height>> {
    let r = f.radius() as i64;
    let ru = f.radius() as usize;
    let mut entries = Vec::with_capacity(range_len(f.radius(), f.dim()));
    let apply = |h: Height, entries: &mut Vec<Height>| -> Result<Height> {
        match h {
            Finite(_) => h.checked_add(f.eval_entries(entries)),
            inf => Ok(inf),
        }
    };
    match *cur.shape() {
        [n] => {
            let d = cur.as_slice();
            let mut out = Vec::with_capacity(n - 2 * ru);
            for i in ru..n - ru {
                entries.clear();
                if let Finite(m) = d[i] {
                    for o in -r..=r {
                        if o != 0 {
                            entries.push(saturate(r, m, d[(i as i64 + o) as usize]));
                        }
                    }
                }
                out.push(apply(d[i], &mut entries)?);
            }
            Ok(Pattern::line(out))
        }
        [a, b] => {
            let d = cur.as_slice();
            let at = |i: i64, j: i64| d[i as usize * b + j as usize];
            let mut out = Vec::with_capacity((a - 2 * ru) * (b - 2 * ru));
            for i in r..a as i64 - r {
                for j in r..b as i64 - r {
                    entries.clear();
                    if let Finite(m) = at(i, j) {
                        for p in -r..=r {
                            for q in -r..=r {
                                if p != 0 || q != 0 {
                                    entries.push(saturate(r, m, at(i + p, j + q)));
                                }
                            }
                        }
                    }
                    out.push(apply(at(i, j), &mut entries)?);
                }
            }
            Ok(Pattern::from_vec(&[a - 2 * ru, b - 2 * ru], out))
        }
        _ => Err(Error::DimensionMismatch { expected: f.dim(), found: cur.dim() }),
    }
}

/// Brute-force simulation on an explicit array: `n` naive steps, each
/// dropping the `r` cells per side whose neighbourhood leaves the array.
/// The result is the central region of side `len - 2nr`.
pub fn oracle_step_window(f: &SaRule, heights: &Pattern<Height>, n: u32) -> Result<Pattern<Height>> {
    if heights.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: heights.dim() });
    }
    let needed = 2 * n as usize * f.radius() as usize + 1;
    if let Some(&got) = heights.shape().iter().find(|&&s| s < needed) {
        return Err(Error::WindowTooSmall { needed, got });
    }
    let mut cur = heights.clone();
    for _ in 0..n {
        cur = oracle_once(f, &cur)?;
    }
    Ok(cur)
}

/// Precision that determines `n` steps of a radius-`r` rule.
pub fn iterated_radius(r: u32, n: u32) -> u32 {
    (3 * n - 2) * r
}

fn realize_entry(radius: u32, h: Height) -> Height {
    match h {
        PosInf => Finite(radius as i64 + 1),
        NegInf => Finite(-(radius as i64) - 1),
        v => v,
    }
}

/// Explicit window of side `2 reach + 1` centred on a pile of height 0 whose
/// range of radius `radius` is `entries`. Saturated entries sit at
/// `±(radius + 1)`.
pub fn light_cone_window(dim: usize, radius: u32, reach: u32, entries: &[Height]) -> Pattern<Height> {
    let side = 2 * reach as usize + 1;
    let reach = reach as i64;
    Pattern::from_fn(&vec![side; dim], |k| {
        let o: Vec<i64> = k.iter().map(|&a| a as i64 - reach).collect();
        match offset_index(radius, dim, &o) {
            Some(idx) => realize_entry(radius, entries[idx]),
            None => Finite(0),
        }
    })
}

/// A configuration at which the pile at the origin has height 0 and sees
/// `range`; background 0.
pub fn realize_range(range: &Range) -> Configuration {
    let r = range.radius();
    let w = light_cone_window(range.dim(), r, r, range.entries());
    let side = 2 * r as usize + 1;
    match range.dim() {
        1 => Configuration::finite(0, -(r as i64), w.into_vec()),
        _ => Configuration::plane(Finite(0), [-(r as i64), -(r as i64)], [side, side], w.into_vec()),
    }
}

pub(crate) fn iterated_eval(base: &SaRule, steps: u32, radius: u32, entries: &[Height]) -> i64 {
    let window = light_cone_window(base.dim(), radius, base.radius() * steps, entries);
    let out = oracle_step_window(base, &window, steps).expect("light-cone window has the needed size");
    out.as_slice()[0].finite().expect("finite pile stays finite")
}

/// A rule whose global map is `F^n`. The table is materialized when it has
/// at most `budget` entries, otherwise entries are computed on demand.
pub fn iterate_local_rule(f: &SaRule, n: u32, budget: u64) -> Result<SaRule> {
    match n {
        0 => Err(Error::InvalidRule(alloc::string::String::from("iteration count must be at least 1"))),
        1 => Ok(f.clone()),
        _ => {
            let radius = iterated_radius(f.radius(), n);
            let rule = SaRule::from_parts(f.dim(), radius, Backing::Iterated { base: Arc::new(f.clone()), steps: n });
            match range_count(radius, f.dim()) {
                Some(c) if c <= budget => rule.to_table(budget),
                _ => Ok(rule),
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Property {
    ShiftCommutation,
    VerticalCommutation,
    InfinityPreservation,
    Continuity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub property: Property,
    pub x: Configuration,
    /// Second configuration, for the continuity check.
    pub y: Option<Configuration>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterizationReport {
    pub samples: usize,
    pub counterexample: Option<Counterexample>,
}

impl CharacterizationReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn sample_config<R: Rng>(rng: &mut R, dim: usize) -> Configuration {
    match (dim, rng.gen_range(0..5)) {
        (1, 0) => sample::random_periodic(rng, 5, -5, 5, 0.1),
        (1, _) => sample::random_line(rng, &LineParams::default()),
        _ => sample::random_plane(rng, 4, -5, 5, 0.1),
    }
}

/// A configuration with the same ground cylinder of radius `m` at the
/// origin as `x`, arbitrary elsewhere.
fn ground_twin<R: Rng>(rng: &mut R, x: &Configuration, m: i64) -> Configuration {
    let pad = 3;
    let side = (2 * (m + pad) + 1) as usize;
    let mut cell = |h: Height, inside: bool| {
        if !inside {
            return Finite(rng.gen_range(-6..=6));
        }
        match beta(m as u32, 0, h) {
            PosInf if rng.gen_bool(0.5) => PosInf,
            PosInf => Finite(m + rng.gen_range(1..=3)),
            NegInf if rng.gen_bool(0.5) => NegInf,
            NegInf => Finite(-m - rng.gen_range(1..=3)),
            v => v,
        }
    };
    let mut out = Vec::with_capacity(side * side);
    match x.dim() {
        1 => {
            for i in -m - pad..=m + pad {
                out.push(cell(x.at(i), i.abs() <= m));
            }
            Configuration::finite(Finite(0), -m - pad, out)
        }
        _ => {
            for a in -m - pad..=m + pad {
                for b in -m - pad..=m + pad {
                    let h = x.height_at(&[a, b]).expect("plane");
                    out.push(cell(h, a.abs() <= m && b.abs() <= m));
                }
            }
            Configuration::plane(Finite(0), [-m - pad, -m - pad], [side, side], out)
        }
    }
}

fn infinities_preserved(x: &Configuration, fx: &Configuration, reach: i64) -> bool {
    let e = x.extent().max(fx.extent()) + reach;
    let same = |i: &[i64]| {
        let a = x.height_at(i).expect("dimension");
        let b = fx.height_at(i).expect("dimension");
        a.is_infinite() == b.is_infinite() && (a.is_finite() || a == b)
    };
    match x.dim() {
        1 => (-e..=e).all(|i| same(&[i])),
        _ => (-e..=e).all(|a| (-e..=e).all(|b| same(&[a, b]))),
    }
}

/// Checks on `samples` seeded random configurations that the global map
/// commutes with shifts and with raising, preserves infinite piles, and
/// satisfies the continuity modulus: ground cylinders of radius `w + 2r`
/// at the origin determine the image's ground cylinder of radius `w`.
pub fn check_characterization(f: &SaRule, samples: usize, seed: u64) -> Result<CharacterizationReport> {
    let mut rng = sample::rng(seed);
    let dim = f.dim();
    let r = f.radius() as i64;
    let zero = vec![0; dim];
    for _ in 0..samples {
        let x = sample_config(&mut rng, dim);
        let fx = step(f, &x)?;
        let fail = |property, y| Ok(CharacterizationReport { samples, counterexample: Some(Counterexample { property, x: x.clone(), y }) });

        let k: Vec<i64> = (0..dim).map(|_| rng.gen_range(-5..=5)).collect();
        if step(f, &x.shift(&k)?)? != fx.shift(&k)? {
            return fail(Property::ShiftCommutation, None);
        }
        let n = rng.gen_range(-3..=3);
        if step(f, &x.raise(n)?)? != fx.raise(n)? {
            return fail(Property::VerticalCommutation, None);
        }
        if !infinities_preserved(&x, &fx, r + 1) {
            return fail(Property::InfinityPreservation, None);
        }
        let w = rng.gen_range(0..=3);
        let y = ground_twin(&mut rng, &x, w + 2 * r);
        let fy = step(f, &y)?;
        if ground_cylinder(&fx, &zero, w as u32)? != ground_cylinder(&fy, &zero, w as u32)? {
            return fail(Property::Continuity, Some(y));
        }
    }
    Ok(CharacterizationReport { samples, counterexample: None })
}
