//! Finitely described sand-automaton configurations.
//!
//! Three families are representable exactly:
//!
//! * [`Line`]: a one-dimensional configuration equal to `left` far to the
//!   left, to `right` far to the right, and to an explicit core in between;
//! * [`Periodic`]: a one-dimensional spatially periodic configuration;
//! * [`Plane`]: a two-dimensional configuration equal to a single background
//!   outside a finite rectangle.
//!
//! Every constructor returns the canonical form, so two values denote the
//! same configuration iff they compare equal.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::{Error, Height, Pattern, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Line {
    left: Height,
    right: Height,
    origin: i64,
    core: Vec<Height>,
}

impl Line {
    /// Canonicalizes: leading cells equal to `left` and trailing cells equal
    /// to `right` are dropped. When the result is constant the origin is 0;
    /// when the core is empty but the backgrounds differ, the origin is the
    /// first cell carrying `right`.
    pub fn new(left: Height, right: Height, origin: i64, core: Vec<Height>) -> Line {
        let start = core.iter().take_while(|&&h| h == left).count();
        let mut end = core.len();
        while end > start && core[end - 1] == right {
            end -= 1;
        }
        let mut origin = origin + start as i64;
        let core = if start == 0 && end == core.len() { core } else { core[start..end].to_vec() };
        if core.is_empty() && left == right {
            origin = 0;
        }
        Line { left, right, origin, core }
    }

    pub fn left(&self) -> Height {
        self.left
    }

    pub fn right(&self) -> Height {
        self.right
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn core(&self) -> &[Height] {
        &self.core
    }

    /// One past the last core index.
    pub fn end(&self) -> i64 {
        self.origin + self.core.len() as i64
    }

    pub fn at(&self, i: i64) -> Height {
        if i < self.origin {
            self.left
        } else if i >= self.end() {
            self.right
        } else {
            self.core[(i - self.origin) as usize]
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Periodic {
    cells: Vec<Height>,
}

impl Periodic {
    /// Least period.
    pub fn period(&self) -> usize {
        self.cells.len()
    }

    /// Cells `x_0 .. x_{p-1}`.
    pub fn cells(&self) -> &[Height] {
        &self.cells
    }

    pub fn at(&self, i: i64) -> Height {
        self.cells[i.rem_euclid(self.cells.len() as i64) as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Plane {
    bg: Height,
    origin: [i64; 2],
    shape: [usize; 2],
    core: Vec<Height>,
}

impl Plane {
    /// `core` is row-major over `shape` (second coordinate fastest); the
    /// result is cropped to the minimal rectangle holding non-background
    /// cells.
    pub fn new(bg: Height, origin: [i64; 2], shape: [usize; 2], core: Vec<Height>) -> Plane {
        assert_eq!(shape[0] * shape[1], core.len(), "plane core length must match its shape");
        let at = |a: usize, b: usize| core[a * shape[1] + b];
        let rows = (0..shape[0]).filter(|&a| (0..shape[1]).any(|b| at(a, b) != bg));
        let (mut a0, mut a1) = (usize::MAX, 0);
        for a in rows {
            a0 = a0.min(a);
            a1 = a1.max(a + 1);
        }
        if a0 == usize::MAX {
            return Plane { bg, origin: [0, 0], shape: [0, 0], core: Vec::new() };
        }
        let cols = (0..shape[1]).filter(|&b| (0..shape[0]).any(|a| at(a, b) != bg));
        let (mut b0, mut b1) = (usize::MAX, 0);
        for b in cols {
            b0 = b0.min(b);
            b1 = b1.max(b + 1);
        }
        let mut cropped = Vec::with_capacity((a1 - a0) * (b1 - b0));
        for a in a0..a1 {
            for b in b0..b1 {
                cropped.push(at(a, b));
            }
        }
        Plane {
            bg,
            origin: [origin[0] + a0 as i64, origin[1] + b0 as i64],
            shape: [a1 - a0, b1 - b0],
            core: cropped,
        }
    }

    pub fn background(&self) -> Height {
        self.bg
    }

    pub fn origin(&self) -> [i64; 2] {
        self.origin
    }

    pub fn shape(&self) -> [usize; 2] {
        self.shape
    }

    pub fn core(&self) -> &[Height] {
        &self.core
    }

    pub fn at(&self, i: [i64; 2]) -> Height {
        let a = i[0] - self.origin[0];
        let b = i[1] - self.origin[1];
        if a < 0 || b < 0 || a >= self.shape[0] as i64 || b >= self.shape[1] as i64 {
            self.bg
        } else {
            self.core[a as usize * self.shape[1] + b as usize]
        }
    }
}

/// A point of the configuration space, in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Configuration {
    Line(Line),
    Periodic(Periodic),
    Plane(Plane),
}

/// One record of a trajectory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRecord {
    pub step: u64,
    pub config: Configuration,
    /// Vertical translation relative to a reference, 0 unless a caller sets it.
    pub drift: i64,
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

impl Configuration {
    pub fn constant(h: impl Into<Height>) -> Configuration {
        let h = h.into();
        Configuration::Line(Line::new(h, h, 0, Vec::new()))
    }

    pub fn line(left: Height, right: Height, origin: i64, core: Vec<Height>) -> Configuration {
        Configuration::Line(Line::new(left, right, origin, core))
    }

    /// Line with the same background on both sides.
    pub fn finite(bg: impl Into<Height>, origin: i64, core: Vec<Height>) -> Configuration {
        let bg = bg.into();
        Self::line(bg, bg, origin, core)
    }

    /// Convenience for tests and examples: integer core on a finite background.
    pub fn from_ints(bg: i64, origin: i64, core: &[i64]) -> Configuration {
        Self::finite(bg, origin, core.iter().map(|&v| Height::Finite(v)).collect())
    }

    /// Periodic configuration with `x_i = cells[i mod p]`, reduced to its
    /// least period. A period-1 configuration is returned as a constant line.
    pub fn periodic(cells: Vec<Height>) -> Result<Configuration> {
        if cells.is_empty() {
            return Err(Error::InvalidConfiguration("period must be at least 1".to_string()));
        }
        let n = cells.len();
        let p = (1..=n)
            .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| cells[i] == cells[i - p]))
            .unwrap_or(n);
        if p == 1 {
            return Ok(Self::constant(cells[0]));
        }
        Ok(Configuration::Periodic(Periodic { cells: cells[..p].to_vec() }))
    }

    pub fn plane(bg: Height, origin: [i64; 2], shape: [usize; 2], core: Vec<Height>) -> Configuration {
        Configuration::Plane(Plane::new(bg, origin, shape, core))
    }

    pub fn dim(&self) -> usize {
        match self {
            Configuration::Plane(_) => 2,
            _ => 1,
        }
    }

    pub fn as_line(&self) -> Option<&Line> {
        match self {
            Configuration::Line(l) => Some(l),
            _ => None,
        }
    }

    /// `Some(c)` for the constant configuration `c`.
    pub fn as_constant(&self) -> Option<Height> {
        match self {
            Configuration::Line(l) if l.core.is_empty() && l.left == l.right => Some(l.left),
            Configuration::Plane(p) if p.core.is_empty() => Some(p.bg),
            _ => None,
        }
    }

    /// Pile at a one-dimensional index. Panics on a plane.
    pub fn at(&self, i: i64) -> Height {
        match self {
            Configuration::Line(l) => l.at(i),
            Configuration::Periodic(p) => p.at(i),
            Configuration::Plane(_) => panic!("one-dimensional index on a plane"),
        }
    }

    pub fn height_at(&self, i: &[i64]) -> Result<Height> {
        check_dim(self.dim(), i.len())?;
        Ok(match self {
            Configuration::Line(l) => l.at(i[0]),
            Configuration::Periodic(p) => p.at(i[0]),
            Configuration::Plane(p) => p.at([i[0], i[1]]),
        })
    }

    /// `shift(x, k)_i = x_{i+k}`.
    pub fn shift(&self, k: &[i64]) -> Result<Configuration> {
        check_dim(self.dim(), k.len())?;
        Ok(match self {
            Configuration::Line(l) => Self::line(l.left, l.right, l.origin - k[0], l.core.clone()),
            Configuration::Periodic(p) => {
                let n = p.cells.len() as i64;
                let cells = (0..n).map(|i| p.cells[(i + k[0]).rem_euclid(n) as usize]).collect();
                Configuration::Periodic(Periodic { cells })
            }
            Configuration::Plane(p) => Self::plane(p.bg, [p.origin[0] - k[0], p.origin[1] - k[1]], p.shape, p.core.clone()),
        })
    }

    /// Adds `n` grains to every finite pile (removes them if `n < 0`).
    pub fn raise(&self, n: i64) -> Result<Configuration> {
        self.try_map(|h| h.checked_add(n))
    }

    /// Applies `f` to every pile of the description and re-canonicalizes.
    pub fn try_map(&self, mut f: impl FnMut(Height) -> Result<Height>) -> Result<Configuration> {
        Ok(match self {
            Configuration::Line(l) => {
                let core = l.core.iter().map(|&h| f(h)).collect::<Result<Vec<_>>>()?;
                Self::line(f(l.left)?, f(l.right)?, l.origin, core)
            }
            Configuration::Periodic(p) => {
                Self::periodic(p.cells.iter().map(|&h| f(h)).collect::<Result<Vec<_>>>()?)?
            }
            Configuration::Plane(p) => {
                let core = p.core.iter().map(|&h| f(h)).collect::<Result<Vec<_>>>()?;
                Self::plane(f(p.bg)?, p.origin, p.shape, core)
            }
        })
    }

    /// Finite portion with entry `k` equal to `x_{lo + k - 1}` (1-based `k`).
    pub fn window(&self, lo: &[i64], hi: &[i64]) -> Result<Pattern<Height>> {
        check_dim(self.dim(), lo.len())?;
        check_dim(self.dim(), hi.len())?;
        if lo.iter().zip(hi).any(|(a, b)| a > b) {
            return Err(Error::InvalidConfiguration("window bounds must satisfy lo <= hi".to_string()));
        }
        let shape: Vec<usize> = lo.iter().zip(hi).map(|(a, b)| (b - a + 1) as usize).collect();
        Ok(Pattern::from_fn(&shape, |k| {
            let idx: Vec<i64> = k.iter().zip(lo).map(|(&a, &b)| a as i64 + b).collect();
            self.height_at(&idx).expect("dimension checked")
        }))
    }

    /// Every pile value stored in the description.
    pub fn described_heights(&self) -> Vec<Height> {
        match self {
            Configuration::Line(l) => {
                let mut v = l.core.clone();
                v.push(l.left);
                v.push(l.right);
                v
            }
            Configuration::Periodic(p) => p.cells.clone(),
            Configuration::Plane(p) => {
                let mut v = p.core.clone();
                v.push(p.bg);
                v
            }
        }
    }

    /// True when no pile is infinite.
    pub fn is_bounded(&self) -> bool {
        self.described_heights().iter().all(|h| h.is_finite())
    }

    /// Largest absolute finite height in the description (0 if none).
    pub fn max_abs_finite(&self) -> i64 {
        self.described_heights()
            .iter()
            .filter_map(|h| h.finite())
            .map(|v| v.saturating_abs())
            .max()
            .unwrap_or(0)
    }

    /// Smallest and largest finite heights in the description.
    pub fn finite_range(&self) -> Option<(i64, i64)> {
        let mut it = self.described_heights().into_iter().filter_map(|h| h.finite());
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
    }

    /// A radius beyond which the description holds no new structure: every
    /// explicit cell lies within it, and a periodic block fits twice.
    pub fn extent(&self) -> i64 {
        match self {
            Configuration::Line(l) => l.origin.abs().max(l.end().abs()) + 1,
            Configuration::Periodic(p) => 2 * p.cells.len() as i64,
            Configuration::Plane(p) => {
                let a = p.origin[0].abs().max((p.origin[0] + p.shape[0] as i64).abs());
                let b = p.origin[1].abs().max((p.origin[1] + p.shape[1] as i64).abs());
                a.max(b) + 1
            }
        }
    }
}
