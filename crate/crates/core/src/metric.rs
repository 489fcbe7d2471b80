//! Measuring devices, cylinders, the two distances and the column encoding.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::config::Configuration;
use crate::height::{Finite, NegInf, PosInf};
use crate::{Error, Height, Pattern, Result};

/// Measuring device of precision `r` and reference height `m`: the offset
/// `n - m` when it lies in `[-r, r]`, otherwise the saturated sign.
pub fn beta(r: u32, m: i64, n: Height) -> Height {
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
        inf => inf,
    }
}

/// Top cylinder: the pile value at the centre, the other cells measured
/// from the top of the centre pile (from height 0 when the centre is infinite).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TopCylinder(pub Pattern<Height>);

/// Ground cylinder: every cell measured from height 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundCylinder(pub Pattern<Height>);

fn cylinder(x: &Configuration, i: &[i64], r: u32, mut cell: impl FnMut(bool, Height) -> Height) -> Result<Pattern<Height>> {
    if i.len() != x.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: i.len() });
    }
    let side = 2 * r as usize + 1;
    let shape = alloc::vec![side; x.dim()];
    let r = r as i64;
    Ok(Pattern::from_fn(&shape, |k| {
        let idx: Vec<i64> = k.iter().zip(i).map(|(&a, &c)| c + a as i64 - r).collect();
        let centre = k.iter().all(|&a| a as i64 == r);
        cell(centre, x.height_at(&idx).expect("dimension checked"))
    }))
}

pub fn top_cylinder(x: &Configuration, i: &[i64], r: u32) -> Result<TopCylinder> {
    let reference = x.height_at(i)?.finite().unwrap_or(0);
    cylinder(x, i, r, |centre, h| if centre { h } else { beta(r, reference, h) }).map(TopCylinder)
}

pub fn ground_cylinder(x: &Configuration, i: &[i64], r: u32) -> Result<GroundCylinder> {
    cylinder(x, i, r, |_, h| beta(r, 0, h)).map(GroundCylinder)
}

/// An exact distance value: zero or `2^-k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Distance {
    Zero,
    /// `2^-k`
    Pow(u64),
}

impl Distance {
    pub fn exponent(self) -> Option<u64> {
        match self {
            Distance::Zero => None,
            Distance::Pow(k) => Some(k),
        }
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Distance::Zero, Distance::Zero) => Ordering::Equal,
            (Distance::Zero, _) => Ordering::Less,
            (_, Distance::Zero) => Ordering::Greater,
            (Distance::Pow(a), Distance::Pow(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Zero => f.write_str("0"),
            Distance::Pow(k) => write!(f, "2^-{k}"),
        }
    }
}

/// Radius past which two distinct descriptions must already differ.
fn scan_bound(x: &Configuration, y: &Configuration) -> u64 {
    let b = x.extent() + y.extent() + x.max_abs_finite().saturating_add(y.max_abs_finite()) + 2;
    b.max(0) as u64
}

fn first_difference<P: PartialEq>(
    x: &Configuration,
    y: &Configuration,
    cyl: impl Fn(&Configuration, u32) -> Result<P>,
) -> Result<Distance> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    if x == y {
        return Ok(Distance::Zero);
    }
    let bound = scan_bound(x, y);
    for r in 0..=bound {
        if cyl(x, r as u32)? != cyl(y, r as u32)? {
            return Ok(Distance::Pow(r));
        }
    }
    unreachable!("distinct canonical configurations agree up to radius {bound}")
}

/// `d'(x, y) = 2^-k`, `k` the least radius where the top cylinders at 0 differ.
pub fn dist_top(x: &Configuration, y: &Configuration) -> Result<Distance> {
    let zero = alloc::vec![0; x.dim()];
    first_difference(x, y, |c, r| top_cylinder(c, &zero, r))
}

/// `d(x, y) = 2^-k`, `k` the least radius where the ground cylinders at 0
/// differ. Equals the Tychonoff distance between the column encodings.
pub fn dist_ground(x: &Configuration, y: &Configuration) -> Result<Distance> {
    let zero = alloc::vec![0; x.dim()];
    first_difference(x, y, |c, r| ground_cylinder(c, &zero, r))
}

/// A finite binary window without the forbidden pattern (a 0 directly below
/// a 1). Column `j` holds `tops[j]` ones at the bottom and zeros above.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StaircasePattern {
    height: usize,
    tops: Vec<usize>,
}

impl StaircasePattern {
    pub fn new(height: usize, tops: Vec<usize>) -> Result<Self> {
        if tops.iter().any(|&t| t > height) {
            return Err(Error::InvalidConfiguration(alloc::format!("column count exceeds height {height}")));
        }
        Ok(StaircasePattern { height, tops })
    }

    pub fn width(&self) -> usize {
        self.tops.len()
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of ones in each column, left to right.
    pub fn tops(&self) -> &[usize] {
        &self.tops
    }

    /// Binary pattern of shape `[width, height]`, vertical axis last,
    /// bottom to top.
    pub fn to_pattern(&self) -> Pattern<u8> {
        Pattern::from_fn(&[self.width(), self.height], |k| u8::from(k[1] < self.tops[k[0]]))
    }

    pub fn from_pattern(p: &Pattern<u8>) -> Result<Self> {
        let [w, h] = *p.shape() else {
            return Err(Error::DimensionMismatch { expected: 2, found: p.dim() });
        };
        if contains_forbidden(p) {
            return Err(Error::ContainsForbidden);
        }
        let tops = (0..w).map(|a| (0..h).filter(|&b| p.get0(&[a, b]) == Some(&1)).count()).collect();
        Ok(StaircasePattern { height: h, tops })
    }
}

/// True when some column of a 2-D binary pattern has a 0 directly below a 1.
pub fn contains_forbidden(p: &Pattern<u8>) -> bool {
    let [w, h] = *p.shape() else { return false };
    let data = p.as_slice();
    (0..w).any(|a| (0..h.saturating_sub(1)).any(|b| data[a * h + b] == 0 && data[a * h + b + 1] == 1))
}

/// Column encoding of a one-dimensional configuration on the window
/// `[h_lo, h_hi] x [v_lo, v_hi]`: cell `(i, k)` is 1 iff `x_i >= k`.
pub fn zeta_window(x: &Configuration, horiz: (i64, i64), vert: (i64, i64)) -> Result<StaircasePattern> {
    if x.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: x.dim() });
    }
    if horiz.0 > horiz.1 || vert.0 > vert.1 {
        return Err(Error::InvalidConfiguration(alloc::string::String::from("empty encoding window")));
    }
    let height = (vert.1 - vert.0 + 1) as usize;
    let tops = (horiz.0..=horiz.1).map(|i| column_count(x.at(i), vert.0, height)).collect();
    Ok(StaircasePattern { height, tops })
}

/// Number of ones in the encoded column of a pile over `[v_lo, v_lo + height)`.
pub fn column_count(h: Height, v_lo: i64, height: usize) -> usize {
    match h {
        NegInf => 0,
        PosInf => height,
        Finite(v) => (v as i128 - v_lo as i128 + 1).clamp(0, height as i128) as usize,
    }
}

/// What lies beyond the ends of a decoded column.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ColumnBounds {
    /// The column is known to be all ones above the window.
    pub ones_above: bool,
    /// The column is known to be all zeros below the window.
    pub zeros_below: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decoded {
    Height(Height),
    Undetermined,
}

/// Recovers `x_i = sup{k : column_k = 1}` from a column read over
/// `[k_lo, k_lo + len)`.
pub fn zeta_decode_column(column: &[u8], k_lo: i64, bounds: ColumnBounds) -> Result<Decoded> {
    if column.windows(2).any(|w| w[0] == 0 && w[1] != 0) {
        return Err(Error::ContainsForbidden);
    }
    let ones = column.iter().take_while(|&&c| c != 0).count();
    Ok(if ones == column.len() {
        if bounds.ones_above { Decoded::Height(PosInf) } else { Decoded::Undetermined }
    } else if ones == 0 {
        if bounds.zeros_below { Decoded::Height(NegInf) } else { Decoded::Undetermined }
    } else {
        Decoded::Height(Finite(k_lo + ones as i64 - 1))
    })
}

/// Number of staircase patterns of the given order, `(height + 1)^width`.
pub fn staircase_count(width: usize, height: usize) -> Option<u64> {
    (height as u64 + 1).checked_pow(width as u32)
}

/// All staircase patterns of order `width x height`, each once, ordered
/// lexicographically on the column counts (leftmost column most significant).
pub fn enumerate_staircase(width: usize, height: usize, budget: u64) -> Result<StaircaseIter> {
    let needed = staircase_count(width, height).unwrap_or(u64::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(StaircaseIter { height, next: Some(alloc::vec![0; width]) })
}

pub struct StaircaseIter {
    height: usize,
    next: Option<Vec<usize>>,
}

impl Iterator for StaircaseIter {
    type Item = StaircasePattern;

    fn next(&mut self) -> Option<StaircasePattern> {
        let tops = self.next.take()?;
        let mut succ = tops.clone();
        let mut pos = succ.len();
        let mut carried = true;
        while carried && pos > 0 {
            pos -= 1;
            if succ[pos] < self.height {
                succ[pos] += 1;
                carried = false;
            } else {
                succ[pos] = 0;
            }
        }
        if !carried {
            self.next = Some(succ);
        }
        Some(StaircasePattern { height: self.height, tops })
    }
}
