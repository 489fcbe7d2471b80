//! Pile heights: integers extended with a source (`+inf`) and a sink (`-inf`).

use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

/// The value of one pile.
///
/// Variants are declared in ascending order, so the derived `Ord` is the
/// total order `-inf < finite < +inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Height {
    NegInf,
    Finite(i64),
    PosInf,
}

pub use Height::{Finite, NegInf, PosInf};

impl Height {
    pub const ZERO: Height = Height::Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, Height::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        !self.is_finite()
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Height::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Adds a finite delta; infinities absorb it.
    pub fn checked_add(self, delta: i64) -> Result<Height> {
        match self {
            Height::Finite(v) => v.checked_add(delta).map(Height::Finite).ok_or(Error::Overflow),
            inf => Ok(inf),
        }
    }
}

impl From<i64> for Height {
    fn from(v: i64) -> Self {
        Height::Finite(v)
    }
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::NegInf => f.write_str("-inf"),
            Height::PosInf => f.write_str("+inf"),
            Height::Finite(v) => write!(f, "{v}"),
        }
    }
}

/// Error returned when a token is neither an integer nor `+inf`/`-inf`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseHeightError;

impl fmt::Display for ParseHeightError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected an integer, +inf or -inf")
    }
}

impl FromStr for Height {
    type Err = ParseHeightError;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s {
            "+inf" | "inf" => Ok(Height::PosInf),
            "-inf" => Ok(Height::NegInf),
            _ => s.parse::<i64>().map(Height::Finite).map_err(|_| ParseHeightError),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_puts_infinities_at_the_ends() {
        assert!(NegInf < Finite(i64::MIN));
        assert!(Finite(i64::MAX) < PosInf);
        assert!(Finite(-3) < Finite(2));
    }

    #[test]
    fn infinities_absorb_deltas() {
        assert_eq!(PosInf.checked_add(-7), Ok(PosInf));
        assert_eq!(NegInf.checked_add(7), Ok(NegInf));
        assert_eq!(Finite(2).checked_add(-7), Ok(Finite(-5)));
        assert_eq!(Finite(i64::MAX).checked_add(1), Err(Error::Overflow));
    }

    #[test]
    fn parse_and_display_agree() {
        for s in ["+inf", "-inf", "0", "-12", "40"] {
            let h: Height = s.parse().unwrap();
            assert_eq!(alloc::format!("{h}"), s);
        }
        assert!("+5x".parse::<Height>().is_err());
    }
}
