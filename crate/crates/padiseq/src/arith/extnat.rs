use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use crate::error::{Error, Result};

/// A natural number extended with +∞, the codomain of base-b valuations.
///
/// Infinity dominates every finite value and absorbs addition, matching the
/// convention ν_b(0) = +∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtendedNat {
    Finite(u64),
    Infinity,
}

impl ExtendedNat {
    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedNat::Infinity)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            ExtendedNat::Finite(v) => Some(v),
            ExtendedNat::Infinity => None,
        }
    }

    pub fn expect_finite(self, what: &str) -> Result<u64> {
        self.finite()
            .ok_or_else(|| Error::domain(format!("{what} is infinite")))
    }

    /// Floor division by a positive integer; ⌊∞/k⌋ = ∞.
    pub fn div_floor(self, k: u64) -> ExtendedNat {
        match self {
            ExtendedNat::Finite(v) => ExtendedNat::Finite(v / k),
            ExtendedNat::Infinity => ExtendedNat::Infinity,
        }
    }
}

impl From<u64> for ExtendedNat {
    fn from(v: u64) -> Self {
        ExtendedNat::Finite(v)
    }
}

impl PartialOrd for ExtendedNat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedNat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtendedNat::Finite(a), ExtendedNat::Finite(b)) => a.cmp(b),
            (ExtendedNat::Finite(_), ExtendedNat::Infinity) => Ordering::Less,
            (ExtendedNat::Infinity, ExtendedNat::Finite(_)) => Ordering::Greater,
            (ExtendedNat::Infinity, ExtendedNat::Infinity) => Ordering::Equal,
        }
    }
}

impl Add for ExtendedNat {
    type Output = ExtendedNat;
    fn add(self, rhs: ExtendedNat) -> ExtendedNat {
        match (self, rhs) {
            (ExtendedNat::Finite(a), ExtendedNat::Finite(b)) => ExtendedNat::Finite(a + b),
            _ => ExtendedNat::Infinity,
        }
    }
}

impl Add<u64> for ExtendedNat {
    type Output = ExtendedNat;
    fn add(self, rhs: u64) -> ExtendedNat {
        self + ExtendedNat::Finite(rhs)
    }
}

impl fmt::Display for ExtendedNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedNat::Finite(v) => write!(f, "{v}"),
            ExtendedNat::Infinity => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_dominates_min_and_add() {
        let inf = ExtendedNat::Infinity;
        let three = ExtendedNat::Finite(3);
        assert_eq!(inf.min(three), three);
        assert_eq!(inf + three, inf);
        assert_eq!(three + 4, ExtendedNat::Finite(7));
        assert!(three < inf);
    }

    #[test]
    fn display_uses_inf_marker() {
        assert_eq!(ExtendedNat::Infinity.to_string(), "inf");
        assert_eq!(ExtendedNat::Finite(12).to_string(), "12");
    }
}
