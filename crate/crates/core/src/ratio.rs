use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// An exact ratio of two cardinalities. Coverage values are kept as integer
/// pairs and only turned into floating point for display.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ratio {
    pub numerator: u64,
    pub denominator: u64,
}

impl Ratio {
    /// Panics if `denominator` is zero; callers check for empty sets first.
    pub fn new(numerator: u64, denominator: u64) -> Self {
        assert!(denominator > 0, "ratio with zero denominator");
        Ratio {
            numerator,
            denominator,
        }
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    pub fn is_one(&self) -> bool {
        self.numerator == self.denominator
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.numerator as u128 * other.denominator as u128;
        let rhs = other.numerator as u128 * self.denominator as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compares_by_value_not_representation() {
        assert_eq!(Ratio::new(1, 2).cmp(&Ratio::new(3, 6)), Ordering::Equal);
        assert!(Ratio::new(2, 3) > Ratio::new(3, 5));
        assert!(Ratio::new(0, 7) < Ratio::new(1, 1000));
    }

    #[test]
    fn renders_exactly() {
        assert_eq!(Ratio::new(3, 12).to_string(), "3/12");
        assert_eq!(Ratio::new(3, 12).value(), 0.25);
    }
}
