//! Exact half-integer arithmetic.
//!
//! Every extent-derived quantity in this crate is an integer or a
//! half-integer. `Half` stores the value scaled by two so that equality
//! checks and sums are exact. Squares of half-integers live in quarter
//! units; identity checks that need them work on `i64` quarter units
//! directly via [`Half::quarters`].

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// A half-integer, stored as twice its value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Half(i64);

impl Half {
    pub const ZERO: Half = Half(0);

    /// Builds from a count of halves, i.e. `Half::halves(3)` is 3/2.
    pub fn halves(n: i64) -> Half {
        Half(n)
    }

    pub fn from_int(n: i64) -> Half {
        Half(2 * n)
    }

    /// The value scaled by two (always exact).
    pub fn raw(self) -> i64 {
        self.0
    }

    /// The value scaled by four, for quarter-unit arithmetic.
    pub fn quarters(self) -> i64 {
        2 * self.0
    }

    /// Square in quarter units: `(n/2)^2 = n^2/4`.
    pub fn square_quarters(self) -> i64 {
        self.0 * self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn as_integer(self) -> Option<i64> {
        if self.is_integer() {
            Some(self.0 / 2)
        } else {
            None
        }
    }
}

impl Add for Half {
    type Output = Half;
    fn add(self, rhs: Half) -> Half {
        Half(self.0 + rhs.0)
    }
}

impl Sub for Half {
    type Output = Half;
    fn sub(self, rhs: Half) -> Half {
        Half(self.0 - rhs.0)
    }
}

impl Neg for Half {
    type Output = Half;
    fn neg(self) -> Half {
        Half(-self.0)
    }
}

impl AddAssign for Half {
    fn add_assign(&mut self, rhs: Half) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Half {
    fn sub_assign(&mut self, rhs: Half) {
        self.0 -= rhs.0;
    }
}

impl Mul<i64> for Half {
    type Output = Half;
    fn mul(self, rhs: i64) -> Half {
        Half(self.0 * rhs)
    }
}

impl Sum for Half {
    fn sum<I: Iterator<Item = Half>>(iter: I) -> Half {
        Half(iter.map(|h| h.0).sum())
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl fmt::Debug for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Half({})", self)
    }
}

/// Renders a quarter-unit quantity as an exact fraction.
pub fn display_quarters(q: i64) -> String {
    if q % 4 == 0 {
        format!("{}", q / 4)
    } else if q % 2 == 0 {
        format!("{}/2", q / 2)
    } else {
        format!("{}/4", q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_exact() {
        let a = Half::halves(3); // 3/2
        let b = Half::from_int(2);
        assert_eq!(a + b, Half::halves(7));
        assert_eq!(b - a, Half::halves(1));
        assert_eq!(-a, Half::halves(-3));
        assert_eq!(a * 4, Half::from_int(6));
        assert!(!a.is_integer());
        assert_eq!(b.as_integer(), Some(2));
    }

    #[test]
    fn display_forms() {
        assert_eq!(Half::from_int(-1).to_string(), "-1");
        assert_eq!(Half::halves(1).to_string(), "1/2");
        assert_eq!(Half::halves(-3).to_string(), "-3/2");
        assert_eq!(display_quarters(8), "2");
        assert_eq!(display_quarters(6), "3/2");
        assert_eq!(display_quarters(-3), "-3/4");
    }

    #[test]
    fn squares_in_quarters() {
        // (3/2)^2 = 9/4
        assert_eq!(Half::halves(3).square_quarters(), 9);
        assert_eq!(Half::from_int(4).square_quarters(), 64);
    }
}
