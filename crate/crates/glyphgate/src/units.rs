//! Text-space units, the integer coordinate system for glyph positioning.
//!
//! One unit is 1/1000 of the font size at 72 dpi, so at a 12-point font
//! size one unit is 1/6000 of an inch (0.0042 mm). Widths and shifts are
//! held as exact integers at rest; fractional positioning (edited Word
//! output, OCR spacing) keeps its sub-unit residue in a side field next
//! to the rounded integer.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub};

/// An integer count of text-space units.
#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct TextSpaceUnit(pub i64);

impl TextSpaceUnit {
    pub const ZERO: TextSpaceUnit = TextSpaceUnit(0);

    /// Physical width in points at the given font size.
    pub fn to_points(self, font_size: f64) -> f64 {
        self.0 as f64 * font_size / 1000.0
    }

    /// Exact (unrounded) unit value of a physical width at the given font size.
    pub fn exact_from_points(points: f64, font_size: f64) -> f64 {
        points * 1000.0 / font_size
    }

    /// Quantize a real unit value, rounding halves away from zero.
    pub fn from_exact(units: f64) -> TextSpaceUnit {
        TextSpaceUnit(round_half_away(units))
    }

    pub fn abs(self) -> TextSpaceUnit {
        TextSpaceUnit(self.0.abs())
    }
}

impl fmt::Debug for TextSpaceUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}u", self.0)
    }
}

impl fmt::Display for TextSpaceUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for TextSpaceUnit {
    type Output = TextSpaceUnit;
    fn add(self, rhs: TextSpaceUnit) -> TextSpaceUnit {
        TextSpaceUnit(self.0 + rhs.0)
    }
}

impl AddAssign for TextSpaceUnit {
    fn add_assign(&mut self, rhs: TextSpaceUnit) {
        self.0 += rhs.0;
    }
}

impl Sub for TextSpaceUnit {
    type Output = TextSpaceUnit;
    fn sub(self, rhs: TextSpaceUnit) -> TextSpaceUnit {
        TextSpaceUnit(self.0 - rhs.0)
    }
}

impl Neg for TextSpaceUnit {
    type Output = TextSpaceUnit;
    fn neg(self) -> TextSpaceUnit {
        TextSpaceUnit(-self.0)
    }
}

impl Sum for TextSpaceUnit {
    fn sum<I: Iterator<Item = TextSpaceUnit>>(iter: I) -> TextSpaceUnit {
        TextSpaceUnit(iter.map(|u| u.0).sum())
    }
}

impl From<i64> for TextSpaceUnit {
    fn from(v: i64) -> Self {
        TextSpaceUnit(v)
    }
}

/// Round to the nearest integer with halves going away from zero.
pub fn round_half_away(x: f64) -> i64 {
    if x >= 0.0 {
        (x + 0.5).floor() as i64
    } else {
        (x - 0.5).ceil() as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_is_one_six_thousandth_inch_at_12pt() {
        // 1 unit at 12pt = 12/1000 pt = 12/72000 in = 1/6000 in.
        let inches = TextSpaceUnit(1).to_points(12.0) / 72.0;
        assert!((inches - 1.0 / 6000.0).abs() < 1e-15);
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(round_half_away(2.5), 3);
        assert_eq!(round_half_away(-2.5), -3);
        assert_eq!(round_half_away(2.4), 2);
        assert_eq!(round_half_away(-2.4), -2);
        assert_eq!(round_half_away(0.0), 0);
    }

    #[test]
    fn points_round_trip() {
        for units in [-5000i64, -1, 0, 1, 569, 6256] {
            let u = TextSpaceUnit(units);
            let exact = TextSpaceUnit::exact_from_points(u.to_points(10.5), 10.5);
            assert_eq!(TextSpaceUnit::from_exact(exact), u);
        }
    }
}
