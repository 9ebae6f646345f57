use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed interval `[a, b]` with `a < b`. Endpoints may be infinite for
/// windows that cover the whole line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_nan() || b.is_nan() || a >= b {
            return Err(Error::BadInterval { a, b });
        }
        Ok(Interval { a, b })
    }

    pub fn real_line() -> Self {
        Interval {
            a: f64::NEG_INFINITY,
            b: f64::INFINITY,
        }
    }

    /// Interval with the given center and length.
    pub fn centered(center: f64, length: f64) -> Result<Self> {
        Interval::new(center - 0.5 * length, center + 0.5 * length)
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn is_bounded(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }

    /// `cI`: same center, length scaled by `c`.
    pub fn dilate(&self, c: f64) -> Result<Self> {
        Interval::centered(self.mid(), c * self.len())
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.a <= other.a && other.b <= self.b
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        Interval::new(self.a.max(other.a), self.b.min(other.b)).ok()
    }

    /// Shrink by `margin` on both sides.
    pub fn shrink(&self, margin: f64) -> Result<Self> {
        Interval::new(self.a + margin, self.b - margin)
    }

    pub fn check_contains(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfWindow {
                x,
                a: self.a,
                b: self.b,
            })
        }
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn dilation_keeps_center() {
        let i = Interval::new(1.0, 3.0).unwrap();
        let j = i.dilate(3.0).unwrap();
        assert_eq!(j.mid(), 2.0);
        assert_eq!(j.len(), 6.0);
    }

    #[test]
    fn intersection() {
        let i = Interval::new(0.0, 2.0).unwrap();
        let j = Interval::new(1.0, 5.0).unwrap();
        assert_eq!(i.intersect(&j), Some(Interval { a: 1.0, b: 2.0 }));
        let k = Interval::new(3.0, 4.0).unwrap();
        assert_eq!(i.intersect(&k), None);
        assert!(Interval::real_line().contains_interval(&i));
    }
}
