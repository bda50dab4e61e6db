//! Uniform one-dimensional grids.

use crate::error::{Error, Result};

/// A finite arithmetic progression `start + i * step`, `i = 0..count`.
///
/// Grids are the canonical candidate sets for parameter searches. Points are
/// always generated from the same expression, so two modules walking the same
/// grid see bit-identical values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    start: f64,
    step: f64,
    count: usize,
}

impl Grid {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !start.is_finite() || !step.is_finite() || step <= 0.0 {
            return Err(Error::invalid(
                "grid",
                format!("start {start} and step {step} must be finite, step > 0"),
            ));
        }
        if count == 0 {
            return Err(Error::invalid("grid", "count must be positive"));
        }
        Ok(Grid { start, step, count })
    }

    /// Grid over `[lo, hi]` with the given step; the last point is the
    /// largest `lo + i*step` not exceeding `hi` (within one part in 2^20 of a
    /// step, to absorb representation error in `hi - lo`).
    pub fn covering(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::invalid("grid", format!("need lo < hi, got [{lo}, {hi}]")));
        }
        let count = ((hi - lo) / step + 1.0 + 1.0 / 1048576.0).floor() as usize;
        Grid::new(lo, step, count.max(1))
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        debug_assert!(i < self.count);
        self.start + (i as f64) * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn min(&self) -> f64 {
        self.start
    }

    pub fn max(&self) -> f64 {
        self.point(self.count - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covering_includes_endpoints() {
        let g = Grid::covering(0.0, 0.5, 1e-4).unwrap();
        assert_eq!(g.len(), 5001);
        assert_eq!(g.min(), 0.0);
        assert_eq!(g.max(), 5000.0 * 1e-4);
    }

    #[test]
    fn unit_circle_grid() {
        let g = Grid::new(0.0, 0.01, 100).unwrap();
        assert_eq!(g.len(), 100);
        assert_eq!(g.point(99), 0.99);
        assert!(g.max() < 1.0);
    }

    #[test]
    fn rejects_bad_steps() {
        assert!(Grid::new(0.0, 0.0, 5).is_err());
        assert!(Grid::new(0.0, -0.1, 5).is_err());
        assert!(Grid::new(f64::NAN, 0.1, 5).is_err());
        assert!(Grid::new(0.0, 0.1, 0).is_err());
    }

    #[test]
    fn points_match_direct_formula() {
        let g = Grid::new(0.25, 1e-3, 17).unwrap();
        for (i, p) in g.points().enumerate() {
            assert_eq!(p, 0.25 + (i as f64) * 1e-3);
        }
    }
}
