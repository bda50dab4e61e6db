//! Interval partitions of the circle.

use crate::error::{Error, Result};

/// A partition of `[0, 1)` into finitely many half-open intervals `[a, b)`,
/// listed in increasing order. Cell indices are the labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    cells: Vec<(f64, f64)>,
}

impl Partition {
    /// Build from consecutive cut points `0 = c_0 < c_1 < ... < c_m = 1`;
    /// cell `i` is `[c_i, c_{i+1})`.
    pub fn from_cuts(cuts: &[f64]) -> Result<Self> {
        if cuts.len() < 2 || cuts[0] != 0.0 || *cuts.last().unwrap() != 1.0 {
            return Err(Error::invalid(
                "partition",
                "cut points must run from 0.0 to 1.0",
            ));
        }
        if cuts.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("partition", "cut points must strictly increase"));
        }
        let cells = cuts.windows(2).map(|w| (w[0], w[1])).collect();
        Ok(Partition { cells })
    }

    /// The standard binary partition `{[0, 1/2), [1/2, 1)}`.
    pub fn halves() -> Self {
        Partition {
            cells: vec![(0.0, 0.5), (0.5, 1.0)],
        }
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Half-open cells `[lo, hi)` in increasing order.
    pub fn cells(&self) -> &[(f64, f64)] {
        &self.cells
    }

    pub fn is_halves(&self) -> bool {
        self.cells == [(0.0, 0.5), (0.5, 1.0)]
    }

    /// Label of a point in `[0, 1)`.
    pub fn cell_of(&self, x: f64) -> Result<u8> {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::invalid("point", format!("{x} outside [0, 1)")));
        }
        // cells are sorted by left endpoint
        let idx = self.cells.partition_point(|&(a, _)| a <= x) - 1;
        debug_assert!(x >= self.cells[idx].0 && x < self.cells[idx].1);
        Ok(idx as u8)
    }

    /// Quantize a trajectory of circle points to labels.
    pub fn quantize(&self, xs: &[f64]) -> Result<Vec<u8>> {
        xs.iter().map(|&x| self.cell_of(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halves_labels_are_half_open() {
        let p = Partition::halves();
        assert_eq!(p.cell_of(0.0).unwrap(), 0);
        assert_eq!(p.cell_of(0.4999999).unwrap(), 0);
        assert_eq!(p.cell_of(0.5).unwrap(), 1);
        assert_eq!(p.cell_of(0.9999999999).unwrap(), 1);
        assert!(p.cell_of(1.0).is_err());
        assert!(p.cell_of(-0.1).is_err());
    }

    #[test]
    fn three_cells() {
        let p = Partition::from_cuts(&[0.0, 0.25, 0.75, 1.0]).unwrap();
        assert_eq!(p.cell_count(), 3);
        assert_eq!(p.quantize(&[0.1, 0.25, 0.5, 0.75]).unwrap(), vec![0, 1, 1, 2]);
        assert!(!p.is_halves());
        assert!(Partition::halves().is_halves());
    }

    #[test]
    fn rejects_non_covers() {
        assert!(Partition::from_cuts(&[0.0, 1.0]).is_ok());
        assert!(Partition::from_cuts(&[0.1, 1.0]).is_err());
        assert!(Partition::from_cuts(&[0.0, 0.9]).is_err());
        assert!(Partition::from_cuts(&[0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(Partition::from_cuts(&[0.0]).is_err());
    }
}
