//! Block counting for binary rotation codings.
//!
//! For a fixed angle the set of length-n label words over all start points
//! is finite: the word is constant on each arc between consecutive pullbacks
//! of the cut points {0, 1/2} through the first n rotation steps, so taking
//! one midpoint per arc enumerates every word exactly. The family-level
//! count unions these sets over the angle grid. Entropy readouts use the
//! natural logarithm.

use super::RotationFamily;
use crate::error::{Error, Result};
use std::collections::HashSet;

/// Hard cap on the block length; words are packed into one `u64`.
pub(crate) const BLOCK_LENGTH_CAP: usize = 64;

/// Word counts per block length with entropy and growth readouts.
#[derive(Debug, Clone)]
pub struct BlockComplexityReport {
    /// `(n, C(n))` for every block length up to the requested maximum.
    pub counts: Vec<(usize, u64)>,
    /// `(n, ln C(n) / n)`, the normalized entropy estimates.
    pub entropy: Vec<(usize, f64)>,
    /// Least-squares slope of `ln C(n)` against `ln n`.
    pub exponent: f64,
}

impl BlockComplexityReport {
    /// Whether the entropy estimate at the largest counted length is at or
    /// below `threshold`; gates claims that need a zero-entropy coding.
    pub fn zero_entropy_gate(&self, threshold: f64) -> bool {
        match self.entropy.last() {
            Some(&(_, h)) => h <= threshold,
            None => false,
        }
    }
}

/// Wrap to `[0, 1]`; unlike `frac_signed` the 1.0 edge is kept, so arc
/// arithmetic stays aligned with plain `rem_euclid` conventions.
#[inline]
fn wrap(x: f64) -> f64 {
    x.rem_euclid(1.0)
}

/// Count distinct label blocks of each length `1..=n_max` over the family's
/// angle grid.
pub fn block_complexity(family: &RotationFamily, n_max: usize) -> Result<BlockComplexityReport> {
    if !family.partition().is_halves() {
        return Err(Error::invalid(
            "block counting",
            "only the binary half partition ships",
        ));
    }
    if n_max == 0 || n_max > BLOCK_LENGTH_CAP {
        return Err(Error::CapExceeded {
            what: "block length",
            needed: n_max,
            cap: BLOCK_LENGTH_CAP,
        });
    }
    let theta_grid = family.theta_grid();
    let mut words: Vec<HashSet<u64>> = vec![HashSet::new(); n_max + 1];
    let mut breaks: Vec<f64> = Vec::with_capacity(2 * n_max);
    for i in 0..theta_grid.len() {
        let theta = theta_grid.point(i);
        for n in 1..=n_max {
            breaks.clear();
            for k in 0..n {
                let t = (k as f64) * theta;
                breaks.push(wrap(-t));
                breaks.push(wrap(0.5 - t));
            }
            breaks.sort_by(f64::total_cmp);
            breaks.dedup();
            let last = breaks.len() - 1;
            for (a, arc) in breaks.iter().enumerate() {
                let mid = if a < last {
                    (arc + breaks[a + 1]) / 2.0
                } else {
                    wrap((breaks[last] + 1.0 + breaks[0]) / 2.0)
                };
                let mut w = 0u64;
                for k in 0..n {
                    let x = wrap(mid + (k as f64) * theta);
                    w |= ((x >= 0.5) as u64) << k;
                }
                words[n].insert(w);
            }
        }
    }
    let counts: Vec<(usize, u64)> = (1..=n_max).map(|n| (n, words[n].len() as u64)).collect();
    let entropy: Vec<(usize, f64)> = counts
        .iter()
        .map(|&(n, c)| (n, (c as f64).ln() / n as f64))
        .collect();
    let exponent = log_log_slope(&counts);
    Ok(BlockComplexityReport {
        counts,
        entropy,
        exponent,
    })
}

/// Least-squares slope of `ln C` against `ln n`.
fn log_log_slope(counts: &[(usize, u64)]) -> f64 {
    let m = counts.len() as f64;
    let xs = counts.iter().map(|&(n, _)| (n as f64).ln());
    let ys = counts.iter().map(|&(_, c)| (c as f64).ln());
    let xbar = xs.clone().sum::<f64>() / m;
    let ybar = ys.clone().sum::<f64>() / m;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.zip(ys) {
        num += (x - xbar) * (y - ybar);
        den += (x - xbar) * (x - xbar);
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Exact block counts for one rational angle `num/den`, all lengths up to
/// `n_max`.
///
/// Cut pullbacks land on multiples of `1/(2 den)`, so the arc arrangement is
/// integer arithmetic: breakpoints in units of `1/(2 den)`, arc midpoints in
/// units of `1/(4 den)`, labels from the phase alone. No floating point is
/// involved.
pub fn rational_block_counts(num: u64, den: u64, n_max: usize) -> Result<Vec<(usize, u64)>> {
    if den == 0 || 2 * num > den {
        return Err(Error::invalid("rational angle", "need 0 <= num/den <= 1/2"));
    }
    if den > 1 << 30 {
        return Err(Error::invalid("rational angle", "denominator too large"));
    }
    if n_max == 0 || n_max > BLOCK_LENGTH_CAP {
        return Err(Error::CapExceeded {
            what: "block length",
            needed: n_max,
            cap: BLOCK_LENGTH_CAP,
        });
    }
    let two_b = 2 * den;
    let four_b = 4 * den;
    let step = (4 * num) % four_b;
    let mut out = Vec::with_capacity(n_max);
    let mut breaks: Vec<u64> = Vec::new();
    for n in 1..=n_max {
        breaks.clear();
        for k in 0..n as u64 {
            let r = (2 * num * k) % two_b;
            breaks.push((two_b - r) % two_b);
            breaks.push((den + two_b - r) % two_b);
        }
        breaks.sort_unstable();
        breaks.dedup();
        let last = breaks.len() - 1;
        let mut words: HashSet<u64> = HashSet::new();
        for (a, &bp) in breaks.iter().enumerate() {
            // breakpoints sit on even ticks of the 1/(4 den) lattice, so
            // midpoints (sums of two breakpoint ticks) are exact integers
            let mid = if a < last {
                bp + breaks[a + 1]
            } else {
                (bp + two_b + breaks[0]) % four_b
            };
            let mut z = mid % four_b;
            let mut w = 0u64;
            for k in 0..n {
                w |= ((z >= two_b) as u64) << k;
                z = (z + step) % four_b;
            }
            words.insert(w);
        }
        out.push((n, words.len() as u64));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::{Grid, Partition};

    fn small_family(theta_points: usize) -> RotationFamily {
        let step = 0.5 / (theta_points - 1) as f64;
        RotationFamily::new(
            Grid::new(0.0, step, theta_points).unwrap(),
            Grid::new(0.0, 0.01, 100).unwrap(),
            Partition::halves(),
        )
        .unwrap()
    }

    #[test]
    fn single_block_lengths_have_two_words() {
        let rep = block_complexity(&small_family(50), 1).unwrap();
        assert_eq!(rep.counts, vec![(1, 2)]);
    }

    #[test]
    fn quarter_turn_has_four_blocks_of_length_eight() {
        let counts = rational_block_counts(1, 4, 8).unwrap();
        assert_eq!(counts[0], (1, 2));
        assert_eq!(counts[7], (8, 4));
    }

    #[test]
    fn rational_counts_never_exceed_twice_the_denominator() {
        for (num, den) in [(1u64, 3u64), (1, 5), (2, 7), (3, 8), (1, 4)] {
            for (n, c) in rational_block_counts(num, den, 32).unwrap() {
                assert!(c <= 2 * den, "C({n}) = {c} > 2*{den} for {num}/{den}");
                assert!(c <= 2 * n as u64, "C({n}) = {c} > 2n for {num}/{den}");
            }
        }
    }

    #[test]
    fn rational_and_float_counting_agree_on_exact_angles() {
        // 1/4 = 0.25 and 3/8 = 0.375 are exact doubles, so the float path
        // sees the same arcs the integer path does
        for (num, den) in [(1u64, 4u64), (3, 8)] {
            let theta = num as f64 / den as f64;
            let fam = RotationFamily::new(
                Grid::new(theta, 1.0, 1).unwrap(),
                Grid::new(0.0, 0.01, 100).unwrap(),
                Partition::halves(),
            )
            .unwrap();
            let float_rep = block_complexity(&fam, 16).unwrap();
            let exact = rational_block_counts(num, den, 16).unwrap();
            assert_eq!(float_rep.counts, exact);
        }
    }

    #[test]
    fn counts_are_nondecreasing_and_bounded_by_powers_of_two() {
        let rep = block_complexity(&small_family(40), 12).unwrap();
        for pair in rep.counts.windows(2) {
            assert!(pair[0].1 <= pair[1].1);
        }
        for &(n, c) in &rep.counts {
            assert!(c <= 1u64 << n);
            assert!(c >= 2);
        }
    }

    #[test]
    fn entropy_uses_natural_log() {
        let rep = block_complexity(&small_family(25), 4).unwrap();
        for (&(n, c), &(n2, h)) in rep.counts.iter().zip(&rep.entropy) {
            assert_eq!(n, n2);
            assert_eq!(h, (c as f64).ln() / n as f64);
        }
    }

    #[test]
    fn length_cap_is_enforced() {
        assert!(matches!(
            block_complexity(&small_family(10), 65),
            Err(Error::CapExceeded { .. })
        ));
        assert!(rational_block_counts(1, 4, 0).is_err());
    }

    #[test]
    fn gate_reads_the_last_entropy_row() {
        let rep = block_complexity(&small_family(30), 10).unwrap();
        let last = rep.entropy.last().unwrap().1;
        assert!(rep.zero_entropy_gate(last + 1e-12));
        assert!(!rep.zero_entropy_gate(last - 1e-12));
    }
}
