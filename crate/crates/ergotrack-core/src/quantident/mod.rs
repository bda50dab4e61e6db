//! Identification of a rotation angle from quantized, noisy orbit labels.
//!
//! An unknown rotation is started at an unknown point, each position is
//! reduced to a partition label, and every label is flipped independently
//! with probability `p`. The estimator searches a parameter grid for the
//! `(theta, u)` pair whose label orbit has the smallest empirical mismatch
//! rate against the observed word:
//!
//! - per theta, mismatch counts over all start points are swept exactly as
//!   integers: the count is piecewise constant in `u` and changes only where
//!   an orbit position crosses a cell boundary;
//! - a shortlist pass on a window prefix narrows the theta grid before the
//!   full-length ranking, then local ladders refine theta and the start
//!   point by a factor of 100;
//! - ties break toward the smallest theta, then the smallest start point.
//!
//! Also here: block complexity of the label language with an entropy
//! readout, the noise-floor inequality relating clean and noisy mismatch
//! rates, and a step-count bound for telling two angles apart from labels.

mod complexity;
mod separation;

pub use complexity::{block_complexity, rational_block_counts, BlockComplexityReport};
pub use separation::{parse_decimal_ratio, separation_bound, SeparationCertificate};

use crate::dynsys::{frac, frac_signed, Angle, Grid, Partition, RngStream, SUB_INIT, SUB_NOISE};
use crate::error::{Error, Result};
use rand::Rng;
use rayon::prelude::*;

/// Shortlist stage: rank thetas on a prefix of this length first.
const SHORTLIST_PREFIX: usize = 20_000;
/// How many thetas survive into the full-length ranking.
const SHORTLIST_KEEP: usize = 300;

/// The search space of the identification problem: a theta grid in
/// `[0, 1/2]`, a start-point grid in `[0, 1)`, and the labeling partition.
#[derive(Debug, Clone)]
pub struct RotationFamily {
    theta_grid: Grid,
    u_grid: Grid,
    partition: Partition,
}

impl RotationFamily {
    pub fn new(theta_grid: Grid, u_grid: Grid, partition: Partition) -> Result<Self> {
        if theta_grid.min() < 0.0 || theta_grid.max() > 0.5 {
            return Err(Error::invalid("theta grid", "must lie inside [0, 1/2]"));
        }
        if u_grid.min() < 0.0 || u_grid.max() >= 1.0 {
            return Err(Error::invalid("start point grid", "must lie inside [0, 1)"));
        }
        Ok(RotationFamily {
            theta_grid,
            u_grid,
            partition,
        })
    }

    /// The default search space: theta step `1e-4` on `[0, 1/2]`, start
    /// points at hundredths, binary labels.
    pub fn standard() -> Self {
        RotationFamily {
            theta_grid: Grid::covering(0.0, 0.5, 1e-4).expect("static grid"),
            u_grid: Grid::new(0.0, 0.01, 100).expect("static grid"),
            partition: Partition::halves(),
        }
    }

    pub fn theta_grid(&self) -> Grid {
        self.theta_grid
    }

    pub fn u_grid(&self) -> Grid {
        self.u_grid
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }
}

/// One generated observation run: a labeled rotation orbit plus label noise.
///
/// `clean` is kept alongside `observed` so noise-floor diagnostics can
/// compare risks against the flip-free word of the same start point.
#[derive(Debug, Clone)]
pub struct NoisyLabelRun {
    pub angle: Angle,
    pub flip_p: f64,
    pub u_init: f64,
    pub stream: RngStream,
    pub clean: Vec<u8>,
    pub observed: Vec<u8>,
}

/// Sample a noisy label run.
///
/// The start point comes from `u_init` when given; otherwise it is drawn
/// uniformly from `[0, 1)` for float angles and uniformly from the finite
/// orbit for exact rational angles. Draw-for-draw this matches what
/// `ObservationSource::noisy_label` over a rotation produces under the same
/// stream, so both roads yield byte-identical words.
pub fn generate(
    angle: Angle,
    flip_p: f64,
    n: usize,
    stream: RngStream,
    partition: &Partition,
    u_init: Option<f64>,
) -> Result<NoisyLabelRun> {
    if !(0.0..0.5).contains(&flip_p) {
        return Err(Error::ProbabilityRange {
            what: "label flip probability",
            value: flip_p,
        });
    }
    if partition.cell_count() != 2 {
        return Err(Error::invalid(
            "label run",
            "flip noise is defined for two-cell partitions",
        ));
    }
    if n == 0 {
        return Err(Error::invalid("run length", "must be positive"));
    }
    let u = match (u_init, angle) {
        (Some(u), _) => {
            if !(0.0..1.0).contains(&u) {
                return Err(Error::invalid("start point", format!("{u} outside [0, 1)")));
            }
            u
        }
        (None, Angle::Float(_)) => stream.substream(SUB_INIT).rng().gen::<f64>(),
        (None, Angle::Rational { den, .. }) => {
            let j = stream.substream(SUB_INIT).rng().gen_range(0..den);
            j as f64 / den as f64
        }
    };
    let clean = rotation_labels(angle, u, partition, n)?;
    let mut rng = stream.substream(SUB_NOISE).rng();
    let observed = clean
        .iter()
        .map(|&b| b ^ ((rng.gen::<f64>() < flip_p) as u8))
        .collect();
    Ok(NoisyLabelRun {
        angle,
        flip_p,
        u_init: u,
        stream,
        clean,
        observed,
    })
}

/// Partition labels along a rotation orbit.
///
/// Positions are `frac(u + k * theta)` for float angles (one rounding per
/// step, no accumulated drift) and exact integer phases for rational angles.
pub fn rotation_labels(angle: Angle, u: f64, partition: &Partition, n: usize) -> Result<Vec<u8>> {
    if !(0.0..1.0).contains(&u) {
        return Err(Error::invalid("start point", format!("{u} outside [0, 1)")));
    }
    if n == 0 {
        return Err(Error::invalid("orbit length", "must be positive"));
    }
    match angle {
        Angle::Float(a) => (0..n)
            .map(|k| partition.cell_of(frac(u + (k as f64) * a)))
            .collect(),
        Angle::Rational { num, den } => (0..n as u64)
            .map(|k| partition.cell_of(crate::dynsys::rational_advance(u, num, den, k)))
            .collect(),
    }
}

/// Fraction of positions whose label disagrees with the observed word.
pub fn hamming_risk(partition: &Partition, theta: f64, u: f64, observed: &[u8]) -> Result<f64> {
    if observed.is_empty() {
        return Err(Error::WindowTooShort {
            have: 0,
            why: "risk of an empty word".into(),
        });
    }
    let c = count_mismatches(theta, u, partition, observed)?;
    Ok(c as f64 / observed.len() as f64)
}

fn count_mismatches(theta: f64, u: f64, partition: &Partition, ys: &[u8]) -> Result<u64> {
    let halves = partition.is_halves();
    let mut c = 0u64;
    for (k, &y) in ys.iter().enumerate() {
        let x = frac(u + (k as f64) * theta);
        let cell = if halves {
            (x >= 0.5) as u8
        } else {
            partition.cell_of(x)?
        };
        c += (cell != y) as u64;
    }
    Ok(c)
}

/// Result of a risk minimization over the search space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaEstimate {
    pub theta: f64,
    pub u: f64,
    pub risk: f64,
}

/// Minimize the empirical mismatch rate over the family's grids.
///
/// Runs the coarse grid scan plus one refinement round: a theta ladder 100x
/// finer than the grid step around the coarse argmin, then a start-point
/// ladder 100x finer around the best start for the refined theta. The
/// returned risk is recomputed directly at the winning pair.
pub fn estimate_theta(family: &RotationFamily, observed: &[u8]) -> Result<ThetaEstimate> {
    grid_risk_scan(
        &family.theta_grid,
        &family.u_grid,
        &family.partition,
        observed,
        true,
    )
}

/// Estimates along strictly increasing prefixes of one observed word.
pub fn estimate_trace(
    family: &RotationFamily,
    observed: &[u8],
    schedule: &[usize],
) -> Result<Vec<(usize, ThetaEstimate)>> {
    if schedule.is_empty()
        || schedule[0] == 0
        || schedule.windows(2).any(|w| w[0] >= w[1])
        || *schedule.last().unwrap() > observed.len()
    {
        return Err(Error::BadSchedule);
    }
    schedule
        .iter()
        .map(|&n| Ok((n, estimate_theta(family, &observed[..n])?)))
        .collect()
}

/// Lexicographic order on (mismatch count, theta, start point).
fn lex_better(a: (u64, f64, f64), b: (u64, f64, f64)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && (a.1 < b.1 || (a.1 == b.1 && a.2 < b.2)))
}

/// Shared scan kernel behind `estimate_theta` and fiber-product tracking.
pub(crate) fn grid_risk_scan(
    theta_grid: &Grid,
    u_grid: &Grid,
    partition: &Partition,
    labels: &[u8],
    refine: bool,
) -> Result<ThetaEstimate> {
    if labels.is_empty() {
        return Err(Error::WindowTooShort {
            have: 0,
            why: "scan of an empty word".into(),
        });
    }
    let cells = partition.cell_count() as u8;
    if let Some(&bad) = labels.iter().find(|&&y| y >= cells) {
        return Err(Error::invalid(
            "observed word",
            format!("label {bad} outside the partition's {cells} cells"),
        ));
    }
    if u_grid.min() < 0.0 || u_grid.max() >= 1.0 {
        return Err(Error::invalid("start point grid", "must lie inside [0, 1)"));
    }
    let n = labels.len();

    // shortlist thetas on a prefix, then rank the survivors at full length;
    // counts are integers, so the ranking is exact and platform independent
    let prefix = n.min(SHORTLIST_PREFIX);
    let prefix_counts: Vec<(u64, f64)> = (0..theta_grid.len())
        .into_par_iter()
        .map(|i| sweep_theta(theta_grid.point(i), u_grid, partition, &labels[..prefix]))
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..theta_grid.len()).collect();
    order.sort_by_key(|&i| (prefix_counts[i].0, i));
    order.truncate(SHORTLIST_KEEP.min(theta_grid.len()));
    order.sort_unstable();

    let full: Vec<(u64, f64)> = if prefix == n {
        order.iter().map(|&i| prefix_counts[i]).collect()
    } else {
        order
            .par_iter()
            .map(|&i| sweep_theta(theta_grid.point(i), u_grid, partition, labels))
            .collect::<Result<_>>()?
    };
    let mut best = (u64::MAX, f64::INFINITY, f64::INFINITY);
    for (pos, &i) in order.iter().enumerate() {
        let cand = (full[pos].0, theta_grid.point(i), full[pos].1);
        if lex_better(cand, best) {
            best = cand;
        }
    }

    if refine {
        // theta ladder around the coarse argmin, full u grid per rung
        let ladder = crate::tracking::refine_points(
            best.1,
            theta_grid.step(),
            theta_grid.min(),
            theta_grid.max(),
        );
        let rung_counts: Vec<(u64, f64)> = ladder
            .par_iter()
            .map(|&th| sweep_theta(th, u_grid, partition, labels))
            .collect::<Result<_>>()?;
        for (&th, &(c, u)) in ladder.iter().zip(&rung_counts) {
            if lex_better((c, th, u), best) {
                best = (c, th, u);
            }
        }
        // start-point ladder at the refined theta
        for u in crate::tracking::refine_points_wrapped(best.2, u_grid.step()) {
            let c = count_mismatches(best.1, u, partition, labels)?;
            if lex_better((c, best.1, u), best) {
                best = (c, best.1, u);
            }
        }
    }

    // report the risk as directly counted at the winner, so it agrees with
    // `hamming_risk` at the returned pair
    let final_count = count_mismatches(best.1, best.2, partition, labels)?;
    Ok(ThetaEstimate {
        theta: best.1,
        u: best.2,
        risk: final_count as f64 / n as f64,
    })
}

/// Exact mismatch counts along one theta, minimized over the start grid.
///
/// The count as a function of the start point is piecewise constant: it
/// changes only at start points where some orbit position crosses a cell
/// boundary. One pass over the window counts mismatches at the first grid
/// point directly and banks each crossing into the grid interval it lands
/// in; prefix sums then read off every grid point without re-walking the
/// orbit. Ties go to the smallest start point.
fn sweep_theta(
    theta: f64,
    u_grid: &Grid,
    partition: &Partition,
    ys: &[u8],
) -> Result<(u64, f64)> {
    let cells = partition.cells();
    let m = cells.len();
    let halves = partition.is_halves();
    let u0 = u_grid.min();
    let count = u_grid.len();
    let mut delta = vec![0i64; count];
    let mut base: i64 = 0;
    for (k, &y) in ys.iter().enumerate() {
        let t = (k as f64) * theta;
        let x = frac(u0 + t);
        let cell = if halves {
            (x >= 0.5) as u8
        } else {
            partition.cell_of(x)?
        };
        base += (cell != y) as i64;
        // sweeping u upward moves the orbit point rightward; it enters cell
        // i exactly when u crosses frac(lo_i - t)
        for (i, &(lo, _)) in cells.iter().enumerate() {
            let prev = if i == 0 { m - 1 } else { i - 1 };
            let dm = ((i as u8 != y) as i64) - ((prev as u8 != y) as i64);
            if dm == 0 {
                continue;
            }
            let b = frac_signed(lo - t);
            let j = crossing_bucket(u_grid, b, t, i as u8, prev as u8, partition, halves)?;
            if j == 0 {
                continue; // already reflected in the base count
            }
            if j < count {
                delta[j] += dm;
            }
        }
    }
    let mut cur = base;
    let mut best = (cur, 0usize);
    for (j, &d) in delta.iter().enumerate().skip(1) {
        cur += d;
        debug_assert!(cur >= 0, "mismatch count went negative");
        if cur < best.0 {
            best = (cur, j);
        }
    }
    Ok((best.0.max(0) as u64, u_grid.point(best.1)))
}

/// First grid index at which the direct orbit evaluation shows the step past
/// the boundary, having entered cell `entered` from cell `left`.
///
/// The crossing point `b` and the direct comparison `frac(u + t)` against the
/// boundary each carry rounding error up to a few ulps of the phase `t`, so
/// when a grid point falls inside that window the two can disagree about the
/// side it is on. The direct comparison is what `hamming_risk` computes, so
/// inside the window the bucket defers to it; outside, both agree and no
/// orbit evaluation is spent.
#[allow(clippy::too_many_arguments)]
fn crossing_bucket(
    grid: &Grid,
    b: f64,
    t: f64,
    entered: u8,
    left: u8,
    partition: &Partition,
    halves: bool,
) -> Result<usize> {
    let count = grid.len();
    let mut j = bucket_index(grid, b);
    let seam = 8.0 * f64::EPSILON * (t.abs() + 1.0);
    let cell_at = |u: f64| -> Result<u8> {
        let x = frac(u + t);
        if halves {
            Ok((x >= 0.5) as u8)
        } else {
            partition.cell_of(x)
        }
    };
    while j > 0 && b - grid.point(j - 1) <= seam && cell_at(grid.point(j - 1))? == entered {
        j -= 1;
    }
    while j < count && grid.point(j) - b <= seam && cell_at(grid.point(j))? == left {
        j += 1;
    }
    Ok(j)
}

/// Smallest grid index whose point is `>= b`, or `len` when none is.
fn bucket_index(grid: &Grid, b: f64) -> usize {
    let count = grid.len();
    let raw = ((b - grid.min()) / grid.step()).ceil();
    let mut j = if raw <= 0.0 {
        0
    } else if raw >= count as f64 {
        count
    } else {
        raw as usize
    };
    while j > 0 && grid.point(j - 1) >= b {
        j -= 1;
    }
    while j < count && grid.point(j) < b {
        j += 1;
    }
    j
}

/// Lower bound tying the noisy mismatch rate of a probe theta to its clean
/// rate: `noisy >= p + (1 - 2p) * clean`, both sides minimized over the
/// start grid against the same run.
#[derive(Debug, Clone, Copy)]
pub struct NoiseFloorReport {
    pub theta_probe: f64,
    pub noisy_risk: f64,
    pub clean_risk: f64,
    pub floor: f64,
    pub slack: f64,
    pub holds: bool,
}

pub fn noise_floor_check(
    family: &RotationFamily,
    run: &NoisyLabelRun,
    theta_probe: f64,
    tol: f64,
) -> Result<NoiseFloorReport> {
    if !(0.0..=0.5).contains(&theta_probe) {
        return Err(Error::invalid("probe theta", "must lie inside [0, 1/2]"));
    }
    if tol < 0.0 {
        return Err(Error::invalid("tolerance", "must be nonnegative"));
    }
    let n = run.observed.len() as f64;
    let (c_noisy, _) = sweep_theta(theta_probe, &family.u_grid, &family.partition, &run.observed)?;
    let (c_clean, _) = sweep_theta(theta_probe, &family.u_grid, &family.partition, &run.clean)?;
    let p = run.flip_p;
    let noisy_risk = c_noisy as f64 / n;
    let clean_risk = c_clean as f64 / n;
    let floor = p + (1.0 - 2.0 * p) * clean_risk;
    let slack = noisy_risk - floor;
    Ok(NoiseFloorReport {
        theta_probe,
        noisy_risk,
        clean_risk,
        floor,
        slack,
        holds: slack >= -tol,
    })
}

#[cfg(test)]
mod tests;
