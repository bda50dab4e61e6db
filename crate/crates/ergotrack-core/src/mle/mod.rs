//! Grid maximum likelihood from ergodic samples.
//!
//! The estimator maximizes the empirical mean log density over a finite
//! parameter grid, then over one local refinement ladder around the coarse
//! winner. Ties break toward the smaller parameter.
//!
//! Scores here are exact negations of the likelihood tracking cost and the
//! candidate ladders are shared, so the argmax below and the tracking argmin
//! over the same grid agree bit for bit:
//!
//! - `empirical_loglik` averages `log p_theta(u)` over a window;
//! - `mle_estimate` scans the grid, `mle_trace` does so along a schedule;
//! - `target_set` names the population optimum for the shipped families.

use crate::dynsys::{log_density, DensityKind, Grid, ObservedWindow};
use crate::error::{Error, Result};
use crate::tracking;

/// A parametric density family over a finite grid of candidate parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityFamily {
    pub kind: DensityKind,
    pub theta_grid: Grid,
}

impl DensityFamily {
    pub fn new(kind: DensityKind, theta_grid: Grid) -> Result<Self> {
        if kind == DensityKind::Bernoulli && (theta_grid.min() < 0.0 || theta_grid.max() > 1.0) {
            return Err(Error::invalid(
                "parameter grid",
                format!(
                    "Bernoulli parameters live in [0, 1], grid spans [{}, {}]",
                    theta_grid.min(),
                    theta_grid.max()
                ),
            ));
        }
        Ok(DensityFamily { kind, theta_grid })
    }
}

/// One maximum likelihood fit.
///
/// `theta` is `None` exactly when every candidate put zero density on some
/// observation; the mean log likelihood is then `-inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct MleResult {
    pub n: usize,
    pub theta: Option<f64>,
    pub loglik: f64,
}

/// Mean log density of the window under parameter `theta`. A vanishing
/// density makes the result `-inf`; it is not an error.
pub fn empirical_loglik(family: &DensityFamily, theta: f64, window: &ObservedWindow) -> Result<f64> {
    if window.is_empty() {
        return Err(Error::WindowTooShort {
            have: 0,
            why: "empty observation window".into(),
        });
    }
    Ok(loglik_sum(family.kind, theta, window)? / window.len() as f64)
}

fn loglik_sum(kind: DensityKind, theta: f64, window: &ObservedWindow) -> Result<f64> {
    let mut sum = 0.0f64;
    match window {
        ObservedWindow::Symbols(ys) => {
            for &b in ys {
                sum += log_density(kind, theta, b as f64)?;
            }
        }
        ObservedWindow::Reals(ys) => {
            for &u in ys {
                sum += log_density(kind, theta, u)?;
            }
        }
    }
    Ok(sum)
}

/// Mirror of the tracking tie-break: the larger score wins, equal scores go
/// to the smaller parameter. Scanning candidates in increasing order with
/// this fold gives the same winner as the cost-minimizing fold does on the
/// negated scores.
fn max_scored(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Exact argmax of the empirical log likelihood over the grid, with one
/// refinement ladder around the coarse winner when `refine` is set.
pub fn mle_estimate(family: &DensityFamily, window: &ObservedWindow, refine: bool) -> Result<MleResult> {
    if window.is_empty() {
        return Err(Error::WindowTooShort {
            have: 0,
            why: "empty observation window".into(),
        });
    }
    let grid = family.theta_grid;
    let scan = |points: &mut dyn Iterator<Item = f64>| -> Result<(f64, f64)> {
        let mut best = (f64::NEG_INFINITY, f64::INFINITY);
        for t in points {
            let s = loglik_sum(family.kind, t, window)?;
            best = max_scored(best, (s, t));
        }
        Ok(best)
    };
    let coarse = scan(&mut grid.points())?;
    let best = if refine && coarse.1.is_finite() {
        let ladder = tracking::refine_points(coarse.1, grid.step(), grid.min(), grid.max());
        let refined = scan(&mut ladder.into_iter())?;
        max_scored(coarse, refined)
    } else {
        coarse
    };
    let n = window.len();
    if !best.1.is_finite() || (best.0.is_infinite() && best.0 < 0.0) {
        return Ok(MleResult {
            n,
            theta: None,
            loglik: f64::NEG_INFINITY,
        });
    }
    Ok(MleResult {
        n,
        theta: Some(best.1),
        loglik: best.0 / n as f64,
    })
}

/// Fits along a strictly increasing schedule of prefix lengths.
pub fn mle_trace(
    family: &DensityFamily,
    window: &ObservedWindow,
    schedule: &[usize],
    refine: bool,
) -> Result<Vec<MleResult>> {
    if schedule.is_empty()
        || schedule[0] == 0
        || schedule.windows(2).any(|w| w[0] >= w[1])
        || *schedule.last().unwrap() > window.len()
    {
        return Err(Error::BadSchedule);
    }
    schedule
        .iter()
        .map(|&n| mle_estimate(family, &window.slice(0, n), refine))
        .collect()
}

/// The population-optimal parameter for a marginal with the given mean.
///
/// Both shipped families peak their expected log density at the marginal
/// mean, so the target is that mean clamped to the parameter interval.
pub fn target_set(family: &DensityFamily, marginal_mean: f64) -> Result<f64> {
    if !marginal_mean.is_finite() {
        return Err(Error::invalid("marginal mean", "must be finite"));
    }
    if family.kind == DensityKind::Bernoulli && !(0.0..=1.0).contains(&marginal_mean) {
        return Err(Error::ProbabilityRange {
            what: "marginal mean",
            value: marginal_mean,
        });
    }
    Ok(marginal_mean.clamp(family.theta_grid.min(), family.theta_grid.max()))
}
