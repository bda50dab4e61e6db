//! Empirical tracking: how closely can a reference orbit shadow an observed
//! window, and which orbit does it best?
//!
//! The central quantity is the windowed tracking cost
//! `min over x of (1/n) * sum_k c(S^k x, y_k)`,
//! minimized over a candidate set that depends on the reference:
//!
//! - subshifts: every admissible word over live symbols, minimized exactly by
//!   dynamic programming (or by explicit enumeration in the diagnostics);
//! - circle rotations: a uniform start-point grid plus one refinement round;
//! - parameter grids: the grid itself plus one refinement round;
//! - fiber products: the parameter grid times the start-point grid, with the
//!   parameter coordinate refined.
//!
//! Ties are always broken toward the lexicographically smallest candidate, so
//! results are deterministic and reproducible across thread counts.

mod dp;
mod exhaustive;

pub use exhaustive::{superadditivity_check, SuperadditivityReport};

use crate::dynsys::{
    frac, Angle, CostFunction, Grid, ObservedWindow, SystemState, TopologicalSystem,
};
use crate::error::{Error, Result};
use crate::quantident;

/// A tracking instance: reference system plus per-step cost.
#[derive(Debug, Clone)]
pub struct TrackingProblem {
    pub reference: TopologicalSystem,
    pub cost: CostFunction,
}

/// Knobs for candidate generation.
#[derive(Debug, Clone, Copy)]
pub struct TrackingOptions {
    /// Start-point grid spacing for circle references.
    pub circle_resolution: f64,
    /// Run the local refinement round after the coarse grid pass.
    pub refine: bool,
}

impl Default for TrackingOptions {
    fn default() -> Self {
        TrackingOptions {
            circle_resolution: 1e-3,
            refine: true,
        }
    }
}

/// Outcome of one tracking minimization.
///
/// `argmin` is `None` exactly when every candidate had infinite cost; the
/// value is then `+inf` and the instance is reported as infeasible rather
/// than failing.
#[derive(Debug, Clone)]
pub struct TrackingResult {
    pub n: usize,
    pub value: f64,
    pub argmin: Option<SystemState>,
}

impl TrackingResult {
    pub fn is_infeasible(&self) -> bool {
        self.argmin.is_none()
    }

    /// Identifier of the minimizing candidate for trace output.
    pub fn argmin_id(&self) -> String {
        match &self.argmin {
            Some(s) => s.id_string(),
            None => "infeasible".to_string(),
        }
    }
}

/// Projections from minimizing states to scalar parameter estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamProjection {
    /// The frozen parameter coordinate of `Param` and `Fiber` states.
    Theta,
}

/// Apply a projection to the minimizer, if there is one to project.
pub fn phi_estimate(result: &TrackingResult, phi: ParamProjection) -> Option<f64> {
    match (phi, result.argmin.as_ref()?) {
        (ParamProjection::Theta, SystemState::Param(t)) => Some(*t),
        (ParamProjection::Theta, SystemState::Fiber { theta, .. }) => Some(*theta),
        _ => None,
    }
}

/// Mean cost of tracking the window from the given starting state.
pub fn empirical_cost(
    problem: &TrackingProblem,
    x0: &SystemState,
    window: &ObservedWindow,
) -> Result<f64> {
    Ok(window_cost_sum(problem, x0, window)? / window.len() as f64)
}

/// Unnormalized window cost; the building block for superadditivity checks.
pub fn window_cost_sum(
    problem: &TrackingProblem,
    x0: &SystemState,
    window: &ObservedWindow,
) -> Result<f64> {
    if window.is_empty() {
        return Err(Error::WindowTooShort {
            have: 0,
            why: "empty observation window".into(),
        });
    }
    problem.reference.validate_state(x0)?;
    let n = window.len();
    let cost = &problem.cost;
    let mut sum = 0.0f64;
    match (&problem.reference, x0) {
        (TopologicalSystem::CircleRotation { angle }, SystemState::Circle { x, x0: anchor, step }) => {
            match *angle {
                Angle::Float(a) => {
                    let mut pos = *x;
                    for k in 0..n {
                        sum += step_cost_real(cost, pos, window, k)?;
                        pos = frac(pos + a);
                    }
                }
                Angle::Rational { num, den } => {
                    for k in 0..n {
                        let pos = crate::dynsys::rational_advance(*anchor, num, den, step + k as u64);
                        sum += step_cost_real(cost, pos, window, k)?;
                    }
                }
            }
        }
        (TopologicalSystem::SubshiftSft { .. }, SystemState::Word { symbols, pos, periodic }) => {
            let len = symbols.len();
            if !*periodic && len - pos < n {
                return Err(Error::WindowTooShort {
                    have: len - pos,
                    why: format!("finite word cannot cover a window of length {n}"),
                });
            }
            for k in 0..n {
                let s = symbols[(pos + k) % len];
                sum += step_cost_symbol(cost, s, window, k)?;
            }
        }
        (TopologicalSystem::IdentityOnParams { .. }, SystemState::Param(t)) => {
            for k in 0..n {
                sum += step_cost_real(cost, *t, window, k)?;
            }
        }
        (TopologicalSystem::FiberProduct { .. }, SystemState::Fiber { labels, pos, .. }) => {
            if labels.len() - pos < n {
                return Err(Error::WindowTooShort {
                    have: labels.len() - pos,
                    why: format!("fiber label word cannot cover a window of length {n}"),
                });
            }
            for k in 0..n {
                sum += step_cost_symbol(cost, labels[pos + k], window, k)?;
            }
        }
        _ => return Err(Error::StateMismatch("state kind does not match system kind".into())),
    }
    Ok(sum)
}

#[inline]
fn step_cost_real(cost: &CostFunction, x: f64, window: &ObservedWindow, k: usize) -> Result<f64> {
    match window {
        ObservedWindow::Symbols(ys) => cost.real_symbol(x, ys[k]),
        ObservedWindow::Reals(ys) => cost.real_real(x, ys[k]),
    }
}

#[inline]
fn step_cost_symbol(cost: &CostFunction, s: u8, window: &ObservedWindow, k: usize) -> Result<f64> {
    match window {
        ObservedWindow::Symbols(ys) => cost.symbol_symbol(s, ys[k]),
        ObservedWindow::Reals(ys) => cost.symbol_real(s, ys[k]),
    }
}

/// Exact minimizer of the mean tracking cost over the candidate set.
pub fn optimal_tracking(
    problem: &TrackingProblem,
    window: &ObservedWindow,
    opts: &TrackingOptions,
) -> Result<TrackingResult> {
    if window.is_empty() {
        return Err(Error::WindowTooShort {
            have: 0,
            why: "empty observation window".into(),
        });
    }
    let n = window.len();
    match &problem.reference {
        TopologicalSystem::SubshiftSft { graph } => {
            let (sum, word) = dp::min_sum_word(graph, &problem.cost, window)?;
            if sum.is_infinite() {
                return Ok(TrackingResult {
                    n,
                    value: f64::INFINITY,
                    argmin: None,
                });
            }
            Ok(TrackingResult {
                n,
                value: sum / n as f64,
                argmin: Some(SystemState::word(word, false)?),
            })
        }
        TopologicalSystem::CircleRotation { .. } => circle_tracking(problem, window, opts),
        TopologicalSystem::IdentityOnParams { grid } => {
            param_tracking(problem, *grid, window, opts)
        }
        TopologicalSystem::FiberProduct {
            theta_grid,
            u_grid,
            partition,
        } => {
            let labels = match window {
                ObservedWindow::Symbols(ys) => ys.clone(),
                ObservedWindow::Reals(ys) => partition.quantize(ys)?,
            };
            let scan = quantident::grid_risk_scan(theta_grid, u_grid, partition, &labels, opts.refine)?;
            let label_word =
                quantident::rotation_labels(Angle::Float(scan.theta), scan.u, partition, n)?;
            Ok(TrackingResult {
                n,
                value: scan.risk,
                argmin: Some(SystemState::Fiber {
                    theta: scan.theta,
                    labels: label_word,
                    pos: 0,
                }),
            })
        }
    }
}

/// Refinement points `center + i*(step/100)`, `i = -100..=100`, kept inside
/// `[lo, hi]`. The exact expression matters: every module that refines a
/// parameter grid uses this one, so their candidate values are bit-identical.
pub(crate) fn refine_points(center: f64, step: f64, lo: f64, hi: f64) -> Vec<f64> {
    let fine = step / 100.0;
    (-100i32..=100)
        .map(|i| center + (i as f64) * fine)
        .filter(|&t| t >= lo && t <= hi)
        .collect()
}

/// Refinement points on the circle: same ladder, wrapped into `[0, 1)`.
pub(crate) fn refine_points_wrapped(center: f64, step: f64) -> Vec<f64> {
    let fine = step / 100.0;
    (-100i32..=100)
        .map(|i| crate::dynsys::frac_signed(center + (i as f64) * fine))
        .collect()
}

fn circle_tracking(
    problem: &TrackingProblem,
    window: &ObservedWindow,
    opts: &TrackingOptions,
) -> Result<TrackingResult> {
    let res = opts.circle_resolution;
    if !(res > 0.0 && res < 1.0) {
        return Err(Error::invalid("circle resolution", format!("{res} outside (0, 1)")));
    }
    let mut count = (1.0 / res).round() as usize;
    while count > 1 && (count - 1) as f64 * res >= 1.0 {
        count -= 1;
    }
    let grid = Grid::new(0.0, res, count)?;
    let coarse = best_circle_start(problem, window, grid.points())?;
    let best = if opts.refine {
        let refined = best_circle_start(
            problem,
            window,
            refine_points_wrapped(coarse.1, res).into_iter(),
        )?;
        min_scored(coarse, refined)
    } else {
        coarse
    };
    let n = window.len();
    if best.0.is_infinite() && best.0 > 0.0 {
        return Ok(TrackingResult { n, value: f64::INFINITY, argmin: None });
    }
    Ok(TrackingResult {
        n,
        value: best.0 / n as f64,
        argmin: Some(SystemState::circle(best.1)?),
    })
}

/// Smallest (score, key) pair; ties go to the smaller key.
fn min_scored(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

fn best_circle_start(
    problem: &TrackingProblem,
    window: &ObservedWindow,
    starts: impl Iterator<Item = f64>,
) -> Result<(f64, f64)> {
    let mut best = (f64::INFINITY, f64::INFINITY);
    for u in starts {
        let x0 = SystemState::circle(u)?;
        let sum = window_cost_sum(problem, &x0, window)?;
        best = min_scored(best, (sum, u));
    }
    if best.1.is_infinite() {
        return Err(Error::invalid("circle grid", "no candidate start points"));
    }
    Ok(best)
}

fn param_tracking(
    problem: &TrackingProblem,
    grid: Grid,
    window: &ObservedWindow,
    opts: &TrackingOptions,
) -> Result<TrackingResult> {
    let scan = |points: &mut dyn Iterator<Item = f64>| -> Result<(f64, f64)> {
        let mut best = (f64::INFINITY, f64::INFINITY);
        for t in points {
            let sum = window_cost_sum(problem, &SystemState::Param(t), window)?;
            best = min_scored(best, (sum, t));
        }
        Ok(best)
    };
    let coarse = scan(&mut grid.points())?;
    let best = if opts.refine && coarse.1.is_finite() {
        let refined = scan(
            &mut refine_points(coarse.1, grid.step(), grid.min(), grid.max()).into_iter(),
        )?;
        min_scored(coarse, refined)
    } else {
        coarse
    };
    let n = window.len();
    if !best.1.is_finite() || (best.0.is_infinite() && best.0 > 0.0) {
        return Ok(TrackingResult { n, value: f64::INFINITY, argmin: None });
    }
    Ok(TrackingResult {
        n,
        value: best.0 / n as f64,
        argmin: Some(SystemState::Param(best.1)),
    })
}

/// One row of an estimator trace.
#[derive(Debug, Clone)]
pub struct TraceRow {
    pub n: usize,
    pub value: f64,
    pub theta_hat: Option<f64>,
    pub argmin_id: String,
}

/// Tracking results along a schedule of window lengths.
#[derive(Debug, Clone)]
pub struct EstimatorTrace {
    pub rows: Vec<TraceRow>,
}

/// Track growing prefixes of one sampled window.
///
/// The whole window is sampled once under `stream`; row `i` tracks the prefix
/// of length `schedule[i]`. The schedule must be strictly increasing.
pub fn track_limit_estimate(
    problem: &TrackingProblem,
    source: &crate::dynsys::ObservationSource,
    schedule: &[usize],
    stream: crate::dynsys::RngStream,
    opts: &TrackingOptions,
) -> Result<EstimatorTrace> {
    if schedule.is_empty() || schedule.windows(2).any(|w| w[0] >= w[1]) || schedule[0] == 0 {
        return Err(Error::BadSchedule);
    }
    let full = source.sample(*schedule.last().unwrap(), stream)?;
    let mut rows = Vec::with_capacity(schedule.len());
    for &n in schedule {
        let result = optimal_tracking(problem, &full.slice(0, n), opts)?;
        rows.push(TraceRow {
            n,
            value: result.value,
            theta_hat: phi_estimate(&result, ParamProjection::Theta),
            argmin_id: result.argmin_id(),
        });
    }
    Ok(EstimatorTrace { rows })
}

/// Fixed-width float formatting with 17 significant digits; round-trips f64.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{:.16e}", x)
    }
}

#[cfg(test)]
mod tests;
