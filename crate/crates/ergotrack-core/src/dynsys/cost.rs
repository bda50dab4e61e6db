//! Cost functions pairing reference observables with observations.
//!
//! A cost is evaluated on one time step: the left argument comes from the
//! reference orbit (a symbol or a real number, depending on the system), the
//! right one from the observed window. Infinite values are legal and mean
//! "this pairing is impossible"; they propagate through sums untouched.

use super::Partition;
use crate::error::{Error, Result};

/// Parametric density families for likelihood-type costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityKind {
    /// `p_theta(1) = theta`, `p_theta(0) = 1 - theta`, `theta` in `[0, 1]`.
    Bernoulli,
    /// Standard normal shifted by `theta`.
    GaussianLocation,
}

/// Log density `log p_theta(u)`; `-inf` where the density vanishes.
///
/// This is the single implementation shared by the likelihood cost and the
/// grid MLE, so the two routes agree bit for bit.
pub fn log_density(kind: DensityKind, theta: f64, u: f64) -> Result<f64> {
    match kind {
        DensityKind::Bernoulli => {
            if !(0.0..=1.0).contains(&theta) {
                return Err(Error::ProbabilityRange {
                    what: "Bernoulli parameter",
                    value: theta,
                });
            }
            if u == 1.0 {
                Ok(theta.ln())
            } else if u == 0.0 {
                Ok((1.0 - theta).ln())
            } else {
                Err(Error::WindowMismatch(format!(
                    "Bernoulli density needs 0/1 observations, got {u}"
                )))
            }
        }
        DensityKind::GaussianLocation => {
            let d = u - theta;
            Ok(-0.5 * (2.0 * std::f64::consts::PI).ln() - 0.5 * d * d)
        }
    }
}

/// A per-step cost function.
#[derive(Debug, Clone, PartialEq)]
pub enum CostFunction {
    /// 0/1 mismatch of labels. Real-valued arguments on either side are
    /// quantized by `partition` before comparison.
    HammingOnLabels { partition: Partition },
    /// `-log p_theta(u)` where the reference observable is the parameter.
    NegLogDensity { family: DensityKind },
    /// Explicit table `table[a][b]` over symbol pairs.
    Custom { table: Vec<Vec<f64>> },
}

impl CostFunction {
    /// Hamming cost with the standard binary partition.
    pub fn hamming() -> Self {
        CostFunction::HammingOnLabels {
            partition: Partition::halves(),
        }
    }

    pub fn custom(table: Vec<Vec<f64>>) -> Result<Self> {
        if table.is_empty() || table[0].is_empty() {
            return Err(Error::invalid("cost table", "must be nonempty"));
        }
        let w = table[0].len();
        if table.iter().any(|r| r.len() != w) {
            return Err(Error::invalid("cost table", "rows must have equal length"));
        }
        if table.iter().flatten().any(|c| c.is_nan()) {
            return Err(Error::invalid("cost table", "entries must not be NaN"));
        }
        Ok(CostFunction::Custom { table })
    }

    /// Largest finite absolute entry, when the cost is tabulated.
    pub fn dominator(&self) -> Option<f64> {
        match self {
            CostFunction::HammingOnLabels { .. } => Some(1.0),
            CostFunction::NegLogDensity { .. } => None,
            CostFunction::Custom { table } => table
                .iter()
                .flatten()
                .filter(|c| c.is_finite())
                .map(|c| c.abs())
                .fold(None, |m: Option<f64>, c| Some(m.map_or(c, |m| m.max(c)))),
        }
    }

    /// Cost of a symbol/symbol step.
    pub fn symbol_symbol(&self, a: u8, b: u8) -> Result<f64> {
        match self {
            CostFunction::HammingOnLabels { .. } => Ok((a != b) as u8 as f64),
            CostFunction::NegLogDensity { .. } => Err(Error::WindowMismatch(
                "likelihood cost pairs a parameter with an observation".into(),
            )),
            CostFunction::Custom { table } => table
                .get(a as usize)
                .and_then(|r| r.get(b as usize))
                .copied()
                .ok_or_else(|| {
                    Error::WindowMismatch(format!("symbol pair ({a}, {b}) outside cost table"))
                }),
        }
    }

    /// Cost of a real reference observable against a symbol observation.
    pub fn real_symbol(&self, x: f64, b: u8) -> Result<f64> {
        match self {
            CostFunction::HammingOnLabels { partition } => {
                Ok((partition.cell_of(x)? != b) as u8 as f64)
            }
            CostFunction::NegLogDensity { family } => {
                Ok(-log_density(*family, x, b as f64)?)
            }
            CostFunction::Custom { .. } => Err(Error::WindowMismatch(
                "tabulated cost needs a symbolic reference observable".into(),
            )),
        }
    }

    /// Cost of a real/real step.
    pub fn real_real(&self, x: f64, y: f64) -> Result<f64> {
        match self {
            CostFunction::HammingOnLabels { partition } => {
                Ok((partition.cell_of(x)? != partition.cell_of(y)?) as u8 as f64)
            }
            CostFunction::NegLogDensity { family } => Ok(-log_density(*family, x, y)?),
            CostFunction::Custom { .. } => Err(Error::WindowMismatch(
                "tabulated cost needs symbolic observations".into(),
            )),
        }
    }

    /// Cost of a symbolic reference observable against a real observation.
    pub fn symbol_real(&self, a: u8, y: f64) -> Result<f64> {
        match self {
            CostFunction::HammingOnLabels { partition } => {
                Ok((a != partition.cell_of(y)?) as u8 as f64)
            }
            _ => Err(Error::WindowMismatch(
                "only label costs compare symbols with real observations".into(),
            )),
        }
    }
}
