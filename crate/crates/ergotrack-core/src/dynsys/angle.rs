//! Rotation angles, float or exact rational.

use crate::error::{Error, Result};

/// A rotation angle in `[0, 1/2]`.
///
/// The rational form exists so tests can pin exact orbits: stepping a
/// rational angle is done in integer arithmetic and never drifts, while a
/// float angle advances by repeated addition of the same `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Float(f64),
    /// `num / den`, not necessarily reduced; `den > 0`.
    Rational { num: u64, den: u64 },
}

impl Angle {
    pub fn float(a: f64) -> Result<Self> {
        if !a.is_finite() || !(0.0..=0.5).contains(&a) {
            return Err(Error::invalid("angle", format!("{a} outside [0, 1/2]")));
        }
        Ok(Angle::Float(a))
    }

    pub fn rational(num: u64, den: u64) -> Result<Self> {
        if den == 0 || 2 * num > den {
            return Err(Error::invalid("angle", format!("{num}/{den} outside [0, 1/2]")));
        }
        Ok(Angle::Rational { num, den })
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Angle::Float(a) => a,
            Angle::Rational { num, den } => num as f64 / den as f64,
        }
    }

    /// Orbit phase advance after `k` steps, as an exact residue for rational
    /// angles: returns `(k * num) mod den` over denominator `den`.
    pub(crate) fn rational_phase(num: u64, den: u64, k: u64) -> u64 {
        // (k mod den) * (num mod den) stays below 2^64 for den <= 2^32.
        let k = k % den;
        let n = num % den;
        if den <= u32::MAX as u64 {
            (k * n) % den
        } else {
            ((k as u128 * n as u128) % den as u128) as u64
        }
    }
}
