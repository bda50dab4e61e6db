//! Reference systems and their states.

use super::{frac, Angle, Grid, Partition, SftGraph};
use crate::error::{Error, Result};
use std::fmt;

/// A compact reference system whose orbits are compared against observation
/// windows.
#[derive(Debug, Clone, PartialEq)]
pub enum TopologicalSystem {
    /// Rotation of the circle `[0, 1)` by a fixed angle.
    CircleRotation { angle: Angle },
    /// Left shift on a vertex subshift of finite type.
    SubshiftSft { graph: SftGraph },
    /// The identity map on a parameter grid; orbits are constant.
    IdentityOnParams { grid: Grid },
    /// Parameter grid times label shift: states carry a frozen parameter and
    /// a label word produced by the rotation with that parameter, quantized
    /// by `partition`, started from a point of `u_grid`.
    FiberProduct {
        theta_grid: Grid,
        u_grid: Grid,
        partition: Partition,
    },
}

/// A point of a reference system.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemState {
    /// A circle point in `[0, 1)`. `x0` and `step` remember where the orbit
    /// started and how far it has advanced: under a rational angle the
    /// current position is recomputed from `x0` in integer phase arithmetic,
    /// so long orbits never drift. Under a float angle `x` advances by
    /// repeated application of the map and `x0`/`step` are bookkeeping only.
    Circle { x: f64, x0: f64, step: u64 },
    /// A subshift point given by a finite word; `periodic` words repeat
    /// forever, plain words only cover a window up to their length.
    Word {
        symbols: Vec<u8>,
        pos: usize,
        periodic: bool,
    },
    /// A frozen parameter.
    Param(f64),
    /// A fiber point: frozen parameter plus a label word being shifted.
    Fiber {
        theta: f64,
        labels: Vec<u8>,
        pos: usize,
    },
}

impl SystemState {
    pub fn circle(x: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::invalid("circle point", format!("{x} outside [0, 1)")));
        }
        Ok(SystemState::Circle { x, x0: x, step: 0 })
    }

    pub fn word(symbols: Vec<u8>, periodic: bool) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::invalid("word", "must be nonempty"));
        }
        Ok(SystemState::Word {
            symbols,
            pos: 0,
            periodic,
        })
    }

    /// Stable text form used in trace output.
    pub fn id_string(&self) -> String {
        match self {
            SystemState::Circle { x, .. } => format!("x={}", crate::tracking::fmt_f64(*x)),
            SystemState::Word { symbols, pos, periodic } => {
                let mut s = String::with_capacity(symbols.len() + 8);
                for &b in &symbols[*pos..] {
                    s.push(char::from_digit(b as u32, 36).unwrap_or('?'));
                }
                if *periodic {
                    // the state is the rotated cycle, not the suffix
                    for &b in &symbols[..*pos] {
                        s.push(char::from_digit(b as u32, 36).unwrap_or('?'));
                    }
                    format!("w=({s})*")
                } else {
                    format!("w={s}")
                }
            }
            SystemState::Param(t) => format!("theta={}", crate::tracking::fmt_f64(*t)),
            SystemState::Fiber { theta, .. } => {
                format!("theta={}", crate::tracking::fmt_f64(*theta))
            }
        }
    }
}

impl fmt::Display for SystemState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id_string())
    }
}

impl TopologicalSystem {
    pub fn circle(angle: Angle) -> Self {
        TopologicalSystem::CircleRotation { angle }
    }

    pub fn subshift(graph: SftGraph) -> Self {
        TopologicalSystem::SubshiftSft { graph }
    }

    /// Check that a state is a valid point of this system.
    pub fn validate_state(&self, state: &SystemState) -> Result<()> {
        match (self, state) {
            (TopologicalSystem::CircleRotation { .. }, SystemState::Circle { x, .. }) => {
                if (0.0..1.0).contains(x) {
                    Ok(())
                } else {
                    Err(Error::invalid("circle point", format!("{x} outside [0, 1)")))
                }
            }
            (TopologicalSystem::SubshiftSft { graph }, SystemState::Word { symbols, pos, periodic }) => {
                if *pos >= symbols.len() {
                    return Err(Error::StateMismatch("word position past its end".into()));
                }
                // a shifted periodic word is a rotation of the same cycle, and
                // cycle admissibility does not depend on the rotation
                let ok = if *periodic {
                    graph.word_admissible(symbols, true)
                } else {
                    graph.word_admissible(&symbols[*pos..], false)
                };
                if ok {
                    Ok(())
                } else {
                    Err(Error::StateMismatch(format!(
                        "word {:?} is not admissible",
                        &symbols[*pos..]
                    )))
                }
            }
            (TopologicalSystem::IdentityOnParams { grid }, SystemState::Param(t)) => {
                if *t >= grid.min() - 1e-12 && *t <= grid.max() + 1e-12 {
                    Ok(())
                } else {
                    Err(Error::StateMismatch(format!("parameter {t} outside grid span")))
                }
            }
            (TopologicalSystem::FiberProduct { .. }, SystemState::Fiber { labels, pos, .. }) => {
                if pos < &labels.len() {
                    Ok(())
                } else {
                    Err(Error::StateMismatch("fiber label word exhausted".into()))
                }
            }
            _ => Err(Error::StateMismatch(
                "state kind does not match system kind".into(),
            )),
        }
    }

    /// Apply the map once.
    pub fn step(&self, state: &SystemState) -> Result<SystemState> {
        self.validate_state(state)?;
        match (self, state) {
            (TopologicalSystem::CircleRotation { angle }, SystemState::Circle { x, x0, step }) => {
                let next = match *angle {
                    Angle::Float(a) => frac(x + a),
                    Angle::Rational { num, den } => rational_advance(*x0, num, den, step + 1),
                };
                Ok(SystemState::Circle {
                    x: next,
                    x0: *x0,
                    step: step + 1,
                })
            }
            (TopologicalSystem::SubshiftSft { .. }, SystemState::Word { symbols, pos, periodic }) => {
                if *periodic {
                    let mut next = pos + 1;
                    if next == symbols.len() {
                        next = 0;
                    }
                    Ok(SystemState::Word {
                        symbols: symbols.clone(),
                        pos: next,
                        periodic: true,
                    })
                } else if pos + 1 < symbols.len() {
                    Ok(SystemState::Word {
                        symbols: symbols.clone(),
                        pos: pos + 1,
                        periodic: false,
                    })
                } else {
                    Err(Error::WindowTooShort {
                        have: symbols.len(),
                        why: "finite word cannot shift past its end".into(),
                    })
                }
            }
            (TopologicalSystem::IdentityOnParams { .. }, SystemState::Param(t)) => {
                Ok(SystemState::Param(*t))
            }
            (TopologicalSystem::FiberProduct { .. }, SystemState::Fiber { theta, labels, pos }) => {
                if pos + 1 < labels.len() {
                    Ok(SystemState::Fiber {
                        theta: *theta,
                        labels: labels.clone(),
                        pos: pos + 1,
                    })
                } else {
                    Err(Error::WindowTooShort {
                        have: labels.len(),
                        why: "fiber label word cannot shift past its end".into(),
                    })
                }
            }
            _ => unreachable!("validate_state already checked the pairing"),
        }
    }

    /// The orbit segment `[x0, S x0, ..., S^{n-1} x0]`.
    ///
    /// Materializes full states and is meant for modest `n`; the tracking and
    /// identification paths walk orbits with specialized loops instead.
    pub fn iterate(&self, x0: &SystemState, n: usize) -> Result<Vec<SystemState>> {
        if n == 0 {
            return Err(Error::invalid("orbit length", "must be positive"));
        }
        self.validate_state(x0)?;
        let mut out = Vec::with_capacity(n);
        out.push(x0.clone());
        for _ in 1..n {
            let next = self.step(out.last().unwrap())?;
            out.push(next);
        }
        Ok(out)
    }
}

/// Position on the circle after `k` exact rational steps from `x0`:
/// one addition and one wrap, never an accumulated sum.
pub(crate) fn rational_advance(x0: f64, num: u64, den: u64, k: u64) -> f64 {
    let m = Angle::rational_phase(num, den, k);
    frac(x0 + m as f64 / den as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_orbit(angle: Angle, x0: f64, n: usize) -> Vec<f64> {
        let sys = TopologicalSystem::circle(angle);
        sys.iterate(&SystemState::circle(x0).unwrap(), n)
            .unwrap()
            .into_iter()
            .map(|s| match s {
                SystemState::Circle { x, .. } => x,
                _ => unreachable!(),
            })
            .collect()
    }

    #[test]
    fn quarter_turn_orbit_is_exact() {
        let orbit = circle_orbit(Angle::rational(1, 4).unwrap(), 0.0, 5);
        assert_eq!(orbit, vec![0.0, 0.25, 0.5, 0.75, 0.0]);
        // float mode agrees here because 0.25 is dyadic
        let orbit_f = circle_orbit(Angle::float(0.25).unwrap(), 0.0, 5);
        assert_eq!(orbit_f, orbit);
    }

    #[test]
    fn rational_orbit_does_not_drift() {
        // one third is not dyadic: naive repeated addition drifts, the
        // anchored rational step must return to the start exactly
        let orbit = circle_orbit(Angle::rational(1, 3).unwrap(), 0.125, 3001);
        assert_eq!(orbit[3000], 0.125);
        assert_eq!(orbit[1], frac(0.125 + 1.0 / 3.0));
    }

    #[test]
    fn float_step_wraps_into_unit_interval() {
        let orbit = circle_orbit(Angle::float(0.4999999999).unwrap(), 0.9999999, 1000);
        for x in orbit {
            assert!((0.0..1.0).contains(&x));
        }
    }

    #[test]
    fn periodic_word_shifts_cyclically() {
        let sys = TopologicalSystem::subshift(SftGraph::golden_mean());
        let x0 = SystemState::word(vec![0, 1], true).unwrap();
        let orbit = sys.iterate(&x0, 4).unwrap();
        let heads: Vec<u8> = orbit
            .iter()
            .map(|s| match s {
                SystemState::Word { symbols, pos, .. } => symbols[*pos],
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(heads, vec![0, 1, 0, 1]);
    }

    #[test]
    fn finite_word_cannot_overrun() {
        let sys = TopologicalSystem::subshift(SftGraph::golden_mean());
        let x0 = SystemState::word(vec![0, 0, 1], false).unwrap();
        assert!(sys.iterate(&x0, 3).is_ok());
        assert!(sys.iterate(&x0, 4).is_err());
    }

    #[test]
    fn inadmissible_words_are_rejected() {
        let sys = TopologicalSystem::subshift(SftGraph::golden_mean());
        let bad = SystemState::word(vec![1, 1], false).unwrap();
        assert!(sys.validate_state(&bad).is_err());
        // periodic wrap 1 -> 1 is rejected even though the word reads fine
        let bad_wrap = SystemState::word(vec![1, 0, 1], true).unwrap();
        assert!(sys.validate_state(&bad_wrap).is_err());
    }

    #[test]
    fn semigroup_law_on_the_circle() {
        // iterate(m+n) equals iterating the m-th state n more times
        let sys = TopologicalSystem::circle(Angle::float(0.2137).unwrap());
        let x0 = SystemState::circle(0.33).unwrap();
        let full = sys.iterate(&x0, 12).unwrap();
        let mid = full[5].clone();
        let tail = sys.iterate(&mid, 7).unwrap();
        assert_eq!(&full[5..], &tail[..]);
    }

    #[test]
    fn identity_on_params_is_constant() {
        let sys = TopologicalSystem::IdentityOnParams {
            grid: Grid::new(0.0, 0.1, 11).unwrap(),
        };
        let orbit = sys.iterate(&SystemState::Param(0.3), 5).unwrap();
        assert!(orbit.iter().all(|s| *s == SystemState::Param(0.3)));
    }
}
