//! Reference systems, observation sources, and the cost functions that
//! connect them.
//!
//! Conventions used throughout:
//!
//! - the circle is `[0, 1)` and `frac(x) = x - floor(x)`;
//! - interval partitions are half-open, `[a, b)`, and cover the circle;
//! - rotation angles live in `[0, 1/2]` and may be exact rationals;
//! - subshift states are finite words, extended by repetition when declared
//!   periodic;
//! - all sampling is driven by `(seed, stream)` pairs and is reproducible
//!   across runs, thread counts, and machines with the same word size.

mod angle;
mod cost;
mod grid;
mod partition;
mod rng;
mod sft;
mod source;
mod system;

pub use angle::Angle;
pub use cost::{log_density, CostFunction, DensityKind};
pub use grid::Grid;
pub use partition::Partition;
pub use rng::RngStream;
pub use sft::SftGraph;
pub use source::{ObservationSource, ObservedWindow};
pub use system::{SystemState, TopologicalSystem};

/// Fractional part mapped to `[0, 1)`; exact for inputs in `[0, 2)`.
#[inline]
pub fn frac(x: f64) -> f64 {
    x - x.floor()
}

/// Fractional part of possibly negative inputs, mapped to `[0, 1)`.
/// `rem_euclid` can round up to exactly 1.0 for tiny negative inputs; that
/// edge is folded back to 0.0.
#[inline]
pub fn frac_signed(x: f64) -> f64 {
    let v = x.rem_euclid(1.0);
    if v >= 1.0 {
        0.0
    } else {
        v
    }
}

pub(crate) use source::{SUB_INIT, SUB_NOISE};
pub(crate) use system::rational_advance;
