//! Tracking of observed processes by dynamical reference systems.
//!
//! The crate is organized around one question: given a window of observations
//! from a stationary source, how well can a chosen reference system shadow it,
//! and what does the best shadow tell us about the source?
//!
//! - [`dynsys`]: reference systems (circle rotations, vertex subshifts,
//!   parameter grids and their fiber products), observation sources with
//!   seeded, splittable randomness, interval partitions, and cost functions.
//! - [`tracking`]: empirical tracking costs, exact minimizers over candidate
//!   sets, superadditivity diagnostics, and projected parameter estimates.
//! - [`joinlp`]: finite block-coupling linear programs whose optima
//!   lower-bound the asymptotic tracking cost, solved in exact rational
//!   arithmetic with an optional float fallback.
//! - [`quantident`]: identification of a rotation angle from quantized,
//!   possibly bit-flipped orbit labels, plus label-word complexity counts.
//! - [`mle`]: grid maximum-likelihood estimation under ergodic sampling,
//!   sharing its candidate enumeration with the tracking route.
//!
//! All randomness flows through [`RngStream`] values, so every sampled
//! artifact is reproducible from a `(seed, stream)` pair alone.

pub mod dynsys;
pub mod error;
pub mod joinlp;
pub mod mle;
pub mod quantident;
pub mod tracking;

pub use dynsys::{
    Angle, CostFunction, DensityKind, Grid, ObservationSource, ObservedWindow, Partition,
    RngStream, SftGraph, SystemState, TopologicalSystem,
};
pub use error::{Error, Result};
