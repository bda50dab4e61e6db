//! Observation sources: stationary processes sampled into finite windows.

use super::system::rational_advance;
use super::{frac, Angle, Partition, RngStream};
use crate::error::{Error, Result};
use rand::Rng;

/// A sampled observation window: either symbols from a finite alphabet or
/// real values. Cost functions state which side they accept.
#[derive(Debug, Clone, PartialEq)]
pub enum ObservedWindow {
    Symbols(Vec<u8>),
    Reals(Vec<f64>),
}

impl ObservedWindow {
    pub fn len(&self) -> usize {
        match self {
            ObservedWindow::Symbols(v) => v.len(),
            ObservedWindow::Reals(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The window restricted to `[from, to)`.
    pub fn slice(&self, from: usize, to: usize) -> ObservedWindow {
        match self {
            ObservedWindow::Symbols(v) => ObservedWindow::Symbols(v[from..to].to_vec()),
            ObservedWindow::Reals(v) => ObservedWindow::Reals(v[from..to].to_vec()),
        }
    }

    /// View as symbols, if that is what the window holds.
    pub fn as_symbols(&self) -> Option<&[u8]> {
        match self {
            ObservedWindow::Symbols(v) => Some(v),
            ObservedWindow::Reals(_) => None,
        }
    }

    /// Every observation as a real number (symbols embed exactly).
    pub fn to_reals(&self) -> Vec<f64> {
        match self {
            ObservedWindow::Symbols(v) => v.iter().map(|&s| s as f64).collect(),
            ObservedWindow::Reals(v) => v.clone(),
        }
    }
}

/// Child-stream roles used by [`ObservationSource::sample`]; fixed constants
/// so that repeated runs and derived sources line up reproducibly.
pub(crate) const SUB_BODY: u64 = 0;
pub(crate) const SUB_INIT: u64 = 1;
pub(crate) const SUB_NOISE: u64 = 2;

/// A stationary observation source.
#[derive(Debug, Clone, PartialEq)]
pub enum ObservationSource {
    /// Finite-state Markov chain started from its stationary distribution.
    /// Rows must be stochastic and the chain irreducible.
    MarkovChain { transition: Vec<Vec<f64>> },
    /// Independent bits with success probability `p`.
    IidBinary { p: f64 },
    /// Orbit of a circle rotation; emits real positions. `init: None` draws
    /// the start uniformly: on `[0, 1)` for float angles, uniformly on the
    /// orbit `{j/den}` for rational ones.
    RotationOrbit { angle: Angle, init: Option<f64> },
    /// Labels of a base source, each flipped independently with probability
    /// `flip_p < 1/2`. Real-valued bases are quantized by `partition` first;
    /// the label alphabet must be binary.
    NoisyLabel {
        base: Box<ObservationSource>,
        partition: Partition,
        flip_p: f64,
    },
}

impl ObservationSource {
    pub fn iid_binary(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ProbabilityRange {
                what: "iid bit",
                value: p,
            });
        }
        Ok(ObservationSource::IidBinary { p })
    }

    pub fn markov(transition: Vec<Vec<f64>>) -> Result<Self> {
        validate_markov(&transition)?;
        Ok(ObservationSource::MarkovChain { transition })
    }

    pub fn rotation(angle: Angle, init: Option<f64>) -> Result<Self> {
        if let Some(u) = init {
            if !(0.0..1.0).contains(&u) {
                return Err(Error::invalid("orbit start", format!("{u} outside [0, 1)")));
            }
        }
        Ok(ObservationSource::RotationOrbit { angle, init })
    }

    pub fn noisy_label(base: ObservationSource, partition: Partition, flip_p: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&flip_p) {
            return Err(Error::ProbabilityRange {
                what: "label flip",
                value: flip_p,
            });
        }
        let labels = match &base {
            ObservationSource::RotationOrbit { .. } => partition.cell_count(),
            other => other.alphabet_len().unwrap_or(usize::MAX),
        };
        if labels != 2 {
            return Err(Error::invalid(
                "noisy label base",
                "flipping is defined for binary labels only",
            ));
        }
        Ok(ObservationSource::NoisyLabel {
            base: Box::new(base),
            partition,
            flip_p,
        })
    }

    /// Symbol alphabet size, when the source emits symbols.
    pub fn alphabet_len(&self) -> Option<usize> {
        match self {
            ObservationSource::MarkovChain { transition } => Some(transition.len()),
            ObservationSource::IidBinary { .. } => Some(2),
            ObservationSource::RotationOrbit { .. } => None,
            ObservationSource::NoisyLabel { .. } => Some(2),
        }
    }

    /// Sample a window of length `n` under the given stream.
    ///
    /// The draw is a pure function of `(self, n, stream)`. Prefixes agree:
    /// sampling `m <= n` yields the first `m` entries of sampling `n`.
    pub fn sample(&self, n: usize, stream: RngStream) -> Result<ObservedWindow> {
        if n == 0 {
            return Err(Error::invalid("window length", "must be positive"));
        }
        match self {
            ObservationSource::MarkovChain { transition } => {
                Ok(ObservedWindow::Symbols(sample_markov(transition, n, stream)))
            }
            ObservationSource::IidBinary { p } => {
                let mut rng = stream.substream(SUB_BODY).rng();
                let bits = (0..n).map(|_| (rng.gen::<f64>() < *p) as u8).collect();
                Ok(ObservedWindow::Symbols(bits))
            }
            ObservationSource::RotationOrbit { angle, init } => {
                Ok(ObservedWindow::Reals(sample_rotation(*angle, *init, n, stream)))
            }
            ObservationSource::NoisyLabel {
                base,
                partition,
                flip_p,
            } => {
                let clean = match base.sample(n, stream)? {
                    ObservedWindow::Symbols(s) => s,
                    ObservedWindow::Reals(xs) => partition.quantize(&xs)?,
                };
                let mut rng = stream.substream(SUB_NOISE).rng();
                let noisy = clean
                    .iter()
                    .map(|&b| b ^ ((rng.gen::<f64>() < *flip_p) as u8))
                    .collect();
                Ok(ObservedWindow::Symbols(noisy))
            }
        }
    }

    /// Stationary distribution of a Markov source; errors for other kinds.
    pub fn stationary(&self) -> Result<Vec<f64>> {
        match self {
            ObservationSource::MarkovChain { transition } => stationary_distribution(transition),
            _ => Err(Error::invalid(
                "source",
                "stationary distribution is defined for Markov chains here",
            )),
        }
    }
}

fn sample_rotation(angle: Angle, init: Option<f64>, n: usize, stream: RngStream) -> Vec<f64> {
    let u0 = match (init, angle) {
        (Some(u), _) => u,
        (None, Angle::Float(_)) => stream.substream(SUB_INIT).rng().gen::<f64>(),
        (None, Angle::Rational { den, .. }) => {
            let j = stream.substream(SUB_INIT).rng().gen_range(0..den);
            j as f64 / den as f64
        }
    };
    match angle {
        // k-indexed positions: one rounding per step, no accumulated drift,
        // and bit-identical to every other orbit evaluation in the crate
        Angle::Float(a) => (0..n)
            .map(|k| frac(u0 + (k as f64) * a))
            .collect(),
        Angle::Rational { num, den } => (0..n as u64)
            .map(|k| rational_advance(u0, num, den, k))
            .collect(),
    }
}

fn validate_markov(transition: &[Vec<f64>]) -> Result<()> {
    let k = transition.len();
    if k == 0 || k > u8::MAX as usize {
        return Err(Error::invalid("transition matrix", "size must be in 1..=255"));
    }
    for row in transition {
        if row.len() != k {
            return Err(Error::invalid("transition matrix", "must be square"));
        }
        if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::invalid("transition matrix", "entries must be in [0, 1]"));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                "transition matrix",
                format!("row sums to {s}, not 1"),
            ));
        }
    }
    if !irreducible(transition) {
        return Err(Error::invalid("transition matrix", "chain must be irreducible"));
    }
    Ok(())
}

/// Strong connectivity of the positive-entry digraph.
fn irreducible(transition: &[Vec<f64>]) -> bool {
    let k = transition.len();
    let reach = |start: usize, forward: bool| {
        let mut seen = vec![false; k];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(a) = stack.pop() {
            for b in 0..k {
                let edge = if forward {
                    transition[a][b] > 0.0
                } else {
                    transition[b][a] > 0.0
                };
                if edge && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen
    };
    reach(0, true).iter().all(|&s| s) && reach(0, false).iter().all(|&s| s)
}

/// Stationary row vector of an irreducible stochastic matrix, by Gaussian
/// elimination on `pi (P - I) = 0` with the normalization `sum pi = 1`.
pub(crate) fn stationary_distribution(transition: &[Vec<f64>]) -> Result<Vec<f64>> {
    let k = transition.len();
    // unknowns pi_0..pi_{k-1}; equations: columns of (P - I) transposed,
    // with the last equation replaced by the normalization
    let mut a = vec![vec![0.0f64; k + 1]; k];
    for j in 0..k {
        for i in 0..k {
            a[j][i] = transition[i][j] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for i in 0..k {
        a[k - 1][i] = 1.0;
    }
    a[k - 1][k] = 1.0;
    // partial-pivot elimination
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&r, &s| a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap())
            .unwrap();
        if a[piv][col].abs() < 1e-14 {
            return Err(Error::invalid("transition matrix", "stationary solve is singular"));
        }
        a.swap(col, piv);
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=k {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let pi: Vec<f64> = (0..k).map(|i| a[i][k] / a[i][i]).collect();
    if pi.iter().any(|&p| p < -1e-12) {
        return Err(Error::invalid("transition matrix", "negative stationary weight"));
    }
    Ok(pi.into_iter().map(|p| p.max(0.0)).collect())
}

fn sample_markov(transition: &[Vec<f64>], n: usize, stream: RngStream) -> Vec<u8> {
    let pi = stationary_distribution(transition).expect("validated at construction");
    let mut init_rng = stream.substream(SUB_INIT).rng();
    let mut state = draw_categorical(&pi, init_rng.gen::<f64>());
    let mut rng = stream.substream(SUB_BODY).rng();
    let mut out = Vec::with_capacity(n);
    out.push(state as u8);
    for _ in 1..n {
        state = draw_categorical(&transition[state], rng.gen::<f64>());
        out.push(state as u8);
    }
    out
}

/// Index of the first cumulative weight exceeding `r`.
fn draw_categorical(weights: &[f64], r: f64) -> usize {
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if r < acc {
            return i;
        }
    }
    weights.len() - 1
}
