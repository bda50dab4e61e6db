//! Finite coupling programs between a vertex subshift and an observed
//! stationary process.
//!
//! The unknown is a probability measure on pairs of (k+1)-blocks: the first
//! coordinate ranges over admissible reference blocks, the second over
//! observed blocks of positive probability. Three families of equality
//! constraints make the pair measure a stationary block coupling:
//!
//! - total mass one;
//! - the observed marginal equals the prescribed block distribution;
//! - the left and right k-block marginals of the pair measure agree.
//!
//! Minimizing the expected first-symbol cost over this polytope yields a
//! lower bound for mean tracking costs against typical samples of the
//! process, and the bounds are monotone in the block length `k`.
//!
//! Everything on the main path is exact: block probabilities, simplex
//! pivots, and the reported optima are rational numbers. A float re-solve is
//! available as a cross-check and reports its constraint residuals. A
//! reference coupling (a periodic orbit measure on the subshift paired
//! independently with the observed blocks) is verified feasible before every
//! solve, so infeasibility can only mean inconsistent input data.

mod simplex;

use crate::dynsys::SftGraph;
use crate::error::{Error, Result};
use num_bigint::BigInt;
pub use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use simplex::{independent_rows, solve_lp, solve_square, LpOutcome};
use std::collections::BTreeMap;

/// Hard ceiling on the number of coupling variables in one program.
pub const LP_VARIABLE_CAP: usize = 4096;

/// Ceiling on positive-probability blocks enumerated for one distribution.
const BLOCK_ENUM_CAP: usize = 1 << 20;

/// Exact rational from a numerator/denominator pair.
pub fn rat(num: i64, den: i64) -> BigRational {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The 0/1 mismatch cost table over `nx` by `ny` symbols.
pub fn hamming_table(nx: usize, ny: usize) -> Vec<Vec<BigRational>> {
    (0..nx)
        .map(|a| {
            (0..ny)
                .map(|b| if a == b { BigRational::zero() } else { BigRational::one() })
                .collect()
        })
        .collect()
}

/// Parse `"3/10"`, `"0.3"`, or `"7"` into an exact rational, widening from
/// the decimal parser so front ends never touch bigint types directly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let r = crate::quantident::parse_decimal_ratio(s)?;
    Ok(BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom())))
}

/// Nearest double; NaN only if the rational overflows, which no coupling
/// value here can.
pub fn ratio_to_f64(v: &BigRational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// A probability distribution on fixed-length symbol blocks with exact
/// rational masses. Zero-mass blocks are pruned at construction; the stored
/// support is lexicographically sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDistribution {
    len: usize,
    blocks: Vec<(Vec<u8>, BigRational)>,
}

impl BlockDistribution {
    /// Validates lengths, nonnegativity, unit mass, and agreement of the two
    /// shifted marginals; the violated equation is reported on failure.
    pub fn new(len: usize, entries: Vec<(Vec<u8>, BigRational)>) -> Result<Self> {
        if len == 0 {
            return Err(Error::invalid("block length", "must be positive"));
        }
        let mut blocks: Vec<(Vec<u8>, BigRational)> = Vec::with_capacity(entries.len());
        for (w, p) in entries {
            if w.len() != len {
                return Err(Error::invalid(
                    "block distribution",
                    format!("block {w:?} does not have length {len}"),
                ));
            }
            if p.is_negative() {
                return Err(Error::invalid(
                    "block distribution",
                    format!("block {w:?} has negative mass {p}"),
                ));
            }
            if !p.is_zero() {
                blocks.push((w, p));
            }
        }
        blocks.sort_by(|a, b| a.0.cmp(&b.0));
        if blocks.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid("block distribution", "a block is listed twice"));
        }
        let total: BigRational = blocks.iter().map(|(_, p)| p.clone()).sum();
        if !total.is_one() {
            return Err(Error::invalid(
                "block distribution",
                format!("masses sum to {total}, not 1"),
            ));
        }
        if len >= 2 {
            let mut left: BTreeMap<Vec<u8>, BigRational> = BTreeMap::new();
            let mut right: BTreeMap<Vec<u8>, BigRational> = BTreeMap::new();
            for (w, p) in &blocks {
                *left.entry(w[..len - 1].to_vec()).or_insert_with(BigRational::zero) +=
                    p.clone();
                *right.entry(w[1..].to_vec()).or_insert_with(BigRational::zero) += p.clone();
            }
            let keys: Vec<&Vec<u8>> = left.keys().chain(right.keys()).collect();
            for key in keys {
                let l = left.get(key).cloned().unwrap_or_else(BigRational::zero);
                let r = right.get(key).cloned().unwrap_or_else(BigRational::zero);
                if l != r {
                    return Err(Error::invalid(
                        "block distribution",
                        format!(
                            "shifted marginals disagree at {key:?}: {l} from the left, {r} from the right"
                        ),
                    ));
                }
            }
        }
        Ok(BlockDistribution { len, blocks })
    }

    pub fn block_len(&self) -> usize {
        self.len
    }

    /// Positive-mass blocks in lexicographic order.
    pub fn entries(&self) -> &[(Vec<u8>, BigRational)] {
        &self.blocks
    }

    /// One more than the largest symbol appearing in the support.
    pub fn alphabet_len(&self) -> usize {
        self.blocks
            .iter()
            .flat_map(|(w, _)| w.iter())
            .map(|&s| s as usize + 1)
            .max()
            .unwrap_or(0)
    }
}

/// A stationary process whose block distributions are exactly computable.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactProcess {
    /// Independent bits with rational success probability.
    IidBits { p: BigRational },
    /// Irreducible finite Markov chain with rational rows, started from its
    /// stationary distribution.
    Markov {
        transition: Vec<Vec<BigRational>>,
        stationary: Vec<BigRational>,
    },
    /// The uniform measure on the shifts of one periodic word.
    Cycle { word: Vec<u8> },
}

impl ExactProcess {
    pub fn iid_bits(p: BigRational) -> Result<Self> {
        if p.is_negative() || p > BigRational::one() {
            return Err(Error::invalid("bit probability", format!("{p} outside [0, 1]")));
        }
        Ok(ExactProcess::IidBits { p })
    }

    pub fn markov(transition: Vec<Vec<BigRational>>) -> Result<Self> {
        let k = transition.len();
        if k == 0 || k > u8::MAX as usize {
            return Err(Error::invalid("transition matrix", "size must be in 1..=255"));
        }
        for row in &transition {
            if row.len() != k {
                return Err(Error::invalid("transition matrix", "must be square"));
            }
            if row.iter().any(|p| p.is_negative()) {
                return Err(Error::invalid("transition matrix", "entries must be nonnegative"));
            }
            let s: BigRational = row.iter().cloned().sum();
            if !s.is_one() {
                return Err(Error::invalid(
                    "transition matrix",
                    format!("row sums to {s}, not 1"),
                ));
            }
        }
        if !irreducible(&transition) {
            return Err(Error::invalid("transition matrix", "chain must be irreducible"));
        }
        let stationary = exact_stationary(&transition)?;
        Ok(ExactProcess::Markov {
            transition,
            stationary,
        })
    }

    pub fn cycle(word: Vec<u8>) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::invalid("periodic word", "must be nonempty"));
        }
        Ok(ExactProcess::Cycle { word })
    }

    pub fn alphabet_len(&self) -> usize {
        match self {
            ExactProcess::IidBits { .. } => 2,
            ExactProcess::Markov { transition, .. } => transition.len(),
            ExactProcess::Cycle { word } => {
                word.iter().map(|&s| s as usize + 1).max().unwrap_or(0)
            }
        }
    }

    /// Exact distribution of length-`len` blocks.
    pub fn blocks(&self, len: usize) -> Result<BlockDistribution> {
        if len == 0 {
            return Err(Error::invalid("block length", "must be positive"));
        }
        let entries = match self {
            ExactProcess::IidBits { p } => {
                let q = BigRational::one() - p.clone();
                let weights = [q, p.clone()];
                positive_blocks(&weights.to_vec(), &|_, b| weights[b as usize].clone(), len)?
            }
            ExactProcess::Markov {
                transition,
                stationary,
            } => positive_blocks(
                stationary,
                &|a, b| transition[a as usize][b as usize].clone(),
                len,
            )?,
            ExactProcess::Cycle { word } => {
                let d = word.len();
                let share = BigRational::new(BigInt::one(), BigInt::from(d));
                let mut acc: BTreeMap<Vec<u8>, BigRational> = BTreeMap::new();
                for s in 0..d {
                    let block: Vec<u8> = (0..len).map(|i| word[(s + i) % d]).collect();
                    *acc.entry(block).or_insert_with(BigRational::zero) += share.clone();
                }
                acc.into_iter().collect()
            }
        };
        BlockDistribution::new(len, entries)
    }
}

/// Depth-first enumeration of the positive-probability blocks of a chain
/// with the given start weights and step weights, in lexicographic order.
fn positive_blocks(
    init: &[BigRational],
    step: &dyn Fn(u8, u8) -> BigRational,
    len: usize,
) -> Result<Vec<(Vec<u8>, BigRational)>> {
    fn descend(
        step: &dyn Fn(u8, u8) -> BigRational,
        alphabet: usize,
        len: usize,
        word: &mut Vec<u8>,
        mass: BigRational,
        out: &mut Vec<(Vec<u8>, BigRational)>,
    ) -> Result<()> {
        if word.len() == len {
            if out.len() >= BLOCK_ENUM_CAP {
                return Err(Error::CapExceeded {
                    what: "block enumeration",
                    needed: out.len() + 1,
                    cap: BLOCK_ENUM_CAP,
                });
            }
            out.push((word.clone(), mass));
            return Ok(());
        }
        let last = *word.last().unwrap();
        for b in 0..alphabet as u8 {
            let w = step(last, b);
            if w.is_zero() {
                continue;
            }
            word.push(b);
            descend(step, alphabet, len, word, mass.clone() * w, out)?;
            word.pop();
        }
        Ok(())
    }

    let alphabet = init.len();
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(len);
    for (a, start) in init.iter().enumerate() {
        if start.is_zero() {
            continue;
        }
        word.push(a as u8);
        descend(step, alphabet, len, &mut word, start.clone(), &mut out)?;
        word.pop();
    }
    Ok(out)
}

/// Strong connectivity of the positive-entry digraph.
fn irreducible(transition: &[Vec<BigRational>]) -> bool {
    let k = transition.len();
    let reach = |forward: bool| {
        let mut seen = vec![false; k];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(a) = stack.pop() {
            for b in 0..k {
                let edge = if forward {
                    transition[a][b].is_positive()
                } else {
                    transition[b][a].is_positive()
                };
                if edge && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen
    };
    reach(true).iter().all(|&s| s) && reach(false).iter().all(|&s| s)
}

/// Exact stationary row vector of an irreducible stochastic matrix.
fn exact_stationary(transition: &[Vec<BigRational>]) -> Result<Vec<BigRational>> {
    let k = transition.len();
    // columns of (P - I) transposed, with the last equation replaced by the
    // normalization; irreducibility makes this square system regular
    let mut a = vec![vec![BigRational::zero(); k]; k];
    for j in 0..k {
        for i in 0..k {
            a[j][i] = transition[i][j].clone()
                - if i == j { BigRational::one() } else { BigRational::zero() };
        }
    }
    for cell in a[k - 1].iter_mut() {
        *cell = BigRational::one();
    }
    let mut b = vec![BigRational::zero(); k];
    b[k - 1] = BigRational::one();
    let pi = solve_square(a, b)
        .ok_or_else(|| Error::invalid("transition matrix", "stationary solve is singular"))?;
    if pi.iter().any(|p| p.is_negative()) {
        return Err(Error::invalid("transition matrix", "negative stationary weight"));
    }
    Ok(pi)
}

/// One block-coupling program in equality form.
#[derive(Debug, Clone)]
pub struct JoiningLpInstance {
    k: usize,
    x_graph: SftGraph,
    x_words: Vec<Vec<u8>>,
    y_words: Vec<Vec<u8>>,
    y_probs: Vec<BigRational>,
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    objective: Vec<BigRational>,
}

/// Variables are pair blocks `(x_words[i], y_words[j])`, flattened with the
/// observed index fastest: `var = i * y_words.len() + j`.
pub fn build_instance(
    x_graph: &SftGraph,
    y_blocks: &BlockDistribution,
    cost: &[Vec<BigRational>],
    k: usize,
) -> Result<JoiningLpInstance> {
    if k == 0 {
        return Err(Error::invalid("block length", "the coupling level k must be positive"));
    }
    if y_blocks.block_len() != k + 1 {
        return Err(Error::invalid(
            "block distribution",
            format!(
                "level {k} needs blocks of length {}, got {}",
                k + 1,
                y_blocks.block_len()
            ),
        ));
    }
    if cost.len() != x_graph.alphabet_len()
        || cost.iter().any(|r| r.len() != cost[0].len())
        || cost[0].len() < y_blocks.alphabet_len()
    {
        return Err(Error::invalid(
            "cost table",
            format!(
                "need {} rows and at least {} columns",
                x_graph.alphabet_len(),
                y_blocks.alphabet_len()
            ),
        ));
    }
    let ny = y_blocks.entries().len();
    let x_count = x_graph.word_count(k + 1);
    let needed = x_count.saturating_mul(ny as u128);
    if needed > LP_VARIABLE_CAP as u128 {
        return Err(Error::CapExceeded {
            what: "coupling variables",
            needed: needed.min(usize::MAX as u128) as usize,
            cap: LP_VARIABLE_CAP,
        });
    }
    let x_words = x_graph.words(k + 1, LP_VARIABLE_CAP)?;
    let nx = x_words.len();
    let nvars = nx * ny;
    let y_words: Vec<Vec<u8>> = y_blocks.entries().iter().map(|(w, _)| w.clone()).collect();
    let y_probs: Vec<BigRational> = y_blocks.entries().iter().map(|(_, p)| p.clone()).collect();

    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut rhs: Vec<BigRational> = Vec::new();

    rows.push(vec![BigRational::one(); nvars]);
    rhs.push(BigRational::one());

    for (yi, p) in y_probs.iter().enumerate() {
        let mut row = vec![BigRational::zero(); nvars];
        for xi in 0..nx {
            row[xi * ny + yi] = BigRational::one();
        }
        rows.push(row);
        rhs.push(p.clone());
    }

    // stationarity at block level: for every pair of k-blocks, the mass of
    // pair blocks ending in it equals the mass of pair blocks starting in it
    let mut shift_rows: BTreeMap<(Vec<u8>, Vec<u8>), Vec<BigRational>> = BTreeMap::new();
    for (xi, xw) in x_words.iter().enumerate() {
        for (yi, yw) in y_words.iter().enumerate() {
            let var = xi * ny + yi;
            let suffix = (xw[1..].to_vec(), yw[1..].to_vec());
            let prefix = (xw[..k].to_vec(), yw[..k].to_vec());
            shift_rows
                .entry(suffix)
                .or_insert_with(|| vec![BigRational::zero(); nvars])[var] += BigRational::one();
            shift_rows
                .entry(prefix)
                .or_insert_with(|| vec![BigRational::zero(); nvars])[var] -= BigRational::one();
        }
    }
    for (_, row) in shift_rows {
        if row.iter().any(|v| !v.is_zero()) {
            rows.push(row);
            rhs.push(BigRational::zero());
        }
    }

    let mut objective = Vec::with_capacity(nvars);
    for xw in &x_words {
        for yw in &y_words {
            objective.push(cost[xw[0] as usize][yw[0] as usize].clone());
        }
    }

    Ok(JoiningLpInstance {
        k,
        x_graph: x_graph.clone(),
        x_words,
        y_words,
        y_probs,
        rows,
        rhs,
        objective,
    })
}

impl JoiningLpInstance {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn variable_count(&self) -> usize {
        self.objective.len()
    }

    pub fn constraint_count(&self) -> usize {
        self.rows.len()
    }

    /// The pair of blocks behind one variable index.
    pub fn variable_words(&self, var: usize) -> (&[u8], &[u8]) {
        let ny = self.y_words.len();
        (&self.x_words[var / ny], &self.y_words[var % ny])
    }

    pub fn objective_value(&self, x: &[BigRational]) -> BigRational {
        self.objective
            .iter()
            .zip(x)
            .map(|(c, v)| c.clone() * v.clone())
            .sum()
    }

    /// Largest absolute violation of the equality constraints.
    pub fn constraint_residual(&self, x: &[BigRational]) -> BigRational {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| {
                let lhs: BigRational = row.iter().zip(x).map(|(a, v)| a.clone() * v.clone()).sum();
                (lhs - b.clone()).abs()
            })
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// The always-feasible reference coupling: the uniform measure on an
    /// admissible cycle, paired independently with the observed blocks.
    pub fn product_coupling(&self) -> Result<Vec<BigRational>> {
        let mu = ExactProcess::cycle(reference_cycle(&self.x_graph))?.blocks(self.k + 1)?;
        let ny = self.y_words.len();
        let mut w = vec![BigRational::zero(); self.variable_count()];
        for (xw, px) in mu.entries() {
            let xi = self
                .x_words
                .binary_search_by(|probe| probe.cmp(xw))
                .map_err(|_| {
                    Error::invalid(
                        "reference coupling",
                        format!("cycle block {xw:?} is missing from the admissible words"),
                    )
                })?;
            for (yi, py) in self.y_probs.iter().enumerate() {
                w[xi * ny + yi] = px.clone() * py.clone();
            }
        }
        Ok(w)
    }
}

/// Any admissible cycle in the live part of the graph: walk the smallest
/// allowed live successor until a symbol repeats.
fn reference_cycle(graph: &SftGraph) -> Vec<u8> {
    let start = graph
        .live_alphabet()
        .next()
        .expect("graph construction guarantees a live symbol");
    let mut path = vec![start];
    let mut seen_at = vec![usize::MAX; graph.alphabet_len()];
    seen_at[start as usize] = 0;
    loop {
        let cur = *path.last().unwrap();
        let next = graph
            .live_alphabet()
            .find(|&b| graph.allows(cur, b))
            .expect("live symbols keep a live successor");
        if seen_at[next as usize] != usize::MAX {
            return path[seen_at[next as usize]..].to_vec();
        }
        seen_at[next as usize] = path.len();
        path.push(next);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

/// Exact solve outcome.
#[derive(Debug, Clone)]
pub struct JoiningLpResult {
    pub status: LpStatus,
    /// Minimal expected first-symbol cost over the coupling polytope.
    pub value: BigRational,
    /// Optimal pair-block weights, indexed like the instance variables.
    pub measure: Vec<BigRational>,
    /// Objective of the reference product coupling; an upper bound that
    /// certifies feasibility before the solve starts.
    pub product_value: BigRational,
}

/// Exact minimization by two-phase rational simplex.
pub fn solve(instance: &JoiningLpInstance) -> Result<JoiningLpResult> {
    let witness = instance.product_coupling()?;
    let wr = instance.constraint_residual(&witness);
    if !wr.is_zero() {
        return Err(Error::invalid(
            "coupling rows",
            format!("the reference coupling misses the constraints by {wr}"),
        ));
    }
    let product_value = instance.objective_value(&witness);
    match solve_lp(&instance.rows, &instance.rhs, &instance.objective)? {
        LpOutcome::Infeasible => Ok(JoiningLpResult {
            status: LpStatus::Infeasible,
            value: BigRational::zero(),
            measure: Vec::new(),
            product_value,
        }),
        LpOutcome::Optimal { x } => {
            let value = instance.objective_value(&x);
            debug_assert!(value <= product_value);
            debug_assert!(instance.constraint_residual(&x).is_zero());
            Ok(JoiningLpResult {
                status: LpStatus::Optimal,
                value,
                measure: x,
                product_value,
            })
        }
    }
}

/// Float re-solve of the same program, with residual reporting.
#[derive(Debug, Clone)]
pub struct FloatSolveReport {
    pub value: f64,
    pub measure: Vec<f64>,
    /// Largest absolute violation of the equality rows at the float optimum.
    pub max_residual: f64,
    /// Most negative weight (0 when all weights are nonnegative).
    pub most_negative_entry: f64,
}

pub fn solve_float(instance: &JoiningLpInstance) -> Result<FloatSolveReport> {
    let to_f = |v: &BigRational| v.to_f64().unwrap_or(f64::NAN);
    let rows: Vec<Vec<f64>> = instance
        .rows
        .iter()
        .map(|r| r.iter().map(to_f).collect())
        .collect();
    let rhs: Vec<f64> = instance.rhs.iter().map(to_f).collect();
    let obj: Vec<f64> = instance.objective.iter().map(to_f).collect();
    match solve_lp(&rows, &rhs, &obj)? {
        LpOutcome::Infeasible => Err(Error::invalid(
            "float solve",
            "reported infeasible although the exact program is feasible",
        )),
        LpOutcome::Optimal { x } => {
            let mut max_residual = 0.0f64;
            for (row, b) in rows.iter().zip(&rhs) {
                let lhs: f64 = row.iter().zip(&x).map(|(a, v)| a * v).sum();
                max_residual = max_residual.max((lhs - b).abs());
            }
            let most_negative_entry = x.iter().copied().fold(0.0f64, f64::min);
            let value = obj.iter().zip(&x).map(|(c, v)| c * v).sum();
            Ok(FloatSolveReport {
                value,
                measure: x,
                max_residual,
                most_negative_entry,
            })
        }
    }
}

/// Values of the coupling programs for `k = 1..=k_max`.
///
/// Each level is solved exactly; the sequence is monotone nondecreasing.
pub fn relaxation_ladder(
    x_graph: &SftGraph,
    process: &ExactProcess,
    cost: &[Vec<BigRational>],
    k_max: usize,
) -> Result<Vec<BigRational>> {
    if k_max == 0 {
        return Err(Error::invalid("ladder height", "k_max must be positive"));
    }
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let blocks = process.blocks(k + 1)?;
        let instance = build_instance(x_graph, &blocks, cost, k)?;
        let res = solve(&instance)?;
        if res.status != LpStatus::Optimal {
            return Err(Error::invalid(
                "relaxation ladder",
                format!("level {k} reported infeasible"),
            ));
        }
        out.push(res.value);
    }
    debug_assert!(out.windows(2).all(|w| w[0] <= w[1]));
    Ok(out)
}

/// Independent brute-force oracle: enumerate every basis of the constraint
/// matrix, keep the feasible ones, and minimize over those vertices.
#[derive(Debug, Clone)]
pub struct VertexScan {
    pub value: BigRational,
    pub feasible_bases: usize,
    /// Number of distinct optimal vertices seen during the scan.
    pub optimal_vertices: usize,
}

pub fn enumerate_vertices(instance: &JoiningLpInstance, basis_cap: u128) -> Result<VertexScan> {
    let (a, b) = independent_rows(&instance.rows, &instance.rhs)?;
    let r = a.len();
    let n = instance.variable_count();
    if r == 0 || r > n {
        return Err(Error::invalid(
            "vertex enumeration",
            format!("{r} independent rows over {n} variables leave no bases"),
        ));
    }
    let count = binomial_capped(n as u128, r as u128, basis_cap);
    if count > basis_cap {
        return Err(Error::CapExceeded {
            what: "basis enumeration",
            needed: count.min(usize::MAX as u128) as usize,
            cap: basis_cap.min(usize::MAX as u128) as usize,
        });
    }
    let mut idx: Vec<usize> = (0..r).collect();
    let mut best: Option<BigRational> = None;
    let mut feasible = 0usize;
    let mut optimal: Vec<Vec<BigRational>> = Vec::new();
    loop {
        let sub: Vec<Vec<BigRational>> = a
            .iter()
            .map(|row| idx.iter().map(|&j| row[j].clone()).collect())
            .collect();
        if let Some(sol) = solve_square(sub, b.clone()) {
            if sol.iter().all(|v| !v.is_negative()) {
                feasible += 1;
                let mut x = vec![BigRational::zero(); n];
                for (&j, v) in idx.iter().zip(sol) {
                    x[j] = v;
                }
                let val = instance.objective_value(&x);
                match &best {
                    Some(bv) if val > *bv => {}
                    Some(bv) if val == *bv => {
                        if !optimal.contains(&x) {
                            optimal.push(x);
                        }
                    }
                    _ => {
                        best = Some(val);
                        optimal = vec![x];
                    }
                }
            }
        }
        if !next_combination(&mut idx, n) {
            break;
        }
    }
    match best {
        Some(value) => Ok(VertexScan {
            value,
            feasible_bases: feasible,
            optimal_vertices: optimal.len(),
        }),
        None => Err(Error::invalid("vertex enumeration", "no feasible basis found")),
    }
}

/// `C(n, r)`, saturating just above `cap` to keep the overflow check cheap.
fn binomial_capped(n: u128, r: u128, cap: u128) -> u128 {
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.saturating_mul(n - i) / (i + 1);
        if acc > cap {
            return cap.saturating_add(1);
        }
    }
    acc
}

/// Next r-combination of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let r = idx.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if idx[i] < n - r + i {
            idx[i] += 1;
            for j in i + 1..r {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Structure of the optimal face: distinct optimal vertices found by
/// re-solving with perturbed objectives, and exact midpoint checks between
/// every pair of them.
#[derive(Debug, Clone)]
pub struct ConvexityReport {
    pub value: BigRational,
    pub vertices: Vec<Vec<BigRational>>,
    /// True when the probes produced a single optimal vertex.
    pub singleton: bool,
    pub midpoints_checked: usize,
    /// Every pairwise midpoint was feasible, nonnegative, and optimal.
    pub midpoints_ok: bool,
}

pub fn optimal_face_probe(instance: &JoiningLpInstance, n_vertices: usize) -> Result<ConvexityReport> {
    if n_vertices == 0 {
        return Err(Error::invalid("face probe", "must ask for at least one vertex"));
    }
    let base = solve(instance)?;
    if base.status != LpStatus::Optimal {
        return Err(Error::invalid("face probe", "instance is infeasible"));
    }
    // pin the objective to its optimum, then chase extreme points of the
    // face in coordinate directions
    let mut rows = instance.rows.clone();
    rows.push(instance.objective.clone());
    let mut rhs = instance.rhs.clone();
    rhs.push(base.value.clone());

    let n = instance.variable_count();
    let mut vertices: Vec<Vec<BigRational>> = vec![base.measure.clone()];
    'probe: for j in 0..n {
        for sign in [1i64, -1] {
            if vertices.len() >= n_vertices {
                break 'probe;
            }
            let mut direction = vec![BigRational::zero(); n];
            direction[j] = rat(sign, 1);
            if let LpOutcome::Optimal { x } = solve_lp(&rows, &rhs, &direction)? {
                if !vertices.contains(&x) {
                    vertices.push(x);
                }
            }
        }
    }

    let half = rat(1, 2);
    let mut midpoints_checked = 0usize;
    let mut midpoints_ok = true;
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            let mid: Vec<BigRational> = vertices[i]
                .iter()
                .zip(&vertices[j])
                .map(|(a, b)| (a.clone() + b.clone()) * half.clone())
                .collect();
            midpoints_checked += 1;
            midpoints_ok &= instance.constraint_residual(&mid).is_zero()
                && mid.iter().all(|v| !v.is_negative())
                && instance.objective_value(&mid) == base.value;
        }
    }
    Ok(ConvexityReport {
        value: base.value,
        singleton: vertices.len() == 1,
        vertices,
        midpoints_checked,
        midpoints_ok,
    })
}
