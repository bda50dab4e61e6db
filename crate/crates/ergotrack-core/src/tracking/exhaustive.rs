//! Exhaustive candidate enumeration and the superadditivity diagnostic.
//!
//! Enumeration is the slow, independently-coded twin of the dynamic program
//! in `dp`: it exists so the fast path can be cross-checked, and so the
//! windowed cost sums `G_n` can be computed by brute force. For binary
//! alphabets under label mismatch it packs words into integers and compares
//! popcounts, which keeps a few million candidates cheap.

use super::TrackingProblem;
use crate::dynsys::{CostFunction, ObservedWindow, SftGraph, TopologicalSystem};
use crate::error::{Error, Result};

/// Minimum window cost sum over all admissible words, by enumeration.
/// Returns the lexicographically smallest minimizer alongside the sum.
pub(crate) fn exhaustive_min_sum(
    graph: &SftGraph,
    cost: &CostFunction,
    window: &ObservedWindow,
    cap: usize,
) -> Result<(f64, Vec<u8>)> {
    let n = window.len();
    if n == 0 {
        return Err(Error::WindowTooShort {
            have: 0,
            why: "empty observation window".into(),
        });
    }
    if let (CostFunction::HammingOnLabels { .. }, Some(ys)) = (cost, window.as_symbols()) {
        if graph.alphabet_len() == 2
            && graph.is_live(0)
            && graph.is_live(1)
            && n <= 63
            && ys.iter().all(|&y| y <= 1)
        {
            return Ok(bitmask_min_hamming(graph, ys));
        }
    }
    let count = graph.word_count(n);
    if count > cap as u128 {
        return Err(Error::CapExceeded {
            what: "exhaustive tracking enumeration",
            needed: count.min(usize::MAX as u128) as usize,
            cap,
        });
    }
    let mut best_sum = f64::INFINITY;
    let mut best_word: Vec<u8> = Vec::new();
    let mut word: Vec<u8> = Vec::with_capacity(n);
    let mut partial: Vec<f64> = Vec::with_capacity(n + 1);
    partial.push(0.0);
    // depth-first in ascending symbol order: the first minimum found is the
    // lexicographically smallest one
    descend(
        graph,
        cost,
        window,
        &mut word,
        &mut partial,
        &mut best_sum,
        &mut best_word,
    )?;
    Ok((best_sum, best_word))
}

#[allow(clippy::too_many_arguments)]
fn descend(
    graph: &SftGraph,
    cost: &CostFunction,
    window: &ObservedWindow,
    word: &mut Vec<u8>,
    partial: &mut Vec<f64>,
    best_sum: &mut f64,
    best_word: &mut Vec<u8>,
) -> Result<()> {
    let n = window.len();
    if word.len() == n {
        let total = *partial.last().unwrap();
        if total < *best_sum {
            *best_sum = total;
            *best_word = word.clone();
        }
        return Ok(());
    }
    let k = word.len();
    for s in 0..graph.alphabet_len() as u8 {
        if !graph.is_live(s) {
            continue;
        }
        if let Some(&prev) = word.last() {
            if !graph.allows(prev, s) {
                continue;
            }
        }
        let step = match window {
            ObservedWindow::Symbols(ys) => cost.symbol_symbol(s, ys[k])?,
            ObservedWindow::Reals(ys) => cost.symbol_real(s, ys[k])?,
        };
        word.push(s);
        partial.push(partial.last().unwrap() + step);
        descend(graph, cost, window, word, partial, best_sum, best_word)?;
        word.pop();
        partial.pop();
    }
    Ok(())
}

/// Binary-alphabet label-mismatch minimization over packed words.
///
/// Bit `n-1-k` of a packed word holds the symbol at position `k`, so plain
/// integer order on packed words is lexicographic order on symbol strings and
/// the first minimal candidate in an ascending scan is the lexicographically
/// smallest minimizer.
fn bitmask_min_hamming(graph: &SftGraph, ys: &[u8]) -> (f64, Vec<u8>) {
    let n = ys.len();
    let y_mask: u64 = ys
        .iter()
        .enumerate()
        .fold(0, |m, (k, &y)| m | ((y as u64) << (n - 1 - k)));
    // with the packing above, position k sits one bit *above* position k+1:
    // a pair (a, b) at (k, k+1) appears as bit b followed by bit a in
    // (w >> 1, w); forbid each disallowed pair via masked pattern tests
    let pair_mask: u64 = if n >= 2 { (1u64 << (n - 1)) - 1 } else { 0 };
    let mut forbidden: Vec<(u64, u64)> = Vec::new();
    for a in 0..2u64 {
        for b in 0..2u64 {
            if !graph.allows(a as u8, b as u8) {
                forbidden.push((a, b));
            }
        }
    }
    let mut best = (u32::MAX, 0u64);
    'words: for w in 0..(1u64 << n) {
        for &(a, b) in &forbidden {
            // bits of position k: (w >> (n-1-k)) & 1; successor has the next
            // lower bit. Build match masks: va = 1 where bit equals a.
            let va = if a == 1 { w >> 1 } else { !(w >> 1) };
            let vb = if b == 1 { w } else { !w };
            if va & vb & pair_mask != 0 {
                continue 'words;
            }
        }
        let mism = (w ^ y_mask).count_ones();
        if mism < best.0 {
            best = (mism, w);
            if mism == 0 {
                break;
            }
        }
    }
    let word: Vec<u8> = (0..n)
        .map(|k| ((best.1 >> (n - 1 - k)) & 1) as u8)
        .collect();
    (best.0 as f64, word)
}

/// Windowed cost sums and their superadditivity slack.
///
/// `g_full` tracks the first `m + n` observations, `g_prefix` the first `m`,
/// and `g_suffix` the next `n` (the window shifted by `m`). For complete
/// candidate sets the inequality `g_full >= g_prefix + g_suffix` is exact;
/// the reported slack is `g_full - g_prefix - g_suffix`.
#[derive(Debug, Clone)]
pub struct SuperadditivityReport {
    pub m: usize,
    pub n: usize,
    pub g_prefix: f64,
    pub g_suffix: f64,
    pub g_full: f64,
    pub slack: f64,
}

/// Compute the three windowed sums by exhaustive minimization.
///
/// Only subshift references enumerate a complete candidate set, so only they
/// admit this check; grid-based references would report spurious violations.
pub fn superadditivity_check(
    problem: &TrackingProblem,
    window: &ObservedWindow,
    m: usize,
    n: usize,
    cap: usize,
) -> Result<SuperadditivityReport> {
    let graph = match &problem.reference {
        TopologicalSystem::SubshiftSft { graph } => graph,
        _ => {
            return Err(Error::invalid(
                "superadditivity check",
                "requires a subshift reference with complete enumeration",
            ))
        }
    };
    if m == 0 || n == 0 {
        return Err(Error::invalid("superadditivity check", "m and n must be positive"));
    }
    if window.len() < m + n {
        return Err(Error::WindowTooShort {
            have: window.len(),
            why: format!("need m + n = {} observations", m + n),
        });
    }
    let (g_full, _) = exhaustive_min_sum(graph, &problem.cost, &window.slice(0, m + n), cap)?;
    let (g_prefix, _) = exhaustive_min_sum(graph, &problem.cost, &window.slice(0, m), cap)?;
    let (g_suffix, _) = exhaustive_min_sum(graph, &problem.cost, &window.slice(m, m + n), cap)?;
    Ok(SuperadditivityReport {
        m,
        n,
        g_prefix,
        g_suffix,
        g_full,
        slack: g_full - g_prefix - g_suffix,
    })
}
