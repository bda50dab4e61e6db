//! Exact subshift tracking by min-sum dynamic programming.

use crate::dynsys::{CostFunction, ObservedWindow, SftGraph};
use crate::error::Result;

/// Per-step cost of each symbol against the window, column-major:
/// `cols[k][s]` is the cost of emitting symbol `s` at step `k`.
fn symbol_cost_columns(
    graph: &SftGraph,
    cost: &CostFunction,
    window: &ObservedWindow,
) -> Result<Vec<Vec<f64>>> {
    let a = graph.alphabet_len();
    let n = window.len();
    let mut cols = vec![vec![0.0f64; a]; n];
    for (k, col) in cols.iter_mut().enumerate() {
        for (s, slot) in col.iter_mut().enumerate() {
            *slot = match window {
                ObservedWindow::Symbols(ys) => cost.symbol_symbol(s as u8, ys[k])?,
                ObservedWindow::Reals(ys) => cost.symbol_real(s as u8, ys[k])?,
            };
        }
    }
    Ok(cols)
}

/// Minimum window cost sum over all admissible words of the window's length,
/// together with the lexicographically smallest minimizing word.
///
/// Backward pass: `suffix[s]` is the best cost of finishing the window from
/// symbol `s` at the current step. Forward pass: greedily take the smallest
/// symbol that attains the optimum, which yields the lexicographically
/// smallest argmin. Runs in `O(n * |A|^2)`.
pub(crate) fn min_sum_word(
    graph: &SftGraph,
    cost: &CostFunction,
    window: &ObservedWindow,
) -> Result<(f64, Vec<u8>)> {
    let n = window.len();
    let a = graph.alphabet_len();
    let cols = symbol_cost_columns(graph, cost, window)?;

    // suffix[k][s], stored as one row per step (n is at most a few tens of
    // thousands in practice; the full table keeps reconstruction simple)
    let mut suffix = vec![vec![f64::INFINITY; a]; n + 1];
    for s in 0..a {
        suffix[n][s] = if graph.is_live(s as u8) { 0.0 } else { f64::INFINITY };
    }
    for k in (0..n).rev() {
        for s in 0..a {
            if !graph.is_live(s as u8) {
                continue;
            }
            let mut best = f64::INFINITY;
            if k + 1 == n {
                best = 0.0;
            } else {
                for t in 0..a {
                    if graph.allows(s as u8, t as u8) && suffix[k + 1][t] < best {
                        best = suffix[k + 1][t];
                    }
                }
            }
            suffix[k][s] = cols[k][s] + best;
        }
    }

    let mut head = usize::MAX;
    let mut value = f64::INFINITY;
    for s in 0..a {
        if suffix[0][s] < value {
            value = suffix[0][s];
            head = s;
        }
    }
    if head == usize::MAX {
        // every candidate is infinite
        return Ok((f64::INFINITY, Vec::new()));
    }

    let mut word = Vec::with_capacity(n);
    word.push(head as u8);
    for k in 1..n {
        let prev = *word.last().unwrap();
        // following the pointwise minimum of the suffix table is optimal;
        // taking the smallest such symbol keeps the word lexicographically
        // smallest among all minimizers
        let mut next: Option<(u8, f64)> = None;
        for t in 0..a as u8 {
            if graph.allows(prev, t) {
                let v = suffix[k][t as usize];
                if next.map_or(true, |(_, bv)| v < bv) {
                    next = Some((t, v));
                }
            }
        }
        let (t, _) = next.expect("live symbol always has a live successor");
        word.push(t);
    }
    Ok((value, word))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::SftGraph;

    #[test]
    fn golden_mean_against_all_ones() {
        // best distance from 1111 to an admissible word is 2 mismatches;
        // candidates with value 1/2 include 0101, 1001, 1010
        let g = SftGraph::golden_mean();
        let w = ObservedWindow::Symbols(vec![1, 1, 1, 1]);
        let (sum, word) = min_sum_word(&g, &CostFunction::hamming(), &w).unwrap();
        assert_eq!(sum, 2.0);
        assert_eq!(word, vec![0, 1, 0, 1]);
    }

    #[test]
    fn admissible_window_is_tracked_for_free() {
        let g = SftGraph::golden_mean();
        let w = ObservedWindow::Symbols(vec![0, 1, 0, 0, 1, 0, 1, 0]);
        let (sum, word) = min_sum_word(&g, &CostFunction::hamming(), &w).unwrap();
        assert_eq!(sum, 0.0);
        assert_eq!(word, vec![0, 1, 0, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn constant_reference_counts_ones() {
        // single symbol 0 with a self-loop: cost is the number of ones
        let g = SftGraph::new(vec![vec![true]]).unwrap();
        let w = ObservedWindow::Symbols(vec![0, 1, 1, 0, 1, 1]);
        let (sum, word) = min_sum_word(&g, &CostFunction::hamming(), &w).unwrap();
        assert_eq!(sum, 4.0);
        assert_eq!(word, vec![0; 6]);
    }

    #[test]
    fn infinite_columns_mean_infeasible() {
        let g = SftGraph::full_shift(2).unwrap();
        let table = CostFunction::custom(vec![
            vec![f64::INFINITY, f64::INFINITY],
            vec![f64::INFINITY, f64::INFINITY],
        ])
        .unwrap();
        let w = ObservedWindow::Symbols(vec![0, 1]);
        let (sum, word) = min_sum_word(&g, &table, &w).unwrap();
        assert!(sum.is_infinite());
        assert!(word.is_empty());
    }

    #[test]
    fn dead_symbols_never_appear() {
        // 0 -> 0 live; 1 -> (nothing) dead, but 1 matches the window
        let g = SftGraph::new(vec![vec![true, true], vec![false, false]]).unwrap();
        let w = ObservedWindow::Symbols(vec![1, 1, 1]);
        let (sum, word) = min_sum_word(&g, &CostFunction::hamming(), &w).unwrap();
        assert_eq!(sum, 3.0);
        assert_eq!(word, vec![0, 0, 0]);
    }
}
