//! Vertex subshifts of finite type.

use crate::error::{Error, Result};

/// A subshift of finite type over the alphabet `0..k`, given by a `k x k`
/// adjacency matrix: `adjacency[a][b]` allows symbol `b` to follow `a`.
///
/// A symbol is *live* when it starts at least one infinite admissible
/// sequence. Candidate enumeration and dynamic programming are restricted to
/// live symbols so finite words always stand for genuine points of the
/// subshift.
#[derive(Debug, Clone, PartialEq)]
pub struct SftGraph {
    adjacency: Vec<Vec<bool>>,
    live: Vec<bool>,
}

impl SftGraph {
    pub fn new(adjacency: Vec<Vec<bool>>) -> Result<Self> {
        let k = adjacency.len();
        if k == 0 || k > u8::MAX as usize {
            return Err(Error::invalid("adjacency", "alphabet size must be in 1..=255"));
        }
        if adjacency.iter().any(|row| row.len() != k) {
            return Err(Error::invalid("adjacency", "matrix must be square"));
        }
        let live = live_symbols(&adjacency);
        if live.iter().all(|&l| !l) {
            return Err(Error::invalid(
                "adjacency",
                "no symbol admits an infinite sequence",
            ));
        }
        Ok(SftGraph { adjacency, live })
    }

    /// The full shift on `k` symbols.
    pub fn full_shift(k: usize) -> Result<Self> {
        SftGraph::new(vec![vec![true; k]; k])
    }

    /// Binary subshift forbidding the word `11`.
    pub fn golden_mean() -> Self {
        SftGraph::new(vec![vec![true, true], vec![true, false]]).unwrap()
    }

    /// Two fixed points: constant sequences `000...` and `111...`.
    pub fn two_fixed_points() -> Self {
        SftGraph::new(vec![vec![true, false], vec![false, true]]).unwrap()
    }

    pub fn alphabet_len(&self) -> usize {
        self.adjacency.len()
    }

    #[inline]
    pub fn allows(&self, a: u8, b: u8) -> bool {
        self.adjacency[a as usize][b as usize]
    }

    #[inline]
    pub fn is_live(&self, a: u8) -> bool {
        self.live[a as usize]
    }

    pub fn live_alphabet(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.alphabet_len() as u8).filter(move |&a| self.is_live(a))
    }

    /// Is the word admissible as written (consecutive pairs allowed, and the
    /// wrap-around pair as well when `periodic`)?
    pub fn word_admissible(&self, word: &[u8], periodic: bool) -> bool {
        if word.is_empty() || word.iter().any(|&s| (s as usize) >= self.alphabet_len()) {
            return false;
        }
        if word.windows(2).any(|w| !self.allows(w[0], w[1])) {
            return false;
        }
        !periodic || self.allows(*word.last().unwrap(), word[0])
    }

    /// All admissible words of length `n` over live symbols, in
    /// lexicographic order. Errors when the count would exceed `cap`.
    pub fn words(&self, n: usize, cap: usize) -> Result<Vec<Vec<u8>>> {
        if n == 0 {
            return Err(Error::invalid("word length", "must be positive"));
        }
        let count = self.word_count(n);
        if count > cap as u128 {
            return Err(Error::CapExceeded {
                what: "admissible word enumeration",
                needed: count.min(usize::MAX as u128) as usize,
                cap,
            });
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut word = Vec::with_capacity(n);
        self.extend_words(&mut word, n, &mut out);
        Ok(out)
    }

    fn extend_words(&self, word: &mut Vec<u8>, n: usize, out: &mut Vec<Vec<u8>>) {
        if word.len() == n {
            out.push(word.clone());
            return;
        }
        for s in 0..self.alphabet_len() as u8 {
            if !self.is_live(s) {
                continue;
            }
            if let Some(&last) = word.last() {
                if !self.allows(last, s) {
                    continue;
                }
            }
            word.push(s);
            self.extend_words(word, n, out);
            word.pop();
        }
    }

    /// Number of admissible length-`n` words over live symbols.
    pub fn word_count(&self, n: usize) -> u128 {
        let mut counts: Vec<u128> = self.live.iter().map(|&l| l as u128).collect();
        for _ in 1..n {
            let mut next = vec![0u128; counts.len()];
            for (a, row) in self.adjacency.iter().enumerate() {
                if !self.live[a] {
                    continue;
                }
                next[a] = row
                    .iter()
                    .zip(&counts)
                    .map(|(&e, &c)| if e { c } else { 0 })
                    .sum();
            }
            counts = next;
        }
        counts.iter().sum()
    }
}

/// Greatest set of symbols with an infinite admissible continuation:
/// repeatedly remove symbols with no allowed successor in the set.
fn live_symbols(adj: &[Vec<bool>]) -> Vec<bool> {
    let k = adj.len();
    let mut live = vec![true; k];
    loop {
        let mut changed = false;
        for a in 0..k {
            if live[a] && !(0..k).any(|b| live[b] && adj[a][b]) {
                live[a] = false;
                changed = true;
            }
        }
        if !changed {
            return live;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_mean_word_counts_are_fibonacci() {
        // admissible n-words number F(n+2) with F(1)=F(2)=1
        let g = SftGraph::golden_mean();
        let counts: Vec<u128> = (1..=8).map(|n| g.word_count(n)).collect();
        assert_eq!(counts, vec![2, 3, 5, 8, 13, 21, 34, 55]);
        assert_eq!(g.words(4, 1 << 20).unwrap().len(), 8);
    }

    #[test]
    fn words_are_lexicographic_and_admissible() {
        let g = SftGraph::golden_mean();
        let ws = g.words(3, 64).unwrap();
        assert_eq!(
            ws,
            vec![
                vec![0, 0, 0],
                vec![0, 0, 1],
                vec![0, 1, 0],
                vec![1, 0, 0],
                vec![1, 0, 1]
            ]
        );
        for w in &ws {
            assert!(g.word_admissible(w, false));
        }
        assert!(!g.word_admissible(&[1, 1], false));
        assert!(g.word_admissible(&[0, 1], true)); // wrap pair 1 -> 0 is allowed
        assert!(g.word_admissible(&[1, 0, 1], false));
        assert!(!g.word_admissible(&[1, 0, 1], true)); // wrap pair 1 -> 1 is forbidden
    }

    #[test]
    fn dead_symbols_are_trimmed() {
        // 2 -> nothing; 1 -> 2 only; 0 -> 0. Only 0 is live.
        let g = SftGraph::new(vec![
            vec![true, true, false],
            vec![false, false, true],
            vec![false, false, false],
        ])
        .unwrap();
        assert!(g.is_live(0));
        assert!(!g.is_live(1));
        assert!(!g.is_live(2));
        assert_eq!(g.word_count(5), 1);
    }

    #[test]
    fn all_dead_is_rejected() {
        assert!(SftGraph::new(vec![vec![false]]).is_err());
    }

    #[test]
    fn enumeration_cap() {
        let g = SftGraph::full_shift(2).unwrap();
        assert!(matches!(g.words(10, 100), Err(Error::CapExceeded { .. })));
    }
}
