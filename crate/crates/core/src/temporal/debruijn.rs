//! Full and reduced de Bruijn sequences.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest `k^L` accepted by the generators.
pub const MAX_WORDS: u64 = 1_000_000;

/// A cyclic sequence over `{0..k}` containing each admissible length-`L`
/// word exactly once.  Reduced sequences only contain the words with at
/// least one `0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeBruijnSequence {
    pub k: usize,
    pub word_length: usize,
    pub reduced: bool,
    pub symbols: Vec<usize>,
}

impl DeBruijnSequence {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Cyclic window of length `L` starting at `pos`.
    pub fn window(&self, pos: usize) -> Vec<usize> {
        let n = self.symbols.len();
        (0..self.word_length).map(|i| self.symbols[(pos + i) % n]).collect()
    }

    /// Base-`k` code of a word (first symbol most significant).
    pub fn encode(&self, word: &[usize]) -> usize {
        word.iter().fold(0, |a, &s| a * self.k + s)
    }

    /// `positions()[code]` is where the word with that code starts.
    pub fn positions(&self) -> Vec<Option<usize>> {
        let total = self.k.pow(self.word_length as u32);
        let mut pos = vec![None; total];
        for i in 0..self.symbols.len() {
            pos[self.encode(&self.window(i))] = Some(i);
        }
        pos
    }
}

fn guard(k: usize, l: usize) -> Result<()> {
    if k == 0 || l == 0 {
        return invalid("alphabet size and word length must be >= 1");
    }
    let total = (k as f64).powi(l as i32);
    if total > MAX_WORDS as f64 {
        return Err(Error::SearchSpace { size: total, limit: MAX_WORDS as f64 });
    }
    Ok(())
}

/// The lexicographically least de Bruijn sequence (concatenated Lyndon
/// words in order), length `k^L`.
pub fn de_bruijn(k: usize, l: usize) -> Result<DeBruijnSequence> {
    guard(k, l)?;
    let mut out = Vec::with_capacity(k.pow(l as u32));
    if k == 1 {
        out.push(0);
    } else {
        // iterative FKM
        let mut a = vec![0usize; l + 1];
        let mut t = 1;
        loop {
            if l % t == 0 {
                out.extend_from_slice(&a[1..=t]);
            }
            // next prenecklace
            t = l;
            while t > 0 && a[t] == k - 1 {
                t -= 1;
            }
            if t == 0 {
                break;
            }
            a[t] += 1;
            for j in t + 1..=l {
                a[j] = a[j - t];
            }
        }
    }
    Ok(DeBruijnSequence { k, word_length: l, reduced: false, symbols: out })
}

/// Shortest cyclic sequence holding every length-`L` word that contains a
/// `0`, each once: an Eulerian circuit on the `(L−1)`-word graph whose
/// edges are those words.  Length `k^L − (k−1)^L`.
pub fn reduced_de_bruijn(k: usize, l: usize) -> Result<DeBruijnSequence> {
    guard(k, l)?;
    let symbols = if l == 1 {
        vec![0]
    } else {
        let nodes = k.pow(l as u32 - 1);
        let digit0 = |mut v: usize| {
            (0..l - 1).any(|_| {
                let z = v % k == 0;
                v /= k;
                z
            })
        };
        let node_has0: Vec<bool> = (0..nodes).map(digit0).collect();
        // out-edges of node v, in descending symbol order so that popping
        // takes the smallest first
        let mut adj: Vec<Vec<usize>> = (0..nodes)
            .map(|v| (0..k).rev().filter(|&a| a == 0 || node_has0[v]).collect())
            .collect();
        // drop the leading symbol, append `a`
        let shift = nodes / k;
        let next = |v: usize, a: usize| (v % shift) * k + a;
        // Hierholzer from the all-zero node
        let mut stack = vec![(0usize, usize::MAX)];
        let mut circuit = Vec::new();
        while let Some(&(v, _)) = stack.last() {
            if let Some(a) = adj[v].pop() {
                stack.push((next(v, a), a));
            } else {
                let (_, a) = stack.pop().unwrap();
                if a != usize::MAX {
                    circuit.push(a);
                }
            }
        }
        circuit.reverse();
        // edge labels along the circuit form the sequence, rotated so the
        // all-zero word starts it
        let n = circuit.len();
        let start = (0..n).find(|&i| (0..l).all(|j| circuit[(i + j) % n] == 0)).unwrap_or(0);
        (0..n).map(|i| circuit[(start + i) % n]).collect()
    };
    Ok(DeBruijnSequence { k, word_length: l, reduced: true, symbols })
}

/// Independent check: the cyclic windows of `symbols` are pairwise
/// distinct and are exactly the words over `{0..k}` (with a `0`, if
/// `reduced`).
pub fn window_oracle(symbols: &[usize], k: usize, l: usize, reduced: bool) -> bool {
    let n = symbols.len();
    if n == 0 || symbols.iter().any(|&s| s >= k) {
        return false;
    }
    let want = if reduced { k.pow(l as u32) - (k - 1).pow(l as u32) } else { k.pow(l as u32) };
    if n != want {
        return false;
    }
    let mut seen = HashSet::with_capacity(n);
    for i in 0..n {
        let w: Vec<usize> = (0..l).map(|j| symbols[(i + j) % n]).collect();
        if reduced && !w.contains(&0) {
            return false;
        }
        if !seen.insert(w) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(de_bruijn(2, 1).unwrap().symbols, vec![0, 1]);
        assert_eq!(de_bruijn(2, 3).unwrap().symbols, vec![0, 0, 0, 1, 0, 1, 1, 1]);
        assert_eq!(de_bruijn(3, 2).unwrap().len(), 9);
        assert_eq!(reduced_de_bruijn(2, 2).unwrap().len(), 3);
        assert_eq!(reduced_de_bruijn(1, 5).unwrap().symbols, vec![0]);
        assert_eq!(reduced_de_bruijn(4, 4).unwrap().len(), 175);
    }

    #[test]
    fn guards() {
        assert!(de_bruijn(0, 2).is_err());
        assert!(de_bruijn(2, 0).is_err());
        assert!(matches!(de_bruijn(10, 7), Err(Error::SearchSpace { .. })));
    }

    #[test]
    fn positions_cover_all_words() {
        let s = de_bruijn(3, 3).unwrap();
        assert!(s.positions().iter().all(|p| p.is_some()));
        let r = reduced_de_bruijn(3, 3).unwrap();
        let pos = r.positions();
        assert_eq!(pos.iter().filter(|p| p.is_some()).count(), 27 - 8);
        assert!(pos[r.encode(&[1, 2, 1])].is_none());
    }
}
