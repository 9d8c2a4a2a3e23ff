//! Permutations in one-line notation and reduced words for them.
//!
//! A permutation is stored 0-based: `labels[m]` is the momentum label sitting
//! at coordinate slot `m`. A word is a list of 0-based adjacent positions `i`
//! meaning "exchange slots `i` and `i + 1`".

use std::fmt;

use serde::{Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(len: usize) -> Self {
        Self((0..len).collect())
    }

    pub fn reversal(len: usize) -> Self {
        Self((0..len).rev().collect())
    }

    /// Accepts 0-based one-line notation; returns `None` unless it is a bijection.
    pub fn from_one_line(labels: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; labels.len()];
        for &l in &labels {
            if l >= labels.len() || seen[l] {
                return None;
            }
            seen[l] = true;
        }
        Some(Self(labels))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inversions(&self) -> usize {
        let p = &self.0;
        let mut count = 0;
        for a in 0..p.len() {
            for b in a + 1..p.len() {
                if p[a] > p[b] {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn sign(&self) -> f64 {
        if self.inversions().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Copy with slots `i` and `i + 1` exchanged.
    pub fn swapped(&self, i: usize) -> Self {
        let mut p = self.0.clone();
        p.swap(i, i + 1);
        Self(p)
    }

    /// The sorting permutation of `values`: slot `m` holds the index of the
    /// `m`-th smallest value. Ties keep index order.
    pub fn sorting(values: &[f64]) -> Self {
        let mut idx: Vec<usize> = (0..values.len()).collect();
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        Self(idx)
    }

    /// All permutations of `len` labels in lexicographic order.
    pub fn all(len: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..len).collect();
        loop {
            out.push(Self(cur.clone()));
            // next lexicographic permutation
            let Some(pivot) = (0..len.saturating_sub(1))
                .rev()
                .find(|&k| cur[k] < cur[k + 1])
            else {
                break;
            };
            let succ = (pivot + 1..len)
                .rev()
                .find(|&k| cur[k] > cur[pivot])
                .unwrap();
            cur.swap(pivot, succ);
            cur[pivot + 1..].reverse();
        }
        out
    }

    /// Reduced word reaching `self` from the identity, obtained by recording
    /// left-to-right bubble-sort passes on `self` and reversing them.
    pub fn bubble_word(&self) -> Vec<usize> {
        let mut p = self.0.clone();
        let mut sort_swaps = Vec::new();
        let n = p.len();
        for pass in 0..n {
            for i in 0..n.saturating_sub(1 + pass) {
                if p[i] > p[i + 1] {
                    p.swap(i, i + 1);
                    sort_swaps.push(i);
                }
            }
        }
        sort_swaps.reverse();
        sort_swaps
    }

    /// A second reduced word: right-to-left passes that sink the smallest
    /// label to the front first. Differs from [`bubble_word`](Self::bubble_word)
    /// whenever a braid move is needed.
    pub fn reverse_bubble_word(&self) -> Vec<usize> {
        let mut p = self.0.clone();
        let mut sort_swaps = Vec::new();
        let n = p.len();
        for pass in 0..n {
            for i in (pass..n.saturating_sub(1)).rev() {
                if p[i] > p[i + 1] {
                    p.swap(i, i + 1);
                    sort_swaps.push(i);
                }
            }
        }
        sort_swaps.reverse();
        sort_swaps
    }

    /// Apply a word to the identity.
    pub fn from_word(len: usize, word: &[usize]) -> Self {
        let mut p = Self::identity(len);
        for &i in word {
            p = p.swapped(i);
        }
        p
    }
}

impl fmt::Display for Permutation {
    /// 1-based one-line notation, e.g. `321`; entries are comma separated
    /// once labels exceed 9.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.0.len() > 9 { "," } else { "" };
        let parts: Vec<String> = self.0.iter().map(|l| (l + 1).to_string()).collect();
        write!(f, "{}", parts.join(sep))
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
