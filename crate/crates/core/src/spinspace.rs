//! Tensor-product index algebra on the `n^N` spin space.
//!
//! Basis states are ranked big-endian: site 1 is the most significant digit,
//! so `(s_1, ..., s_N) -> s_1 n^{N-1} + ... + s_N`. Sites are 1-based in the
//! public interface and 0-based internally.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

/// Largest coefficient space we are willing to materialize densely.
pub const MAX_DIM: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    /// +1 for bosons, -1 for fermions.
    pub fn sign(self) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Statistics::Boson => Statistics::Fermion,
            Statistics::Fermion => Statistics::Boson,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "boson" | "bosons" | "b" => Ok(Statistics::Boson),
            "fermion" | "fermions" | "f" => Ok(Statistics::Fermion),
            other => Err(Error::Config(format!("unknown statistics '{other}'"))),
        }
    }
}

impl std::fmt::Display for Statistics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Statistics::Boson => "boson",
            Statistics::Fermion => "fermion",
        })
    }
}

/// Particle count, spin states per particle and exchange statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinSystem {
    particles: usize,
    spin_states: usize,
    statistics: Statistics,
}

impl SpinSystem {
    pub fn new(particles: usize, spin_states: usize, statistics: Statistics) -> Result<Self> {
        if particles == 0 {
            return Err(Error::Domain("particle count N must be >= 1".into()));
        }
        if spin_states == 0 {
            return Err(Error::Domain("spin dimension n must be >= 1".into()));
        }
        let dim = (spin_states as u128).checked_pow(particles as u32);
        match dim {
            Some(d) if d <= MAX_DIM as u128 => {}
            _ => {
                return Err(Error::Size(format!(
                    "n^N = {spin_states}^{particles} exceeds {MAX_DIM}"
                )))
            }
        }
        Ok(Self {
            particles,
            spin_states,
            statistics,
        })
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn spin_states(&self) -> usize {
        self.spin_states
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    /// Same particle count and spin dimension with other statistics.
    pub fn with_statistics(&self, statistics: Statistics) -> Self {
        Self {
            statistics,
            ..*self
        }
    }

    /// Same spin dimension and statistics with another particle count.
    pub fn with_particles(&self, particles: usize) -> Result<Self> {
        Self::new(particles, self.spin_states, self.statistics)
    }

    /// Dimension `n^N` of the coefficient space.
    pub fn dim(&self) -> usize {
        self.spin_states.pow(self.particles as u32)
    }

    pub fn basis_index(&self, spins: &[usize]) -> Result<usize> {
        if spins.len() != self.particles {
            return Err(Error::Domain(format!(
                "expected {} spin labels, got {}",
                self.particles,
                spins.len()
            )));
        }
        let mut idx = 0;
        for (site, &s) in spins.iter().enumerate() {
            if s >= self.spin_states {
                return Err(Error::Domain(format!(
                    "spin label {s} at site {} outside [0, {})",
                    site + 1,
                    self.spin_states
                )));
            }
            idx = idx * self.spin_states + s;
        }
        Ok(idx)
    }

    /// Inverse of [`basis_index`](Self::basis_index).
    pub fn spin_labels(&self, mut index: usize) -> Vec<usize> {
        debug_assert!(index < self.dim());
        let mut labels = vec![0; self.particles];
        for slot in labels.iter_mut().rev() {
            *slot = index % self.spin_states;
            index /= self.spin_states;
        }
        labels
    }

    fn check_sites(&self, i: usize, j: usize) -> Result<()> {
        if i == 0 || j == 0 || i > self.particles || j > self.particles {
            return Err(Error::Domain(format!(
                "site pair ({i}, {j}) outside 1..={}",
                self.particles
            )));
        }
        if i == j {
            return Err(Error::Domain(format!("site pair ({i}, {j}) is not a pair")));
        }
        Ok(())
    }

    /// Index map of the spin swap at sites `i`, `j` (1-based, any order):
    /// `(p^{ij} v)[k] = v[map[k]]`. The map is an involution.
    pub fn swap_map(&self, i: usize, j: usize) -> Result<Vec<usize>> {
        self.check_sites(i, j)?;
        let (a, b) = (i - 1, j - 1);
        Ok((0..self.dim())
            .map(|k| {
                let mut labels = self.spin_labels(k);
                labels.swap(a, b);
                self.basis_index(&labels).expect("labels in range")
            })
            .collect())
    }

    /// Dense 0/1 matrix `p^{ij}` for `1 <= i < j <= N`.
    pub fn permutation_operator(&self, i: usize, j: usize) -> Result<CMatrix> {
        if i >= j {
            return Err(Error::Domain(format!("need i < j, got ({i}, {j})")));
        }
        let map = self.swap_map(i, j)?;
        let dim = self.dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (row, &col) in map.iter().enumerate() {
            m[(row, col)] = C64::new(1.0, 0.0);
        }
        Ok(m)
    }

    /// `P^{ij} = p^{ij}` for bosons, `-p^{ij}` for fermions.
    pub fn statistics_operator(&self, i: usize, j: usize) -> Result<CMatrix> {
        Ok(self.permutation_operator(i, j)? * C64::new(self.statistics.sign(), 0.0))
    }

    /// Index map of the site permutation `Q_sigma`,
    /// `(Q_sigma v)[s_1..s_N] = v[s_{sigma(1)}..s_{sigma(N)}]`, with `sigma` 0-based one-line.
    pub fn site_permutation_map(&self, sigma: &[usize]) -> Vec<usize> {
        assert_eq!(sigma.len(), self.particles);
        (0..self.dim())
            .map(|k| {
                let labels = self.spin_labels(k);
                let permuted: Vec<usize> = sigma.iter().map(|&m| labels[m]).collect();
                self.basis_index(&permuted).expect("labels in range")
            })
            .collect()
    }

    pub fn zero_vector(&self) -> SpinVector {
        SpinVector {
            system: *self,
            entries: vec![C64::new(0.0, 0.0); self.dim()],
        }
    }

    pub fn basis_vector(&self, index: usize) -> Result<SpinVector> {
        if index >= self.dim() {
            return Err(Error::Domain(format!(
                "basis index {index} outside [0, {})",
                self.dim()
            )));
        }
        let mut v = self.zero_vector();
        v.entries[index] = C64::new(1.0, 0.0);
        Ok(v)
    }
}

/// Gather `v` through an index map: `out[k] = v[map[k]]`.
pub fn gather(map: &[usize], v: &[C64]) -> Vec<C64> {
    map.iter().map(|&k| v[k]).collect()
}

/// A column in the `n^N` coefficient space.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinVector {
    system: SpinSystem,
    entries: Vec<C64>,
}

impl SpinVector {
    pub fn new(system: SpinSystem, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != system.dim() {
            return Err(Error::Domain(format!(
                "spin vector has {} entries, expected n^N = {}",
                entries.len(),
                system.dim()
            )));
        }
        Ok(Self { system, entries })
    }

    pub fn system(&self) -> &SpinSystem {
        &self.system
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.entries
    }

    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs_diff};

    fn sys(n_particles: usize, n: usize, stats: Statistics) -> SpinSystem {
        SpinSystem::new(n_particles, n, stats).unwrap()
    }

    #[test]
    fn basis_index_examples() {
        let s = sys(2, 2, Statistics::Boson);
        assert_eq!(s.basis_index(&[0, 0]).unwrap(), 0);
        assert_eq!(s.basis_index(&[1, 0]).unwrap(), 2);
        // mixed-radix oracle 2*9 + 1*3 + 0
        let t = sys(3, 3, Statistics::Boson);
        assert_eq!(t.basis_index(&[2, 1, 0]).unwrap(), 2 * 9 + 3);
        assert!(matches!(s.basis_index(&[2, 0]), Err(Error::Domain(_))));
        assert!(matches!(s.basis_index(&[0]), Err(Error::Domain(_))));
    }

    #[test]
    fn basis_index_is_bijective() {
        let s = sys(3, 3, Statistics::Fermion);
        let mut seen = vec![false; s.dim()];
        for (k, hit) in seen.iter_mut().enumerate() {
            let labels = s.spin_labels(k);
            assert_eq!(s.basis_index(&labels).unwrap(), k);
            *hit = true;
        }
        assert!(seen.into_iter().all(|b| b));
    }

    #[test]
    fn rejects_bad_systems() {
        assert!(SpinSystem::new(0, 2, Statistics::Boson).is_err());
        assert!(SpinSystem::new(2, 0, Statistics::Boson).is_err());
        assert!(matches!(
            SpinSystem::new(40, 3, Statistics::Boson),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn spinless_swap_is_identity() {
        for n_particles in 2..5 {
            let s = sys(n_particles, 1, Statistics::Boson);
            let p = s.permutation_operator(1, n_particles).unwrap();
            assert_eq!(p.shape(), (1, 1));
            assert_eq!(p[(0, 0)], C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn two_site_swap() {
        let s = sys(2, 2, Statistics::Boson);
        let p = s.permutation_operator(1, 2).unwrap();
        let one = C64::new(1.0, 0.0);
        let mut expected = CMatrix::zeros(4, 4);
        expected[(0, 0)] = one;
        expected[(3, 3)] = one;
        expected[(1, 2)] = one;
        expected[(2, 1)] = one;
        assert_eq!(p, expected);
    }

    #[test]
    fn nonadjacent_swap_by_composition() {
        let s = sys(3, 2, Statistics::Boson);
        let p12 = s.permutation_operator(1, 2).unwrap();
        let p23 = s.permutation_operator(2, 3).unwrap();
        let p13 = s.permutation_operator(1, 3).unwrap();
        assert_eq!(max_abs_diff(&p13, &(&p12 * &p23 * &p12)), 0.0);
    }

    #[test]
    fn statistics_operator_examples() {
        let s = sys(2, 2, Statistics::Boson);
        assert_eq!(
            s.statistics_operator(1, 2).unwrap(),
            s.permutation_operator(1, 2).unwrap()
        );
        let f1 = sys(2, 1, Statistics::Fermion);
        assert_eq!(
            f1.statistics_operator(1, 2).unwrap()[(0, 0)],
            C64::new(-1.0, 0.0)
        );
        let f2 = sys(2, 2, Statistics::Fermion);
        let p = f2.statistics_operator(1, 2).unwrap();
        assert_eq!(
            max_abs_diff(&p, &(-s.permutation_operator(1, 2).unwrap())),
            0.0
        );
        assert_eq!(max_abs_diff(&(&p * &p), &identity(4)), 0.0);
    }

    #[test]
    fn invalid_site_pairs() {
        let s = sys(3, 2, Statistics::Boson);
        assert!(s.permutation_operator(2, 2).is_err());
        assert!(s.permutation_operator(2, 1).is_err());
        assert!(s.permutation_operator(0, 1).is_err());
        assert!(s.permutation_operator(1, 4).is_err());
    }

    #[test]
    fn site_permutation_matches_swap() {
        let s = sys(3, 2, Statistics::Boson);
        // sigma = (0 2 1) one-line exchanges sites 2 and 3
        assert_eq!(
            s.site_permutation_map(&[0, 2, 1]),
            s.swap_map(2, 3).unwrap()
        );
        assert_eq!(
            s.site_permutation_map(&[0, 1, 2]),
            (0..8).collect::<Vec<_>>()
        );
    }
}
