//! Seeded random sampling shared by the verification routines.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::params::ContactParams;
use crate::yops::pole_distance;

pub type SampleRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Momentum sampling window and exclusion radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumSampler {
    pub half_width: f64,
    pub min_separation: f64,
    pub min_pole_distance: f64,
    pub max_attempts: usize,
}

impl Default for MomentumSampler {
    fn default() -> Self {
        Self {
            half_width: 5.0,
            min_separation: 0.1,
            min_pole_distance: 0.1,
            max_attempts: 10_000,
        }
    }
}

/// A draw together with the number of rejected attempts before it.
#[derive(Debug, Clone, PartialEq)]
pub struct Draw<T> {
    pub value: T,
    pub rejected: usize,
}

impl MomentumSampler {
    /// Real momenta, uniform in `[-w, w]`, pairwise separated and with every
    /// pairwise difference (both orders) away from the poles of `params`.
    pub fn sample(
        &self,
        rng: &mut SampleRng,
        count: usize,
        params: Option<&ContactParams>,
    ) -> Result<Draw<Vec<C64>>> {
        for attempt in 0..self.max_attempts {
            let ks: Vec<f64> = (0..count)
                .map(|_| rng.gen_range(-self.half_width..=self.half_width))
                .collect();
            if self.accepts(&ks, params) {
                return Ok(Draw {
                    value: ks.into_iter().map(|k| C64::new(k, 0.0)).collect(),
                    rejected: attempt,
                });
            }
        }
        Err(Error::Precondition(format!(
            "no admissible momentum set after {} attempts",
            self.max_attempts
        )))
    }

    /// Same as [`sample`](Self::sample) but sorted increasingly.
    pub fn sample_increasing(
        &self,
        rng: &mut SampleRng,
        count: usize,
        params: Option<&ContactParams>,
    ) -> Result<Draw<Vec<C64>>> {
        let mut draw = self.sample(rng, count, params)?;
        draw.value.sort_by(|a, b| a.re.total_cmp(&b.re));
        Ok(draw)
    }

    fn accepts(&self, ks: &[f64], params: Option<&ContactParams>) -> bool {
        for a in 0..ks.len() {
            for b in a + 1..ks.len() {
                let diff = ks[a] - ks[b];
                if diff.abs() < self.min_separation {
                    return false;
                }
                if let Some(p) = params {
                    for d in [diff, -diff] {
                        if pole_distance(p, C64::new(d, 0.0)) < self.min_pole_distance {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Points with pairwise gaps of at least `min_gap`, uniform in `[-w, w]`.
pub fn spread_points(rng: &mut SampleRng, count: usize, half_width: f64, min_gap: f64) -> Vec<f64> {
    loop {
        let xs: Vec<f64> = (0..count)
            .map(|_| rng.gen_range(-half_width..=half_width))
            .collect();
        let ok = (0..count).all(|a| (a + 1..count).all(|b| (xs[a] - xs[b]).abs() >= min_gap));
        if ok {
            return xs;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::IntegrableFamily;

    #[test]
    fn same_seed_same_draw() {
        let s = MomentumSampler::default();
        let a = s.sample(&mut rng_from_seed(7), 3, None).unwrap();
        let b = s.sample(&mut rng_from_seed(7), 3, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn draws_respect_exclusions() {
        let s = MomentumSampler::default();
        let params = IntegrableFamily::Separated(crate::params::Strength::Finite(0.0)).embed();
        let mut rng = rng_from_seed(3);
        for _ in 0..50 {
            let ks = s
                .sample_increasing(&mut rng, 4, Some(&params))
                .unwrap()
                .value;
            for w in ks.windows(2) {
                assert!(w[1].re - w[0].re >= 0.1);
            }
            for a in 0..4 {
                for b in 0..4 {
                    if a != b {
                        assert!(pole_distance(&params, ks[a] - ks[b]) >= 0.1);
                    }
                }
            }
        }
    }

    #[test]
    fn spread_points_have_gaps() {
        let xs = spread_points(&mut rng_from_seed(1), 5, 3.0, 0.2);
        for a in 0..5 {
            for b in a + 1..5 {
                assert!((xs[a] - xs[b]).abs() >= 0.2);
            }
        }
    }
}
