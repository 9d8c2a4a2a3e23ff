//! Closed-form two-body Y-operators.
//!
//! Every Y-operator here has the form `Y = s P^{ij} + t 1` with scalar
//! coefficients, where `P^{ij}` is the statistics-signed spin swap. The
//! constructors take the full momentum difference `k_diff = k_a - k_b` and
//! work with the half difference `kappa = k_diff / 2` internally; this is the
//! only place where the halving happens.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, I};
use crate::params::{
    ContactParams, IntegrableFamily, NonSeparatedParams, SeparatedParams, Strength, POLE_TOL,
};
use crate::spinspace::SpinSystem;

/// Scalar coefficients of `Y = swap * P + identity * 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YCoefficients {
    pub swap: C64,
    pub identity: C64,
}

impl YCoefficients {
    pub fn scalar(value: C64) -> Self {
        Self {
            swap: C64::new(0.0, 0.0),
            identity: value,
        }
    }

    /// The 1x1 value for `n = 1`, where `P` reduces to the statistics sign.
    pub fn spinless_value(&self, statistics_sign: f64) -> C64 {
        self.swap * statistics_sign + self.identity
    }

    /// `Y v` given the index map of the bare swap `p^{ij}` and the statistics sign.
    pub fn apply(&self, swap_map: &[usize], statistics_sign: f64, v: &[C64]) -> Vec<C64> {
        let s = self.swap * statistics_sign;
        swap_map
            .iter()
            .zip(v)
            .map(|(&src, &x)| s * v[src] + self.identity * x)
            .collect()
    }

    /// Dense matrix on `system`, acting on sites `i`, `j` (1-based).
    pub fn matrix(&self, system: &SpinSystem, i: usize, j: usize) -> Result<CMatrix> {
        let map = system.swap_map(i, j)?;
        let dim = system.dim();
        let s = self.swap * system.statistics().sign();
        let mut m = CMatrix::zeros(dim, dim);
        for (row, &col) in map.iter().enumerate() {
            m[(row, col)] += s;
            m[(row, row)] += self.identity;
        }
        Ok(m)
    }
}

fn check_pole(
    denominator: C64,
    numerator_scale: f64,
    context: impl FnOnce() -> String,
) -> Result<()> {
    if denominator.norm() < POLE_TOL * (1.0 + numerator_scale) || !denominator.is_finite() {
        return Err(Error::Pole {
            context: context(),
            denominator: denominator.norm(),
        });
    }
    Ok(())
}

/// `[2 i e^{i theta} kappa P + i kappa (a - d) + kappa^2 b + c] / [i kappa (a + d) + kappa^2 b - c]`.
pub fn nonseparated_coefficients(
    params: &NonSeparatedParams,
    k_diff: C64,
) -> Result<YCoefficients> {
    let kappa = k_diff * 0.5;
    let phase = C64::from_polar(1.0, params.theta);
    let swap_num = I * phase * kappa * 2.0;
    let id_num = I * kappa * (params.a - params.d) + kappa * kappa * params.b + params.c;
    let den = I * kappa * (params.a + params.d) + kappa * kappa * params.b - params.c;
    check_pole(den, swap_num.norm().max(id_num.norm()), || {
        format!("nonseparated Y at k_diff = {k_diff}")
    })?;
    Ok(YCoefficients {
        swap: swap_num / den,
        identity: id_num / den,
    })
}

/// `(i kappa + h) / (i kappa - h)`, and exactly `-1` for `h = inf`.
pub fn separated_coefficients(params: &SeparatedParams, k_diff: C64) -> Result<YCoefficients> {
    match params.h {
        Strength::Infinite => Ok(YCoefficients::scalar(C64::new(-1.0, 0.0))),
        Strength::Finite(h) => {
            let ik = I * (k_diff * 0.5);
            let num = ik + h;
            let den = ik - h;
            check_pole(den, ik.norm().max(h.abs()), || {
                format!("separated Y at k_diff = {k_diff}, h = {h}")
            })?;
            Ok(YCoefficients::scalar(num / den))
        }
    }
}

pub fn contact_coefficients(params: &ContactParams, k_diff: C64) -> Result<YCoefficients> {
    match params {
        ContactParams::NonSeparated(p) => nonseparated_coefficients(p, k_diff),
        ContactParams::Separated(p) => separated_coefficients(p, k_diff),
    }
}

/// Momentum differences `k_diff` at which the closed-form denominator vanishes.
pub fn pole_locations(params: &ContactParams) -> Vec<C64> {
    match *params {
        ContactParams::Separated(SeparatedParams { h }) => match h {
            // i kappa - h = 0  <=>  k_diff = -2 i h
            Strength::Finite(h) => vec![C64::new(0.0, -2.0 * h)],
            Strength::Infinite => Vec::new(),
        },
        ContactParams::NonSeparated(p) => {
            // b kappa^2 + i (a + d) kappa - c = 0
            let s = p.a + p.d;
            if p.b == 0.0 {
                if s == 0.0 {
                    Vec::new()
                } else {
                    vec![C64::new(0.0, -p.c / s) * 2.0]
                }
            } else {
                let disc = (C64::new(4.0 * p.b * p.c - s * s, 0.0)).sqrt();
                let lin = C64::new(0.0, -s);
                [lin + disc, lin - disc]
                    .into_iter()
                    .map(|num| num / (2.0 * p.b) * 2.0)
                    .collect()
            }
        }
    }
}

/// Distance from `k_diff` to the nearest pole of the closed form.
pub fn pole_distance(params: &ContactParams, k_diff: C64) -> f64 {
    pole_locations(params)
        .into_iter()
        .map(|p| (k_diff - p).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Delta and anti-delta go through the general nonseparated formula at their
/// embedded parameters; separated goes through the separated formula.
pub fn family_coefficients(family: &IntegrableFamily, k_diff: C64) -> Result<YCoefficients> {
    contact_coefficients(&family.embed(), k_diff)
}

/// A Y-operator bound to a spin system, a site pair and a spectral parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct YOperator {
    system: SpinSystem,
    sites: (usize, usize),
    k_diff: C64,
    coefficients: YCoefficients,
}

impl YOperator {
    fn build(
        system: &SpinSystem,
        sites: (usize, usize),
        k_diff: C64,
        coefficients: YCoefficients,
    ) -> Result<Self> {
        let (i, j) = sites;
        if i == 0 || j <= i || j > system.particles() {
            return Err(Error::Domain(format!(
                "site pair ({i}, {j}) invalid for N = {}",
                system.particles()
            )));
        }
        Ok(Self {
            system: *system,
            sites,
            k_diff,
            coefficients,
        })
    }

    pub fn system(&self) -> &SpinSystem {
        &self.system
    }

    /// Sites `(i, j)` the operator acts on, 1-based.
    pub fn sites(&self) -> (usize, usize) {
        self.sites
    }

    pub fn k_diff(&self) -> C64 {
        self.k_diff
    }

    pub fn coefficients(&self) -> YCoefficients {
        self.coefficients
    }

    pub fn matrix(&self) -> CMatrix {
        self.coefficients
            .matrix(&self.system, self.sites.0, self.sites.1)
            .expect("sites validated at construction")
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let map = self
            .system
            .swap_map(self.sites.0, self.sites.1)
            .expect("sites validated at construction");
        self.coefficients
            .apply(&map, self.system.statistics().sign(), v)
    }
}

fn adjacent(system: &SpinSystem, pair: usize) -> Result<(usize, usize)> {
    if pair == 0 || pair >= system.particles() {
        return Err(Error::Domain(format!(
            "adjacent pair index {pair} outside 1..{}",
            system.particles()
        )));
    }
    Ok((pair, pair + 1))
}

/// General nonseparated Y on sites `pair`, `pair + 1`.
pub fn y_nonseparated(
    params: &NonSeparatedParams,
    k_diff: C64,
    system: &SpinSystem,
    pair: usize,
) -> Result<YOperator> {
    let sites = adjacent(system, pair)?;
    YOperator::build(
        system,
        sites,
        k_diff,
        nonseparated_coefficients(params, k_diff)?,
    )
}

pub fn y_separated(
    params: &SeparatedParams,
    k_diff: C64,
    system: &SpinSystem,
    pair: usize,
) -> Result<YOperator> {
    let sites = adjacent(system, pair)?;
    YOperator::build(
        system,
        sites,
        k_diff,
        separated_coefficients(params, k_diff)?,
    )
}

pub fn y_family(
    family: &IntegrableFamily,
    k_diff: C64,
    system: &SpinSystem,
    pair: usize,
) -> Result<YOperator> {
    match family.embed() {
        ContactParams::NonSeparated(p) => y_nonseparated(&p, k_diff, system, pair),
        ContactParams::Separated(p) => y_separated(&p, k_diff, system, pair),
    }
}

pub fn y_contact(
    params: &ContactParams,
    k_diff: C64,
    system: &SpinSystem,
    pair: usize,
) -> Result<YOperator> {
    match params {
        ContactParams::NonSeparated(p) => y_nonseparated(p, k_diff, system, pair),
        ContactParams::Separated(p) => y_separated(p, k_diff, system, pair),
    }
}

/// The same closed form placed on an arbitrary site pair `i < j`. Used for the
/// `X_{ij}` factors of the scattering matrix.
pub fn y_on_sites(
    params: &ContactParams,
    k_diff: C64,
    system: &SpinSystem,
    i: usize,
    j: usize,
) -> Result<YOperator> {
    YOperator::build(
        system,
        (i, j),
        k_diff,
        contact_coefficients(params, k_diff)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, identity, max_abs_diff, unitarity_residual};
    use crate::params::two_body_relation_oracle;
    use crate::spinspace::Statistics;

    fn sys(n_particles: usize, n: usize, stats: Statistics) -> SpinSystem {
        SpinSystem::new(n_particles, n, stats).unwrap()
    }

    #[test]
    fn delta_matches_family_formula() {
        // [i k P + c] / [i k - c] with k = k1 - k2
        let s = sys(2, 2, Statistics::Boson);
        let (cc, k) = (1.3, c(0.8, 0.0));
        let y = y_family(&IntegrableFamily::Delta(cc), k, &s, 1)
            .unwrap()
            .matrix();
        let p = s.statistics_operator(1, 2).unwrap();
        let expected = (&p * (I * k) + identity(4) * c(cc, 0.0)) / (I * k - cc);
        assert!(max_abs_diff(&y, &expected) < 1e-15);
    }

    #[test]
    fn delta_scalar_example() {
        // (2i + 2) / (2i - 2) = -i
        let s = sys(2, 1, Statistics::Boson);
        let y = y_nonseparated(
            &NonSeparatedParams::new(0.0, 1.0, 0.0, 2.0, 1.0),
            c(2.0, 0.0),
            &s,
            1,
        )
        .unwrap();
        assert!((y.matrix()[(0, 0)] - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn free_case_is_statistics_swap() {
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let s = sys(3, 2, stats);
            let y = y_family(&IntegrableFamily::Delta(0.0), c(1.7, 0.0), &s, 2).unwrap();
            let p = s.statistics_operator(2, 3).unwrap();
            assert!(max_abs_diff(&y.matrix(), &p) < 1e-15);
        }
    }

    #[test]
    fn separated_examples() {
        let s = sys(2, 2, Statistics::Boson);
        let h1 = SeparatedParams {
            h: Strength::Finite(1.0),
        };
        // kappa = 0 -> -1
        let y0 = y_separated(&h1, c(0.0, 0.0), &s, 1).unwrap().matrix();
        assert!(max_abs_diff(&y0, &(-identity(4))).abs() < 1e-15);
        // (i + 1)/(i - 1) = -i
        let y2 = y_separated(&h1, c(2.0, 0.0), &s, 1).unwrap().matrix();
        assert!(max_abs_diff(&y2, &(identity(4) * c(0.0, -1.0))) < 1e-15);
        let dirichlet = SeparatedParams {
            h: Strength::Infinite,
        };
        for k in [0.1, 3.0, -7.0] {
            let y = y_separated(&dirichlet, c(k, 0.0), &s, 1).unwrap().matrix();
            assert_eq!(max_abs_diff(&y, &(-identity(4))), 0.0);
            // large-h limit oracle
            let big = y_separated(
                &SeparatedParams {
                    h: Strength::Finite(1e8),
                },
                c(k, 0.0),
                &s,
                1,
            )
            .unwrap()
            .matrix();
            assert!(max_abs_diff(&big, &y) < 1e-7);
        }
    }

    #[test]
    fn antidelta_scalar_example() {
        // -(2i + 2)/(2i + 2) = -1
        let s = sys(2, 1, Statistics::Boson);
        let y = y_family(&IntegrableFamily::AntiDelta(2.0), c(2.0, 0.0), &s, 1).unwrap();
        assert!((y.matrix()[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn antidelta_matches_family_formula() {
        // -[i k P + c] / [i k + c]
        let s = sys(3, 2, Statistics::Fermion);
        let (cc, k) = (-0.7, c(1.9, 0.0));
        let y = y_family(&IntegrableFamily::AntiDelta(cc), k, &s, 1)
            .unwrap()
            .matrix();
        let p = s.statistics_operator(1, 2).unwrap();
        let expected = -(&p * (I * k) + identity(8) * c(cc, 0.0)) / (I * k + cc);
        assert!(max_abs_diff(&y, &expected) < 1e-15);
    }

    #[test]
    fn family_dispatch_agrees_with_raw_constructors() {
        let s = sys(3, 2, Statistics::Boson);
        let k = c(0.9, 0.0);
        let via_family = y_family(&IntegrableFamily::Delta(3.0), k, &s, 2).unwrap();
        let raw =
            y_nonseparated(&NonSeparatedParams::new(0.0, 1.0, 0.0, 3.0, 1.0), k, &s, 2).unwrap();
        assert_eq!(via_family, raw);
        let h = Strength::Finite(-0.4);
        let sep = y_family(&IntegrableFamily::Separated(h), k, &s, 1).unwrap();
        assert_eq!(sep, y_separated(&SeparatedParams { h }, k, &s, 1).unwrap());
    }

    #[test]
    fn poles_are_caught() {
        let s = sys(2, 1, Statistics::Boson);
        // delta: i k - c = 0 at k = -i c
        let err = y_family(&IntegrableFamily::Delta(2.0), c(0.0, -2.0), &s, 1).unwrap_err();
        assert!(err.is_pole());
        // separated: i k - 2h = 0 at k = -2 i h
        let err = y_family(
            &IntegrableFamily::Separated(Strength::Finite(-1.0)),
            c(0.0, 2.0),
            &s,
            1,
        )
        .unwrap_err();
        assert!(err.is_pole());
    }

    #[test]
    fn pole_locations_are_roots() {
        let cases: Vec<ContactParams> = vec![
            IntegrableFamily::Delta(1.5).embed(),
            IntegrableFamily::AntiDelta(-0.5).embed(),
            IntegrableFamily::Separated(Strength::Finite(-0.8)).embed(),
            NonSeparatedParams::new(0.3, 2.0, 1.0, 1.0, 1.0).into(),
            NonSeparatedParams::new(0.0, 1.0, 0.5, 0.0, 1.0).into(),
        ];
        for params in cases {
            let poles = pole_locations(&params);
            assert!(!poles.is_empty());
            for p in poles {
                assert!(
                    contact_coefficients(&params, p).unwrap_err().is_pole(),
                    "{params:?} at {p}"
                );
                assert!(pole_distance(&params, p) < 1e-15);
            }
        }
        assert!(
            pole_locations(&IntegrableFamily::Separated(Strength::Infinite).embed()).is_empty()
        );
    }

    #[test]
    fn pair_index_is_validated() {
        let s = sys(3, 1, Statistics::Boson);
        assert!(y_family(&IntegrableFamily::Delta(1.0), c(1.0, 0.0), &s, 0).is_err());
        assert!(y_family(&IntegrableFamily::Delta(1.0), c(1.0, 0.0), &s, 3).is_err());
    }

    #[test]
    fn acts_only_on_its_pair() {
        // Y^{12} commutes with p^{34} on a four-site space
        let s = sys(4, 2, Statistics::Boson);
        let y = y_family(&IntegrableFamily::Delta(1.1), c(0.6, 0.0), &s, 1)
            .unwrap()
            .matrix();
        let p34 = s.permutation_operator(3, 4).unwrap();
        assert!(crate::linalg::commutator_residual(&y, &p34) < 1e-15);
    }

    #[test]
    fn apply_matches_matrix() {
        let s = sys(3, 2, Statistics::Fermion);
        let y = y_family(&IntegrableFamily::AntiDelta(0.4), c(-1.2, 0.0), &s, 2).unwrap();
        let v: Vec<C64> = (0..8).map(|k| c(k as f64, 1.0 - k as f64)).collect();
        let dense = y.matrix() * crate::linalg::CVector::from_vec(v.clone());
        let applied = y.apply(&v);
        assert!(crate::linalg::max_abs_diff_vec(dense.as_slice(), &applied) < 1e-14);
    }

    #[test]
    fn unitary_for_real_inputs() {
        let s = sys(2, 2, Statistics::Boson);
        for fam in [
            IntegrableFamily::Delta(1.4),
            IntegrableFamily::AntiDelta(-2.0),
            IntegrableFamily::Separated(Strength::Finite(0.7)),
        ] {
            let y = y_family(&fam, c(0.9, 0.0), &s, 1).unwrap().matrix();
            assert!(unitarity_residual(&y) < 1e-14);
        }
    }

    #[test]
    fn closed_form_matches_oracle_spot_checks() {
        let general = NonSeparatedParams::new(0.4, 2.0, 1.0, 1.0, 1.0);
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let s = sys(2, 2, stats);
            for k12 in [0.25, -1.3, 2.2] {
                let oracle = two_body_relation_oracle(&general.into(), c(k12, 0.0), &s).unwrap();
                let closed = y_nonseparated(&general, c(2.0 * k12, 0.0), &s, 1)
                    .unwrap()
                    .matrix();
                assert!(max_abs_diff(&oracle, &closed) < 1e-12);
            }
        }
    }
}
