//! Bound states of the separated family at negative `h`.
//!
//! For `h < 0` every pair binds. The N-particle states are
//!
//! ```text
//! psi(x) = v * prod_{k>l} (theta(x_k - x_l) + eps_kl theta(x_l - x_k)) * exp(h sum_{i>j} |x_i - x_j|)
//! ```
//!
//! with `v` a common eigenvector `P^{ij} v = eps_ij v` of all statistics
//! operators. Momenta form the ladder `k_j = ih(N + 1 - 2j)` and the energy is
//! `-h^2 N (N^2 - 1) / 3`.

use std::fmt;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::bethe::{
    boundary_residual, sample_plane_point, MomentumSet, OneSidedData, PLANE_HALF_WIDTH,
    PLANE_MIN_GAP,
};
use crate::error::{Error, Result};
use crate::linalg::{C64, I};
use crate::params::{IntegrableFamily, Strength};
use crate::sampling::{spread_points, SampleRng};
use crate::spinspace::{SpinSystem, SpinVector};

/// Singular values below this count as zero when intersecting eigenspaces.
pub const RANK_TOL: f64 = 1e-10;

/// Largest N for which all `2^{N(N-1)/2}` patterns are enumerated.
pub const MAX_PATTERN_PARTICLES: usize = 6;

/// Signs `eps_kl` for every pair, stored in the order (1,2), (1,3), ..., (N-1,N).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EpsilonPattern {
    particles: usize,
    signs: Vec<i8>,
}

fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl EpsilonPattern {
    pub fn new(particles: usize, signs: Vec<i8>) -> Result<Self> {
        if signs.len() != pair_count(particles) {
            return Err(Error::Domain(format!(
                "{} signs for N = {particles}, need {}",
                signs.len(),
                pair_count(particles)
            )));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Domain("pattern signs must be +1 or -1".into()));
        }
        Ok(Self { particles, signs })
    }

    pub fn uniform(particles: usize, sign: i8) -> Result<Self> {
        Self::new(particles, vec![sign; pair_count(particles)])
    }

    /// Parse `"+-+"` style strings.
    pub fn parse(particles: usize, text: &str) -> Result<Self> {
        let signs = text
            .chars()
            .map(|ch| match ch {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::Config(format!("bad pattern character {other:?}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Self::new(particles, signs)
    }

    /// All `2^{N(N-1)/2}` patterns; bit `m` of the index set means pair `m` is negative.
    pub fn all(particles: usize) -> Result<Vec<Self>> {
        if particles > MAX_PATTERN_PARTICLES {
            return Err(Error::Size(format!(
                "N = {particles} gives too many patterns (max N {MAX_PATTERN_PARTICLES})"
            )));
        }
        let m = pair_count(particles);
        Ok((0..1usize << m)
            .map(|bits| Self {
                particles,
                signs: (0..m)
                    .map(|p| if bits >> p & 1 == 1 { -1 } else { 1 })
                    .collect(),
            })
            .collect())
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Pairs `(i, j)`, 1-based with `i < j`, in storage order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.particles;
        (1..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .collect()
    }

    /// `eps_ij = eps_ji` for a 1-based pair.
    pub fn sign(&self, i: usize, j: usize) -> i8 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        assert!(a >= 1 && a < b && b <= self.particles, "pair ({i}, {j})");
        let n = self.particles;
        // pairs with first index < a, then offset inside row a
        let before: usize = (1..a).map(|r| n - r).sum();
        self.signs[before + (b - a - 1)]
    }
}

impl fmt::Display for EpsilonPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.signs {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl Serialize for EpsilonPattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `k_j = i h (N + 1 - 2j)`.
pub fn bound_momenta(particles: usize, h: f64) -> Result<MomentumSet> {
    if particles < 2 {
        return Err(Error::Domain(format!(
            "bound ladder needs N >= 2, got {particles}"
        )));
    }
    if !h.is_finite() || h == 0.0 {
        return Err(Error::Domain(format!(
            "bound ladder needs finite nonzero h, got {h}"
        )));
    }
    let n = particles as f64;
    MomentumSet::new(
        (1..=particles)
            .map(|j| I * (h * (n + 1.0 - 2.0 * j as f64)))
            .collect(),
    )
}

pub fn bound_energy(particles: usize, h: f64) -> f64 {
    let n = particles as f64;
    -h * h * n * (n * n - 1.0) / 3.0
}

fn real_statistics_operator(system: &SpinSystem, i: usize, j: usize) -> Result<DMatrix<f64>> {
    let map = system.swap_map(i, j)?;
    let dim = system.dim();
    let sign = system.statistics().sign();
    let mut m = DMatrix::zeros(dim, dim);
    for (row, &col) in map.iter().enumerate() {
        m[(row, col)] = sign;
    }
    Ok(m)
}

/// Orthonormal basis of `{v : P^{ij} v = eps_ij v for all i < j}`.
///
/// The nullspace comes from an SVD of the stacked `P^{ij} - eps_ij`; the
/// returned basis is Gram-Schmidt applied to the projections of the standard
/// basis vectors, so it does not depend on the SVD's choice of vectors.
pub fn spin_eigenspace(system: &SpinSystem, pattern: &EpsilonPattern) -> Result<Vec<SpinVector>> {
    let n = system.particles();
    if pattern.particles() != n {
        return Err(Error::Domain(format!(
            "pattern for N = {} on a system with N = {n}",
            pattern.particles()
        )));
    }
    let dim = system.dim();
    let pairs = pattern.pairs();
    if pairs.is_empty() {
        return (0..dim).map(|k| system.basis_vector(k)).collect();
    }
    let mut stacked = DMatrix::<f64>::zeros(pairs.len() * dim, dim);
    for (block, &(i, j)) in pairs.iter().enumerate() {
        let mut m = real_statistics_operator(system, i, j)?;
        let eps = pattern.sign(i, j) as f64;
        for d in 0..dim {
            m[(d, d)] -= eps;
        }
        stacked.view_mut((block * dim, 0), (dim, dim)).copy_from(&m);
    }
    let svd = stacked.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let null: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&r| svd.singular_values[r] <= RANK_TOL)
        .collect();
    if null.is_empty() {
        return Ok(Vec::new());
    }
    let kernel = DMatrix::from_fn(dim, null.len(), |row, col| v_t[(null[col], row)]);
    let projector = &kernel * kernel.transpose();

    let mut basis: Vec<Vec<f64>> = Vec::new();
    for k in 0..dim {
        if basis.len() == null.len() {
            break;
        }
        let mut w: Vec<f64> = projector.column(k).iter().copied().collect();
        for b in &basis {
            let dot: f64 = b.iter().zip(&w).map(|(x, y)| x * y).sum();
            w.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            w.iter_mut().for_each(|x| *x /= norm);
            basis.push(w);
        }
    }
    basis
        .into_iter()
        .map(|w| SpinVector::new(*system, w.into_iter().map(|x| C64::new(x, 0.0)).collect()))
        .collect()
}

/// Max-norm of `P^{ij} v - eps_ij v` over all pairs.
pub fn eigen_residual(system: &SpinSystem, pattern: &EpsilonPattern, v: &[C64]) -> Result<f64> {
    let sign = system.statistics().sign();
    let mut worst: f64 = 0.0;
    for (i, j) in pattern.pairs() {
        let map = system.swap_map(i, j)?;
        let eps = pattern.sign(i, j) as f64;
        for (k, &src) in map.iter().enumerate() {
            worst = worst.max((v[src] * sign - v[k] * eps).norm());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone)]
pub struct BoundState {
    pub system: SpinSystem,
    pub h: f64,
    pub momenta: MomentumSet,
    pub energy: f64,
    pub pattern: EpsilonPattern,
    pub spin_eigenspace: Vec<SpinVector>,
}

/// Every pattern with its (possibly empty) eigenspace.
pub fn bound_states(system: &SpinSystem, h: f64) -> Result<Vec<BoundState>> {
    check_binding(h)?;
    let n = system.particles();
    let momenta = bound_momenta(n, h)?;
    let energy = bound_energy(n, h);
    EpsilonPattern::all(n)?
        .into_iter()
        .map(|pattern| {
            Ok(BoundState {
                system: *system,
                h,
                momenta: momenta.clone(),
                energy,
                spin_eigenspace: spin_eigenspace(system, &pattern)?,
                pattern,
            })
        })
        .collect()
}

fn check_binding(h: f64) -> Result<()> {
    if h.is_finite() && h < 0.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "bound states need finite h < 0, got {h}"
        )))
    }
}

/// Evaluable product-form bound state.
#[derive(Debug, Clone)]
pub struct BoundWaveFunction {
    system: SpinSystem,
    h: f64,
    pattern: EpsilonPattern,
    spin: Vec<C64>,
}

/// Tolerance for accepting the spin vector as a pattern eigenvector.
pub const EIGEN_TOL: f64 = 1e-10;

pub fn bound_wavefunction(
    system: &SpinSystem,
    h: f64,
    pattern: &EpsilonPattern,
    v: &SpinVector,
) -> Result<BoundWaveFunction> {
    check_binding(h)?;
    if system.particles() < 2 {
        return Err(Error::Domain("bound states need N >= 2".into()));
    }
    if pattern.particles() != system.particles() || v.system() != system {
        return Err(Error::Domain(
            "pattern, spin vector and system disagree on N".into(),
        ));
    }
    let r = eigen_residual(system, pattern, v.entries())?;
    if r > EIGEN_TOL {
        return Err(Error::Domain(format!(
            "spin vector is not in the eigenspace of pattern {pattern} (residual {r:.3e})"
        )));
    }
    Ok(BoundWaveFunction {
        system: *system,
        h,
        pattern: pattern.clone(),
        spin: v.entries().to_vec(),
    })
}

/// `g_a = h sum_{b != a} sgn(x_a - x_b)`, the gradient of the exponent in the
/// open region containing `x`.
pub fn region_exponents(h: f64, x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|a| {
            h * (0..x.len())
                .filter(|&b| b != a)
                .map(|b| (x[a] - x[b]).signum())
                .sum::<f64>()
        })
        .collect()
}

impl BoundWaveFunction {
    pub fn system(&self) -> &SpinSystem {
        &self.system
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn pattern(&self) -> &EpsilonPattern {
        &self.pattern
    }

    pub fn energy(&self) -> f64 {
        bound_energy(self.system.particles(), self.h)
    }

    fn exponent(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for a in 0..x.len() {
            for b in 0..a {
                s += (x[a] - x[b]).abs();
            }
        }
        self.h * s
    }

    /// `prod_{k>l}` of the step factors, with `side(k, l)` giving `sgn(x_k - x_l)`.
    fn step_product(&self, side: impl Fn(usize, usize) -> f64) -> f64 {
        let n = self.system.particles();
        let mut p = 1.0;
        for k in 1..=n {
            for l in 1..k {
                if side(k, l) < 0.0 {
                    p *= self.pattern.sign(k, l) as f64;
                }
            }
        }
        p
    }

    fn scaled_spin(&self, f: f64) -> Vec<C64> {
        self.spin.iter().map(|z| z * f).collect()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<SpinVector> {
        let n = self.system.particles();
        if x.len() != n {
            return Err(Error::Domain(format!(
                "{} coordinates for N = {n}",
                x.len()
            )));
        }
        for a in 0..n {
            for b in a + 1..n {
                if x[a] == x[b] {
                    return Err(Error::Hyperplane(format!("x{} = x{}", a + 1, b + 1)));
                }
            }
        }
        let f = self.step_product(|k, l| x[k - 1] - x[l - 1]) * self.exponent(x).exp();
        SpinVector::new(self.system, self.scaled_spin(f))
    }

    /// One-sided limits at `x_i = x_j` (1-based, `i < j`), `0+` being `x_j > x_i`.
    pub fn one_sided_data(&self, i: usize, j: usize, base: &[f64]) -> Result<OneSidedData> {
        let n = self.system.particles();
        if i == 0 || j <= i || j > n || base.len() != n {
            return Err(Error::Domain(format!(
                "pair ({i}, {j}) invalid for N = {n}"
            )));
        }
        let (a, b) = (i - 1, j - 1);
        if base[a] != base[b] {
            return Err(Error::Domain(format!("base point not on x{i} = x{j}")));
        }
        let decay = self.exponent(base).exp();
        let side_data = |s: f64| {
            let sgn = |p: usize, q: usize| {
                if (p, q) == (b, a) {
                    s
                } else if (p, q) == (a, b) {
                    -s
                } else {
                    (base[p] - base[q]).signum()
                }
            };
            let value = self.step_product(|k, l| sgn(k - 1, l - 1)) * decay;
            let grad =
                |p: usize| self.h * (0..n).filter(|&q| q != p).map(|q| sgn(p, q)).sum::<f64>();
            let rate = (grad(b) - grad(a)) / 2.0;
            (self.scaled_spin(value), self.scaled_spin(value * rate))
        };
        let (plus, d_plus) = side_data(1.0);
        let (minus, d_minus) = side_data(-1.0);
        Ok(OneSidedData {
            plus,
            minus,
            d_plus,
            d_minus,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResiduals {
    /// Separated boundary conditions over all pairs.
    pub boundary: f64,
    /// `|(-sum g_a^2) - E| * |psi|` at open-region points.
    pub laplacian: f64,
    /// In `x_1 < ... < x_N`, `max_a |g_a - i k_a|`.
    pub bethe_exponent: f64,
    /// Largest log-decay slope of `|psi|` along rays with `sum u = 0`.
    pub decay_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub pattern: EpsilonPattern,
    pub residuals: BoundResiduals,
    pub worst_pair: Option<(usize, usize)>,
    pub samples: usize,
    pub rays: usize,
    pub tol: f64,
    pub pass: bool,
}

pub const DECAY_RAYS: usize = 20;
const RAY_LENGTH: f64 = 10.0;

/// Boundary conditions at `trials` plane points per pair, the energy
/// eigen-equation in open regions, and decay along random rays.
pub fn verify_bound_state(
    state: &BoundWaveFunction,
    trials: usize,
    tol: f64,
    rng: &mut SampleRng,
) -> Result<BoundReport> {
    let n = state.system.particles();
    let family = IntegrableFamily::Separated(Strength::Finite(state.h));
    let mut boundary: f64 = 0.0;
    let mut worst_pair = None;
    let mut samples = 0;
    for i in 1..=n {
        for j in i + 1..=n {
            for _ in 0..trials {
                let x = sample_plane_point(rng, n, i, j, PLANE_HALF_WIDTH, PLANE_MIN_GAP);
                let r = boundary_residual(&family, &state.one_sided_data(i, j, &x)?);
                if r > boundary || worst_pair.is_none() {
                    boundary = boundary.max(r);
                    worst_pair = Some((i, j));
                }
                samples += 1;
            }
        }
    }

    let energy = state.energy();
    let mut laplacian: f64 = 0.0;
    for _ in 0..trials.max(1) {
        let x = spread_points(rng, n, PLANE_HALF_WIDTH, PLANE_MIN_GAP);
        let g = region_exponents(state.h, &x);
        let lap = -g.iter().map(|v| v * v).sum::<f64>();
        let psi = state.evaluate(&x)?;
        laplacian = laplacian.max((lap - energy).abs() * psi.norm());
    }

    let momenta = bound_momenta(n, state.h)?;
    let ordered: Vec<f64> = (0..n).map(|m| m as f64).collect();
    let bethe_exponent = region_exponents(state.h, &ordered)
        .iter()
        .zip(momenta.as_slice())
        .map(|(&g, &k)| (C64::new(g, 0.0) - I * k).norm())
        .fold(0.0, f64::max);

    let mut decay_slope = f64::NEG_INFINITY;
    for _ in 0..DECAY_RAYS {
        let x0 = spread_points(rng, n, 1.0, 0.05);
        let mut u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mean = u.iter().sum::<f64>() / n as f64;
        u.iter_mut().for_each(|v| *v -= mean);
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        u.iter_mut().for_each(|v| *v /= norm);
        let at = |t: f64| -> Vec<f64> { x0.iter().zip(&u).map(|(a, b)| a + t * b).collect() };
        let start = state.evaluate(&at(0.0))?.norm();
        let end = state.evaluate(&at(RAY_LENGTH))?.norm();
        decay_slope = decay_slope.max((end.ln() - start.ln()) / RAY_LENGTH);
    }

    let pass = boundary <= tol && laplacian <= tol && bethe_exponent <= tol && decay_slope < 0.0;
    Ok(BoundReport {
        pattern: state.pattern.clone(),
        residuals: BoundResiduals {
            boundary,
            laplacian,
            bethe_exponent,
            decay_slope,
        },
        worst_pair,
        samples,
        rays: DECAY_RAYS,
        tol,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::sampling::rng_from_seed;
    use crate::spinspace::Statistics;

    #[test]
    fn ladder_and_energy() {
        let k = bound_momenta(3, -0.7).unwrap();
        let want = [c(0.0, -1.4), c(0.0, 0.0), c(0.0, 1.4)];
        for (a, b) in k.as_slice().iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }
        assert_eq!(bound_energy(2, -1.0), -2.0);
        assert_eq!(bound_energy(3, -1.0), -8.0);
        assert_eq!(bound_energy(1, -3.0), 0.0);
        assert!(bound_momenta(1, -1.0).is_err());
        for n in 2..=6 {
            let h = -0.83;
            let e = bound_momenta(n, h).unwrap().energy();
            assert!(e.im.abs() < 1e-12);
            assert!((e.re - bound_energy(n, h)).abs() <= 1e-12 * bound_energy(n, h).abs());
        }
    }

    #[test]
    fn pattern_indexing() {
        let p = EpsilonPattern::parse(3, "+-+").unwrap();
        assert_eq!(p.sign(1, 2), 1);
        assert_eq!(p.sign(3, 1), -1);
        assert_eq!(p.sign(2, 3), 1);
        assert_eq!(p.to_string(), "+-+");
        assert_eq!(EpsilonPattern::all(4).unwrap().len(), 64);
        assert!(EpsilonPattern::parse(3, "+-").is_err());
    }

    #[test]
    fn eigenspace_small_cases() {
        let b1 = SpinSystem::new(2, 1, Statistics::Boson).unwrap();
        let b2 = SpinSystem::new(2, 2, Statistics::Boson).unwrap();
        let plus = EpsilonPattern::uniform(2, 1).unwrap();
        let minus = EpsilonPattern::uniform(2, -1).unwrap();
        assert_eq!(spin_eigenspace(&b1, &plus).unwrap().len(), 1);
        assert_eq!(spin_eigenspace(&b1, &minus).unwrap().len(), 0);
        let singlet = spin_eigenspace(&b2, &minus).unwrap();
        assert_eq!(singlet.len(), 1);
        let s = 0.5f64.sqrt();
        let e = singlet[0].entries();
        assert!((e[1] - c(s, 0.0)).norm() < 1e-12 && (e[2] + c(s, 0.0)).norm() < 1e-12);
        assert_eq!(spin_eigenspace(&b2, &plus).unwrap().len(), 3);
    }

    #[test]
    fn eigenspace_dimensions_n3() {
        // symmetric cube of C^2 has dim 4, antisymmetric part vanishes, mixed patterns are empty
        let s = SpinSystem::new(3, 2, Statistics::Boson).unwrap();
        let mut total = 0;
        for p in EpsilonPattern::all(3).unwrap() {
            let d = spin_eigenspace(&s, &p).unwrap().len();
            let uniform = p.signs().iter().all(|&x| x == p.signs()[0]);
            if !uniform {
                assert_eq!(d, 0, "{p}");
            }
            total += d;
        }
        assert_eq!(total, 4);
        let f = s.with_statistics(Statistics::Fermion);
        let minus = EpsilonPattern::uniform(3, -1).unwrap();
        assert_eq!(spin_eigenspace(&f, &minus).unwrap().len(), 4);
    }

    #[test]
    fn two_body_parities() {
        let s = SpinSystem::new(2, 1, Statistics::Boson).unwrap();
        let f = s.with_statistics(Statistics::Fermion);
        let v = |sys: &SpinSystem| sys.basis_vector(0).unwrap();
        let h = -1.3;
        let even =
            bound_wavefunction(&s, h, &EpsilonPattern::uniform(2, 1).unwrap(), &v(&s)).unwrap();
        let odd =
            bound_wavefunction(&f, h, &EpsilonPattern::uniform(2, -1).unwrap(), &v(&f)).unwrap();
        for (x1, x2) in [(0.2, 1.0), (1.0, 0.2)] {
            let r: f64 = x2 - x1;
            let e = even.evaluate(&[x1, x2]).unwrap().entries()[0];
            let o = odd.evaluate(&[x1, x2]).unwrap().entries()[0];
            assert!((e.re - (h * r.abs()).exp()).abs() < 1e-15);
            assert!((o.re - r.signum() * (h * r.abs()).exp()).abs() < 1e-15);
        }
        assert!(
            bound_wavefunction(&s, h, &EpsilonPattern::uniform(2, -1).unwrap(), &v(&s)).is_err()
        );
        assert!(
            bound_wavefunction(&s, 0.5, &EpsilonPattern::uniform(2, 1).unwrap(), &v(&s)).is_err()
        );
    }

    #[test]
    fn relative_energy_two_body() {
        // relative derivative d/dx = (d_2 - d_1)/2 on exp(h|x2 - x1|) gives h on the + side,
        // -d^2/dx1^2 - d^2/dx2^2 = -2h^2 = E(2, h)
        let g = region_exponents(-0.9, &[0.0, 1.0]);
        assert_eq!(g, vec![0.9, -0.9]);
        assert!((-(g[0] * g[0] + g[1] * g[1]) - bound_energy(2, -0.9)).abs() < 1e-15);
    }

    #[test]
    fn verify_passes_for_nonempty_patterns() {
        let mut rng = rng_from_seed(4);
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let s = SpinSystem::new(3, 2, stats).unwrap();
            for state in bound_states(&s, -0.5).unwrap() {
                for v in &state.spin_eigenspace {
                    let wf = bound_wavefunction(&s, -0.5, &state.pattern, v).unwrap();
                    let rep = verify_bound_state(&wf, 10, 1e-10, &mut rng).unwrap();
                    assert!(rep.pass, "{rep:?}");
                }
            }
        }
    }
}
