//! Bethe-ansatz coefficient tables and wavefunctions.
//!
//! In the fundamental region `y_1 < ... < y_N` the wavefunction is
//! `sum_tau alpha_tau exp(i sum_m k_{tau(m)} y_m)`. At a general point `x`
//! with sorting permutation `sigma` (so `y_m = x_{sigma(m)}`) it is extended by
//! exchange symmetry:
//!
//! ```text
//! psi(x) = sign(sigma)^F  Q_sigma  psi_fund(x_{sigma(1)}, ..., x_{sigma(N)})
//! ```
//!
//! with `(Q_sigma v)[s_1..s_N] = v[s_{sigma(1)}..s_{sigma(N)}]` and the sign
//! present only for fermions.
//!
//! Across the plane `x_i = x_j` the relative coordinate is `x = x_j - x_i`
//! and its derivative is `(d/dx_j - d/dx_i) / 2`, which matches the
//! half-difference spectral parameter of the Y-operators.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, max_abs_diff_vec, C64, I};
use crate::params::{IntegrableFamily, Strength};
use crate::perm::Permutation;
use crate::sampling::{spread_points, SampleRng};
use crate::spinspace::{gather, SpinSystem, SpinVector, Statistics};
use crate::yops::family_coefficients;

/// Evaluation sums `N!` terms; beyond this the tables get unwieldy.
pub const MAX_PARTICLES: usize = 6;

/// Pairwise-distinct momenta `k_1..k_N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentumSet(#[serde(serialize_with = "crate::linalg::serialize_complex_seq")] Vec<C64>);

impl MomentumSet {
    pub fn new(k: Vec<C64>) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::Domain("momentum set is empty".into()));
        }
        for a in 0..k.len() {
            if !k[a].is_finite() {
                return Err(Error::Domain(format!("momentum {} is not finite", a + 1)));
            }
            for b in a + 1..k.len() {
                if k[a] == k[b] {
                    return Err(Error::Precondition(format!(
                        "momenta k{} and k{} coincide ({})",
                        a + 1,
                        b + 1,
                        k[a]
                    )));
                }
            }
        }
        Ok(Self(k))
    }

    pub fn from_real(k: &[f64]) -> Result<Self> {
        Self::new(k.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|k| k.im == 0.0)
    }

    /// `sum_j k_j^2`, the free energy of every plane-wave term.
    pub fn energy(&self) -> C64 {
        self.0.iter().map(|k| k * k).sum()
    }
}

/// All `N!` coefficient columns `alpha_tau`, built from `alpha_identity`.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    system: SpinSystem,
    momenta: MomentumSet,
    family: IntegrableFamily,
    perms: Vec<Permutation>,
    entries: Vec<Vec<C64>>,
    words: Vec<Vec<usize>>,
    lookup: HashMap<Permutation, usize>,
    adjacent_maps: Vec<Vec<usize>>,
}

impl CoefficientTable {
    pub fn system(&self) -> &SpinSystem {
        &self.system
    }

    pub fn momenta(&self) -> &MomentumSet {
        &self.momenta
    }

    pub fn family(&self) -> &IntegrableFamily {
        &self.family
    }

    pub fn permutations(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn entry(&self, perm: &Permutation) -> Option<&[C64]> {
        self.lookup.get(perm).map(|&k| self.entries[k].as_slice())
    }

    /// The reduced word the stored entry was built along.
    pub fn word(&self, perm: &Permutation) -> Option<&[usize]> {
        self.lookup.get(perm).map(|&k| self.words[k].as_slice())
    }

    pub fn initial(&self) -> &[C64] {
        &self.entries[0]
    }

    /// Walk `word` (0-based adjacent slots) from `alpha_identity`, applying
    /// `Y^{i,i+1}(k_{cur(i)} - k_{cur(i+1)})` at each step.
    pub fn chain_along(&self, word: &[usize]) -> Result<Vec<C64>> {
        chain(
            &self.family,
            &self.momenta,
            &self.system,
            &self.adjacent_maps,
            self.initial(),
            word,
        )
    }

    /// Largest entrywise difference to another table over the same permutations.
    pub fn max_difference(&self, other: &CoefficientTable) -> f64 {
        self.perms
            .iter()
            .map(|p| match (self.entry(p), other.entry(p)) {
                (Some(a), Some(b)) => max_abs_diff_vec(a, b),
                _ => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    }
}

fn chain(
    family: &IntegrableFamily,
    momenta: &MomentumSet,
    system: &SpinSystem,
    adjacent_maps: &[Vec<usize>],
    initial: &[C64],
    word: &[usize],
) -> Result<Vec<C64>> {
    let k = momenta.as_slice();
    let sign = system.statistics().sign();
    let mut labels = Permutation::identity(system.particles());
    let mut v = initial.to_vec();
    for &i in word {
        if i + 1 >= system.particles() {
            return Err(Error::Domain(format!("word letter {i} out of range")));
        }
        let (la, lb) = (labels.as_slice()[i], labels.as_slice()[i + 1]);
        let y = family_coefficients(family, k[la] - k[lb])
            .map_err(|e| e.in_context(format!("momentum pair (k{}, k{})", la + 1, lb + 1)))?;
        v = y.apply(&adjacent_maps[i], sign, &v);
        labels = labels.swapped(i);
    }
    Ok(v)
}

/// Every `alpha_sigma`, each reached from `initial` along the bubble-sort word of `sigma`.
pub fn build_coefficient_table(
    family: &IntegrableFamily,
    momenta: &MomentumSet,
    system: &SpinSystem,
    initial: &SpinVector,
) -> Result<CoefficientTable> {
    let n = system.particles();
    if n > MAX_PARTICLES {
        return Err(Error::Size(format!(
            "N = {n} exceeds the supported maximum {MAX_PARTICLES}"
        )));
    }
    if momenta.len() != n {
        return Err(Error::Domain(format!(
            "{} momenta for N = {n}",
            momenta.len()
        )));
    }
    if initial.system() != system {
        return Err(Error::Domain(
            "initial vector lives on another spin system".into(),
        ));
    }
    let adjacent_maps: Vec<Vec<usize>> = (1..n)
        .map(|i| system.swap_map(i, i + 1))
        .collect::<Result<_>>()?;
    let perms = Permutation::all(n);
    let mut entries = Vec::with_capacity(perms.len());
    let mut words = Vec::with_capacity(perms.len());
    for p in &perms {
        let word = p.bubble_word();
        entries.push(chain(
            family,
            momenta,
            system,
            &adjacent_maps,
            initial.entries(),
            &word,
        )?);
        words.push(word);
    }
    let lookup = perms
        .iter()
        .cloned()
        .enumerate()
        .map(|(k, p)| (p, k))
        .collect();
    Ok(CoefficientTable {
        system: *system,
        momenta: momenta.clone(),
        family: *family,
        perms,
        entries,
        words,
        lookup,
        adjacent_maps,
    })
}

/// A table together with the exchange-symmetry extension to all regions.
#[derive(Debug, Clone)]
pub struct WaveFunction {
    table: CoefficientTable,
}

/// One-sided limits at a coincidence plane, `0+` being the side `x_j > x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneSidedData {
    pub plus: Vec<C64>,
    pub minus: Vec<C64>,
    pub d_plus: Vec<C64>,
    pub d_minus: Vec<C64>,
}

impl OneSidedData {
    pub fn scaled(&self, plus: f64, minus: f64) -> Self {
        let s = |v: &[C64], f: f64| v.iter().map(|z| z * f).collect::<Vec<_>>();
        Self {
            plus: s(&self.plus, plus),
            minus: s(&self.minus, minus),
            d_plus: s(&self.d_plus, plus),
            d_minus: s(&self.d_minus, minus),
        }
    }
}

/// Max-norm residual of the family's two conditions at a plane.
pub fn boundary_residual(family: &IntegrableFamily, data: &OneSidedData) -> f64 {
    let zip_max = |f: &dyn Fn(usize) -> C64| {
        (0..data.plus.len())
            .map(|k| f(k).norm())
            .fold(0.0, f64::max)
    };
    let (p, m, dp, dm) = (&data.plus, &data.minus, &data.d_plus, &data.d_minus);
    match *family {
        IntegrableFamily::Delta(c) => {
            zip_max(&|k| p[k] - m[k]).max(zip_max(&|k| dp[k] - dm[k] - m[k] * c))
        }
        IntegrableFamily::AntiDelta(c) => {
            zip_max(&|k| p[k] + m[k]).max(zip_max(&|k| dp[k] + dm[k] - m[k] * c))
        }
        IntegrableFamily::Separated(Strength::Finite(h)) => {
            zip_max(&|k| dp[k] - p[k] * h).max(zip_max(&|k| dm[k] + m[k] * h))
        }
        IntegrableFamily::Separated(Strength::Infinite) => max_abs(p).max(max_abs(m)),
    }
}

fn has_coincidence(x: &[f64]) -> Option<(usize, usize)> {
    for a in 0..x.len() {
        for b in a + 1..x.len() {
            if x[a] == x[b] {
                return Some((a, b));
            }
        }
    }
    None
}

impl WaveFunction {
    pub fn new(table: CoefficientTable) -> Self {
        Self { table }
    }

    pub fn build(
        family: &IntegrableFamily,
        momenta: &MomentumSet,
        system: &SpinSystem,
        initial: &SpinVector,
    ) -> Result<Self> {
        Ok(Self::new(build_coefficient_table(
            family, momenta, system, initial,
        )?))
    }

    pub fn table(&self) -> &CoefficientTable {
        &self.table
    }

    pub fn system(&self) -> &SpinSystem {
        &self.table.system
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.system().particles() {
            return Err(Error::Domain(format!(
                "{} coordinates for N = {}",
                x.len(),
                self.system().particles()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("coordinates must be finite".into()));
        }
        Ok(())
    }

    /// Sum over the table in the fundamental region, evaluated at
    /// `y_m = x_{sigma(m)}`, weighting each term by `weight(tau)`.
    fn fundamental_sum(
        &self,
        sigma: &Permutation,
        x: &[f64],
        weight: impl Fn(&Permutation) -> C64,
    ) -> Vec<C64> {
        let k = self.table.momenta.as_slice();
        let dim = self.system().dim();
        let mut acc = vec![C64::new(0.0, 0.0); dim];
        for (tau, alpha) in self.table.perms.iter().zip(&self.table.entries) {
            let phase: C64 = tau
                .as_slice()
                .iter()
                .zip(sigma.as_slice())
                .map(|(&label, &slot)| k[label] * x[slot])
                .sum();
            let factor = (I * phase).exp() * weight(tau);
            for (a, &v) in acc.iter_mut().zip(alpha) {
                *a += v * factor;
            }
        }
        acc
    }

    fn extend(&self, sigma: &Permutation, fundamental: Vec<C64>) -> Vec<C64> {
        let map = self.system().site_permutation_map(sigma.as_slice());
        let mut out = gather(&map, &fundamental);
        if self.system().statistics() == Statistics::Fermion && sigma.sign() < 0.0 {
            out.iter_mut().for_each(|z| *z = -*z);
        }
        out
    }

    /// Value of the analytic branch attached to ordering `sigma`, at any `x`.
    pub fn branch_value(&self, sigma: &Permutation, x: &[f64]) -> Vec<C64> {
        let f = self.fundamental_sum(sigma, x, |_| C64::new(1.0, 0.0));
        self.extend(sigma, f)
    }

    /// Directional derivative of that branch along `dir` (indexed by particle).
    pub fn branch_derivative(&self, sigma: &Permutation, x: &[f64], dir: &[f64]) -> Vec<C64> {
        let k = self.table.momenta.as_slice();
        let f = self.fundamental_sum(sigma, x, |tau| {
            let rate: C64 = tau
                .as_slice()
                .iter()
                .zip(sigma.as_slice())
                .map(|(&label, &slot)| k[label] * dir[slot])
                .sum();
            I * rate
        });
        self.extend(sigma, f)
    }

    /// `psi(x)` for `x` off every coincidence plane.
    pub fn evaluate(&self, x: &[f64]) -> Result<SpinVector> {
        self.check_point(x)?;
        if let Some((a, b)) = has_coincidence(x) {
            return Err(Error::Hyperplane(format!(
                "x{} = x{} = {}; use one_sided_data",
                a + 1,
                b + 1,
                x[a]
            )));
        }
        let sigma = Permutation::sorting(x);
        SpinVector::new(*self.system(), self.branch_value(&sigma, x))
    }

    /// Analytic one-sided limits of `psi` and of the relative derivative at
    /// the plane `x_i = x_j` (1-based, `i < j`).
    pub fn one_sided_data(&self, i: usize, j: usize, base: &[f64]) -> Result<OneSidedData> {
        self.check_point(base)?;
        let n = self.system().particles();
        if i == 0 || j <= i || j > n {
            return Err(Error::Domain(format!(
                "pair ({i}, {j}) invalid for N = {n}"
            )));
        }
        let (a, b) = (i - 1, j - 1);
        if base[a] != base[b] {
            return Err(Error::Domain(format!(
                "base point not on the plane x{i} = x{j} ({} vs {})",
                base[a], base[b]
            )));
        }
        for m in 0..n {
            if m != a && m != b && base[m] == base[a] {
                return Err(Error::Domain(format!(
                    "x{} also meets the plane x{i} = x{j}",
                    m + 1
                )));
            }
        }
        if let Some((p, q)) = has_coincidence(
            &base
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != b)
                .map(|(_, &v)| v)
                .collect::<Vec<_>>(),
        ) {
            return Err(Error::Domain(format!(
                "base point has a second coincidence (entries {p}, {q} after dropping x{j})"
            )));
        }
        // ties keep index order, so x_i sorts before x_j: the x_j > x_i side
        let plus = Permutation::sorting(base);
        let slot = plus
            .as_slice()
            .iter()
            .position(|&m| m == a)
            .expect("present");
        debug_assert_eq!(plus.as_slice()[slot + 1], b);
        let minus = plus.swapped(slot);
        let mut dir = vec![0.0; n];
        dir[a] = -0.5;
        dir[b] = 0.5;
        Ok(OneSidedData {
            plus: self.branch_value(&plus, base),
            minus: self.branch_value(&minus, base),
            d_plus: self.branch_derivative(&plus, base, &dir),
            d_minus: self.branch_derivative(&minus, base, &dir),
        })
    }
}

/// A random point on the plane `x_i = x_j` with every other gap at least `min_gap`.
pub fn sample_plane_point(
    rng: &mut SampleRng,
    particles: usize,
    i: usize,
    j: usize,
    half_width: f64,
    min_gap: f64,
) -> Vec<f64> {
    let values = spread_points(rng, particles - 1, half_width, min_gap);
    let mut x = vec![0.0; particles];
    let mut rest = values[1..].iter();
    for (m, slot) in x.iter_mut().enumerate() {
        *slot = if m == i - 1 || m == j - 1 {
            values[0]
        } else {
            *rest.next().expect("enough values")
        };
    }
    x
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlaneLocation {
    pub pair: (usize, usize),
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryReport {
    pub family: IntegrableFamily,
    pub samples: usize,
    pub max_residual: f64,
    pub worst: Option<PlaneLocation>,
    pub tol: f64,
    pub pass: bool,
}

/// Half-width of the coordinate window used for plane sampling.
pub const PLANE_HALF_WIDTH: f64 = 3.0;
/// Minimum gap between distinct coordinates in sampled plane points.
pub const PLANE_MIN_GAP: f64 = 0.2;

/// Sample `trials` plane points for every pair `i < j` and record the worst
/// boundary residual of the table's family.
pub fn check_boundary_conditions(
    wavefn: &WaveFunction,
    trials: usize,
    tol: f64,
    rng: &mut SampleRng,
) -> Result<BoundaryReport> {
    let family = *wavefn.table().family();
    let n = wavefn.system().particles();
    let mut max_residual: f64 = 0.0;
    let mut worst = None;
    let mut samples = 0;
    for i in 1..=n {
        for j in i + 1..=n {
            for _ in 0..trials {
                let x = sample_plane_point(rng, n, i, j, PLANE_HALF_WIDTH, PLANE_MIN_GAP);
                let r = boundary_residual(&family, &wavefn.one_sided_data(i, j, &x)?);
                samples += 1;
                if r > max_residual || worst.is_none() {
                    max_residual = max_residual.max(r);
                    worst = Some(PlaneLocation { pair: (i, j), x });
                }
            }
        }
    }
    Ok(BoundaryReport {
        family,
        samples,
        max_residual,
        worst,
        tol,
        pass: max_residual <= tol,
    })
}

/// `prod_{a > b} sgn(x_a - x_b)`.
pub fn kink_factor(x: &[f64]) -> f64 {
    let mut s = 1.0;
    for a in 0..x.len() {
        for b in 0..a {
            let d = x[a] - x[b];
            if d < 0.0 {
                s = -s;
            } else if d == 0.0 {
                return 0.0;
            }
        }
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KinkGaugeReport {
    pub delta_strength: f64,
    pub source_statistics: Statistics,
    pub target_statistics: Statistics,
    /// Strength `c'` of the anti-delta condition the gauged function satisfies.
    pub dual_strength: f64,
    /// Boundary residual of the gauged function against `AntiDelta(-c)`.
    pub residual_opposite_sign: f64,
    /// Same against `AntiDelta(+c)`, for the record.
    pub residual_same_sign: f64,
    /// `-1` when only `c' = -c` fits, `+1` when only `c' = +c` fits, `0` when both do (c = 0).
    pub verified_sign: i8,
    /// `max |U psi(x) - psi_dual(x)|` at random open points.
    pub pointwise_residual: f64,
    /// Entrywise distance between the two coefficient tables.
    pub table_residual: f64,
    pub samples: usize,
    pub tol: f64,
    pub pass: bool,
}

/// Multiply a delta-family wavefunction by the kink factor and check that the
/// result satisfies the anti-delta conditions with the opposite statistics.
pub fn kink_gauge_check(
    wavefn: &WaveFunction,
    trials: usize,
    tol: f64,
    rng: &mut SampleRng,
) -> Result<KinkGaugeReport> {
    let c = match *wavefn.table().family() {
        IntegrableFamily::Delta(c) => c,
        other => {
            return Err(Error::Precondition(format!(
                "kink gauge check starts from a delta wavefunction, got {}",
                other.name()
            )))
        }
    };
    let system = *wavefn.system();
    let n = system.particles();
    let dual_system = system.with_statistics(system.statistics().flipped());
    let initial = SpinVector::new(dual_system, wavefn.table().initial().to_vec())?;
    let dual = WaveFunction::build(
        &IntegrableFamily::AntiDelta(-c),
        wavefn.table().momenta(),
        &dual_system,
        &initial,
    )?;

    let eta = 1e-7;
    let mut opposite: f64 = 0.0;
    let mut same: f64 = 0.0;
    let mut samples = 0;
    for i in 1..=n {
        for j in i + 1..=n {
            for _ in 0..trials {
                let x = sample_plane_point(rng, n, i, j, PLANE_HALF_WIDTH, PLANE_MIN_GAP);
                let data = wavefn.one_sided_data(i, j, &x)?;
                let shifted = |side: f64| {
                    let mut y = x.clone();
                    y[i - 1] -= side * eta;
                    y[j - 1] += side * eta;
                    kink_factor(&y)
                };
                let gauged = data.scaled(shifted(1.0), shifted(-1.0));
                opposite =
                    opposite.max(boundary_residual(&IntegrableFamily::AntiDelta(-c), &gauged));
                same = same.max(boundary_residual(&IntegrableFamily::AntiDelta(c), &gauged));
                samples += 1;
            }
        }
    }

    let mut pointwise: f64 = 0.0;
    for _ in 0..trials.max(1) {
        let x = spread_points(rng, n, PLANE_HALF_WIDTH, PLANE_MIN_GAP);
        let u = kink_factor(&x);
        let lhs: Vec<C64> = wavefn
            .evaluate(&x)?
            .entries()
            .iter()
            .map(|z| z * u)
            .collect();
        let rhs = dual.evaluate(&x)?;
        pointwise = pointwise.max(max_abs_diff_vec(&lhs, rhs.entries()));
    }
    let table_residual = wavefn.table().max_difference(dual.table());

    let verified_sign = match (opposite <= tol, same <= tol) {
        (true, true) => 0,
        (true, false) => -1,
        (false, true) => 1,
        (false, false) => 0,
    };
    let pass = opposite <= tol && pointwise <= tol;
    Ok(KinkGaugeReport {
        delta_strength: c,
        source_statistics: system.statistics(),
        target_statistics: dual_system.statistics(),
        dual_strength: -c,
        residual_opposite_sign: opposite,
        residual_same_sign: same,
        verified_sign,
        pointwise_residual: pointwise,
        table_residual,
        samples,
        tol,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveSample {
    pub x: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl WaveSample {
    pub fn new(x: &[f64], value: &SpinVector) -> Self {
        Self {
            x: x.to_vec(),
            re: value.entries().iter().map(|z| z.re).collect(),
            im: value.entries().iter().map(|z| z.im).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::sampling::rng_from_seed;
    use crate::yops::y_family;

    fn basis(system: &SpinSystem, k: usize) -> SpinVector {
        system.basis_vector(k).unwrap()
    }

    #[test]
    fn two_body_table_uses_the_two_body_relation() {
        let s = SpinSystem::new(2, 2, Statistics::Boson).unwrap();
        let k = MomentumSet::from_real(&[0.4, 1.7]).unwrap();
        let fam = IntegrableFamily::Delta(1.2);
        let alpha =
            SpinVector::new(s, vec![c(1.0, 0.0), c(0.5, 0.2), c(-0.3, 0.0), c(0.0, 1.0)]).unwrap();
        let table = build_coefficient_table(&fam, &k, &s, &alpha).unwrap();
        let y = y_family(&fam, c(0.4 - 1.7, 0.0), &s, 1).unwrap();
        let swapped = table.entry(&Permutation::reversal(2)).unwrap();
        assert!(max_abs_diff_vec(swapped, &y.apply(alpha.entries())) < 1e-15);
    }

    #[test]
    fn free_limit_is_swap_chain() {
        let s = SpinSystem::new(3, 2, Statistics::Fermion).unwrap();
        let k = MomentumSet::from_real(&[0.1, 0.9, -1.4]).unwrap();
        let alpha = basis(&s, 3);
        let table = build_coefficient_table(&IntegrableFamily::Delta(0.0), &k, &s, &alpha).unwrap();
        for p in table.permutations() {
            let mut v = alpha.entries().to_vec();
            for &i in &p.bubble_word() {
                let map = s.swap_map(i + 1, i + 2).unwrap();
                v = gather(&map, &v).into_iter().map(|z| -z).collect();
            }
            assert!(max_abs_diff_vec(table.entry(p).unwrap(), &v) < 1e-15);
        }
    }

    #[test]
    fn separated_words_agree_n3() {
        let s = SpinSystem::new(3, 1, Statistics::Boson).unwrap();
        let k = MomentumSet::from_real(&[0.7, 1.9, 3.2]).unwrap();
        let table = build_coefficient_table(
            &IntegrableFamily::Separated(Strength::Finite(-1.0)),
            &k,
            &s,
            &basis(&s, 0),
        )
        .unwrap();
        let top = Permutation::reversal(3);
        let w1 = table.chain_along(&top.bubble_word()).unwrap();
        let w2 = table.chain_along(&top.reverse_bubble_word()).unwrap();
        assert!(max_abs_diff_vec(&w1, &w2) < 1e-12);
    }

    #[test]
    fn rejects_degenerate_and_oversized_inputs() {
        assert!(matches!(
            MomentumSet::from_real(&[1.0, 1.0]),
            Err(Error::Precondition(_))
        ));
        let s = SpinSystem::new(7, 1, Statistics::Boson).unwrap();
        let k = MomentumSet::from_real(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert!(matches!(
            build_coefficient_table(&IntegrableFamily::Delta(1.0), &k, &s, &basis(&s, 0)),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn pole_names_momentum_pair() {
        let s = SpinSystem::new(2, 1, Statistics::Boson).unwrap();
        // delta c = 1, pole at k1 - k2 = -i
        let k = MomentumSet::new(vec![c(0.0, -1.0), c(0.0, 0.0)]).unwrap();
        match build_coefficient_table(&IntegrableFamily::Delta(1.0), &k, &s, &basis(&s, 0)) {
            Err(Error::Pole { context, .. }) => assert!(context.contains("(k1, k2)"), "{context}"),
            other => panic!("expected pole, got {other:?}"),
        }
    }

    #[test]
    fn two_body_evaluation_in_both_regions() {
        let s = SpinSystem::new(2, 2, Statistics::Fermion).unwrap();
        let (k1, k2) = (0.6, -1.1);
        let k = MomentumSet::from_real(&[k1, k2]).unwrap();
        let alpha = SpinVector::new(
            s,
            vec![c(0.2, 0.0), c(1.0, -0.5), c(0.0, 0.3), c(-0.7, 0.0)],
        )
        .unwrap();
        let wf = WaveFunction::build(&IntegrableFamily::Delta(0.8), &k, &s, &alpha).unwrap();
        let a12 = alpha.entries().to_vec();
        let a21 = wf
            .table()
            .entry(&Permutation::reversal(2))
            .unwrap()
            .to_vec();
        let e = |phase: f64| C64::from_polar(1.0, phase);
        // x1 < x2
        let (x1, x2) = (0.5, 1.5);
        let direct: Vec<C64> = (0..4)
            .map(|m| a12[m] * e(k1 * x1 + k2 * x2) + a21[m] * e(k2 * x1 + k1 * x2))
            .collect();
        assert!(max_abs_diff_vec(wf.evaluate(&[x1, x2]).unwrap().entries(), &direct) < 1e-14);
        // x1 > x2: (P a12) e^{i(k1 x2 + k2 x1)} + (P a21) e^{i(k2 x2 + k1 x1)}
        let (x1, x2) = (1.5, 0.5);
        let p = s.statistics_operator(1, 2).unwrap();
        let pa12 = &p * crate::linalg::CVector::from_vec(a12.clone());
        let pa21 = &p * crate::linalg::CVector::from_vec(a21.clone());
        let direct: Vec<C64> = (0..4)
            .map(|m| pa12[m] * e(k1 * x2 + k2 * x1) + pa21[m] * e(k2 * x2 + k1 * x1))
            .collect();
        assert!(max_abs_diff_vec(wf.evaluate(&[x1, x2]).unwrap().entries(), &direct) < 1e-14);
    }

    #[test]
    fn spinless_fermions_are_odd_across_the_plane() {
        let s = SpinSystem::new(2, 1, Statistics::Fermion).unwrap();
        let k = MomentumSet::from_real(&[0.3, 1.4]).unwrap();
        let wf = WaveFunction::build(&IntegrableFamily::Delta(0.9), &k, &s, &basis(&s, 0)).unwrap();
        let data = wf.one_sided_data(1, 2, &[0.25, 0.25]).unwrap();
        assert!((data.plus[0] + data.minus[0]).norm() < 1e-14);
        assert!(matches!(
            wf.evaluate(&[0.25, 0.25]),
            Err(Error::Hyperplane(_))
        ));
    }

    #[test]
    fn one_sided_data_matches_finite_differences() {
        let s = SpinSystem::new(3, 2, Statistics::Boson).unwrap();
        let k = MomentumSet::from_real(&[0.3, -0.8, 1.6]).unwrap();
        let wf = WaveFunction::build(&IntegrableFamily::Delta(1.1), &k, &s, &basis(&s, 5)).unwrap();
        let base = [1.2, -0.4, -0.4];
        let data = wf.one_sided_data(2, 3, &base).unwrap();
        let at = |rel: f64| {
            let mut x = base;
            x[1] -= rel / 2.0;
            x[2] += rel / 2.0;
            wf.evaluate(&x).unwrap().into_entries()
        };
        let h = 1e-6;
        let fd_plus: Vec<C64> = at(2.0 * h)
            .iter()
            .zip(at(h))
            .map(|(a, b)| (a - b) / h)
            .collect();
        let fd_minus: Vec<C64> = at(-h)
            .iter()
            .zip(at(-2.0 * h))
            .map(|(a, b)| (a - b) / h)
            .collect();
        assert!(max_abs_diff_vec(&data.plus, &at(1e-9)) < 1e-7);
        assert!(max_abs_diff_vec(&data.minus, &at(-1e-9)) < 1e-7);
        assert!(max_abs_diff_vec(&data.d_plus, &fd_plus) < 1e-4);
        assert!(max_abs_diff_vec(&data.d_minus, &fd_minus) < 1e-4);
    }

    #[test]
    fn one_sided_data_rejects_off_plane_points() {
        let s = SpinSystem::new(3, 1, Statistics::Boson).unwrap();
        let k = MomentumSet::from_real(&[0.3, -0.8, 1.6]).unwrap();
        let wf = WaveFunction::build(&IntegrableFamily::Delta(1.1), &k, &s, &basis(&s, 0)).unwrap();
        assert!(wf.one_sided_data(1, 2, &[0.0, 0.1, 0.5]).is_err());
        assert!(wf.one_sided_data(1, 2, &[0.0, 0.0, 0.0]).is_err());
        assert!(wf.one_sided_data(2, 2, &[0.0, 0.0, 0.5]).is_err());
    }

    #[test]
    fn boundary_conditions_hold_for_each_family() {
        let mut rng = rng_from_seed(11);
        let k = MomentumSet::from_real(&[0.35, -1.2, 2.05]).unwrap();
        for stats in [Statistics::Boson, Statistics::Fermion] {
            let s = SpinSystem::new(3, 2, stats).unwrap();
            for fam in [
                IntegrableFamily::Delta(1.3),
                IntegrableFamily::AntiDelta(-0.6),
                IntegrableFamily::Separated(Strength::Finite(0.45)),
                IntegrableFamily::Separated(Strength::Infinite),
            ] {
                let wf = WaveFunction::build(&fam, &k, &s, &basis(&s, 6)).unwrap();
                let report = check_boundary_conditions(&wf, 5, 1e-9, &mut rng).unwrap();
                assert!(report.pass, "{fam:?} {stats:?}: {}", report.max_residual);
            }
        }
    }

    #[test]
    fn dirichlet_two_body_vanishes_on_plane() {
        let s = SpinSystem::new(2, 1, Statistics::Boson).unwrap();
        let k = MomentumSet::from_real(&[0.5, 2.0]).unwrap();
        let wf = WaveFunction::build(
            &IntegrableFamily::Separated(Strength::Infinite),
            &k,
            &s,
            &basis(&s, 0),
        )
        .unwrap();
        let data = wf.one_sided_data(1, 2, &[0.7, 0.7]).unwrap();
        assert!(data.plus[0].norm() < 1e-15 && data.minus[0].norm() < 1e-15);
    }

    #[test]
    fn kink_gauge_two_body() {
        let s = SpinSystem::new(2, 1, Statistics::Boson).unwrap();
        let k = MomentumSet::from_real(&[0.4, 1.3]).unwrap();
        let wf = WaveFunction::build(&IntegrableFamily::Delta(2.0), &k, &s, &basis(&s, 0)).unwrap();
        let report = kink_gauge_check(&wf, 10, 1e-9, &mut rng_from_seed(2)).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.verified_sign, -1);
        assert!(report.residual_same_sign > 1e-3);
        assert_eq!(report.table_residual, 0.0);
    }

    #[test]
    fn kink_gauge_free_case_gives_free_fermions() {
        let s = SpinSystem::new(2, 1, Statistics::Boson).unwrap();
        let k = MomentumSet::from_real(&[0.4, 1.3]).unwrap();
        let wf = WaveFunction::build(&IntegrableFamily::Delta(0.0), &k, &s, &basis(&s, 0)).unwrap();
        let report = kink_gauge_check(&wf, 5, 1e-9, &mut rng_from_seed(2)).unwrap();
        assert!(report.pass);
        assert_eq!(report.verified_sign, 0);
        // symmetric free bosons become antisymmetric after the gauge
        let e = |p: f64| C64::from_polar(1.0, p);
        let free = e(0.4 * 0.2 + 1.3 * 1.1) + e(1.3 * 0.2 + 0.4 * 1.1);
        for (x, sign) in [([0.2, 1.1], 1.0), ([1.1, 0.2], -1.0)] {
            let gauged = wf.evaluate(&x).unwrap().entries()[0] * kink_factor(&x);
            assert!((gauged - free * sign).norm() < 1e-14);
        }
    }

    #[test]
    fn kink_gauge_requires_delta() {
        let s = SpinSystem::new(2, 1, Statistics::Boson).unwrap();
        let k = MomentumSet::from_real(&[0.4, 1.3]).unwrap();
        let wf =
            WaveFunction::build(&IntegrableFamily::AntiDelta(1.0), &k, &s, &basis(&s, 0)).unwrap();
        assert!(kink_gauge_check(&wf, 1, 1e-9, &mut rng_from_seed(0)).is_err());
    }

    #[test]
    fn kink_factor_counts_inversions() {
        assert_eq!(kink_factor(&[0.0, 1.0, 2.0]), 1.0);
        assert_eq!(kink_factor(&[1.0, 0.0, 2.0]), -1.0);
        assert_eq!(kink_factor(&[2.0, 1.0, 0.0]), -1.0);
        assert_eq!(kink_factor(&[1.0, 1.0, 0.0]), 0.0);
    }
}
