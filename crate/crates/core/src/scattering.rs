//! N-body scattering matrices.
//!
//! `X_ij = Y^{ij}(k_i - k_j) P^{ij}` and
//!
//! ```text
//! S = [X_21 X_31 ... X_N1] [X_32 ... X_N2] ... [X_N(N-1)]
//! ```
//!
//! multiplied left to right as written. The element
//! `<s'_1..s'_N| S |s_1..s_N>` sits at row `basis_index(s')`, column `basis_index(s)`.

use serde::Serialize;

use crate::bethe::MomentumSet;
use crate::error::{Error, Result};
use crate::linalg::{identity, symmetry_residual, unitarity_residual, CMatrix, C64, I};
use crate::params::{IntegrableFamily, Strength};
use crate::spinspace::SpinSystem;
use crate::yops::family_coefficients;

#[derive(Debug, Clone, PartialEq)]
pub struct SMatrix {
    pub system: SpinSystem,
    pub momenta: MomentumSet,
    pub family: IntegrableFamily,
    pub matrix: CMatrix,
}

fn check_inputs(momenta: &MomentumSet, system: &SpinSystem) -> Result<()> {
    if momenta.len() != system.particles() {
        return Err(Error::Domain(format!(
            "{} momenta for N = {}",
            momenta.len(),
            system.particles()
        )));
    }
    if system.particles() < 2 {
        return Err(Error::Domain("scattering needs N >= 2".into()));
    }
    Ok(())
}

/// `X_ij` for 1-based labels `i != j`.
pub fn x_operator(
    family: &IntegrableFamily,
    momenta: &MomentumSet,
    i: usize,
    j: usize,
    system: &SpinSystem,
) -> Result<CMatrix> {
    check_inputs(momenta, system)?;
    let n = system.particles();
    if i == 0 || j == 0 || i > n || j > n || i == j {
        return Err(Error::Domain(format!(
            "pair ({i}, {j}) invalid for N = {n}"
        )));
    }
    let k = momenta.as_slice();
    let y = family_coefficients(family, k[i - 1] - k[j - 1])
        .map_err(|e| e.in_context(format!("X_{i}{j}")))?;
    // (swap P + identity) P = swap + identity P
    let p = system.statistics_operator(i.min(j), i.max(j))?;
    Ok(identity(system.dim()) * y.swap + p * y.identity)
}

fn product_in_order(
    family: &IntegrableFamily,
    momenta: &MomentumSet,
    system: &SpinSystem,
    brackets: &[Vec<(usize, usize)>],
) -> Result<CMatrix> {
    let mut s = identity(system.dim());
    for bracket in brackets {
        for &(i, j) in bracket {
            s *= x_operator(family, momenta, i, j, system)?;
        }
    }
    Ok(s)
}

/// Bracket layout of the full product: bracket `j` holds `X_{j+1,j} ... X_{N,j}`.
pub fn s_matrix_brackets(particles: usize) -> Vec<Vec<(usize, usize)>> {
    (1..particles)
        .map(|j| (j + 1..=particles).map(|i| (i, j)).collect())
        .collect()
}

pub fn s_matrix(
    family: &IntegrableFamily,
    momenta: &MomentumSet,
    system: &SpinSystem,
) -> Result<SMatrix> {
    check_inputs(momenta, system)?;
    let matrix = product_in_order(
        family,
        momenta,
        system,
        &s_matrix_brackets(system.particles()),
    )?;
    Ok(SMatrix {
        system: *system,
        momenta: momenta.clone(),
        family: *family,
        matrix,
    })
}

/// `S'` times the permutation chain `[P_12][P_23 P_12] ... [P_(N-1)N ... P_12]`,
/// where `S'` is the product over `r` of `Y^{m,m+1}(k_{r+m} - k_r)`, `m = 1..N-r`.
pub fn s_matrix_via_sprime(
    family: &IntegrableFamily,
    momenta: &MomentumSet,
    system: &SpinSystem,
) -> Result<SMatrix> {
    check_inputs(momenta, system)?;
    let n = system.particles();
    let k = momenta.as_slice();
    let mut s = identity(system.dim());
    for r in 1..n {
        for m in 1..=n - r {
            let y = family_coefficients(family, k[r + m - 1] - k[r - 1])
                .map_err(|e| e.in_context(format!("S' factor Y^{m}{}", m + 1)))?;
            s *= y.matrix(system, m, m + 1)?;
        }
    }
    for top in 1..n {
        for m in (1..=top).rev() {
            s *= system.statistics_operator(m, m + 1)?;
        }
    }
    Ok(SMatrix {
        system: *system,
        momenta: momenta.clone(),
        family: *family,
        matrix: s,
    })
}

/// Brackets for a cluster of `sizes.0` particles hit by one of `sizes.1`:
/// for `j` in the first cluster from last to first, `X_ij` over the second cluster in ascending `i`.
pub fn cluster_brackets(sizes: (usize, usize)) -> Vec<Vec<(usize, usize)>> {
    let (na, nb) = sizes;
    (1..=na)
        .rev()
        .map(|j| (na + 1..=na + nb).map(|i| (i, j)).collect())
        .collect()
}

/// Bound ladders of each cluster shifted by real cluster momenta.
pub fn cluster_momenta(h: f64, sizes: (usize, usize), shifts: (f64, f64)) -> Result<MomentumSet> {
    let ladder = |size: usize, shift: f64| -> Vec<C64> {
        (1..=size)
            .map(|j| shift + I * (h * (size as f64 + 1.0 - 2.0 * j as f64)))
            .collect()
    };
    let mut k = ladder(sizes.0, shifts.0);
    k.extend(ladder(sizes.1, shifts.1));
    MomentumSet::new(k)
}

/// Cluster-on-cluster scattering for the separated family at `h < 0`.
pub fn cluster_s_matrix(
    h: f64,
    sizes: (usize, usize),
    shifts: (f64, f64),
    system: &SpinSystem,
) -> Result<SMatrix> {
    if !(h.is_finite() && h < 0.0) {
        return Err(Error::Precondition(format!(
            "clusters need finite h < 0, got {h}"
        )));
    }
    if sizes.0 == 0 || sizes.1 == 0 || sizes.0 + sizes.1 != system.particles() {
        return Err(Error::Domain(format!(
            "cluster sizes {sizes:?} do not add up to N = {}",
            system.particles()
        )));
    }
    let momenta = cluster_momenta(h, sizes, shifts)?;
    let family = IntegrableFamily::Separated(Strength::Finite(h));
    let matrix = product_in_order(&family, &momenta, system, &cluster_brackets(sizes))?;
    Ok(SMatrix {
        system: *system,
        momenta,
        family,
        matrix,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SReport {
    pub unitarity: f64,
    pub symmetry: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn verify_s_properties(s: &SMatrix, tol: f64) -> SReport {
    let unitarity = unitarity_residual(&s.matrix);
    let symmetry = symmetry_residual(&s.matrix);
    SReport {
        unitarity,
        symmetry,
        tol,
        pass: unitarity <= tol && symmetry <= tol,
    }
}
