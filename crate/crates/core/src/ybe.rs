//! Yang-Baxter consistency residuals and the parameter-space classification scan.
//!
//! With the convention that `Y_{ab}` carries the spectral parameter
//! `k_a - k_b`, the three-site relation checked is
//!
//! ```text
//! Y^{12}_{ij} Y^{23}_{kj} Y^{12}_{ki} = Y^{23}_{ki} Y^{12}_{kj} Y^{23}_{ij}
//! ```
//!
//! together with the unitarity-type relation `Y_{ij} Y_{ji} = 1` and the
//! commutation of Y-operators on disjoint site pairs.

use std::cmp::Ordering;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{commutator_residual, identity, max_abs_diff, CMatrix, C64};
use crate::params::{
    normalize_angle, validate_nonseparated, ContactParams, NonSeparatedParams, SeparatedParams,
    Strength,
};
use crate::sampling::{rng_from_seed, MomentumSampler};
use crate::spinspace::SpinSystem;
use crate::yops::{contact_coefficients, pole_distance};

/// Pass threshold for the residuals.
pub const PASS_TOL: f64 = 1e-10;
/// Failure floor used by the classification: non-integrable points must exceed it.
pub const FAIL_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YbeReport {
    pub params: ParamsRecord,
    #[serde(serialize_with = "crate::linalg::serialize_complex_seq")]
    pub momenta: [C64; 3],
    /// Max-norm of the difference of the two sides of the three-site relation.
    pub residual_ybe: f64,
    /// `max over ordered pairs of ||Y(k_a - k_b) Y(k_b - k_a) - 1||`.
    pub residual_inverse: f64,
    /// `||[Y^{12}, Y^{34}]||` on the four-site extension.
    pub residual_commute: f64,
    pub tol: f64,
    pub verdict: bool,
}

impl YbeReport {
    pub fn max_residual(&self) -> f64 {
        self.residual_ybe
            .max(self.residual_inverse)
            .max(self.residual_commute)
    }
}

/// Flat, serializable view of any parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ParamsRecord {
    Nonseparated {
        theta: f64,
        a: f64,
        b: f64,
        c: f64,
        d: f64,
    },
    Separated {
        h: Strength,
    },
}

impl From<&ContactParams> for ParamsRecord {
    fn from(p: &ContactParams) -> Self {
        match *p {
            ContactParams::NonSeparated(NonSeparatedParams { theta, a, b, c, d }) => {
                ParamsRecord::Nonseparated { theta, a, b, c, d }
            }
            ContactParams::Separated(SeparatedParams { h }) => ParamsRecord::Separated { h },
        }
    }
}

fn y_matrix(
    params: &ContactParams,
    k_diff: C64,
    system: &SpinSystem,
    pair: usize,
    label: &str,
) -> Result<CMatrix> {
    contact_coefficients(params, k_diff)
        .map_err(|e| e.in_context(label))?
        .matrix(system, pair, pair + 1)
}

fn require_distinct(momenta: &[C64]) -> Result<()> {
    for a in 0..momenta.len() {
        for b in a + 1..momenta.len() {
            if momenta[a] == momenta[b] {
                return Err(Error::Precondition(format!(
                    "momenta {} and {} coincide ({})",
                    a + 1,
                    b + 1,
                    momenta[a]
                )));
            }
        }
    }
    Ok(())
}

/// Residual of the three-site relation alone.
pub fn ybe_three_site_residual(
    params: &ContactParams,
    momenta: [C64; 3],
    system: &SpinSystem,
) -> Result<f64> {
    if system.particles() != 3 {
        return Err(Error::Domain(format!(
            "three-site relation needs N = 3, got N = {}",
            system.particles()
        )));
    }
    require_distinct(&momenta)?;
    let [ki, kj, kk] = momenta;
    let a = |k: C64, label: &str| y_matrix(params, k, system, 1, label);
    let b = |k: C64, label: &str| y_matrix(params, k, system, 2, label);
    let lhs = a(ki - kj, "pair (i,j)")? * b(kk - kj, "pair (k,j)")? * a(kk - ki, "pair (k,i)")?;
    let rhs = b(kk - ki, "pair (k,i)")? * a(kk - kj, "pair (k,j)")? * b(ki - kj, "pair (i,j)")?;
    Ok(max_abs_diff(&lhs, &rhs))
}

/// `||Y(k_i - k_j) Y(k_j - k_i) - 1||_max` on sites 1, 2.
pub fn inverse_residual(
    params: &ContactParams,
    k_i: C64,
    k_j: C64,
    system: &SpinSystem,
) -> Result<f64> {
    if system.particles() < 2 {
        return Err(Error::Domain("inverse relation needs N >= 2".into()));
    }
    require_distinct(&[k_i, k_j])?;
    let forward = y_matrix(params, k_i - k_j, system, 1, "pair (i,j)")?;
    let backward = y_matrix(params, k_j - k_i, system, 1, "pair (j,i)")?;
    Ok(max_abs_diff(&(forward * backward), &identity(system.dim())))
}

/// `||[Y^{12}(k_1 - k_2), Y^{34}(k_3 - k_4)]||_max` on a four-site system.
pub fn commute_residual(
    params: &ContactParams,
    momenta: [C64; 4],
    system: &SpinSystem,
) -> Result<f64> {
    if system.particles() < 4 {
        return Err(Error::Domain(format!(
            "commutation relation needs N >= 4, got N = {}",
            system.particles()
        )));
    }
    let y12 = y_matrix(params, momenta[0] - momenta[1], system, 1, "pair (1,2)")?;
    let y34 = y_matrix(params, momenta[2] - momenta[3], system, 3, "pair (3,4)")?;
    Ok(commutator_residual(&y12, &y34))
}

/// All three consistency residuals at one momentum triple; `system` must have N = 3.
pub fn ybe_residual(
    params: &ContactParams,
    momenta: [C64; 3],
    system: &SpinSystem,
    tol: f64,
) -> Result<YbeReport> {
    let residual_ybe = ybe_three_site_residual(params, momenta, system)?;
    let mut residual_inverse: f64 = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            if a != b {
                residual_inverse =
                    residual_inverse.max(inverse_residual(params, momenta[a], momenta[b], system)?);
            }
        }
    }
    let four = system.with_particles(4)?;
    let [k1, k2, k3] = momenta;
    let residual_commute = commute_residual(params, [k1, k2, k2, k3], &four)?;
    let mut report = YbeReport {
        params: ParamsRecord::from(params),
        momenta,
        residual_ybe,
        residual_inverse,
        residual_commute,
        tol,
        verdict: false,
    };
    report.verdict = report.max_residual() <= tol;
    Ok(report)
}

/// Grid over the nonseparated parameters; `d` follows from `ad - bc = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonSeparatedGrid {
    pub thetas: Vec<f64>,
    pub a_values: Vec<f64>,
    pub b_values: Vec<f64>,
    pub c_values: Vec<f64>,
    /// `d` values used at `a = 0`, where only `bc = -1` lies on the manifold.
    pub d_when_a_zero: Vec<f64>,
}

impl Default for NonSeparatedGrid {
    fn default() -> Self {
        Self {
            thetas: vec![0.0, 0.5, -0.5],
            a_values: vec![1.0, -1.0, 2.0, -2.0],
            b_values: vec![0.0, 1.0, -1.0],
            c_values: vec![-2.0, 0.0, 2.0],
            d_when_a_zero: vec![0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScanGrid {
    Nonseparated(NonSeparatedGrid),
    Separated { h_values: Vec<Strength> },
}

impl ScanGrid {
    /// Parameter points on the grid, plus the number of `a = 0` cells off the manifold.
    pub fn points(&self) -> Result<(Vec<ContactParams>, usize)> {
        match self {
            ScanGrid::Separated { h_values } => Ok((
                h_values
                    .iter()
                    .map(|&h| ContactParams::Separated(SeparatedParams { h }))
                    .collect(),
                0,
            )),
            ScanGrid::Nonseparated(g) => {
                let mut out = Vec::new();
                let mut skipped = 0;
                for &theta in &g.thetas {
                    for &a in &g.a_values {
                        for &b in &g.b_values {
                            for &c in &g.c_values {
                                if a != 0.0 {
                                    let d = (1.0 + b * c) / a;
                                    let p = validate_nonseparated(NonSeparatedParams::new(
                                        theta, a, b, c, d,
                                    ))?;
                                    out.push(p.into());
                                } else if (b * c + 1.0).abs() <= 1e-12 {
                                    for &d in &g.d_when_a_zero {
                                        let p = validate_nonseparated(NonSeparatedParams::new(
                                            theta, a, b, c, d,
                                        ))?;
                                        out.push(p.into());
                                    }
                                } else {
                                    skipped += 1;
                                }
                            }
                        }
                    }
                }
                Ok((out, skipped))
            }
        }
    }
}

/// Points expected to pass every consistency relation.
///
/// For `n >= 2` this is `theta in {0, pi}`, `a = d`, `b = 0`; the `theta = pi`
/// points are the anti-delta/delta family with the opposite overall sign. For
/// `n = 1` the swap is a scalar, the three-site relation holds identically,
/// and only the inverse relation constrains: `theta in {0, pi}`, `a = d`.
pub fn predicted_pass(params: &ContactParams, spin_states: usize) -> bool {
    const EPS: f64 = 1e-12;
    match *params {
        ContactParams::Separated(_) => true,
        ContactParams::NonSeparated(p) => {
            let theta = normalize_angle(p.theta);
            let phase_ok = theta.abs() <= EPS || (theta - std::f64::consts::PI).abs() <= EPS;
            let symmetric = (p.a - p.d).abs() <= EPS;
            let b_ok = spin_states == 1 || p.b.abs() <= EPS;
            phase_ok && symmetric && b_ok
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub params: ParamsRecord,
    pub max_residual: f64,
    pub max_residual_ybe: f64,
    pub max_residual_inverse: f64,
    pub verdict: bool,
    pub predicted: bool,
    pub resampled: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTable {
    pub spin_states: usize,
    pub statistics: crate::spinspace::Statistics,
    pub tol: f64,
    pub fail_floor: f64,
    #[serde(serialize_with = "crate::linalg::serialize_complex_rows")]
    pub base_triples: Vec<[C64; 3]>,
    pub rows: Vec<ScanRow>,
    pub skipped_points: usize,
    pub resampled_triples: usize,
    /// Every passing row is predicted, every predicted row passes, and every
    /// failing row is above the failure floor.
    pub matches_prediction: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub grid: ScanGrid,
    pub system: SpinSystem,
    pub triples: usize,
    pub tol: f64,
    pub seed: u64,
}

fn point_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn cmp_records(a: &ParamsRecord, b: &ParamsRecord) -> Ordering {
    match (a, b) {
        (
            ParamsRecord::Nonseparated { theta, a, b, c, d },
            ParamsRecord::Nonseparated {
                theta: t2,
                a: a2,
                b: b2,
                c: c2,
                d: d2,
            },
        ) => theta
            .total_cmp(t2)
            .then(a.total_cmp(a2))
            .then(b.total_cmp(b2))
            .then(c.total_cmp(c2))
            .then(d.total_cmp(d2)),
        (ParamsRecord::Separated { h }, ParamsRecord::Separated { h: h2 }) => {
            h.as_f64().total_cmp(&h2.as_f64())
        }
        (ParamsRecord::Nonseparated { .. }, ParamsRecord::Separated { .. }) => Ordering::Less,
        (ParamsRecord::Separated { .. }, ParamsRecord::Nonseparated { .. }) => Ordering::Greater,
    }
}

/// Evaluate every grid point at a shared set of momentum triples (replacing a
/// triple by a fresh draw where it comes near a pole of that point) and
/// compare the pass set with [`predicted_pass`]. Rows are sorted by grid
/// coordinates regardless of evaluation order.
pub fn classification_scan(config: &ScanConfig) -> Result<ScanTable> {
    let system = config.system;
    if system.particles() != 3 {
        return Err(Error::Domain("classification scan runs on N = 3".into()));
    }
    if config.triples == 0 {
        return Err(Error::Config("need at least one momentum triple".into()));
    }
    let (points, skipped_points) = config.grid.points()?;
    if points.is_empty() {
        return Err(Error::Config("scan grid is empty".into()));
    }
    let sampler = MomentumSampler::default();
    let mut base_rng = rng_from_seed(config.seed);
    let base_triples: Vec<[C64; 3]> = (0..config.triples)
        .map(|_| {
            sampler
                .sample(&mut base_rng, 3, None)
                .map(|d| [d.value[0], d.value[1], d.value[2]])
        })
        .collect::<Result<_>>()?;

    let near_pole = |params: &ContactParams, t: &[C64; 3]| {
        (0..3).any(|a| {
            (0..3).any(|b| a != b && pole_distance(params, t[a] - t[b]) < sampler.min_pole_distance)
        })
    };

    let mut rows = points
        .par_iter()
        .enumerate()
        .map(|(index, params)| -> Result<ScanRow> {
            let mut rng = rng_from_seed(point_seed(config.seed, index));
            let mut resampled = 0;
            let mut max_ybe: f64 = 0.0;
            let mut max_inv: f64 = 0.0;
            let mut max_all: f64 = 0.0;
            for base in &base_triples {
                let mut triple = *base;
                if near_pole(params, &triple) {
                    let draw = sampler.sample(&mut rng, 3, Some(params))?;
                    triple = [draw.value[0], draw.value[1], draw.value[2]];
                    resampled += 1;
                }
                let report = ybe_residual(params, triple, &system, config.tol)?;
                max_ybe = max_ybe.max(report.residual_ybe);
                max_inv = max_inv.max(report.residual_inverse);
                max_all = max_all.max(report.max_residual());
            }
            Ok(ScanRow {
                params: ParamsRecord::from(params),
                max_residual: max_all,
                max_residual_ybe: max_ybe,
                max_residual_inverse: max_inv,
                verdict: max_all <= config.tol,
                predicted: predicted_pass(params, system.spin_states()),
                resampled,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| cmp_records(&a.params, &b.params));

    let matches_prediction = rows.iter().all(|r| {
        if r.predicted {
            r.verdict
        } else {
            !r.verdict && r.max_residual > FAIL_FLOOR
        }
    });
    let resampled_triples = rows.iter().map(|r| r.resampled).sum();
    Ok(ScanTable {
        spin_states: system.spin_states(),
        statistics: system.statistics(),
        tol: config.tol,
        fail_floor: FAIL_FLOOR,
        base_triples,
        rows,
        skipped_points,
        resampled_triples,
        matches_prediction,
    })
}

impl ScanTable {
    pub fn pass_set(&self) -> Vec<&ParamsRecord> {
        self.rows
            .iter()
            .filter(|r| r.verdict)
            .map(|r| &r.params)
            .collect()
    }

    /// CSV with columns `theta,a,b,c,d,max_residual,verdict` (or `h,...` for a
    /// separated scan).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::Config(format!("csv output failed: {e}"));
        let mut w = csv::Writer::from_writer(out);
        let separated = matches!(
            self.rows.first().map(|r| r.params),
            Some(ParamsRecord::Separated { .. })
        );
        if separated {
            w.write_record(["h", "max_residual", "verdict"])
                .map_err(io)?;
        } else {
            w.write_record(["theta", "a", "b", "c", "d", "max_residual", "verdict"])
                .map_err(io)?;
        }
        for row in &self.rows {
            let verdict = if row.verdict { "pass" } else { "fail" }.to_string();
            let residual = format!("{:e}", row.max_residual);
            match row.params {
                ParamsRecord::Nonseparated { theta, a, b, c, d } => w
                    .write_record([
                        theta.to_string(),
                        a.to_string(),
                        b.to_string(),
                        c.to_string(),
                        d.to_string(),
                        residual,
                        verdict,
                    ])
                    .map_err(io)?,
                ParamsRecord::Separated { h } => w
                    .write_record([h.to_string(), residual, verdict])
                    .map_err(io)?,
            }
        }
        w.flush()
            .map_err(|e| Error::Config(format!("csv output failed: {e}")))?;
        Ok(())
    }
}
