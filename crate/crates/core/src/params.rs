//! Contact boundary-condition data, validation, and the direct two-body solve.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, I};
use crate::spinspace::{SpinSystem, Statistics};

/// Tolerance on `ad - bc = 1`.
pub const DETERMINANT_TOL: f64 = 1e-12;

/// Relative threshold below which a denominator counts as a pole.
pub const POLE_TOL: f64 = 1e-13;

/// A real coupling that may also take the value infinity (Dirichlet limit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strength {
    Finite(f64),
    Infinite,
}

impl Strength {
    pub fn from_f64(h: f64) -> Result<Self> {
        if h.is_nan() {
            Err(Error::Domain("h must not be NaN".into()))
        } else if h.is_infinite() {
            Ok(Strength::Infinite)
        } else {
            Ok(Strength::Finite(h))
        }
    }

    /// Parses a real number or `inf` / `infinity` / `∞`.
    pub fn parse(token: &str) -> Result<Self> {
        let t = token.trim().to_ascii_lowercase();
        match t.as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" | "∞" => Ok(Strength::Infinite),
            _ => t
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("cannot parse strength '{token}'")))
                .and_then(Self::from_f64),
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Strength::Finite(h) => h,
            Strength::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Strength::Infinite)
    }
}

impl fmt::Display for Strength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strength::Finite(h) => write!(f, "{h}"),
            Strength::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Strength {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Strength::Finite(h) => s.serialize_f64(*h),
            Strength::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Transfer-matrix boundary data `(phi, phi')_{0+} = e^{i theta} [[a, b], [c, d]] (phi, phi')_{0-}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonSeparatedParams {
    pub theta: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl NonSeparatedParams {
    pub fn new(theta: f64, a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { theta, a, b, c, d }
    }

    pub fn determinant_residual(&self) -> f64 {
        self.a * self.d - self.b * self.c - 1.0
    }
}

/// Separated (Robin) data `phi'(0+) = h phi(0+)`, `phi'(0-) = -h phi(0-)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparatedParams {
    pub h: Strength,
}

/// The three one-parameter families that pass the consistency conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegrableFamily {
    Delta(f64),
    AntiDelta(f64),
    Separated(Strength),
}

impl IntegrableFamily {
    pub fn name(&self) -> &'static str {
        match self {
            IntegrableFamily::Delta(_) => "delta",
            IntegrableFamily::AntiDelta(_) => "antidelta",
            IntegrableFamily::Separated(_) => "separated",
        }
    }

    /// Boundary data the family stands for.
    pub fn embed(&self) -> ContactParams {
        match *self {
            IntegrableFamily::Delta(c) => {
                ContactParams::NonSeparated(NonSeparatedParams::new(0.0, 1.0, 0.0, c, 1.0))
            }
            IntegrableFamily::AntiDelta(c) => {
                ContactParams::NonSeparated(NonSeparatedParams::new(0.0, -1.0, 0.0, c, -1.0))
            }
            IntegrableFamily::Separated(h) => ContactParams::Separated(SeparatedParams { h }),
        }
    }
}

impl Serialize for IntegrableFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("IntegrableFamily", 2)?;
        st.serialize_field("family", self.name())?;
        match self {
            IntegrableFamily::Delta(c) | IntegrableFamily::AntiDelta(c) => {
                st.serialize_field("c", c)?
            }
            IntegrableFamily::Separated(h) => st.serialize_field("h", h)?,
        }
        st.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContactParams {
    NonSeparated(NonSeparatedParams),
    Separated(SeparatedParams),
}

impl ContactParams {
    /// Recognizes the integrable families exactly (no tolerance).
    pub fn as_family(&self) -> Option<IntegrableFamily> {
        match *self {
            ContactParams::Separated(SeparatedParams { h }) => Some(IntegrableFamily::Separated(h)),
            ContactParams::NonSeparated(p) if p.theta == 0.0 && p.b == 0.0 => {
                if p.a == 1.0 && p.d == 1.0 {
                    Some(IntegrableFamily::Delta(p.c))
                } else if p.a == -1.0 && p.d == -1.0 {
                    Some(IntegrableFamily::AntiDelta(p.c))
                } else {
                    None
                }
            }
            ContactParams::NonSeparated(_) => None,
        }
    }
}

impl From<IntegrableFamily> for ContactParams {
    fn from(f: IntegrableFamily) -> Self {
        f.embed()
    }
}

impl From<NonSeparatedParams> for ContactParams {
    fn from(p: NonSeparatedParams) -> Self {
        ContactParams::NonSeparated(p)
    }
}

impl From<SeparatedParams> for ContactParams {
    fn from(p: SeparatedParams) -> Self {
        ContactParams::Separated(p)
    }
}

/// Map an angle into `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

pub fn validate_nonseparated(params: NonSeparatedParams) -> Result<NonSeparatedParams> {
    let values = [params.theta, params.a, params.b, params.c, params.d];
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(
            "theta, a, b, c, d must be finite reals".into(),
        ));
    }
    let residual = params.determinant_residual();
    if residual != 0.0 && residual.abs() > DETERMINANT_TOL {
        return Err(Error::Determinant { residual });
    }
    Ok(NonSeparatedParams {
        theta: normalize_angle(params.theta),
        ..params
    })
}

pub fn validate_separated(h_plus: Strength, h_minus: Strength) -> Result<SeparatedParams> {
    let consistent = match (h_plus, h_minus) {
        (Strength::Infinite, Strength::Infinite) => true,
        (Strength::Finite(p), Strength::Finite(m)) => {
            let sum = p + m;
            sum == 0.0 || sum.abs() <= DETERMINANT_TOL * p.abs().max(m.abs()).max(1.0)
        }
        _ => false,
    };
    if !consistent {
        return Err(Error::InconsistentSeparated {
            h_plus: h_plus.to_string(),
            h_minus: h_minus.to_string(),
        });
    }
    Ok(SeparatedParams { h: h_plus })
}

/// Coefficients `(u, v, x, y)` of one boundary row
/// `u phi(0+) + v phi'(0+) + x phi(0-) + y phi'(0-) = 0`.
type BoundaryRow = (C64, C64, C64, C64);

fn boundary_rows(params: &ContactParams) -> [BoundaryRow; 2] {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    match *params {
        ContactParams::NonSeparated(p) => {
            let phase = C64::from_polar(1.0, p.theta);
            [
                (one, zero, -phase * p.a, -phase * p.b),
                (zero, one, -phase * p.c, -phase * p.d),
            ]
        }
        ContactParams::Separated(SeparatedParams { h }) => match h {
            // phi'(0+) - h phi(0+) = 0 and phi'(0-) + h phi(0-) = 0
            Strength::Finite(h) => [
                (C64::new(-h, 0.0), one, zero, zero),
                (zero, zero, C64::new(h, 0.0), one),
            ],
            Strength::Infinite => [(one, zero, zero, zero), (zero, zero, one, zero)],
        },
    }
}

/// Solve the two-particle boundary problem directly for the matrix `M` with
/// `alpha_21 = M alpha_12`.
///
/// `k12` is the half difference `(k_1 - k_2) / 2`. Both rows of the boundary
/// conditions are written in the unknowns `alpha_21` and `P alpha_21`, the
/// latter treated as an independent block, and the resulting `2 n^2` square
/// system is solved by dense LU for every basis column of `alpha_12`. Nothing
/// here uses the closed-form Y-operators.
pub fn two_body_relation_oracle(
    params: &ContactParams,
    k12: C64,
    system: &SpinSystem,
) -> Result<CMatrix> {
    if system.particles() != 2 {
        return Err(Error::Domain(format!(
            "two-body oracle needs N = 2, got N = {}",
            system.particles()
        )));
    }
    let dim = system.dim();
    let swap = system.statistics_operator(1, 2)?;
    let rows = boundary_rows(params);

    // phi(0+) = a12 + a21, phi'(0+) = i k (a21 - a12),
    // phi(0-) = P a12 + g,  phi'(0-) = i k (P a12 - g),  g = P a21.
    let ik = I * k12;
    let coeff_a21 = |r: &BoundaryRow| r.0 + ik * r.1;
    let coeff_g = |r: &BoundaryRow| r.2 - ik * r.3;
    let coeff_a12 = |r: &BoundaryRow| r.0 - ik * r.1;
    let coeff_pa12 = |r: &BoundaryRow| r.2 + ik * r.3;

    let block_det =
        coeff_a21(&rows[0]) * coeff_g(&rows[1]) - coeff_g(&rows[0]) * coeff_a21(&rows[1]);
    let scale = rows
        .iter()
        .flat_map(|r| [coeff_a21(r).norm(), coeff_g(r).norm()])
        .fold(0.0, f64::max)
        .powi(2);
    if block_det.norm() <= POLE_TOL * (1.0 + scale) {
        return Err(Error::Pole {
            context: format!("two-body relation at k12 = {k12}"),
            denominator: block_det.norm(),
        });
    }

    let mut lhs = DMatrix::<C64>::zeros(2 * dim, 2 * dim);
    let mut rhs = DMatrix::<C64>::zeros(2 * dim, dim);
    for (r, row) in rows.iter().enumerate() {
        for k in 0..dim {
            lhs[(r * dim + k, k)] = coeff_a21(row);
            lhs[(r * dim + k, dim + k)] = coeff_g(row);
        }
        // columns: alpha_12 = e_col
        let known = CMatrix::identity(dim, dim) * coeff_a12(row) + &swap * coeff_pa12(row);
        rhs.view_mut((r * dim, 0), (dim, dim)).copy_from(&(-known));
    }
    let solution = lhs.lu().solve(&rhs).ok_or_else(|| Error::Pole {
        context: format!("two-body relation at k12 = {k12} (singular solve)"),
        denominator: block_det.norm(),
    })?;
    Ok(solution.rows(0, dim).into_owned())
}

/// Convenience: the two-body system for a given spin dimension and statistics.
pub fn two_body_system(spin_states: usize, statistics: Statistics) -> Result<SpinSystem> {
    SpinSystem::new(2, spin_states, statistics)
}
