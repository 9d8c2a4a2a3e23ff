//! Small dense complex helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Serialize, Serializer};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// JSON shape of a complex number, `{"re": .., "im": ..}`. Negative zeros
/// are cleared so that output does not depend on how a zero was reached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexRecord {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexRecord {
    fn from(z: C64) -> Self {
        Self {
            re: z.re + 0.0,
            im: z.im + 0.0,
        }
    }
}

pub fn complex_records(v: &[C64]) -> Vec<ComplexRecord> {
    v.iter().map(|&z| z.into()).collect()
}

/// `serialize_with` helper for any sequence of complex numbers.
pub fn serialize_complex_seq<S: Serializer, T: AsRef<[C64]>>(
    v: &T,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.as_ref().iter().map(|&z| ComplexRecord::from(z)))
}

/// `serialize_with` helper for a list of complex sequences.
pub fn serialize_complex_rows<S: Serializer, R: AsRef<[C64]>, T: AsRef<[R]>>(
    rows: &T,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_seq(rows.as_ref().iter().map(|r| complex_records(r.as_ref())))
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff_vec(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// `max |(A^† A - I)_{ij}|`.
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    let prod = m.adjoint() * m;
    max_abs_diff(&prod, &identity(m.nrows()))
}

/// `max |(A - A^T)_{ij}|` (plain transpose, no conjugation).
pub fn symmetry_residual(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.transpose())
}

/// `max |[A, B]_{ij}|`.
pub fn commutator_residual(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs_diff(&(a * b), &(b * a))
}

/// Parse a complex token: `1.5`, `-2`, `0.3+1.2i`, `-1i`, `2i`, `i`, `-i`.
pub fn parse_complex(token: &str) -> Option<C64> {
    let t: String = token.chars().filter(|ch| !ch.is_whitespace()).collect();
    if t.is_empty() {
        return None;
    }
    if let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) {
        // split at the last sign that is not an exponent sign and not the leading char
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            let ch = bytes[idx] as char;
            if (ch == '+' || ch == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
                split = Some(idx);
                break;
            }
        }
        let imag = |s: &str| -> Option<f64> {
            match s {
                "" | "+" => Some(1.0),
                "-" => Some(-1.0),
                _ => s.parse().ok(),
            }
        };
        match split {
            Some(idx) => {
                let re: f64 = body[..idx].parse().ok()?;
                Some(C64::new(re, imag(&body[idx..])?))
            }
            None => Some(C64::new(0.0, imag(body)?)),
        }
    } else {
        t.parse::<f64>().ok().map(|re| C64::new(re, 0.0))
    }
}
