//! C interface to `contact-core`.
//!
//! Every fallible call returns a [`ContactStatus`]. On failure a description
//! is kept per thread and can be read with [`contact_last_error_message`].
//! Matrices are written row-major into caller-provided buffers; complex
//! numbers cross the boundary as [`ContactComplex`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use contact_core::bethe::{MomentumSet, WaveFunction};
use contact_core::linalg::C64;
use contact_core::scattering::s_matrix;
use contact_core::spectra::{bound_energy, bound_momenta};
use contact_core::ybe::ybe_residual;
use contact_core::yops::family_coefficients;
use contact_core::{
    ContactParams, Error, IntegrableFamily, NonSeparatedParams, SpinSystem, SpinVector, Statistics,
    Strength,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContactStatus {
    Ok = 0,
    Domain = 1,
    Pole = 2,
    Precondition = 3,
    Size = 4,
    Hyperplane = 5,
    InvalidParams = 6,
    NullPointer = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContactFamilyKind {
    Delta = 0,
    AntiDelta = 1,
    Separated = 2,
}

/// An integrable family. `strength` is `c` for the delta families and `h`
/// for the separated one, where `INFINITY` selects the hard wall.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ContactFamily {
    pub kind: ContactFamilyKind,
    pub strength: f64,
}

/// General nonseparated parameters; must satisfy `ad - bc = 1`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ContactGeneralParams {
    pub theta: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ContactComplex {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ContactComplex> for C64 {
    fn from(z: ContactComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

/// Opaque spin system handle.
pub struct ContactSystem {
    inner: SpinSystem,
}

/// Opaque wavefunction handle.
pub struct ContactWaveFunction {
    inner: WaveFunction,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> ContactStatus {
    match err {
        Error::Domain(_) => ContactStatus::Domain,
        Error::Pole { .. } => ContactStatus::Pole,
        Error::Precondition(_) => ContactStatus::Precondition,
        Error::Size(_) => ContactStatus::Size,
        Error::Hyperplane(_) => ContactStatus::Hyperplane,
        Error::Determinant { .. } | Error::InconsistentSeparated { .. } | Error::Config(_) => {
            ContactStatus::InvalidParams
        }
    }
}

struct Failure(ContactStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> ContactStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ContactStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside contact-core".into());
            ContactStatus::Panic
        }
    }
}

fn null() -> Failure {
    Failure(ContactStatus::NullPointer, "null pointer argument".into())
}

unsafe fn input<'a, T>(p: *const T, len: usize) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a, T>(p: *mut T, len: usize, need: usize) -> Result<&'a mut [T], Failure> {
    if len < need {
        return Err(Failure(
            ContactStatus::BufferTooSmall,
            format!("output buffer holds {len} values, need {need}"),
        ));
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(slice::from_raw_parts_mut(p, need))
}

fn family_of(f: &ContactFamily) -> Result<IntegrableFamily, Failure> {
    if f.strength.is_nan() {
        return Err(Failure(
            ContactStatus::InvalidParams,
            "strength is NaN".into(),
        ));
    }
    Ok(match f.kind {
        ContactFamilyKind::Delta | ContactFamilyKind::AntiDelta if !f.strength.is_finite() => {
            return Err(Failure(
                ContactStatus::InvalidParams,
                "c must be finite".into(),
            ))
        }
        ContactFamilyKind::Delta => IntegrableFamily::Delta(f.strength),
        ContactFamilyKind::AntiDelta => IntegrableFamily::AntiDelta(f.strength),
        ContactFamilyKind::Separated => IntegrableFamily::Separated(if f.strength.is_infinite() {
            Strength::Infinite
        } else {
            Strength::Finite(f.strength)
        }),
    })
}

fn statistics_of(fermion: bool) -> Statistics {
    if fermion {
        Statistics::Fermion
    } else {
        Statistics::Boson
    }
}

fn momenta_of(k: &[ContactComplex]) -> Result<MomentumSet, Failure> {
    Ok(MomentumSet::new(k.iter().map(|&z| z.into()).collect())?)
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn contact_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn contact_system_new(
    particles: usize,
    spin_states: usize,
    fermion: bool,
    out: *mut *mut ContactSystem,
) -> ContactStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let inner = SpinSystem::new(particles, spin_states, statistics_of(fermion))?;
        *out = Box::into_raw(Box::new(ContactSystem { inner }));
        Ok(())
    })
}

/// `n^N`, or 0 for a null handle.
///
/// # Safety
/// `system` must be null or a handle from [`contact_system_new`].
#[no_mangle]
pub unsafe extern "C" fn contact_system_dim(system: *const ContactSystem) -> usize {
    system.as_ref().map_or(0, |s| s.inner.dim())
}

/// # Safety
/// `system` must be null or a handle from [`contact_system_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn contact_system_free(system: *mut ContactSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Two-site Y-operator of `family` at spectral parameter `k_diff`, written as
/// an `n^2 x n^2` row-major matrix.
///
/// # Safety
/// `out` must point to `out_len` writable values.
#[no_mangle]
pub unsafe extern "C" fn contact_y_matrix(
    family: ContactFamily,
    k_diff: ContactComplex,
    spin_states: usize,
    fermion: bool,
    out: *mut ContactComplex,
    out_len: usize,
) -> ContactStatus {
    guard(|| {
        let family = family_of(&family)?;
        let system = SpinSystem::new(2, spin_states, statistics_of(fermion))?;
        let m = family_coefficients(&family, k_diff.into())?.matrix(&system, 1, 2)?;
        let dim = system.dim();
        let dst = output(out, out_len, dim * dim)?;
        for r in 0..dim {
            for c in 0..dim {
                dst[r * dim + c] = m[(r, c)].into();
            }
        }
        Ok(())
    })
}

/// N-body scattering matrix for `k_len = N` momenta, `dim x dim` row-major.
///
/// # Safety
/// `system` must be a live handle, `k` must hold `k_len` values and `out`
/// must have room for `out_len` values.
#[no_mangle]
pub unsafe extern "C" fn contact_s_matrix(
    family: ContactFamily,
    system: *const ContactSystem,
    k: *const ContactComplex,
    k_len: usize,
    out: *mut ContactComplex,
    out_len: usize,
) -> ContactStatus {
    guard(|| {
        let system = system.as_ref().ok_or_else(null)?.inner;
        let family = family_of(&family)?;
        let momenta = momenta_of(input(k, k_len)?)?;
        let s = s_matrix(&family, &momenta, &system)?;
        let dim = system.dim();
        let dst = output(out, out_len, dim * dim)?;
        for r in 0..dim {
            for c in 0..dim {
                dst[r * dim + c] = s.matrix[(r, c)].into();
            }
        }
        Ok(())
    })
}

unsafe fn ybe_common(
    params: ContactParams,
    spin_states: usize,
    fermion: bool,
    k: *const ContactComplex,
    out_residual: *mut f64,
) -> ContactStatus {
    guard(|| {
        if out_residual.is_null() {
            return Err(null());
        }
        let k = input(k, 3)?;
        let system = SpinSystem::new(3, spin_states, statistics_of(fermion))?;
        let report = ybe_residual(
            &params,
            [k[0].into(), k[1].into(), k[2].into()],
            &system,
            0.0,
        )?;
        *out_residual = report.max_residual();
        Ok(())
    })
}

/// Largest of the Yang-Baxter, inverse and commutation residuals at the
/// momentum triple `k[0..3]`.
///
/// # Safety
/// `k` must hold three values and `out_residual` must be writable.
#[no_mangle]
pub unsafe extern "C" fn contact_ybe_residual(
    family: ContactFamily,
    spin_states: usize,
    fermion: bool,
    k: *const ContactComplex,
    out_residual: *mut f64,
) -> ContactStatus {
    match family_of(&family) {
        Ok(f) => ybe_common(f.embed(), spin_states, fermion, k, out_residual),
        Err(Failure(status, msg)) => {
            set_error(msg);
            status
        }
    }
}

/// Same as [`contact_ybe_residual`] for general nonseparated parameters.
///
/// # Safety
/// As for [`contact_ybe_residual`].
#[no_mangle]
pub unsafe extern "C" fn contact_ybe_residual_general(
    params: ContactGeneralParams,
    spin_states: usize,
    fermion: bool,
    k: *const ContactComplex,
    out_residual: *mut f64,
) -> ContactStatus {
    let p = NonSeparatedParams::new(params.theta, params.a, params.b, params.c, params.d);
    match contact_core::params::validate_nonseparated(p) {
        Ok(p) => ybe_common(p.into(), spin_states, fermion, k, out_residual),
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    }
}

/// `-h^2 N (N^2 - 1) / 3`.
#[no_mangle]
pub extern "C" fn contact_bound_energy(particles: usize, h: f64) -> f64 {
    bound_energy(particles, h)
}

/// The bound-state ladder `k_j = ih(N + 1 - 2j)` into `out[0..N]`.
///
/// # Safety
/// `out` must have room for `out_len` values.
#[no_mangle]
pub unsafe extern "C" fn contact_bound_momenta(
    particles: usize,
    h: f64,
    out: *mut ContactComplex,
    out_len: usize,
) -> ContactStatus {
    guard(|| {
        let k = bound_momenta(particles, h)?;
        let dst = output(out, out_len, particles)?;
        for (d, &z) in dst.iter_mut().zip(k.as_slice()) {
            *d = z.into();
        }
        Ok(())
    })
}

/// Build the Bethe wavefunction of `family` with momenta `k` and initial
/// coefficients `initial` (length `dim`).
///
/// # Safety
/// Pointers must be valid for the given lengths; `out` receives a handle to
/// release with [`contact_wavefunction_free`].
#[no_mangle]
pub unsafe extern "C" fn contact_wavefunction_new(
    family: ContactFamily,
    system: *const ContactSystem,
    k: *const ContactComplex,
    k_len: usize,
    initial: *const ContactComplex,
    initial_len: usize,
    out: *mut *mut ContactWaveFunction,
) -> ContactStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let system = system.as_ref().ok_or_else(null)?.inner;
        let family = family_of(&family)?;
        let momenta = momenta_of(input(k, k_len)?)?;
        let alpha = input(initial, initial_len)?
            .iter()
            .map(|&z| z.into())
            .collect();
        let alpha = SpinVector::new(system, alpha)?;
        let inner = WaveFunction::build(&family, &momenta, &system, &alpha)?;
        *out = Box::into_raw(Box::new(ContactWaveFunction { inner }));
        Ok(())
    })
}

/// `psi(x)` at `x[0..N]` off the coincidence planes, into `out[0..dim]`.
///
/// # Safety
/// `wf` must be a live handle; buffers must be valid for their lengths.
#[no_mangle]
pub unsafe extern "C" fn contact_wavefunction_evaluate(
    wf: *const ContactWaveFunction,
    x: *const f64,
    x_len: usize,
    out: *mut ContactComplex,
    out_len: usize,
) -> ContactStatus {
    guard(|| {
        let wf = &wf.as_ref().ok_or_else(null)?.inner;
        let value = wf.evaluate(input(x, x_len)?)?;
        let dst = output(out, out_len, value.entries().len())?;
        for (d, &z) in dst.iter_mut().zip(value.entries()) {
            *d = z.into();
        }
        Ok(())
    })
}

/// # Safety
/// `wf` must be null or a handle from [`contact_wavefunction_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn contact_wavefunction_free(wf: *mut ContactWaveFunction) {
    if !wf.is_null() {
        drop(Box::from_raw(wf));
    }
}
