//! Numerical toolkit for one-dimensional many-body systems with contact
//! (point) interactions.
//!
//! The crate builds the two-body Y-operators for nonseparated and separated
//! boundary conditions, checks the Yang-Baxter consistency conditions and
//! scans parameter space for them, assembles Bethe-ansatz coefficient tables
//! and wavefunctions, computes the bound states of the separated family, and
//! multiplies out N-body scattering matrices.
//!
//! Conventions used throughout:
//!
//! * Spin basis states are ranked big-endian (site 1 most significant).
//! * Sites and particle labels are 1-based in public signatures.
//! * Y-operators take the full momentum difference `k_a - k_b`; the half
//!   difference appears only inside [`yops`].
//! * Coefficient tables follow `alpha_{tau} = Y^{i,i+1}(k_{sigma(i)} - k_{sigma(i+1)}) alpha_{sigma}`
//!   where `tau` is `sigma` with slots `i`, `i + 1` exchanged.

pub mod bethe;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod params;
pub mod perm;
pub mod sampling;
pub mod scattering;
pub mod spectra;
pub mod spinspace;
pub mod ybe;
pub mod yops;

pub use error::{Error, Result};
pub use params::{ContactParams, IntegrableFamily, NonSeparatedParams, SeparatedParams, Strength};
pub use spinspace::{SpinSystem, SpinVector, Statistics};
