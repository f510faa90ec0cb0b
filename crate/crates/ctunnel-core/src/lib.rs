//! Numerics for the semiclassical Schrödinger operator `-h²∂²ₓ + e^{iα}V(x)`
//! with a symmetric double-well potential `V`.
//!
//! The crate is organized around the pipeline
//!
//! * [`potential`] — double-well potentials, their derivatives, sealed
//!   (simple-well) variants and local quadratic models;
//! * [`action`] — Agmon-type actions and weights built from `∫√V`;
//! * [`specsolve`] — finite-difference / Chebyshev discretizations, dense
//!   non-Hermitian eigensolves, Riesz projectors and spectral diagnostics;
//! * [`wkb`] — WKB phase, transport amplitudes, quasimodes and their
//!   weighted residuals;
//! * [`gap`] — the exponentially small eigenvalue gap of the double well,
//!   computed by direct eigensolve, by a Wronskian of one-well ground states,
//!   and by the closed-form asymptotics, plus the rotation analysis of the
//!   eigenvalue pair for `α ≠ 0`.

pub mod action;
pub mod gap;
pub mod ode;
pub mod potential;
pub mod quad;
pub mod specsolve;
pub mod wkb;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("numeric domain error: {0}")]
    Domain(String),
    #[error("contour placement error: {0}")]
    Contour(String),
    #[error("near-spectrum error: {0}")]
    NearSpectrum(String),
    #[error("normalization error: {0}")]
    Normalization(String),
    #[error("aliasing error: {0}")]
    Aliasing(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use num_complex::Complex64;
