//! Non-homogeneous Bell-type inequalities for two and three qubits.
//!
//! The crate builds correlator polynomials with exact rational coefficients,
//! proves their classical (local hidden variable) bounds by vertex
//! enumeration, computes quantum-mechanical maxima through Hermitian
//! eigenanalysis, and searches for detection-efficiency thresholds.
//!
//! Module map:
//!
//! * [`polynomial`]: exact multilinear algebra, the CHSH family, projector
//!   subtraction, the three-qubit `F·c₁ + G·c₂ + H` construction and the
//!   probability-form representation.
//! * [`lhv`]: classical bounds by enumeration of deterministic assignments.
//! * [`linalg`]: small complex matrices and a cyclic Jacobi eigensolver.
//! * [`quantum`]: spin observables, operator assembly and the closed-form
//!   expectation maxima.
//! * [`optimize`]: multi-start simplex search over measurement settings and
//!   the parameter sweeps.
//! * [`detection`]: the efficiency-modified operator and threshold search.
//! * [`presets`]: the named inequalities, generated from the constructions.
//! * [`roots`]: bisection on sign changes and monotone predicates.
//!
//! The crate is `no_std` (it needs `alloc`). Enable the `std` feature to get
//! `std::error::Error` integration through the standard library.
#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod detection;
mod error;
pub mod lhv;
pub mod linalg;
pub mod optimize;
pub mod polynomial;
pub mod presets;
pub mod quantum;
pub mod roots;

pub use error::{Error, Result};
pub use polynomial::Rational;
