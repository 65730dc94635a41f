//! Measurement-based single-qubit t-designs.
//!
//! The crate simulates single-qubit measurements on linear cluster states,
//! turns the resulting branches into an ensemble of channels, reconstructs
//! channels by process tomography, and decides whether an ensemble is an
//! ε-approximate unitary t-design on tensor powers of single-qubit states.
//! Depolarising and classical readout noise models, readout-error mitigation
//! and an identity-channel benchmark are included.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to `f64`, which is what the command-line
//! tool and the JSON formats use.

// `!(x >= 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cluster;
pub mod design;
pub mod experiment;
pub mod identity;
pub mod io;
pub mod noise;
pub mod numerics;
mod scalar;
pub mod tomography;

pub use num_complex::Complex;
pub use scalar::Real;

pub use cluster::{Branch, Counts, Outcome};
pub use design::{Order, SphericalGrid, TestReport, ThetaGrid};
pub use noise::{ConfusionModel, DepolarisingKind, MitigationMode};

/// Complex scalar over `f64`.
pub type C64 = Complex<f64>;
/// Dense complex matrix over `f64`.
pub type Matrix = numerics::ComplexMatrix<f64>;
/// n-qubit pure state over `f64`.
pub type PureState = cluster::PureState<f64>;
/// Density operator over `f64`.
pub type DensityMatrix = tomography::DensityMatrix<f64>;
/// Single-qubit process matrix over `f64`.
pub type ChiMatrix = tomography::ChiMatrix<f64>;
/// Ensemble of weighted single-qubit channels over `f64`.
pub type UnitaryEnsemble = design::UnitaryEnsemble<f64>;
/// Spherical or cube sample of Bloch-ball states over `f64`.
pub type BlochSample = design::BlochSample<f64>;
/// Readout calibration matrix over `f64`.
pub type CalibrationMatrix = noise::CalibrationMatrix<f64>;
/// Identity-benchmark report over `f64`.
pub type IdentityRunReport = identity::IdentityRunReport<f64>;
