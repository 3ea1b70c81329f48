//! Closed-form minimum-variance beamformers for wideband uniform linear arrays.
//!
//! A narrowband MVDR beamformer pins the array response toward the signal of
//! interest at one frequency; across a wide band the response drifts and the
//! signal is distorted. [`solvers::mvmfdr_weights`] instead imposes the
//! distortionless constraint at several frequencies at once, solving
//!
//! ```text
//! minimise  w^H R w   subject to   w^H a(θ₀, f_k) = b,  k = 1..K
//! ```
//!
//! in closed form, with [`solvers::kkt_oracle`] as an independent check.
//! [`scenario`] simulates wideband snapshots for an array scenario and
//! [`pattern`] turns weights into beam patterns, in-band ripple and SINR,
//! including a Monte Carlo comparison of both designs.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
// `!(x > y)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod array;
mod dd;
pub mod error;
pub mod linalg;
pub mod pattern;
pub mod scenario;
pub mod solvers;

pub use array::{
    half_wavelength_spacing, steering_vector, AngleReference, ArrayGeometry, SteeringVector, SPEED_OF_LIGHT,
};
pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use pattern::{
    beam_pattern, beam_pattern_family, monte_carlo_compare, output_sinr, soi_gain_profile, BeamPattern,
    ComparisonReport, Method, Normalization,
};
pub use scenario::{
    generate_snapshots, ideal_covariance, sample_covariance, CovarianceMatrix, CovarianceSource, Scenario,
    SnapshotMatrix,
};
pub use solvers::{kkt_oracle, mvdr_weights, mvmfdr_weights, ConstraintSet, WeightVector};

pub use num_complex::Complex64;
