//! Fast bias inversion of asymmetric double wells.
//!
//! The crate designs compensating-force shortcuts for inverting the tilt of a
//! double well, propagates the 1D Schrödinger equation under the resulting
//! Hamiltonians and measures the residual motional excitation against
//! sudden, polynomial and FAQUAD (linear-ramp) baselines.
//!
//! Layout:
//! - [`units`], [`grid`]: constants, scaled units, grids and wavefunctions
//! - [`potentials`]: ion quartic and atom lattice models with their analytics
//! - [`protocols`]: control trajectories and the compensating force
//! - [`spectral`]: stationary states and left/right well labels
//! - [`dynamics`]: split-operator propagation
//! - [`experiments`]: presets, metrics, sweeps and hardware estimates
//! - [`export`], [`cli`]: file formats and the command-line front end

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod export;
pub mod grid;
pub mod dynamics;
pub mod potentials;
pub mod protocols;
pub mod spectral;
pub mod units;

pub use error::{Error, Result};
