//! One-dimensional time-harmonic wave laboratory: direct field solves from a
//! compactly supported source, multifrequency endpoint data, band-limited
//! source recovery, and stability diagnostics for the recovery error.

pub mod error;
pub mod experiment_harness;
pub mod fixtures;
pub mod forward_model;
pub mod grid_core;
pub mod rng;
pub mod spectral_inverse;
pub mod stability_analysis;

pub use error::{Error, Result};
