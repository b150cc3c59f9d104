//! Numerical construction of Gaussian multiplicative chaos measures from
//! mollified log-correlated Gaussian fields, with Monte Carlo experiment
//! suites that probe normalisation, moment growth, scale-coupling and
//! regularisation universality of the resulting random measures.

pub mod cov;
pub mod domain;
pub mod error;
pub mod experiments;
pub mod field;
pub mod kernel;
pub mod kl;
pub mod measure;
pub mod mollifier;
pub mod rng;
pub mod spectral;
pub mod stats;

pub use domain::{Point, Rect, Region, ScaleLadder};
pub use error::{Error, Result};
pub use kernel::{psd_check, KernelSpec, PsdOutcome};
pub use mollifier::{MollifierFamily, MollifierSpec};
