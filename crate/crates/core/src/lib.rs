//! Kernels, kernel ridge regression and finite-width ReLU networks for
//! checking whether wide trained networks behave like their neural tangent
//! kernel predictors on simulated data.

#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod experiment;
pub mod kernels;
pub mod numerics;
pub mod parallel;

pub use error::{Error, Result};
pub mod krr;
pub mod nn;
