//! Simulated-data comparison of kernel predictors and trained networks.
//!
//! Each trial draws a fresh design, samples responses from a Gaussian
//! process with the ground-truth kernel, fits every requested model on the
//! training split and scores it by test RMSE. All randomness of trial `t`
//! comes from streams keyed by `(master_seed, t)`, so trials can run in any
//! order or in parallel.

mod config;
mod data;
mod summary;
mod trial;

pub use config::{ExperimentConfig, ModelSpec, NetworkSettings, Normalization, SimConfig};
pub use data::{max_row_norm_error, normalize, simulate_dataset, split_indices, Dataset};
pub use summary::{aggregate, boxplot, mean_and_se, quantile_sorted, BoxplotRow, SummaryRow};
pub use trial::{
    evaluate_models, run_experiment, run_trial, run_trials, ModelFailure, ModelResult, TrialReport,
};
