use std::time::Instant;

use super::config::{ExperimentConfig, ModelSpec};
use super::data::{simulate_dataset, Dataset};
use crate::error::Result;
use crate::kernels::{gram_matrix, KernelId};
use crate::krr::{self, rmse};
use crate::nn::{init_network, predict, train_sgd, NetworkArch};
use crate::numerics::{JitterSchedule, Purpose, RngStream};
use crate::parallel::{map_rows, Workers};

#[derive(Debug, Clone, PartialEq)]
pub struct ModelResult {
    pub model: ModelSpec,
    pub rmse: f64,
    /// Diagonal shift used by the kernel solve; 0 for networks.
    pub jitter: f64,
    pub seconds: f64,
    /// Per-epoch training MSE of a network model.
    pub loss_trace: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFailure {
    pub model: ModelSpec,
    pub message: String,
    pub numerical: bool,
}

/// Outcome of every requested model on one simulated dataset. A failing
/// model is recorded in `failures` and does not stop the others.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialReport {
    pub trial_id: u64,
    /// Jitter used when sampling the responses.
    pub data_jitter: f64,
    pub results: Vec<ModelResult>,
    pub failures: Vec<ModelFailure>,
}

impl TrialReport {
    pub fn rmse_of(&self, model: ModelSpec) -> Option<f64> {
        self.results
            .iter()
            .find(|r| r.model == model)
            .map(|r| r.rmse)
    }

    /// Every model attempted, in reporting order (the derived `Ord`, which
    /// matches `ModelSpec::all`).
    pub fn attempted(&self) -> Vec<ModelSpec> {
        let mut v: Vec<ModelSpec> = self.results.iter().map(|r| r.model).collect();
        v.extend(self.failures.iter().map(|f| f.model));
        v.sort_unstable();
        v
    }
}

fn fit_kernel(
    cfg: &ExperimentConfig,
    data: &Dataset,
    kernel: KernelId,
    workers: Workers,
) -> Result<(f64, f64)> {
    let x_train = data.train_x();
    let gram = gram_matrix(kernel, &cfg.hyper, x_train.view(), workers)?;
    let model = krr::fit(
        &gram,
        x_train.view(),
        data.train_y().view(),
        cfg.lambda,
        &JitterSchedule::default(),
    )?;
    let pred = model.predict(data.test_x().view(), workers)?;
    Ok((rmse(pred.view(), data.test_y().view())?, model.jitter_used))
}

fn fit_network(
    cfg: &ExperimentConfig,
    data: &Dataset,
    depth: u8,
    trial_id: u64,
) -> Result<(f64, Vec<f64>)> {
    let net = &cfg.network;
    let arch = NetworkArch::uniform(cfg.sim.d_in, net.width, depth as usize)?
        .with_input_scaling(net.input_scaling);
    let seed = cfg.sim.master_seed;
    let mut init_rng = RngStream::for_trial(seed, trial_id, Purpose::NetworkInit, depth);
    let mut batch_rng = RngStream::for_trial(seed, trial_id, Purpose::BatchOrder, depth);
    let params = init_network(&arch, &cfg.hyper, &mut init_rng)?;
    let (x, y) = (data.train_x(), data.train_y());
    let out = train_sgd(
        &arch,
        params,
        &cfg.hyper,
        x.view(),
        y.view(),
        net.train_config(depth),
        &mut batch_rng,
    )?;
    let pred = predict(&arch, &out.params, &cfg.hyper, data.test_x().view())?;
    Ok((rmse(pred.view(), data.test_y().view())?, out.loss_trace))
}

/// Runs every model of `models` on `data`.
pub fn evaluate_models(
    cfg: &ExperimentConfig,
    data: &Dataset,
    models: &[ModelSpec],
    trial_id: u64,
    workers: Workers,
) -> (Vec<ModelResult>, Vec<ModelFailure>) {
    let mut results = Vec::new();
    let mut failures = Vec::new();
    for &model in models {
        let start = Instant::now();
        let outcome = match model {
            ModelSpec::Kernel(k) => fit_kernel(cfg, data, k, workers).map(|(r, j)| (r, j, None)),
            ModelSpec::Network { depth } => {
                fit_network(cfg, data, depth, trial_id).map(|(r, t)| (r, 0.0, Some(t)))
            }
        };
        match outcome {
            Ok((rmse, jitter, loss_trace)) => results.push(ModelResult {
                model,
                rmse,
                jitter,
                seconds: start.elapsed().as_secs_f64(),
                loss_trace,
            }),
            Err(e) => failures.push(ModelFailure {
                model,
                numerical: e.is_numerical(),
                message: e.to_string(),
            }),
        }
    }
    (results, failures)
}

/// Simulates the dataset of `trial_id` and evaluates `cfg.models` on it.
/// Only a failure to build the dataset is returned as an error.
pub fn run_trial(cfg: &ExperimentConfig, trial_id: u64) -> Result<TrialReport> {
    run_trial_with(cfg, trial_id, cfg.workers)
}

fn run_trial_with(cfg: &ExperimentConfig, trial_id: u64, workers: Workers) -> Result<TrialReport> {
    cfg.validate()?;
    if cfg.models.is_empty() {
        return Ok(TrialReport {
            trial_id,
            data_jitter: 0.0,
            results: Vec::new(),
            failures: Vec::new(),
        });
    }
    let data = simulate_dataset(&cfg.sim, &cfg.hyper, trial_id, workers)?;
    let (results, failures) = evaluate_models(cfg, &data, &cfg.models, trial_id, workers);
    Ok(TrialReport {
        trial_id,
        data_jitter: data.jitter,
        results,
        failures,
    })
}

/// Runs trials `0..n_trials`, spread over `cfg.workers`, and fails on the
/// first trial whose dataset cannot be built. Reports come back in trial
/// order and do not depend on how trials were scheduled.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialReport>> {
    run_trials(cfg)?.into_iter().collect()
}

/// Runs every trial to completion and returns each outcome separately, in
/// trial order. The outer error is reserved for an invalid configuration.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<Result<TrialReport>>> {
    cfg.validate()?;
    // Trials are the outer parallel loop; Gram assembly inside a trial runs
    // on whatever pool the trial landed in.
    let inner = match cfg.workers {
        Workers::Serial => Workers::Serial,
        _ => Workers::Ambient,
    };
    map_rows(cfg.sim.n_trials, cfg.workers, |t| {
        Ok(run_trial_with(cfg, t as u64, inner))
    })
}
