//! Kernel ridge regression in dual form.
//!
//! `fit` factors `H + λI (+ εI)` once and stores `α`; `predict` is then a
//! cross-kernel matrix times `α`.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::kernels::{cross_kernel, KernelGram, KernelHyperParams, KernelId};
use crate::numerics::{cholesky_psd, solve_refined, JitterSchedule};
use crate::parallel::Workers;

#[derive(Debug, Clone)]
pub struct KrrModel {
    pub kernel: KernelId,
    pub hyper: KernelHyperParams,
    pub train_inputs: Array2<f64>,
    pub dual_weights: Array1<f64>,
    pub lambda: f64,
    /// Diagonal shift added on top of `lambda` to make the system factorizable.
    pub jitter_used: f64,
}

/// Solves `(H + λI + εI)·α = y`, with `ε` the first workable entry of
/// `schedule` (relative schedules scale with the mean diagonal of `H + λI`).
pub fn fit(
    gram: &KernelGram,
    train_inputs: ArrayView2<f64>,
    y: ArrayView1<f64>,
    lambda: f64,
    schedule: &JitterSchedule,
) -> Result<KrrModel> {
    let n = gram.matrix.order();
    if y.len() != n {
        return Err(Error::dims("krr::fit response", n, y.len()));
    }
    if train_inputs.nrows() != n {
        return Err(Error::dims(
            "krr::fit training rows",
            n,
            train_inputs.nrows(),
        ));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "lambda must be non-negative, got {lambda}"
        )));
    }
    let system = gram.matrix.shifted(lambda);
    let chol = cholesky_psd(&system, schedule)?;
    let y: Vec<f64> = y.to_vec();
    let alpha = solve_refined(&system, &chol, &y)?;
    Ok(KrrModel {
        kernel: gram.kernel,
        hyper: gram.hyper,
        train_inputs: train_inputs.to_owned(),
        dual_weights: Array1::from(alpha),
        lambda,
        jitter_used: chol.jitter(),
    })
}

impl KrrModel {
    pub fn predict(&self, x_new: ArrayView2<f64>, workers: Workers) -> Result<Array1<f64>> {
        let cross = cross_kernel(
            self.kernel,
            &self.hyper,
            x_new,
            self.train_inputs.view(),
            workers,
        )?;
        Ok(cross.dot(&self.dual_weights))
    }
}

/// Root mean squared error.
pub fn rmse(pred: ArrayView1<f64>, truth: ArrayView1<f64>) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::dims("rmse", truth.len(), pred.len()));
    }
    if pred.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sse: f64 = pred
        .iter()
        .zip(truth.iter())
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok((sse / pred.len() as f64).sqrt())
}
