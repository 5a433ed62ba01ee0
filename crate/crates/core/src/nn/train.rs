//! Batched passes and gradient-descent training on squared error.
//!
//! Batch gradients are matrix products (`ndarray::dot`), so the summation
//! order over examples is fixed by the batch layout and does not depend on
//! threading.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis, Zip};
use serde::{Deserialize, Serialize};

use super::backprop::{relu, step};
use super::network::{NetworkArch, NetworkParams};
use crate::error::{Error, Result};
use crate::kernels::KernelHyperParams;
use crate::numerics::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BatchSize {
    /// Every step uses the whole training set.
    Full,
    /// Shuffled mini-batches of this size; the last one may be short.
    Mini(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: BatchSize,
}

impl TrainConfig {
    pub const DEFAULT_LEARNING_RATE: f64 = 0.002;

    /// 3000 epochs for one hidden layer, 6000 for two, full batch.
    pub fn for_depth(depth: usize) -> Self {
        Self {
            learning_rate: Self::DEFAULT_LEARNING_RATE,
            epochs: if depth >= 2 { 6000 } else { 3000 },
            batch_size: BatchSize::Full,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be non-negative, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be positive".into()));
        }
        if self.batch_size == BatchSize::Mini(0) {
            return Err(Error::InvalidConfig("batch size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: NetworkParams,
    /// Mean squared training error per epoch, measured on the batches as
    /// they were visited (before each step).
    pub loss_trace: Vec<f64>,
}

struct BatchCache {
    /// Scaled inputs per layer, `batch × fan_in`.
    inputs: Vec<Array2<f64>>,
    pre: Vec<Array2<f64>>,
}

fn forward_batch(
    arch: &NetworkArch,
    params: &NetworkParams,
    h: &KernelHyperParams,
    x: ArrayView2<f64>,
) -> Result<(Array1<f64>, BatchCache)> {
    let depth = arch.depth();
    let mut inputs = Vec::with_capacity(depth + 1);
    let mut pre = Vec::with_capacity(depth);
    let mut a = &x * arch.input_factor(0, h);
    for l in 0..=depth {
        let layer = &params.layers[l];
        let mut z = a.dot(&layer.weight.t());
        z += &layer.bias;
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteActivation { layer: l });
        }
        inputs.push(a);
        if l == depth {
            let out = z.column(0).to_owned();
            return Ok((out, BatchCache { inputs, pre }));
        }
        let factor = arch.input_factor(l + 1, h);
        a = z.mapv(|v| relu(v) * factor);
        pre.push(z);
    }
    unreachable!("loop returns at the output layer")
}

/// Gradient of `Σ_b upstream[b] · f(x_b)`.
fn backward_batch(
    arch: &NetworkArch,
    params: &NetworkParams,
    h: &KernelHyperParams,
    cache: &BatchCache,
    upstream: ArrayView1<f64>,
) -> NetworkParams {
    let depth = arch.depth();
    let mut grad = NetworkParams::zeros(arch);
    let mut delta = upstream.to_owned().insert_axis(Axis(1));
    for l in (0..=depth).rev() {
        grad.layers[l].weight = delta.t().dot(&cache.inputs[l]);
        grad.layers[l].bias = delta.sum_axis(Axis(0));
        if l > 0 {
            let factor = arch.input_factor(l, h);
            let mut back = delta.dot(&params.layers[l].weight);
            Zip::from(&mut back)
                .and(&cache.pre[l - 1])
                .for_each(|b, &z| *b *= factor * step(z));
            delta = back;
        }
    }
    grad
}

/// Network outputs for every row of `x`.
pub fn predict(
    arch: &NetworkArch,
    params: &NetworkParams,
    h: &KernelHyperParams,
    x: ArrayView2<f64>,
) -> Result<Array1<f64>> {
    if x.ncols() != arch.d_in {
        return Err(Error::dims("predict inputs", arch.d_in, x.ncols()));
    }
    params.check_arch(arch)?;
    Ok(forward_batch(arch, params, h, x)?.0)
}

/// Sum of per-example parameter gradients weighted by `weights`.
pub fn weighted_gradient(
    arch: &NetworkArch,
    params: &NetworkParams,
    h: &KernelHyperParams,
    x: ArrayView2<f64>,
    weights: ArrayView1<f64>,
) -> Result<NetworkParams> {
    if weights.len() != x.nrows() {
        return Err(Error::dims(
            "weighted_gradient weights",
            x.nrows(),
            weights.len(),
        ));
    }
    if x.ncols() != arch.d_in {
        return Err(Error::dims(
            "weighted_gradient inputs",
            arch.d_in,
            x.ncols(),
        ));
    }
    params.check_arch(arch)?;
    let (_, cache) = forward_batch(arch, params, h, x)?;
    Ok(backward_batch(arch, params, h, &cache, weights))
}

/// Minimises the mean squared error on `(x, y)` by gradient descent with a
/// constant learning rate. Mini-batch order is reshuffled every epoch from
/// `rng`; full-batch training never touches `rng`.
pub fn train_sgd(
    arch: &NetworkArch,
    mut params: NetworkParams,
    h: &KernelHyperParams,
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    cfg: &TrainConfig,
    rng: &mut RngStream,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    params.check_arch(arch)?;
    let n = x.nrows();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if y.len() != n {
        return Err(Error::dims("train_sgd responses", n, y.len()));
    }
    if x.ncols() != arch.d_in {
        return Err(Error::dims("train_sgd inputs", arch.d_in, x.ncols()));
    }
    let batch = match cfg.batch_size {
        BatchSize::Full => n,
        BatchSize::Mini(b) => b.min(n),
    };
    let mut order: Vec<usize> = (0..n).collect();
    let mut loss_trace = Vec::with_capacity(cfg.epochs);
    let full_batch = batch == n;

    for epoch in 0..cfg.epochs {
        if !full_batch {
            rng.shuffle(&mut order);
        }
        let mut sse = 0.0;
        for start in (0..n).step_by(batch) {
            let idx = &order[start..(start + batch).min(n)];
            let gathered;
            let (xb, yb) = if full_batch {
                (x, y)
            } else {
                gathered = (x.select(Axis(0), idx), y.select(Axis(0), idx));
                (gathered.0.view(), gathered.1.view())
            };
            let m = idx.len() as f64;
            let (out, cache) = forward_batch(arch, &params, h, xb).map_err(|e| match e {
                Error::NonFiniteActivation { .. } => Error::NonFiniteLoss { epoch },
                other => other,
            })?;
            let resid = &out - &yb;
            sse += resid.dot(&resid);
            // d/dθ of mean((f − y)²) = (2/m)·Σ (f − y)·∂f/∂θ
            let upstream = resid * (2.0 / m);
            let grad = backward_batch(arch, &params, h, &cache, upstream.view());
            params.apply_step(&grad, cfg.learning_rate);
        }
        let mse = sse / n as f64;
        if !mse.is_finite() || !params.all_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        loss_trace.push(mse);
    }
    Ok(TrainOutcome { params, loss_trace })
}
