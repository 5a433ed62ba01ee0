//! Single-example forward and reverse passes, and the empirical NTK built
//! from them.

use ndarray::{Array1, ArrayView1};

use super::network::{NetworkArch, NetworkParams};
use crate::error::{Error, Result};
use crate::kernels::KernelHyperParams;

/// Per-layer values kept for the backward pass.
#[derive(Debug, Clone)]
pub struct ActivationCache {
    /// Scaled input of each layer (`factor_l · a_l`), `depth + 1` entries.
    pub inputs: Vec<Array1<f64>>,
    /// Pre-activations of the hidden layers.
    pub pre: Vec<Array1<f64>>,
}

#[inline]
pub(crate) fn relu(v: f64) -> f64 {
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

/// ReLU derivative; 0 at the kink.
#[inline]
pub(crate) fn step(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else {
        0.0
    }
}

pub fn forward(
    arch: &NetworkArch,
    params: &NetworkParams,
    h: &KernelHyperParams,
    x: ArrayView1<f64>,
) -> Result<(f64, ActivationCache)> {
    if x.len() != arch.d_in {
        return Err(Error::dims("forward input", arch.d_in, x.len()));
    }
    let depth = arch.depth();
    let mut inputs = Vec::with_capacity(depth + 1);
    let mut pre = Vec::with_capacity(depth);
    let mut a = &x * arch.input_factor(0, h);
    for l in 0..=depth {
        let layer = &params.layers[l];
        let z = layer.weight.dot(&a) + &layer.bias;
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteActivation { layer: l });
        }
        inputs.push(a);
        if l == depth {
            return Ok((z[0], ActivationCache { inputs, pre }));
        }
        a = z.mapv(relu) * arch.input_factor(l + 1, h);
        pre.push(z);
    }
    unreachable!("loop returns at the output layer")
}

/// Gradient of `upstream · output` with respect to every parameter.
pub fn backward(
    arch: &NetworkArch,
    params: &NetworkParams,
    h: &KernelHyperParams,
    cache: &ActivationCache,
    upstream: f64,
) -> Result<NetworkParams> {
    let depth = arch.depth();
    if cache.inputs.len() != depth + 1 || cache.pre.len() != depth {
        return Err(Error::ShapeMismatch(
            "activation cache does not match architecture".into(),
        ));
    }
    params.check_arch(arch)?;
    let mut grad = NetworkParams::zeros(arch);
    let mut delta = Array1::from_elem(1, upstream);
    for l in (0..=depth).rev() {
        let input = &cache.inputs[l];
        if input.len() != arch.fan_in(l) {
            return Err(Error::ShapeMismatch(format!(
                "cached input of layer {l} has wrong length"
            )));
        }
        {
            let g = &mut grad.layers[l];
            for (mut row, &d) in g.weight.rows_mut().into_iter().zip(delta.iter()) {
                if d != 0.0 {
                    row.scaled_add(d, input);
                }
            }
            g.bias.assign(&delta);
        }
        if l > 0 {
            let factor = arch.input_factor(l, h);
            let back = params.layers[l].weight.t().dot(&delta);
            delta = ndarray::Zip::from(&back)
                .and(&cache.pre[l - 1])
                .map_collect(|&b, &z| b * factor * step(z));
        }
    }
    Ok(grad)
}

/// Parameter gradient of the scalar output at `x`.
pub fn output_gradient(
    arch: &NetworkArch,
    params: &NetworkParams,
    h: &KernelHyperParams,
    x: ArrayView1<f64>,
) -> Result<NetworkParams> {
    let (_, cache) = forward(arch, params, h, x)?;
    backward(arch, params, h, &cache, 1.0)
}

/// `⟨∂f(x)/∂θ, ∂f(y)/∂θ⟩` at the current parameters.
pub fn empirical_ntk(
    arch: &NetworkArch,
    params: &NetworkParams,
    h: &KernelHyperParams,
    x: ArrayView1<f64>,
    y: ArrayView1<f64>,
) -> Result<f64> {
    let gx = output_gradient(arch, params, h, x)?;
    if x == y {
        return gx.dot(&gx);
    }
    let gy = output_gradient(arch, params, h, y)?;
    gx.dot(&gy)
}
