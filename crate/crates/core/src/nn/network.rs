use ndarray::{Array1, Array2, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelHyperParams;
use crate::numerics::RngStream;

/// How the input layer is normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum InputScaling {
    /// Input weights drawn with variance `σ²_{w,0}/n₀`; no factor in the
    /// forward pass.
    #[default]
    Variance,
    /// Input weights drawn with variance `σ²_{w,0}`; the forward pass
    /// multiplies the input by `1/√n₀` (Jacot et al.).
    Forward,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkArch {
    pub d_in: usize,
    pub hidden_widths: Vec<usize>,
    #[serde(default)]
    pub input_scaling: InputScaling,
}

impl NetworkArch {
    pub fn new(d_in: usize, hidden_widths: Vec<usize>) -> Result<Self> {
        let arch = Self {
            d_in,
            hidden_widths,
            input_scaling: InputScaling::Variance,
        };
        arch.validate()?;
        Ok(arch)
    }

    /// `depth` hidden layers of equal `width`.
    pub fn uniform(d_in: usize, width: usize, depth: usize) -> Result<Self> {
        Self::new(d_in, vec![width; depth])
    }

    pub fn with_input_scaling(mut self, scaling: InputScaling) -> Self {
        self.input_scaling = scaling;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_in == 0 {
            return Err(Error::InvalidConfig(
                "network input dimension must be positive".into(),
            ));
        }
        if !(1..=2).contains(&self.hidden_widths.len()) {
            return Err(Error::InvalidConfig(format!(
                "network depth must be 1 or 2, got {}",
                self.hidden_widths.len()
            )));
        }
        if self.hidden_widths.contains(&0) {
            return Err(Error::InvalidConfig(
                "hidden widths must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.hidden_widths.len()
    }

    /// Fan-in of layer `l` (0 = input weights, `depth` = output weights).
    pub fn fan_in(&self, l: usize) -> usize {
        if l == 0 {
            self.d_in
        } else {
            self.hidden_widths[l - 1]
        }
    }

    pub fn fan_out(&self, l: usize) -> usize {
        self.hidden_widths.get(l).copied().unwrap_or(1)
    }

    /// Factor applied to the input of layer `l` in the forward pass:
    /// `√(c_l/n_l)` on hidden activations, 1 or `1/√n₀` on the raw input.
    pub fn input_factor(&self, l: usize, h: &KernelHyperParams) -> f64 {
        if l == 0 {
            match self.input_scaling {
                InputScaling::Variance => 1.0,
                InputScaling::Forward => 1.0 / (self.d_in as f64).sqrt(),
            }
        } else {
            (h.c(l) / self.hidden_widths[l - 1] as f64).sqrt()
        }
    }

    pub fn parameter_count(&self) -> usize {
        (0..=self.depth())
            .map(|l| self.fan_out(l) * (self.fan_in(l) + 1))
            .sum()
    }
}

/// Weights are `fan_out × fan_in`. Layer `depth` is the scalar output layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

/// Parameters (or a gradient with the same shape).
///
/// Flattened order, used wherever parameters are treated as one vector:
/// for `l = 0..=depth`, the weights of layer `l` in row-major order followed
/// by its biases.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    pub layers: Vec<Layer>,
}

impl NetworkParams {
    pub fn zeros(arch: &NetworkArch) -> Self {
        let layers = (0..=arch.depth())
            .map(|l| Layer {
                weight: Array2::zeros((arch.fan_out(l), arch.fan_in(l))),
                bias: Array1::zeros(arch.fan_out(l)),
            })
            .collect();
        Self { layers }
    }

    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn len(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weight.len() + l.bias.len())
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.layers.len() == other.layers.len()
            && self
                .layers
                .iter()
                .zip(&other.layers)
                .all(|(a, b)| a.weight.dim() == b.weight.dim() && a.bias.len() == b.bias.len())
    }

    /// Checks that the parameter shapes agree with `arch`.
    pub fn check_arch(&self, arch: &NetworkArch) -> Result<()> {
        if !self.same_shape(&Self::zeros(arch)) {
            return Err(Error::ShapeMismatch(format!(
                "parameters do not match architecture {:?}",
                arch.hidden_widths
            )));
        }
        Ok(())
    }

    /// Flattened parameter vector in the documented order.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for l in &self.layers {
            out.extend(l.weight.iter());
            out.extend(l.bias.iter());
        }
        out
    }

    pub fn from_flat(arch: &NetworkArch, flat: &[f64]) -> Result<Self> {
        let mut p = Self::zeros(arch);
        if flat.len() != p.len() {
            return Err(Error::dims("NetworkParams::from_flat", p.len(), flat.len()));
        }
        let mut it = flat.iter().copied();
        for l in &mut p.layers {
            l.weight
                .iter_mut()
                .chain(l.bias.iter_mut())
                .for_each(|v| *v = it.next().unwrap());
        }
        Ok(p)
    }

    /// Inner product of two parameter-shaped vectors, accumulated layer by
    /// layer in the flattened order.
    pub fn dot(&self, other: &Self) -> Result<f64> {
        if !self.same_shape(other) {
            return Err(Error::ShapeMismatch(
                "dot of differently shaped parameter sets".into(),
            ));
        }
        let mut s = 0.0;
        for (a, b) in self.layers.iter().zip(&other.layers) {
            s += crate::numerics::dot(
                a.weight.as_slice().expect("standard layout"),
                b.weight.as_slice().expect("standard layout"),
            );
            s += crate::numerics::dot(
                a.bias.as_slice().expect("standard layout"),
                b.bias.as_slice().expect("standard layout"),
            );
        }
        Ok(s)
    }

    /// `self -= step · grad`.
    pub fn apply_step(&mut self, grad: &Self, step: f64) {
        debug_assert!(self.same_shape(grad));
        for (p, g) in self.layers.iter_mut().zip(&grad.layers) {
            Zip::from(&mut p.weight)
                .and(&g.weight)
                .for_each(|w, &d| *w -= step * d);
            Zip::from(&mut p.bias)
                .and(&g.bias)
                .for_each(|b, &d| *b -= step * d);
        }
    }

    pub fn all_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weight.iter().chain(l.bias.iter()).all(|v| v.is_finite()))
    }
}

/// Draws independent Gaussian parameters.
///
/// Layer 0 weights have standard deviation `σ_{w,0}/√n₀` (or `σ_{w,0}` under
/// [`InputScaling::Forward`]); weights of layer `l ≥ 1` use `σ_{w,l}`; biases
/// of layer `l` use `σ_{b,l}`. Draw order follows the flattened layout.
pub fn init_network(
    arch: &NetworkArch,
    h: &KernelHyperParams,
    rng: &mut RngStream,
) -> Result<NetworkParams> {
    arch.validate()?;
    if arch.d_in != h.d_in {
        return Err(Error::dims("init_network d_in", h.d_in, arch.d_in));
    }
    let mut p = NetworkParams::zeros(arch);
    for (l, layer) in p.layers.iter_mut().enumerate() {
        let w_std = match (l, arch.input_scaling) {
            (0, InputScaling::Variance) => h.sw0 / (arch.d_in as f64).sqrt(),
            _ => h.sw(l),
        };
        rng.fill_normal(layer.weight.as_slice_mut().expect("standard layout"), w_std);
        rng.fill_normal(layer.bias.as_slice_mut().expect("standard layout"), h.sb(l));
    }
    Ok(p)
}
