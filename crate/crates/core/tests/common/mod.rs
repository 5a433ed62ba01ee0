#![allow(dead_code)]

use ndarray::Array1;
use ntk_equiv::kernels::KernelHyperParams;
use ntk_equiv::nn::{
    forward, init_network, output_gradient, InputScaling, NetworkArch, NetworkParams,
};
use ntk_equiv::numerics::RngStream;

pub const FD_STEP: f64 = 1e-5;

pub struct GradientCase {
    pub arch: NetworkArch,
    pub params: NetworkParams,
    pub hyper: KernelHyperParams,
    pub x: Array1<f64>,
}

impl GradientCase {
    /// Random small network and input; hyperparameters off their defaults
    /// so every constant is exercised.
    pub fn new(d_in: usize, widths: Vec<usize>, forward_scaling: bool, seed: u64) -> Self {
        let scaling = if forward_scaling {
            InputScaling::Forward
        } else {
            InputScaling::Variance
        };
        let arch = NetworkArch::new(d_in, widths)
            .unwrap()
            .with_input_scaling(scaling);
        let hyper = KernelHyperParams {
            c1: 1.5,
            sw1: 0.8,
            sb2: 0.3,
            ..KernelHyperParams::with_d_in(d_in)
        };
        let mut rng = RngStream::new(seed, 0);
        let params = init_network(&arch, &hyper, &mut rng).unwrap();
        let x = Array1::from_shape_fn(d_in, |_| rng.uniform(-1.0, 1.0));
        Self {
            arch,
            params,
            hyper,
            x,
        }
    }

    fn output(&self, p: &NetworkParams) -> (f64, Vec<bool>) {
        let (out, cache) = forward(&self.arch, p, &self.hyper, self.x.view()).unwrap();
        let signs = cache
            .pre
            .iter()
            .flat_map(|z| z.iter().map(|&v| v > 0.0))
            .collect();
        (out, signs)
    }

    pub fn backprop(&self) -> Vec<f64> {
        output_gradient(&self.arch, &self.params, &self.hyper, self.x.view())
            .unwrap()
            .to_flat()
    }

    /// Central differences over every parameter. Coordinates whose ±step
    /// perturbation flips a ReLU are `None`.
    pub fn finite_differences(&self) -> Vec<Option<f64>> {
        let (_, base) = self.output(&self.params);
        let flat = self.params.to_flat();
        (0..flat.len())
            .map(|i| {
                let mut plus = flat.clone();
                plus[i] += FD_STEP;
                let mut minus = flat.clone();
                minus[i] -= FD_STEP;
                let (fp, sp) = self.output(&NetworkParams::from_flat(&self.arch, &plus).unwrap());
                let (fm, sm) = self.output(&NetworkParams::from_flat(&self.arch, &minus).unwrap());
                (sp == base && sm == base).then(|| (fp - fm) / (2.0 * FD_STEP))
            })
            .collect()
    }

    /// `‖g − g_fd‖ / ‖g_fd‖` over the coordinates without a kink crossing.
    pub fn relative_error(&self) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for (g, f) in self.backprop().iter().zip(self.finite_differences()) {
            if let Some(f) = f {
                num += (g - f) * (g - f);
                den += f * f;
            }
        }
        num.sqrt() / den.sqrt().max(1e-12)
    }
}

/// Unit vector with entries drawn uniformly from [-5, 7].
pub fn unit_vector(d: usize, rng: &mut RngStream) -> Vec<f64> {
    let v: Vec<f64> = (0..d).map(|_| rng.uniform(-5.0, 7.0)).collect();
    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / n).collect()
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}
