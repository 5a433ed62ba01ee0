//! WebAssembly bindings for the static page in `www/`.
//!
//! All inputs live on the unit circle embedded in the first two coordinates
//! of `R^d`, so every curve is a function of one angle. Functions return
//! flat `f64` arrays; layouts are documented per function.

use std::f64::consts::PI;

use ndarray::Array2;
use ntk_equiv::kernels::{KernelHyperParams, KernelId};
use ntk_equiv::krr;
use ntk_equiv::nn::{empirical_ntk, init_network, NetworkArch};
use ntk_equiv::numerics::{sample_mvn, JitterSchedule, RngStream};
use ntk_equiv::parallel::Workers;

fn point(angle: f64, d_in: usize) -> Vec<f64> {
    let mut v = vec![0.0; d_in];
    v[0] = angle.cos();
    v[1] = angle.sin();
    v
}

fn kernel(name: &str) -> Result<KernelId, String> {
    name.parse().map_err(|e: ntk_equiv::Error| e.to_string())
}

fn hyper(d_in: usize) -> Result<KernelHyperParams, String> {
    if d_in < 2 {
        return Err("d_in must be at least 2".into());
    }
    Ok(KernelHyperParams::with_d_in(d_in))
}

fn js(e: ntk_equiv::Error) -> String {
    e.to_string()
}

/// `k(e₁, u(θ))` for `θ` on `points` equally spaced angles in `[0, π]`.
pub fn kernel_curve(name: &str, d_in: usize, points: usize) -> Result<Vec<f64>, String> {
    let k = kernel(name)?;
    let h = hyper(d_in)?;
    let x = point(0.0, d_in);
    let steps = points.max(2) - 1;
    (0..=steps)
        .map(|i| {
            k.eval(&x, &point(PI * i as f64 / steps as f64, d_in), &h)
                .map_err(js)
        })
        .collect()
}

/// Draws `n_train` angles, samples responses from the NTKB1 Gaussian
/// process, fits kernel ridge regression with `name` and evaluates on a
/// grid of `grid` angles in `[0, 2π)`.
///
/// Layout: `[train angles | train y | grid truth | grid prediction]`, the
/// truth being the same Gaussian-process draw as the training responses.
pub fn krr_circle_fit(
    name: &str,
    n_train: usize,
    lambda: f64,
    seed: u64,
    grid: usize,
) -> Result<Vec<f64>, String> {
    let k = kernel(name)?;
    let d_in = 2;
    let h = hyper(d_in)?;
    if n_train == 0 || grid == 0 {
        return Err("need at least one training and one grid point".into());
    }
    let mut rng = RngStream::new(seed, 1);
    let train: Vec<f64> = (0..n_train).map(|_| rng.uniform(0.0, 2.0 * PI)).collect();
    let grid_angles: Vec<f64> = (0..grid)
        .map(|i| 2.0 * PI * i as f64 / grid as f64)
        .collect();
    let all: Vec<f64> = train.iter().chain(&grid_angles).copied().collect();
    let design = Array2::from_shape_fn((all.len(), d_in), |(i, j)| point(all[i], d_in)[j]);
    let truth_gram =
        ntk_equiv::kernels::gram_matrix(KernelId::NTKB1, &h, design.view(), Workers::Serial)
            .map_err(js)?;
    let (y, _) =
        sample_mvn(&truth_gram.matrix, &JitterSchedule::default(), &mut rng).map_err(js)?;

    let x_train = design.slice(ndarray::s![..n_train, ..]).to_owned();
    let y_train = ndarray::Array1::from(y[..n_train].to_vec());
    let gram =
        ntk_equiv::kernels::gram_matrix(k, &h, x_train.view(), Workers::Serial).map_err(js)?;
    let model = krr::fit(
        &gram,
        x_train.view(),
        y_train.view(),
        lambda,
        &JitterSchedule::default(),
    )
    .map_err(js)?;
    let x_grid = design.slice(ndarray::s![n_train.., ..]);
    let pred = model.predict(x_grid, Workers::Serial).map_err(js)?;

    let mut out = train;
    out.extend_from_slice(&y[..n_train]);
    out.extend_from_slice(&y[n_train..]);
    out.extend(pred.iter());
    Ok(out)
}

/// Empirical NTK of `inits` freshly initialised one-hidden-layer networks of
/// the given width, between `e₁` and `u(θ)` on `points` angles in `[0, π]`,
/// next to the closed-form NTKB1.
///
/// Layout: `[ntkb1 curve | init 0 curve | init 1 curve | …]`.
pub fn empirical_ntk_curves(
    width: usize,
    inits: usize,
    d_in: usize,
    points: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let h = hyper(d_in)?;
    let arch = NetworkArch::uniform(d_in, width.max(1), 1).map_err(js)?;
    let x = point(0.0, d_in);
    let steps = points.max(2) - 1;
    let ys: Vec<Vec<f64>> = (0..=steps)
        .map(|i| point(PI * i as f64 / steps as f64, d_in))
        .collect();
    let mut out: Vec<f64> = ys
        .iter()
        .map(|y| KernelId::NTKB1.eval(&x, y, &h).map_err(js))
        .collect::<Result<_, _>>()?;
    for i in 0..inits {
        let mut rng = RngStream::new(seed, i as u64);
        let p = init_network(&arch, &h, &mut rng).map_err(js)?;
        for y in &ys {
            out.push(
                empirical_ntk(&arch, &p, &h, x.as_slice().into(), y.as_slice().into())
                    .map_err(js)?,
            );
        }
    }
    Ok(out)
}

/// JavaScript entry points; errors become thrown `Error`s.
pub mod bindings {
    use wasm_bindgen::prelude::*;

    fn js(e: String) -> JsError {
        JsError::new(&e)
    }

    #[wasm_bindgen(js_name = kernelCurve)]
    pub fn kernel_curve(name: &str, d_in: usize, points: usize) -> Result<Vec<f64>, JsError> {
        super::kernel_curve(name, d_in, points).map_err(js)
    }

    #[wasm_bindgen(js_name = krrCircleFit)]
    pub fn krr_circle_fit(
        name: &str,
        n_train: usize,
        lambda: f64,
        seed: u32,
        grid: usize,
    ) -> Result<Vec<f64>, JsError> {
        super::krr_circle_fit(name, n_train, lambda, seed.into(), grid).map_err(js)
    }

    #[wasm_bindgen(js_name = empiricalNtkCurves)]
    pub fn empirical_ntk_curves(
        width: usize,
        inits: usize,
        d_in: usize,
        points: usize,
        seed: u32,
    ) -> Result<Vec<f64>, JsError> {
        super::empirical_ntk_curves(width, inits, d_in, points, seed.into()).map_err(js)
    }
}
