use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use super::config::{Normalization, SimConfig};
use crate::error::{Error, Result};
use crate::kernels::{gram_matrix, KernelHyperParams};
use crate::numerics::{sample_mvn, JitterSchedule, Purpose, RngStream};
use crate::parallel::Workers;

/// Simulated design, responses and split. Rows of `x` are observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    pub train_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
    /// Jitter needed to factor the ground-truth covariance.
    pub jitter: f64,
}

impl Dataset {
    pub fn train_x(&self) -> Array2<f64> {
        self.x.select(Axis(0), &self.train_idx)
    }

    pub fn train_y(&self) -> Array1<f64> {
        self.y.select(Axis(0), &self.train_idx)
    }

    pub fn test_x(&self) -> Array2<f64> {
        self.x.select(Axis(0), &self.test_idx)
    }

    pub fn test_y(&self) -> Array1<f64> {
        self.y.select(Axis(0), &self.test_idx)
    }

    pub fn n_obs(&self) -> usize {
        self.x.nrows()
    }
}

/// Uniform draws, observation-major: observation `i` takes draws
/// `i·d_in .. (i+1)·d_in`.
fn draw_design(cfg: &SimConfig, rng: &mut RngStream) -> Array2<f64> {
    Array2::from_shape_fn((cfg.n_obs, cfg.d_in), |_| {
        rng.uniform(cfg.uniform_low, cfg.uniform_high)
    })
}

/// Scales every lane along `axis` to unit norm. All-zero lanes are left as
/// they are.
fn normalize_lanes(x: &mut Array2<f64>, axis: Axis) {
    for mut lane in x.lanes_mut(axis) {
        let norm = lane.dot(&lane).sqrt();
        if norm > 0.0 {
            lane /= norm;
        }
    }
}

pub fn normalize(x: &mut Array2<f64>, how: Normalization) {
    match how {
        Normalization::Observation => normalize_lanes(x, Axis(1)),
        Normalization::Feature => normalize_lanes(x, Axis(0)),
    }
}

/// Seeded shuffle of `0..n`; the first `n_train` indices train, the rest
/// test. Both lists are returned sorted.
pub fn split_indices(n: usize, n_train: usize, rng: &mut RngStream) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut idx);
    let mut train = idx[..n_train].to_vec();
    let mut test = idx[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Draws a design, normalises it, samples `y ~ N(0, H)` with `H` the
/// ground-truth Gram matrix over all observations, and splits.
///
/// Randomness comes from the trial's `Data` stream (design, then `y`) and
/// its `Split` stream.
pub fn simulate_dataset(
    cfg: &SimConfig,
    h: &KernelHyperParams,
    trial_id: u64,
    workers: Workers,
) -> Result<Dataset> {
    cfg.validate()?;
    if h.d_in != cfg.d_in {
        return Err(Error::dims("simulate_dataset d_in", cfg.d_in, h.d_in));
    }
    let mut rng = RngStream::for_trial(cfg.master_seed, trial_id, Purpose::Data, 0);
    let mut x = draw_design(cfg, &mut rng);
    normalize(&mut x, cfg.normalization);
    let gram = gram_matrix(cfg.ground_truth, h, x.view(), workers)?;
    let (y, jitter) = sample_mvn(&gram.matrix, &JitterSchedule::default(), &mut rng)?;
    let mut split_rng = RngStream::for_trial(cfg.master_seed, trial_id, Purpose::Split, 0);
    let (train_idx, test_idx) = split_indices(cfg.n_obs, cfg.n_train(), &mut split_rng);
    Ok(Dataset {
        x,
        y: Array1::from(y),
        train_idx,
        test_idx,
        jitter,
    })
}

/// Largest deviation of a row norm from 1.
pub fn max_row_norm_error(x: ArrayView2<f64>) -> f64 {
    x.rows()
        .into_iter()
        .map(|r: ArrayView1<f64>| (r.dot(&r).sqrt() - 1.0).abs())
        .fold(0.0, f64::max)
}
