use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{KernelHyperParams, KernelId};
use crate::nn::{InputScaling, TrainConfig};
use crate::parallel::Workers;

/// How the raw uniform draws are scaled before use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Every observation is scaled to unit Euclidean norm.
    #[default]
    Observation,
    /// Every feature (a row of the `d_in × n_obs` draw) is scaled to unit
    /// norm across observations. Observations are then not unit length.
    Feature,
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "observation" => Ok(Self::Observation),
            "feature" => Ok(Self::Feature),
            _ => Err(Error::InvalidConfig(format!(
                "unknown normalization `{s}` (expected observation or feature)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub d_in: usize,
    pub n_obs: usize,
    pub n_trials: usize,
    pub uniform_low: f64,
    pub uniform_high: f64,
    pub test_fraction: f64,
    pub ground_truth: KernelId,
    pub master_seed: u64,
    #[serde(default)]
    pub normalization: Normalization,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            d_in: 15,
            n_obs: 1000,
            n_trials: 50,
            uniform_low: -5.0,
            uniform_high: 7.0,
            test_fraction: 1.0 / 3.0,
            ground_truth: KernelId::NTKB1,
            master_seed: 1,
            normalization: Normalization::Observation,
        }
    }
}

impl SimConfig {
    /// Test-set size, `round(n_obs · test_fraction)`.
    pub fn n_test(&self) -> usize {
        (self.n_obs as f64 * self.test_fraction).round() as usize
    }

    pub fn n_train(&self) -> usize {
        self.n_obs - self.n_test().min(self.n_obs)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_in == 0 {
            return Err(Error::InvalidConfig("d_in must be positive".into()));
        }
        if self.n_trials == 0 {
            return Err(Error::InvalidConfig(
                "number of trials must be positive".into(),
            ));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "test fraction must lie in (0, 1), got {}",
                self.test_fraction
            )));
        }
        if !(self.uniform_low.is_finite()
            && self.uniform_high.is_finite()
            && self.uniform_low < self.uniform_high)
        {
            return Err(Error::InvalidConfig(format!(
                "uniform range [{}, {}] is empty",
                self.uniform_low, self.uniform_high
            )));
        }
        if self.n_test() == 0 || self.n_train() == 0 {
            return Err(Error::InvalidConfig(format!(
                "{} observations leave an empty train or test split",
                self.n_obs
            )));
        }
        Ok(())
    }
}

/// A model compared in a trial: one of the nine kernel predictors or a
/// trained network with one or two hidden layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ModelSpec {
    Kernel(KernelId),
    Network { depth: u8 },
}

impl ModelSpec {
    pub const NN1: Self = Self::Network { depth: 1 };
    pub const NN2: Self = Self::Network { depth: 2 };

    /// The eleven models in reporting order.
    pub fn all() -> Vec<Self> {
        let mut v: Vec<Self> = KernelId::ALL.iter().map(|&k| Self::Kernel(k)).collect();
        v.extend([Self::NN1, Self::NN2]);
        v
    }

    pub fn is_network(&self) -> bool {
        matches!(self, Self::Network { .. })
    }

    /// Comma-separated list; `all` expands to every model. Duplicates are
    /// rejected.
    pub fn parse_list(s: &str) -> Result<Vec<Self>> {
        if s.trim() == "all" {
            return Ok(Self::all());
        }
        let mut out: Vec<Self> = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let m: Self = part.parse()?;
            if out.contains(&m) {
                return Err(Error::InvalidConfig(format!("model `{part}` listed twice")));
            }
            out.push(m);
        }
        Ok(out)
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Kernel(k) => write!(f, "{k}"),
            Self::Network { depth } => write!(f, "nn{depth}"),
        }
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nn1" => Ok(Self::NN1),
            "nn2" => Ok(Self::NN2),
            _ => s.parse::<KernelId>().map(Self::Kernel).map_err(|_| {
                Error::InvalidConfig(format!(
                    "unknown model `{s}` (expected one of ntkb1, ntkb2, ntkj1, ntkj2, ntka1, ntka2, gp1, gp2, k1, nn1, nn2)"
                ))
            }),
        }
    }
}

impl TryFrom<String> for ModelSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ModelSpec> for String {
    fn from(m: ModelSpec) -> Self {
        m.to_string()
    }
}

/// Settings of the trained networks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkSettings {
    pub width: usize,
    #[serde(default)]
    pub input_scaling: InputScaling,
    pub train1: TrainConfig,
    pub train2: TrainConfig,
}

impl Default for NetworkSettings {
    fn default() -> Self {
        Self {
            width: 10_000,
            input_scaling: InputScaling::Variance,
            train1: TrainConfig::for_depth(1),
            train2: TrainConfig::for_depth(2),
        }
    }
}

impl NetworkSettings {
    pub fn train_config(&self, depth: u8) -> &TrainConfig {
        if depth >= 2 {
            &self.train2
        } else {
            &self.train1
        }
    }
}

/// Everything a multi-trial comparison needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub sim: SimConfig,
    pub hyper: KernelHyperParams,
    pub models: Vec<ModelSpec>,
    /// Ridge added to every kernel Gram matrix (0 gives the interpolating
    /// kernel predictor).
    pub lambda: f64,
    pub network: NetworkSettings,
    #[serde(default)]
    pub workers: Workers,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sim: SimConfig::default(),
            hyper: KernelHyperParams::default(),
            models: ModelSpec::all(),
            lambda: 0.0,
            network: NetworkSettings::default(),
            workers: Workers::Ambient,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        self.hyper.validate()?;
        if self.hyper.d_in != self.sim.d_in {
            return Err(Error::InvalidConfig(format!(
                "kernel d_in {} differs from simulation d_in {}",
                self.hyper.d_in, self.sim.d_in
            )));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "lambda must be non-negative, got {}",
                self.lambda
            )));
        }
        if self.models.iter().any(ModelSpec::is_network) {
            if self.network.width == 0 {
                return Err(Error::InvalidConfig(
                    "network width must be positive".into(),
                ));
            }
            self.network.train1.validate()?;
            self.network.train2.validate()?;
        }
        Ok(())
    }
}
