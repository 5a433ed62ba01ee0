use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constants shared by the closed-form kernels and the finite networks.
///
/// `sw*`/`sb*` are standard deviations; the formulas use their squares.
/// Index 0 is the input layer, 1 the first hidden layer, 2 the second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelHyperParams {
    pub c1: f64,
    pub c2: f64,
    pub sw0: f64,
    pub sw1: f64,
    pub sw2: f64,
    pub sb0: f64,
    pub sb1: f64,
    pub sb2: f64,
    pub lap_a: f64,
    pub lap_b: f64,
    pub d_in: usize,
}

impl Default for KernelHyperParams {
    fn default() -> Self {
        Self {
            c1: 2.0,
            c2: 2.0,
            sw0: 1.0,
            sw1: 1.0,
            sw2: 1.0,
            sb0: 1.0,
            sb1: 1.0,
            sb2: 1.0,
            lap_a: 2.0,
            lap_b: 6.0,
            d_in: 15,
        }
    }
}

impl KernelHyperParams {
    pub fn with_d_in(d_in: usize) -> Self {
        Self {
            d_in,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("c1", self.c1),
            ("c2", self.c2),
            ("sw0", self.sw0),
            ("sw1", self.sw1),
            ("sw2", self.sw2),
            ("lap_a", self.lap_a),
            ("lap_b", self.lap_b),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        for (name, v) in [("sb0", self.sb0), ("sb1", self.sb1), ("sb2", self.sb2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if self.d_in == 0 {
            return Err(Error::InvalidConfig("d_in must be positive".into()));
        }
        Ok(())
    }

    /// Variance-adjust constant `c_ℓ` for hidden layer `ℓ` (1-based).
    pub fn c(&self, layer: usize) -> f64 {
        match layer {
            1 => self.c1,
            2 => self.c2,
            _ => panic!("no variance constant for layer {layer}"),
        }
    }

    /// Weight standard deviation for layer `ℓ` (0 = input weights).
    pub fn sw(&self, layer: usize) -> f64 {
        [self.sw0, self.sw1, self.sw2][layer]
    }

    /// Bias standard deviation for layer `ℓ`.
    pub fn sb(&self, layer: usize) -> f64 {
        [self.sb0, self.sb1, self.sb2][layer]
    }
}
