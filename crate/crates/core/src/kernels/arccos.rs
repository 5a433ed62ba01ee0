//! Gaussian expectations of ReLU and its derivative.
//!
//! For `(u, v)` centred Gaussian with `E[u²] = kxx`, `E[uv] = kxy`,
//! `E[v²] = kyy` and angle `δ = arccos(kxy / √(kxx·kyy))`:
//!
//! ```text
//! q = E[relu(u)·relu(v)]   = √(kxx·kyy)·(sin δ + (π − δ)·cos δ) / 2π
//! d = E[step(u)·step(v)]   = (π − δ) / 2π
//! ```

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Correlations may overshoot ±1 by this much before we call it an error.
pub const CORRELATION_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcCosStats {
    /// Angle in `[0, π]`.
    pub delta: f64,
    /// ReLU–ReLU moment.
    pub q: f64,
    /// Step–step moment, in `[0, ½]`.
    pub d: f64,
}

pub fn arc_moments(kxx: f64, kxy: f64, kyy: f64) -> Result<ArcCosStats> {
    let invalid = || Error::InvalidMoment { kxx, kxy, kyy };
    if !(kxx > 0.0 && kyy > 0.0 && kxx.is_finite() && kyy.is_finite() && kxy.is_finite()) {
        return Err(invalid());
    }
    let norm = (kxx * kyy).sqrt();
    let rho = kxy / norm;
    if rho.abs() > 1.0 + CORRELATION_SLACK {
        return Err(invalid());
    }
    // δ from atan2 of (sine, cosine) parts; arccos(ρ) loses half the digits
    // near ρ = ±1 and identical inputs must give δ = 0 exactly.
    let sin_part = (kxx * kyy - kxy * kxy).max(0.0).sqrt();
    let delta = sin_part.atan2(kxy);
    let (sin_d, cos_d) = delta.sin_cos();
    Ok(ArcCosStats {
        delta,
        q: norm * (sin_d + (PI - delta) * cos_d) / (2.0 * PI),
        d: (PI - delta) / (2.0 * PI),
    })
}
