//! Pointwise kernel evaluation.
//!
//! Every function checks that both inputs have exactly `h.d_in` entries; the
//! `1/n₀` factors come from `h.d_in`, never from the slice length.

use super::arccos::{arc_moments, ArcCosStats};
use super::hyper::KernelHyperParams;
use super::id::{KernelFamily, KernelId};
use crate::error::{Error, Result};
use crate::numerics::dot;

fn check_dims(x: &[f64], y: &[f64], h: &KernelHyperParams) -> Result<()> {
    if x.len() != h.d_in {
        return Err(Error::dims("kernel input x", h.d_in, x.len()));
    }
    if y.len() != h.d_in {
        return Err(Error::dims("kernel input y", h.d_in, y.len()));
    }
    Ok(())
}

fn check_depth(depth: u8) -> Result<()> {
    match depth {
        1 | 2 => Ok(()),
        _ => Err(Error::InvalidConfig(format!(
            "depth must be 1 or 2, got {depth}"
        ))),
    }
}

/// Second moments of a pair of pre-activations at one layer.
#[derive(Debug, Clone, Copy)]
struct PairCov {
    xx: f64,
    xy: f64,
    yy: f64,
}

impl PairCov {
    fn moments(&self) -> Result<ArcCosStats> {
        arc_moments(self.xx, self.xy, self.yy)
    }

    /// Self-moment `q(k, k, k)`, evaluated through the same code path as the
    /// cross term so that identical inputs stay bit-identical.
    fn self_q(k: f64) -> Result<f64> {
        Ok(arc_moments(k, k, k)?.q)
    }
}

/// Input-layer covariance `K⁽⁰⁾ = σ²_{w,0}/n₀·⟨x,y⟩ + σ²_{b,0}` and the
/// first hidden layer `K⁽¹⁾ = σ²_{b,1} + c₁σ²_{w,1}·q₀`.
struct NngpChain {
    inner: f64,
    s0: ArcCosStats,
    k1: PairCov,
}

fn nngp_chain(x: &[f64], y: &[f64], h: &KernelHyperParams) -> Result<NngpChain> {
    let w0 = h.sw0 * h.sw0 / h.d_in as f64;
    let b0 = h.sb0 * h.sb0;
    let inner = dot(x, y);
    let k0 = PairCov {
        xx: w0 * dot(x, x) + b0,
        xy: w0 * inner + b0,
        yy: w0 * dot(y, y) + b0,
    };
    let s0 = k0.moments()?;
    let lift = |q: f64| h.sb1 * h.sb1 + h.c1 * h.sw1 * h.sw1 * q;
    let k1 = PairCov {
        xx: lift(PairCov::self_q(k0.xx)?),
        xy: lift(s0.q),
        yy: lift(PairCov::self_q(k0.yy)?),
    };
    Ok(NngpChain { inner, s0, k1 })
}

/// Bias-aware NTK of the network with `N(0, σ²_{w,0}/n₀)` input weights and
/// `√(c_ℓ/n_ℓ)` hidden-layer scaling.
pub fn ntkb(x: &[f64], y: &[f64], depth: u8, h: &KernelHyperParams) -> Result<f64> {
    check_dims(x, y, h)?;
    check_depth(depth)?;
    let chain = nngp_chain(x, y, h)?;
    let (q0, d0) = (chain.s0.q, chain.s0.d);
    let (c1, w1) = (h.c1, h.sw1 * h.sw1);
    if depth == 1 {
        return Ok(1.0 + c1 * q0 + c1 * w1 * d0 + c1 * w1 * chain.inner * d0);
    }
    let s1 = chain.k1.moments()?;
    let (q1, d1) = (s1.q, s1.d);
    let (c2, w2) = (h.c2, h.sw2 * h.sw2);
    Ok(1.0
        + c2 * w2 * d1
        + c1 * c2 * w1 * w2 * (1.0 + chain.inner) * d1 * d0
        + c1 * c2 * w2 * d1 * q0
        + c2 * q1)
}

/// NNGP covariance `K⁽ᵈᵉᵖᵗʰ⁾(x, y)` of the untrained network.
pub fn gp_kernel(x: &[f64], y: &[f64], depth: u8, h: &KernelHyperParams) -> Result<f64> {
    check_dims(x, y, h)?;
    check_depth(depth)?;
    let chain = nngp_chain(x, y, h)?;
    if depth == 1 {
        return Ok(chain.k1.xy);
    }
    let q1 = chain.k1.moments()?.q;
    Ok(h.sb2 * h.sb2 + h.c2 * h.sw2 * h.sw2 * q1)
}

/// Layer recursion `Θ⁽ℓ⁾ = Σ⁽ℓ⁾ + Θ⁽ℓ⁻¹⁾·Σ̇⁽ℓ⁾` with
/// `Σ⁽ℓ⁾ = 2·q(Σ⁽ℓ⁻¹⁾) + bias` and `Σ̇⁽ℓ⁾ = 2·d(Σ⁽ℓ⁻¹⁾)`, starting from
/// `Θ⁽⁰⁾ = Σ⁽⁰⁾`.
fn arccos_ntk_recursion(mut sigma: PairCov, depth: u8, bias: f64) -> Result<f64> {
    let mut theta = sigma.xy;
    for _ in 0..depth {
        let s = sigma.moments()?;
        let next = PairCov {
            xx: 2.0 * PairCov::self_q(sigma.xx)? + bias,
            xy: 2.0 * s.q + bias,
            yy: 2.0 * PairCov::self_q(sigma.yy)? + bias,
        };
        theta = next.xy + theta * 2.0 * s.d;
        sigma = next;
    }
    Ok(theta)
}

/// Jacot-style NTK: `Σ⁽⁰⁾ = ⟨x,y⟩/n₀ + 1`, unit variances, unit biases.
pub fn ntkj(x: &[f64], y: &[f64], depth: u8, h: &KernelHyperParams) -> Result<f64> {
    check_dims(x, y, h)?;
    check_depth(depth)?;
    let n0 = h.d_in as f64;
    let sigma = PairCov {
        xx: dot(x, x) / n0 + 1.0,
        xy: dot(x, y) / n0 + 1.0,
        yy: dot(y, y) / n0 + 1.0,
    };
    arccos_ntk_recursion(sigma, depth, 1.0)
}

/// Bias-free NTK with `Σ⁽⁰⁾ = ⟨x,y⟩`. Fails on zero inputs.
pub fn ntka(x: &[f64], y: &[f64], depth: u8, h: &KernelHyperParams) -> Result<f64> {
    check_dims(x, y, h)?;
    check_depth(depth)?;
    let sigma = PairCov {
        xx: dot(x, x),
        xy: dot(x, y),
        yy: dot(y, y),
    };
    arccos_ntk_recursion(sigma, depth, 0.0)
}

pub fn laplacian(x: &[f64], y: &[f64], h: &KernelHyperParams) -> Result<f64> {
    check_dims(x, y, h)?;
    let dist = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok(h.lap_a * (-dist / h.lap_b).exp())
}

impl KernelId {
    pub fn eval(&self, x: &[f64], y: &[f64], h: &KernelHyperParams) -> Result<f64> {
        let depth = self.depth();
        match self.family() {
            KernelFamily::Ntkb => ntkb(x, y, depth, h),
            KernelFamily::Ntkj => ntkj(x, y, depth, h),
            KernelFamily::Ntka => ntka(x, y, depth, h),
            KernelFamily::Gp => gp_kernel(x, y, depth, h),
            KernelFamily::Laplace => laplacian(x, y, h),
        }
    }
}
