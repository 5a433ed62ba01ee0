use super::rng::RngStream;
use super::spd::{cholesky_psd, Cholesky, JitterSchedule, SpdMatrix};
use crate::error::Result;

/// One draw from N(0, cov + ε·I): `L·z` with `z` i.i.d. standard normal.
/// Returns the draw and the jitter `ε` that made `cov` factorizable.
pub fn sample_mvn(
    cov: &SpdMatrix,
    schedule: &JitterSchedule,
    rng: &mut RngStream,
) -> Result<(Vec<f64>, f64)> {
    let chol = cholesky_psd(cov, schedule)?;
    let draw = sample_with_factor(&chol, rng)?;
    Ok((draw, chol.jitter()))
}

/// Draw using an existing factor; use this to amortise one factorization
/// over many samples.
pub fn sample_with_factor(chol: &Cholesky, rng: &mut RngStream) -> Result<Vec<f64>> {
    let z: Vec<f64> = (0..chol.order()).map(|_| rng.standard_normal()).collect();
    chol.mul_lower(&z)
}
