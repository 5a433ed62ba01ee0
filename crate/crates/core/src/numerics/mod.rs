//! Random streams, SPD factorization and Gaussian sampling.
//!
//! Everything here is `f64`: Gram matrices of size 1000 at zero ridge are
//! close to singular and single precision is not enough.

mod mvn;
mod rng;
mod spd;

pub use mvn::{sample_mvn, sample_with_factor};
pub use rng::{stream_id, Purpose, RngStream};
pub(crate) use spd::dot;
pub use spd::{cholesky_psd, solve_refined, solve_spd, Cholesky, JitterSchedule, SpdMatrix};
